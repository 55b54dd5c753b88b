use std::f64::consts::TAU;

use super::{Arc, ConeNet, NetError, Vertex, VertexKind};
use crate::sphere::{Frame, UnitVector};
use crate::tolerances::{DEFAULT_ETA0, TOL_UNIT};

fn check_frame(n: usize, frame: &Frame, needed: usize) -> Result<(), NetError> {
    if frame.dim() != n {
        return Err(NetError::InvalidParameter(format!(
            "frame has dimension {}, expected {n}",
            frame.dim()
        )));
    }
    if frame.len() < needed {
        return Err(NetError::InvalidParameter(format!(
            "frame has {} vectors, expected {needed}",
            frame.len()
        )));
    }
    Ok(())
}

/// A great circle in the plane of `frame[0..2]`, split into three arcs of
/// length 2π/3 by V1 vertices `p0, p1, p2`.
pub fn build_plane(n: usize, frame: &Frame) -> Result<ConeNet, NetError> {
    check_frame(n, frame, 2)?;
    build_circle(n, frame, &[0.0, TAU / 3.0, 2.0 * TAU / 3.0], "p")
}

/// A great circle in the plane of `frame[0..2]` with V1 vertices at the given
/// increasing angles in `[0, 2π)`. Arcs of length π or more are stored with
/// an explicit heading.
pub fn build_circle(n: usize, frame: &Frame, angles: &[f64], prefix: &str) -> Result<ConeNet, NetError> {
    check_frame(n, frame, 2)?;
    if angles.len() < 2 || angles.windows(2).any(|w| w[0] >= w[1]) || angles[0] < 0.0 || angles[angles.len() - 1] >= TAU {
        return Err(NetError::InvalidParameter(
            "circle break angles must be increasing in [0, 2π) and at least two".into(),
        ));
    }
    let vertices = angles
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let p = UnitVector::normalize(frame.combine(&[t.cos(), t.sin()]))?;
            Ok(Vertex::new(format!("{prefix}{i}"), VertexKind::V1, p))
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    let m = angles.len();
    let arcs = (0..m)
        .map(|i| {
            let j = (i + 1) % m;
            let length = if j == 0 { angles[0] + TAU - angles[i] } else { angles[j] - angles[i] };
            let id = format!("{prefix}{i}-{prefix}{j}");
            if length < std::f64::consts::PI - 1e-9 {
                Ok(Arc::geodesic(id, [i, j]))
            } else {
                let t = angles[i];
                let heading = UnitVector::normalize(frame.combine(&[-t.sin(), t.cos()]))?;
                Ok(Arc::directed(id, [i, j], heading))
            }
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    ConeNet::new(DEFAULT_ETA0, vertices, arcs)
}

/// Three half great circles from `frame[0]` to its antipode, leaving at 120°
/// in the plane of `frame[1], frame[2]`. Each half circle is split at its
/// midpoint, giving 5 vertices and 6 arcs of length π/2.
pub fn build_y(n: usize, frame: &Frame) -> Result<ConeNet, NetError> {
    check_frame(n, frame, 3)?;
    let axis = frame.vectors()[0].clone();
    let mut vertices = vec![
        Vertex::new("north", VertexKind::V0, axis.clone()),
        Vertex::new("south", VertexKind::V0, axis.negated()),
    ];
    let mut arcs = Vec::new();
    for k in 0..3 {
        let t = TAU * k as f64 / 3.0;
        let mid = UnitVector::normalize(frame.combine(&[0.0, t.cos(), t.sin()]))?;
        vertices.push(Vertex::new(format!("m{k}"), VertexKind::V1, mid));
        arcs.push(Arc::geodesic(format!("north-m{k}"), [0, k + 2]));
        arcs.push(Arc::geodesic(format!("m{k}-south"), [k + 2, 1]));
    }
    ConeNet::new(DEFAULT_ETA0, vertices, arcs)
}

/// The edges of a regular tetrahedron inscribed in the unit sphere of the
/// 3-space spanned by `frame[0..3]`.
pub fn build_t(n: usize, frame: &Frame) -> Result<ConeNet, NetError> {
    check_frame(n, frame, 3)?;
    let s = 3f64.sqrt().recip();
    let corners = [[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]];
    let vertices = corners
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let p = UnitVector::normalize(frame.combine(&[c[0] * s, c[1] * s, c[2] * s]))?;
            Ok(Vertex::new(format!("t{i}"), VertexKind::V0, p))
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    let mut arcs = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            arcs.push(Arc::geodesic(format!("t{i}-t{j}"), [i, j]));
        }
    }
    ConeNet::new(DEFAULT_ETA0, vertices, arcs)
}

/// The edges of a cube inscribed in the unit sphere of the 3-space spanned by
/// `frame[0..3]`. All junctions are balanced triple points, yet the cone is
/// not area minimizing.
pub fn build_cube(n: usize, frame: &Frame) -> Result<ConeNet, NetError> {
    check_frame(n, frame, 3)?;
    let s = 3f64.sqrt().recip();
    let sign = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    let vertices = (0..8)
        .map(|i| {
            let c = [sign(i & 1) * s, sign((i >> 1) & 1) * s, sign((i >> 2) & 1) * s];
            Ok(Vertex::new(format!("c{i}"), VertexKind::V0, UnitVector::normalize(frame.combine(&c))?))
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    let mut arcs = Vec::new();
    for i in 0..8usize {
        for bit in 0..3 {
            let j = i ^ (1 << bit);
            if i < j {
                arcs.push(Arc::geodesic(format!("c{i}-c{j}"), [i, j]));
            }
        }
    }
    ConeNet::new(DEFAULT_ETA0, vertices, arcs)
}

// Vectors whose span contains every arc of the net.
fn spanning(net: &ConeNet) -> Vec<&UnitVector> {
    net.vertices()
        .iter()
        .map(|v| &v.point)
        .chain(net.arcs().iter().filter_map(|a| a.heading()))
        .collect()
}

/// Disjoint union of nets lying in mutually orthogonal subspaces. Ids are
/// prefixed with `c{i}:` for the `i`-th component; η₀ is the smallest one.
pub fn build_union(nets: &[ConeNet]) -> Result<ConeNet, NetError> {
    let Some(first) = nets.first() else {
        return Err(NetError::EmptyUnion);
    };
    let n = first.dimension();
    for (i, a) in nets.iter().enumerate() {
        if a.dimension() != n {
            return Err(NetError::InvalidParameter(format!(
                "component {i} has dimension {}, expected {n}",
                a.dimension()
            )));
        }
        for (j, b) in nets.iter().enumerate().skip(i + 1) {
            let (sa, sb) = (spanning(a), spanning(b));
            let overlap = sa
                .iter()
                .flat_map(|u| sb.iter().map(move |v| u.dot(v).abs()))
                .fold(0.0, f64::max);
            if overlap > TOL_UNIT {
                return Err(NetError::OverlappingSubspaces(i, j));
            }
        }
    }
    let eta0 = nets.iter().map(|c| c.eta0()).fold(f64::INFINITY, f64::min);
    let mut vertices = Vec::new();
    let mut arcs = Vec::new();
    for (i, c) in nets.iter().enumerate() {
        let offset = vertices.len();
        vertices.extend(c.vertices().iter().map(|v| Vertex {
            id: format!("c{i}:{}", v.id),
            kind: v.kind,
            point: v.point.clone(),
        }));
        arcs.extend(c.arcs().iter().map(|a| Arc {
            id: format!("c{i}:{}", a.id),
            ends: [a.ends[0] + offset, a.ends[1] + offset],
            heading: a.heading.clone(),
        }));
    }
    ConeNet::new(eta0, vertices, arcs)
}
