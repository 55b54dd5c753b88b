use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Arc, ConeNet, NetError, Vertex, VertexKind};
use crate::sphere::UnitVector;

pub const NET_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    version: u32,
    dimension: usize,
    eta0: f64,
    vertices: Vec<VertexRecord>,
    arcs: Vec<ArcRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    kind: VertexKind,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcRecord {
    id: String,
    ends: [String; 2],
}

/// Serializes a net to the versioned JSON cone format. Arcs with an explicit
/// heading have no representation in the format; decompose first.
pub fn to_json(net: &ConeNet) -> Result<String, NetError> {
    if let Some(a) = net.arcs().iter().find(|a| a.is_directed()) {
        return Err(NetError::LongArc(a.id.clone()));
    }
    let file = NetFile {
        version: NET_FORMAT_VERSION,
        dimension: net.dimension(),
        eta0: net.eta0(),
        vertices: net
            .vertices()
            .iter()
            .map(|v| VertexRecord { id: v.id.clone(), kind: v.kind, coords: v.point.coords().to_vec() })
            .collect(),
        arcs: net
            .arcs()
            .iter()
            .map(|a| ArcRecord {
                id: a.id.clone(),
                ends: [net.vertices()[a.ends[0]].id.clone(), net.vertices()[a.ends[1]].id.clone()],
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| NetError::Format(e.to_string()))
}

pub fn from_json(text: &str) -> Result<ConeNet, NetError> {
    let file: NetFile = serde_json::from_str(text).map_err(|e| NetError::Format(e.to_string()))?;
    if file.version != NET_FORMAT_VERSION {
        return Err(NetError::UnsupportedVersion(file.version));
    }
    let mut index = HashMap::new();
    let mut vertices = Vec::with_capacity(file.vertices.len());
    for (i, v) in file.vertices.into_iter().enumerate() {
        if v.coords.len() != file.dimension {
            return Err(NetError::DimensionMismatch { id: v.id, expected: file.dimension, found: v.coords.len() });
        }
        index.insert(v.id.clone(), i);
        vertices.push(Vertex { id: v.id, kind: v.kind, point: UnitVector::new(v.coords)? });
    }
    let arcs = file
        .arcs
        .into_iter()
        .map(|a| {
            let look = |id: &String| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| NetError::UnknownVertex { arc: a.id.clone(), vertex: id.clone() })
            };
            Ok(Arc::geodesic(a.id.clone(), [look(&a.ends[0])?, look(&a.ends[1])?]))
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    ConeNet::new(file.eta0, vertices, arcs)
}

/// Wavefront OBJ mesh of the cone over the net, cut at `radius`: one
/// triangle fan from the origin per arc, with arcs subdivided every
/// `max_step` radians.
pub fn to_obj(net: &ConeNet, radius: f64, max_step: f64) -> Result<String, NetError> {
    if !(radius > 0.0 && max_step > 0.0) {
        return Err(NetError::InvalidParameter("radius and step must be positive".into()));
    }
    let off_space = |c: &[f64]| c.iter().skip(3).any(|x| x.abs() > 1e-12);
    if net.vertices().iter().any(|v| off_space(v.point.coords()))
        || net.arcs().iter().filter_map(|a| a.heading()).any(|h| off_space(h.coords()))
    {
        return Err(NetError::NotThreeDimensional);
    }
    let mut out = String::from("# cone over a spherical net\nv 0 0 0\n");
    let mut next = 2usize;
    for k in 0..net.arcs().len() {
        let f = net.arc_frame(k);
        let m = (f.length / max_step).ceil().max(1.0) as usize;
        let _ = writeln!(out, "o {}", net.arcs()[k].id);
        for i in 0..=m {
            let p = f.point(f.length * i as f64 / m as f64);
            let _ = writeln!(out, "v {} {} {}", radius * p[0], radius * p[1], radius * p[2]);
        }
        for i in 0..m {
            let _ = writeln!(out, "f 1 {} {}", next + i, next + i + 1);
        }
        next += m + 1;
    }
    Ok(out)
}
