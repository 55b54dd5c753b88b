//! Geodesic nets on the sphere: the traces of two-dimensional cones.

mod builders;
mod hausdorff;
mod io;
mod validate;

pub use builders::{build_circle, build_cube, build_plane, build_t, build_union, build_y};
pub use hausdorff::{normalized_hausdorff_distance, normalized_hausdorff_distance_with_step};
pub use io::{from_json, to_json, to_obj, NET_FORMAT_VERSION};
pub use validate::{
    validate_minimal_looking, validate_with, AngleDefect, DegreeDefect, SeparationDefect, ShortArc,
    ValidationReport,
};

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{self, combine, dot, norm, sub, GeometryError, UnitVector};
use crate::tolerances::{DEGENERATE_CHORD, MAX_ARC};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("arc {arc:?} references unknown vertex {vertex:?}")]
    UnknownVertex { arc: String, vertex: String },
    #[error("arc {0:?} starts and ends at the same vertex")]
    LoopArc(String),
    #[error("arc {0:?} has coincident or antipodal endpoints")]
    DegenerateArc(String),
    #[error("arc {arc:?}: heading does not lead to its end vertex (miss {miss})")]
    HeadingMismatch { arc: String, miss: f64 },
    #[error("vertex {id:?} has dimension {found}, expected {expected}")]
    DimensionMismatch { id: String, expected: usize, found: usize },
    #[error("η₀ must be positive, got {0}")]
    InvalidEta0(f64),
    #[error("η₀ violated: arc {arc:?} has length {length} < 10·η₀ = {min}")]
    EtaViolated { arc: String, length: f64, min: f64 },
    #[error("vertex map has no image for vertex {0:?}")]
    MissingImage(String),
    #[error("vertex map moves {id:?} by chord {chord} > η₁ = {eta1}")]
    DisplacementTooLarge { id: String, chord: f64, eta1: f64 },
    #[error("arc {0:?} is not a minimizing geodesic; run the standard decomposition first")]
    LongArc(String),
    #[error("components {0} and {1} do not lie in orthogonal subspaces")]
    OverlappingSubspaces(usize, usize),
    #[error("union of zero nets")]
    EmptyUnion,
    #[error("invalid cone file: {0}")]
    Format(String),
    #[error("unsupported cone file version {0}")]
    UnsupportedVersion(u32),
    #[error("OBJ export needs a net inside the first three coordinates")]
    NotThreeDimensional,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    /// Triple junction.
    V0,
    /// Interior point of a longer arc, added by splitting.
    V1,
}

impl VertexKind {
    pub fn expected_degree(self) -> usize {
        match self {
            VertexKind::V0 => 3,
            VertexKind::V1 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    pub point: UnitVector,
}

impl Vertex {
    pub fn new(id: impl Into<String>, kind: VertexKind, point: UnitVector) -> Self {
        Self { id: id.into(), kind, point }
    }
}

/// A great-circle arc between two vertices.
///
/// Without a heading the arc is the minimizing geodesic between its ends.
/// With a heading it leaves `ends[0]` in that direction and runs until it
/// reaches `ends[1]`; this is how arcs of length π or more are described
/// before decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: String,
    pub ends: [usize; 2],
    heading: Option<UnitVector>,
}

impl Arc {
    pub fn geodesic(id: impl Into<String>, ends: [usize; 2]) -> Self {
        Self { id: id.into(), ends, heading: None }
    }

    pub fn directed(id: impl Into<String>, ends: [usize; 2], heading: UnitVector) -> Self {
        Self { id: id.into(), ends, heading: Some(heading) }
    }

    pub fn heading(&self) -> Option<&UnitVector> {
        self.heading.as_ref()
    }

    pub fn is_directed(&self) -> bool {
        self.heading.is_some()
    }
}

/// Parametrization of an arc as `cos(s)·start + sin(s)·dir`, `s ∈ [0, length]`.
#[derive(Debug, Clone)]
pub(crate) struct ArcFrame {
    pub start: Vec<f64>,
    pub dir: Vec<f64>,
    pub length: f64,
}

impl ArcFrame {
    pub fn point(&self, s: f64) -> Vec<f64> {
        combine(s.cos(), &self.start, s.sin(), &self.dir)
    }

    /// Closest point of the arc to `p` (Euclidean), returned as (distance, parameter).
    pub fn closest(&self, p: &[f64]) -> (f64, f64) {
        let x = dot(p, &self.start);
        let y = dot(p, &self.dir);
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi <= self.length {
            return (norm(&sub(p, &self.point(phi))), phi);
        }
        let d0 = norm(&sub(p, &self.start));
        let d1 = norm(&sub(p, &self.point(self.length)));
        if d0 <= d1 {
            (d0, 0.0)
        } else {
            (d1, self.length)
        }
    }

    /// Euclidean distance from `y` to the cone over this arc.
    pub fn cone_distance(&self, y: &[f64]) -> f64 {
        let x1 = dot(y, &self.start);
        let x2 = dot(y, &self.dir);
        let mut phi = x2.atan2(x1);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi <= self.length || x1.hypot(x2) == 0.0 {
            // Residual after removing the in-plane part.
            return y
                .iter()
                .zip(self.start.iter().zip(&self.dir))
                .map(|(yi, (si, di))| {
                    let r = yi - x1 * si - x2 * di;
                    r * r
                })
                .sum::<f64>()
                .sqrt();
        }
        let end = self.point(self.length);
        let (p0, p1) = (x1.max(0.0), dot(y, &end).max(0.0));
        let to_ray = |e: &[f64], p: f64| norm(&combine(1.0, y, -p, e));
        to_ray(&self.start, p0).min(to_ray(&end, p1))
    }
}

/// The trace `K = X ∩ ∂B` of a two-dimensional cone `X`, as a net of arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeNet {
    dimension: usize,
    eta0: f64,
    vertices: Vec<Vertex>,
    arcs: Vec<Arc>,
    incidence: Vec<Vec<(usize, usize)>>,
}

impl ConeNet {
    /// Checks ids, dimensions and arc endpoints. Junction degrees are left to
    /// [`validate_minimal_looking`], which reports them.
    pub fn new(eta0: f64, vertices: Vec<Vertex>, arcs: Vec<Arc>) -> Result<Self, NetError> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(NetError::InvalidEta0(eta0));
        }
        let dimension = vertices.first().map(|v| v.point.dim()).unwrap_or(3);
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.point.dim() != dimension {
                return Err(NetError::DimensionMismatch {
                    id: v.id.clone(),
                    expected: dimension,
                    found: v.point.dim(),
                });
            }
            if seen.insert(v.id.clone(), i).is_some() {
                return Err(NetError::DuplicateId(v.id.clone()));
            }
        }
        let mut arc_ids = HashMap::new();
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (k, a) in arcs.iter().enumerate() {
            if arc_ids.insert(a.id.clone(), k).is_some() {
                return Err(NetError::DuplicateId(a.id.clone()));
            }
            for &e in &a.ends {
                if e >= vertices.len() {
                    return Err(NetError::UnknownVertex { arc: a.id.clone(), vertex: format!("#{e}") });
                }
            }
            let [i, j] = a.ends;
            if i == j {
                return Err(NetError::LoopArc(a.id.clone()));
            }
            let (p, q) = (vertices[i].point.coords(), vertices[j].point.coords());
            match &a.heading {
                None => {
                    let d_minus = norm(&sub(p, q));
                    let d_plus = norm(&sphere::add(p, q));
                    if d_minus < DEGENERATE_CHORD || d_plus < DEGENERATE_CHORD {
                        return Err(NetError::DegenerateArc(a.id.clone()));
                    }
                }
                Some(h) => {
                    if h.dim() != dimension {
                        return Err(NetError::DimensionMismatch {
                            id: a.id.clone(),
                            expected: dimension,
                            found: h.dim(),
                        });
                    }
                    if dot(h.coords(), p).abs() > 1e-9 {
                        return Err(NetError::HeadingMismatch { arc: a.id.clone(), miss: dot(h.coords(), p).abs() });
                    }
                    let frame = directed_frame(p, h.coords(), q);
                    let miss = norm(&sub(&frame.point(frame.length), q));
                    if miss > 1e-9 || norm(&sub(p, q)) < DEGENERATE_CHORD {
                        return Err(NetError::HeadingMismatch { arc: a.id.clone(), miss });
                    }
                }
            }
            incidence[i].push((k, 0));
            incidence[j].push((k, 1));
        }
        Ok(Self { dimension, eta0, vertices, arcs, incidence })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// Same net with a different structural constant.
    pub fn with_eta0(mut self, eta0: f64) -> Result<Self, NetError> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(NetError::InvalidEta0(eta0));
        }
        self.eta0 = eta0;
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Arcs at vertex `v` as (arc index, which end of the arc sits at `v`).
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn points(&self) -> Vec<UnitVector> {
        self.vertices.iter().map(|v| v.point.clone()).collect()
    }

    pub(crate) fn arc_frame(&self, k: usize) -> ArcFrame {
        let a = &self.arcs[k];
        let p = self.vertices[a.ends[0]].point.coords();
        let q = self.vertices[a.ends[1]].point.coords();
        match &a.heading {
            Some(h) => directed_frame(p, h.coords(), q),
            None => {
                let length = 2.0 * norm(&sub(p, q)).atan2(norm(&sphere::add(p, q)));
                let t = combine(1.0, q, -dot(p, q), p);
                let nt = norm(&t);
                ArcFrame { start: p.to_vec(), dir: t.iter().map(|x| x / nt).collect(), length }
            }
        }
    }

    pub fn arc_length(&self, k: usize) -> f64 {
        let a = &self.arcs[k];
        match a.heading {
            None => {
                let p = self.vertices[a.ends[0]].point.coords();
                let q = self.vertices[a.ends[1]].point.coords();
                2.0 * norm(&sub(p, q)).atan2(norm(&sphere::add(p, q)))
            }
            Some(_) => self.arc_frame(k).length,
        }
    }

    /// Point at arc length `s` from `ends[0]`.
    pub fn arc_point(&self, k: usize, s: f64) -> Result<UnitVector, NetError> {
        Ok(UnitVector::normalize(self.arc_frame(k).point(s))?)
    }

    /// Unit tangent of arc `k` at the given end, pointing into the arc.
    pub fn arc_tangent(&self, k: usize, end: usize) -> Result<Vec<f64>, NetError> {
        let a = &self.arcs[k];
        match &a.heading {
            None => {
                let p = &self.vertices[a.ends[end]].point;
                let q = &self.vertices[a.ends[1 - end]].point;
                Ok(sphere::tangent_at(p, q)?.coords().to_vec())
            }
            Some(_) => {
                let f = self.arc_frame(k);
                if end == 0 {
                    Ok(f.dir)
                } else {
                    let (s, c) = f.length.sin_cos();
                    Ok(combine(s, &f.start, -c, &f.dir))
                }
            }
        }
    }

    /// Unit tangents at vertex `v` of all incident arcs.
    pub fn tangents_at(&self, v: usize) -> Result<Vec<Vec<f64>>, NetError> {
        self.incidence[v].iter().map(|&(k, end)| self.arc_tangent(k, end)).collect()
    }

    /// Same combinatorics with vertices moved to `points` (in vertex order).
    pub fn with_points(&self, points: Vec<UnitVector>) -> Result<ConeNet, NetError> {
        if points.len() != self.vertices.len() {
            return Err(NetError::InvalidParameter(format!(
                "{} points for {} vertices",
                points.len(),
                self.vertices.len()
            )));
        }
        if let Some(a) = self.arcs.iter().find(|a| a.is_directed()) {
            return Err(NetError::LongArc(a.id.clone()));
        }
        let vertices = self
            .vertices
            .iter()
            .zip(points)
            .map(|(v, p)| Vertex { id: v.id.clone(), kind: v.kind, point: p })
            .collect();
        ConeNet::new(self.eta0, vertices, self.arcs.clone())
    }

    /// Connected components, each as a standalone net.
    pub fn components(&self) -> Vec<ConeNet> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in &self.arcs {
            let (r0, r1) = (find(&mut parent, a.ends[0]), find(&mut parent, a.ends[1]));
            if r0 != r1 {
                parent[r0.max(r1)] = r0.min(r1);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups
            .values()
            .map(|members| {
                let mut remap = HashMap::new();
                let vertices: Vec<Vertex> = members
                    .iter()
                    .enumerate()
                    .map(|(new, &old)| {
                        remap.insert(old, new);
                        self.vertices[old].clone()
                    })
                    .collect();
                let arcs = self
                    .arcs
                    .iter()
                    .filter(|a| remap.contains_key(&a.ends[0]))
                    .map(|a| Arc {
                        id: a.id.clone(),
                        ends: [remap[&a.ends[0]], remap[&a.ends[1]]],
                        heading: a.heading.clone(),
                    })
                    .collect();
                ConeNet::new(self.eta0, vertices, arcs).expect("component of a valid net is valid")
            })
            .collect()
    }
}

fn directed_frame(p: &[f64], h: &[f64], q: &[f64]) -> ArcFrame {
    let mut length = dot(q, h).atan2(dot(q, p));
    if length <= 0.0 {
        length += TAU;
    }
    ArcFrame { start: p.to_vec(), dir: h.to_vec(), length }
}

/// Total arc length of the net.
pub fn net_length(net: &ConeNet) -> f64 {
    (0..net.arcs.len()).map(|k| net.arc_length(k)).sum()
}

/// Area of the cone over the net inside the unit ball: half the length.
pub fn net_density(net: &ConeNet) -> f64 {
    0.5 * net_length(net)
}

/// Gradient of [`net_length`] with respect to each vertex position, as
/// tangent vectors: minus the sum of the unit tangents of the incident arcs.
pub fn length_gradient(net: &ConeNet) -> Result<Vec<Vec<f64>>, NetError> {
    (0..net.vertices.len())
        .map(|v| {
            let mut g = vec![0.0; net.dimension];
            for t in net.tangents_at(v)? {
                for (gi, ti) in g.iter_mut().zip(&t) {
                    *gi -= ti;
                }
            }
            Ok(g)
        })
        .collect()
}

/// Cuts every arc longer than 9π/10 into the fewest equal pieces no longer
/// than 9π/10. New cut points become V1 vertices named `"{arc}@{k}"`, new
/// pieces are named `"{arc}#{k}"`.
pub fn standard_decompose(net: &ConeNet) -> Result<ConeNet, NetError> {
    let min = 10.0 * net.eta0;
    let mut vertices = net.vertices.clone();
    let mut arcs = Vec::with_capacity(net.arcs.len());
    for (k, a) in net.arcs.iter().enumerate() {
        let length = net.arc_length(k);
        if length < min * (1.0 - 1e-12) {
            return Err(NetError::EtaViolated { arc: a.id.clone(), length, min });
        }
        let pieces = (length / MAX_ARC).ceil().max(1.0) as usize;
        if pieces == 1 {
            arcs.push(Arc::geodesic(a.id.clone(), a.ends));
            continue;
        }
        let frame = net.arc_frame(k);
        let mut chain = vec![a.ends[0]];
        for i in 1..pieces {
            let s = length * i as f64 / pieces as f64;
            vertices.push(Vertex::new(
                format!("{}@{i}", a.id),
                VertexKind::V1,
                UnitVector::normalize(frame.point(s))?,
            ));
            chain.push(vertices.len() - 1);
        }
        chain.push(a.ends[1]);
        for (i, w) in chain.windows(2).enumerate() {
            arcs.push(Arc::geodesic(format!("{}#{}", a.id, i + 1), [w[0], w[1]]));
        }
    }
    ConeNet::new(net.eta0, vertices, arcs)
}

/// A perturbation `φ` of the vertex set: an image point for every vertex id,
/// together with the displacement budget `η₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMap {
    entries: BTreeMap<String, UnitVector>,
    eta1: f64,
}

impl VertexMap {
    pub fn new(entries: BTreeMap<String, UnitVector>, eta1: f64) -> Result<Self, NetError> {
        if !(eta1 >= 0.0 && eta1.is_finite()) {
            return Err(NetError::InvalidParameter(format!("η₁ = {eta1}")));
        }
        Ok(Self { entries, eta1 })
    }

    pub fn identity(net: &ConeNet, eta1: f64) -> Result<Self, NetError> {
        Self::from_points(net, net.points(), eta1)
    }

    /// Images listed in the net's vertex order.
    pub fn from_points(net: &ConeNet, points: Vec<UnitVector>, eta1: f64) -> Result<Self, NetError> {
        if points.len() != net.vertices.len() {
            return Err(NetError::InvalidParameter("one image per vertex required".into()));
        }
        let entries = net.vertices.iter().map(|v| v.id.clone()).zip(points).collect();
        Self::new(entries, eta1)
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn get(&self, id: &str) -> Option<&UnitVector> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> &BTreeMap<String, UnitVector> {
        &self.entries
    }

    /// Whether `η₁ < η₀/10`, the structural bound on perturbations.
    pub fn within_structural_bound(&self, eta0: f64) -> bool {
        self.eta1 < eta0 / 10.0
    }

    /// Images in the net's vertex order, checking coverage and displacement.
    pub fn images(&self, net: &ConeNet) -> Result<Vec<UnitVector>, NetError> {
        net.vertices
            .iter()
            .map(|v| {
                let img = self.entries.get(&v.id).ok_or_else(|| NetError::MissingImage(v.id.clone()))?;
                if img.dim() != net.dimension {
                    return Err(NetError::DimensionMismatch {
                        id: v.id.clone(),
                        expected: net.dimension,
                        found: img.dim(),
                    });
                }
                let chord = norm(&sub(img.coords(), v.point.coords()));
                if chord > self.eta1 {
                    return Err(NetError::DisplacementTooLarge { id: v.id.clone(), chord, eta1: self.eta1 });
                }
                Ok(img.clone())
            })
            .collect()
    }
}

/// The net `φ⋆(K)`: same combinatorics, each arc replaced by the geodesic
/// between the moved endpoints.
pub fn apply_vertex_map(net: &ConeNet, phi: &VertexMap) -> Result<ConeNet, NetError> {
    net.with_points(phi.images(net)?)
}

#[cfg(test)]
mod tests;
