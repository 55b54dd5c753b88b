//! Points, geodesics, tangents and triangles on the unit sphere S^{n-1}.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::{DEGENERATE_CHORD, TOL_TRIG, TOL_UNIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is below the minimum of 3")]
    DimensionTooSmall(usize),
    #[error("vector has norm {norm}, not within {tol} of 1")]
    NotUnit { norm: f64, tol: f64 },
    #[error("vector has a non-finite coordinate")]
    NonFinite,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("degenerate geodesic: endpoints coincide or are antipodal")]
    DegenerateGeodesic,
    #[error("degenerate side: sin l2 * sin l3 = {0}")]
    DegenerateSide(f64),
    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("frame is not orthonormal (max deviation {0})")]
    NotOrthonormal(f64),
    #[error("triangle data inconsistent with its vertices (deviation {0})")]
    InconsistentTriangle(f64),
    #[error("angles {0:?} do not determine a spherical triangle")]
    InvalidAngles([f64; 3]),
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `alpha * a + beta * b`.
pub(crate) fn combine(alpha: f64, a: &[f64], beta: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

/// Angle between two nonzero vectors, accurate near 0 and π.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let ua: Vec<f64> = a.iter().map(|x| x / na).collect();
    let ub: Vec<f64> = b.iter().map(|x| x / nb).collect();
    2.0 * norm(&sub(&ua, &ub)).atan2(norm(&add(&ua, &ub)))
}

/// A point of S^{n-1}, n ≥ 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = GeometryError;
    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

impl UnitVector {
    /// Wraps `coords` after checking dimension and norm; coordinates are kept bit for bit.
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 3 {
            return Err(GeometryError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = norm(&coords);
        if (n - 1.0).abs() > TOL_UNIT {
            return Err(GeometryError::NotUnit { norm: n, tol: TOL_UNIT });
        }
        Ok(Self(coords))
    }

    /// Scales a nonzero vector onto the sphere.
    pub fn normalize(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 3 {
            return Err(GeometryError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = norm(&coords);
        if n < 1e-300 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(Self(coords.into_iter().map(|x| x / n).collect()))
    }

    /// The `i`-th standard basis vector of R^n.
    pub fn basis(n: usize, i: usize) -> Result<Self, GeometryError> {
        if n < 3 {
            return Err(GeometryError::DimensionTooSmall(n));
        }
        if i >= n {
            return Err(GeometryError::DimensionMismatch(i + 1, n));
        }
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Ok(Self(c))
    }

    /// A uniformly distributed random point of S^{n-1}.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, GeometryError> {
        loop {
            let c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if norm(&c) > 1e-8 {
                return Self::normalize(c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn negated(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|x| -x).collect())
    }

    /// Moves along the great circle leaving `self` in the direction of the
    /// tangent vector `tangent`, by an angle equal to `|tangent|`.
    pub fn exp(&self, tangent: &[f64]) -> Result<UnitVector, GeometryError> {
        check_dim(self.dim(), tangent.len())?;
        let t = norm(tangent);
        if t == 0.0 {
            return Ok(self.clone());
        }
        let dir: Vec<f64> = tangent.iter().map(|x| x / t).collect();
        UnitVector::normalize(combine(t.cos(), &self.0, t.sin(), &dir))
    }

    /// Projects an ambient vector onto the tangent space at `self`.
    pub fn project_tangent(&self, v: &[f64]) -> Vec<f64> {
        let d = dot(&self.0, v);
        combine(1.0, v, -d, &self.0)
    }
}

fn check_dim(a: usize, b: usize) -> Result<(), GeometryError> {
    if a != b {
        Err(GeometryError::DimensionMismatch(a, b))
    } else {
        Ok(())
    }
}

/// Great-circle distance in [0, π].
///
/// Uses `2·atan2(|u−v|, |u+v|)`, which equals the clamped arccos of the inner
/// product but keeps full relative accuracy near 0 and π.
pub fn geodesic_distance(u: &UnitVector, v: &UnitVector) -> Result<f64, GeometryError> {
    check_dim(u.dim(), v.dim())?;
    Ok(2.0 * norm(&sub(&u.0, &v.0)).atan2(norm(&add(&u.0, &v.0))))
}

fn check_nondegenerate(u: &UnitVector, v: &UnitVector) -> Result<(), GeometryError> {
    check_dim(u.dim(), v.dim())?;
    if norm(&sub(&u.0, &v.0)) < DEGENERATE_CHORD || norm(&add(&u.0, &v.0)) < DEGENERATE_CHORD {
        return Err(GeometryError::DegenerateGeodesic);
    }
    Ok(())
}

/// Unit tangent at `u` of the minimizing geodesic toward `v`.
pub fn tangent_at(u: &UnitVector, v: &UnitVector) -> Result<UnitVector, GeometryError> {
    check_nondegenerate(u, v)?;
    let t = u.project_tangent(&v.0);
    let nt = norm(&t);
    if nt < DEGENERATE_CHORD {
        return Err(GeometryError::DegenerateGeodesic);
    }
    // One re-projection pass keeps ⟨t, u⟩ at rounding level.
    let t: Vec<f64> = t.iter().map(|x| x / nt).collect();
    let t = u.project_tangent(&t);
    UnitVector::normalize(t)
}

/// Point at fraction `t` of the way from `u` to `v` along the minimizing geodesic.
pub fn geodesic_point(u: &UnitVector, v: &UnitVector, t: f64) -> Result<UnitVector, GeometryError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::ParameterOutOfRange(t));
    }
    check_nondegenerate(u, v)?;
    if t == 0.0 {
        return Ok(u.clone());
    }
    if t == 1.0 {
        return Ok(v.clone());
    }
    let d = geodesic_distance(u, v)?;
    let dir = tangent_at(u, v)?;
    let s = t * d;
    UnitVector::normalize(combine(s.cos(), &u.0, s.sin(), &dir.0))
}

/// Angle at `a` between the geodesics toward `b` and toward `c`.
pub fn vertex_angle(a: &UnitVector, b: &UnitVector, c: &UnitVector) -> Result<f64, GeometryError> {
    let tb = tangent_at(a, b)?;
    let tc = tangent_at(a, c)?;
    Ok(angle_between(&tb.0, &tc.0))
}

/// An orthonormal family of vectors in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame(Vec<UnitVector>);

impl Frame {
    pub fn new(vectors: Vec<UnitVector>) -> Result<Self, GeometryError> {
        let Some(first) = vectors.first() else {
            return Err(GeometryError::NotOrthonormal(f64::NAN));
        };
        let n = first.dim();
        let mut worst: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            check_dim(n, a.dim())?;
            for b in &vectors[i + 1..] {
                worst = worst.max(a.dot(b).abs());
            }
        }
        if worst > TOL_UNIT || vectors.len() > n {
            return Err(GeometryError::NotOrthonormal(worst));
        }
        Ok(Self(vectors))
    }

    /// The first `k` standard basis vectors of R^n.
    pub fn standard(n: usize, k: usize) -> Result<Self, GeometryError> {
        Self::new((0..k).map(|i| UnitVector::basis(n, i)).collect::<Result<_, _>>()?)
    }

    /// Standard basis vectors `first..first+k` of R^n.
    pub fn standard_offset(n: usize, first: usize, k: usize) -> Result<Self, GeometryError> {
        Self::new(
            (first..first + k)
                .map(|i| UnitVector::basis(n, i))
                .collect::<Result<_, _>>()?,
        )
    }

    /// A random orthonormal `k`-frame via Gram–Schmidt on Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self, GeometryError> {
        let mut out: Vec<UnitVector> = Vec::with_capacity(k);
        while out.len() < k {
            let mut c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for e in &out {
                    let d = dot(&c, &e.0);
                    c = combine(1.0, &c, -d, &e.0);
                }
            }
            if norm(&c) > 1e-6 {
                out.push(UnitVector::normalize(c)?);
            }
        }
        Self::new(out)
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.0
    }

    /// `Σ c_i f_i` for coefficients on the frame vectors.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (c, f) in coeffs.iter().zip(&self.0) {
            for (o, x) in out.iter_mut().zip(f.coords()) {
                *o += c * x;
            }
        }
        out
    }
}

/// A spherical triangle with side `sides[i]` opposite `vertices[i]` and
/// interior angle `angles[i]` at `vertices[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalTriangle {
    vertices: [UnitVector; 3],
    sides: [f64; 3],
    angles: [f64; 3],
}

impl SphericalTriangle {
    /// Computes sides from distances and angles from tangent vectors.
    pub fn from_vertices(a: UnitVector, b: UnitVector, c: UnitVector) -> Result<Self, GeometryError> {
        let vertices = [a, b, c];
        let mut sides = [0.0; 3];
        let mut angles = [0.0; 3];
        for i in 0..3 {
            let (p, q, r) = (&vertices[i], &vertices[(i + 1) % 3], &vertices[(i + 2) % 3]);
            check_nondegenerate(q, r)?;
            sides[i] = geodesic_distance(q, r)?;
            angles[i] = vertex_angle(p, q, r)?;
        }
        Ok(Self { vertices, sides, angles })
    }

    /// Accepts externally supplied sides and angles after checking them against the vertices.
    pub fn new(vertices: [UnitVector; 3], sides: [f64; 3], angles: [f64; 3]) -> Result<Self, GeometryError> {
        let [a, b, c] = vertices;
        let t = Self::from_vertices(a, b, c)?;
        let dev = (0..3)
            .map(|i| (t.sides[i] - sides[i]).abs().max((t.angles[i] - angles[i]).abs()))
            .fold(0.0, f64::max);
        if dev > TOL_TRIG || sides.iter().any(|l| !(*l > 0.0 && *l < std::f64::consts::PI)) {
            return Err(GeometryError::InconsistentTriangle(dev));
        }
        Ok(Self { vertices: t.vertices, sides, angles })
    }

    pub fn vertices(&self) -> &[UnitVector; 3] {
        &self.vertices
    }

    pub fn sides(&self) -> [f64; 3] {
        self.sides
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }
}

/// Residuals of the spherical law of sines and law of cosines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigResidual {
    pub sines: f64,
    pub cosines: f64,
}

/// Max pairwise spread of `sin l_i / sin α_i` and the cyclic max of
/// `|cos α_i − (cos l_i − cos l_j cos l_k)/(sin l_j sin l_k)|`.
pub fn triangle_identities_residual(t: &SphericalTriangle) -> Result<TrigResidual, GeometryError> {
    let (l, a) = (t.sides, t.angles);
    let mut cosines: f64 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let denom = l[j].sin() * l[k].sin();
        if denom < 1e-12 {
            return Err(GeometryError::DegenerateSide(denom));
        }
        let predicted = (l[i].cos() - l[j].cos() * l[k].cos()) / denom;
        cosines = cosines.max((a[i].cos() - predicted).abs());
    }
    let ratios: Vec<f64> = (0..3)
        .map(|i| {
            let s = a[i].sin();
            if s < 1e-12 {
                Err(GeometryError::DegenerateSide(s))
            } else {
                Ok(l[i].sin() / s)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut sines: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            sines = sines.max((ratios[i] - ratios[j]).abs());
        }
    }
    Ok(TrigResidual { sines, cosines })
}

/// Sides of the spherical triangle with the given angles (polar law of cosines).
pub fn sides_from_angles(angles: [f64; 3]) -> Result<[f64; 3], GeometryError> {
    let sum: f64 = angles.iter().sum();
    let valid = angles.iter().all(|a| *a > 0.0 && *a < std::f64::consts::PI)
        && sum > std::f64::consts::PI
        && (0..3).all(|i| sum - 2.0 * angles[i] < std::f64::consts::PI);
    if !valid {
        return Err(GeometryError::InvalidAngles(angles));
    }
    let mut sides = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let c = (angles[i].cos() + angles[j].cos() * angles[k].cos())
            / (angles[j].sin() * angles[k].sin());
        sides[i] = c.clamp(-1.0, 1.0).acos();
    }
    Ok(sides)
}
