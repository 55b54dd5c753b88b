//! Junction deviations of perturbed nets, the push deformation and its area
//! gain, and sampled certificates of the length–deviation inequality.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cone_net::{
    length_gradient, validate_minimal_looking, ConeNet, NetError, VertexKind, VertexMap,
};
use crate::quadrature::GaussLegendre;
use crate::sphere::{angle_between, combine, dot, norm, sub, GeometryError, UnitVector};
use crate::tolerances::{ALPHA_FLOOR, CRITICAL_GRADIENT, LENGTH_NOISE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex {vertex:?} has {degree} arcs; only triple points and two-arc points are supported")]
    UnsupportedJunction { vertex: String, degree: usize },
    #[error("no deviation to exploit at vertex {0:?}")]
    NoDeviation(String),
    #[error("faces near {0:?} cannot be resolved as sectors inside the bump support")]
    FaceNotResolvable(String),
    #[error("net fails validation: {0}")]
    Validation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Deviation `α_φ(x)` at one vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexDeviation {
    pub vertex: String,
    pub kind: VertexKind,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub per_vertex: Vec<VertexDeviation>,
    pub alpha_plus: f64,
    /// Length of the perturbed net minus length of the original.
    pub length_delta: f64,
    /// `length_delta / alpha_plus²` when both are positive.
    pub ratio: Option<f64>,
}

// Raw-coordinate evaluation shared by the public functions and the sampler.

fn arc_len(p: &[f64], q: &[f64]) -> f64 {
    let mut dm = 0.0;
    let mut dp = 0.0;
    for (a, b) in p.iter().zip(q) {
        dm += (a - b) * (a - b);
        dp += (a + b) * (a + b);
    }
    2.0 * dm.sqrt().atan2(dp.sqrt())
}

fn raw_tangent(p: &[f64], q: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let t = combine(1.0, q, -dot(p, q), p);
    let nt = norm(&t);
    if nt < 1e-12 {
        return Err(GeometryError::DegenerateGeodesic);
    }
    Ok(t.into_iter().map(|x| x / nt).collect())
}

fn junction_deviation(kind: VertexKind, tangents: &[Vec<f64>]) -> f64 {
    match kind {
        VertexKind::V0 => {
            let mut s = vec![0.0; tangents[0].len()];
            for t in tangents {
                for (si, ti) in s.iter_mut().zip(t) {
                    *si += ti;
                }
            }
            norm(&s)
        }
        VertexKind::V1 => PI - angle_between(&tangents[0], &tangents[1]),
    }
}

fn check_junctions(net: &ConeNet) -> Result<(), PerturbError> {
    if let Some(a) = net.arcs().iter().find(|a| a.is_directed()) {
        return Err(NetError::LongArc(a.id.clone()).into());
    }
    for (v, vertex) in net.vertices().iter().enumerate() {
        if net.degree(v) != vertex.kind.expected_degree() {
            return Err(PerturbError::UnsupportedJunction { vertex: vertex.id.clone(), degree: net.degree(v) });
        }
    }
    Ok(())
}

fn tangents_raw(net: &ConeNet, points: &[&[f64]], v: usize) -> Result<Vec<Vec<f64>>, GeometryError> {
    net.incident(v)
        .iter()
        .map(|&(k, end)| {
            let a = &net.arcs()[k];
            raw_tangent(points[a.ends[end]], points[a.ends[1 - end]])
        })
        .collect()
}

fn deviations_raw(net: &ConeNet, points: &[&[f64]]) -> Result<Vec<f64>, GeometryError> {
    (0..net.vertices().len())
        .map(|v| Ok(junction_deviation(net.vertices()[v].kind, &tangents_raw(net, points, v)?)))
        .collect()
}

fn length_delta_raw(net: &ConeNet, base: &[&[f64]], moved: &[&[f64]]) -> f64 {
    net.arcs()
        .iter()
        .map(|a| {
            let [i, j] = a.ends;
            arc_len(moved[i], moved[j]) - arc_len(base[i], base[j])
        })
        .sum()
}

fn coords_of(points: &[UnitVector]) -> Vec<&[f64]> {
    points.iter().map(|p| p.coords()).collect()
}

/// `α_φ(x)`: for a triple point the norm of the sum of the three unit
/// tangents at `φ(x)`, for a two-arc point `π` minus the angle between them.
pub fn vertex_deviation(net: &ConeNet, phi: &VertexMap, x: &str) -> Result<f64, PerturbError> {
    let v = net.vertex_index(x).ok_or_else(|| PerturbError::UnknownVertex(x.to_string()))?;
    check_junctions(net)?;
    let images = phi.images(net)?;
    let tangents = tangents_raw(net, &coords_of(&images), v)?;
    Ok(junction_deviation(net.vertices()[v].kind, &tangents))
}

/// `α₊(φ)`, the largest vertex deviation.
pub fn alpha_plus(net: &ConeNet, phi: &VertexMap) -> Result<f64, PerturbError> {
    Ok(deviation_report(net, phi)?.alpha_plus)
}

pub fn deviation_report(net: &ConeNet, phi: &VertexMap) -> Result<DeviationReport, PerturbError> {
    check_junctions(net)?;
    let images = phi.images(net)?;
    let base = net.points();
    let moved = coords_of(&images);
    let alphas = deviations_raw(net, &moved)?;
    let alpha_plus = alphas.iter().copied().fold(0.0, f64::max);
    let length_delta = length_delta_raw(net, &coords_of(&base), &moved);
    let ratio = (alpha_plus > 0.0 && length_delta > 0.0).then(|| length_delta / (alpha_plus * alpha_plus));
    Ok(DeviationReport {
        per_vertex: net
            .vertices()
            .iter()
            .zip(alphas)
            .map(|(v, alpha)| VertexDeviation { vertex: v.id.clone(), kind: v.kind, alpha })
            .collect(),
        alpha_plus,
        length_delta,
        ratio,
    })
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn smoothstep_slope(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        6.0 * x * (1.0 - x)
    } else {
        0.0
    }
}

/// The bump `ψ(z₁, ρ) = P(z₁)·Q(ρ)` driving the push deformation.
///
/// `P` rises from 0 at `z₁ = 1/4` to 1 at 0.26, stays 1 up to 0.46 and falls
/// back to 0 at `z₁ = 1/2`. `Q(ρ) = 1 − S(ρ/δ)` with `δ = η₀/10`. Both ramps
/// use the C¹ smoothstep `S(x) = 3x² − 2x³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpSpec {
    pub eta0: f64,
}

impl BumpSpec {
    pub const Z_START: f64 = 0.25;
    pub const PLATEAU_START: f64 = 0.26;
    pub const PLATEAU_END: f64 = 0.46;
    pub const Z_END: f64 = 0.5;

    pub fn new(eta0: f64) -> Result<Self, PerturbError> {
        if !(eta0 > 0.0 && eta0 < 0.5) {
            return Err(PerturbError::InvalidParameter(format!("η₀ = {eta0}")));
        }
        Ok(Self { eta0 })
    }

    /// Radial extent `δ = η₀/10` of the support.
    pub fn radial_width(&self) -> f64 {
        self.eta0 / 10.0
    }

    /// Largest admissible push vector length, `η₀/200`.
    pub fn max_push(&self) -> f64 {
        self.eta0 / 200.0
    }

    fn axial(&self, z1: f64) -> (f64, f64) {
        let up = Self::PLATEAU_START - Self::Z_START;
        let down = Self::Z_END - Self::PLATEAU_END;
        if z1 <= Self::Z_START || z1 >= Self::Z_END {
            (0.0, 0.0)
        } else if z1 < Self::PLATEAU_START {
            let x = (z1 - Self::Z_START) / up;
            (smoothstep(x), smoothstep_slope(x) / up)
        } else if z1 <= Self::PLATEAU_END {
            (1.0, 0.0)
        } else {
            let x = (Self::Z_END - z1) / down;
            (smoothstep(x), -smoothstep_slope(x) / down)
        }
    }

    fn radial(&self, rho: f64) -> (f64, f64) {
        let d = self.radial_width();
        if rho >= d {
            (0.0, 0.0)
        } else {
            let x = rho.max(0.0) / d;
            (1.0 - smoothstep(x), -smoothstep_slope(x) / d)
        }
    }

    pub fn psi(&self, z1: f64, rho: f64) -> f64 {
        self.axial(z1).0 * self.radial(rho).0
    }

    /// `(∂ψ/∂z₁, ∂ψ/∂ρ)`.
    pub fn gradient(&self, z1: f64, rho: f64) -> (f64, f64) {
        let (p, dp) = self.axial(z1);
        let (q, dq) = self.radial(rho);
        (dp * q, p * dq)
    }

    /// `a = −∫∫ ∂ψ/∂ρ dρ dz₁ = ∫ P`, the first-order gain per unit push.
    pub fn first_order_coefficient(&self) -> f64 {
        (Self::PLATEAU_END - Self::PLATEAU_START)
            + 0.5 * (Self::PLATEAU_START - Self::Z_START)
            + 0.5 * (Self::Z_END - Self::PLATEAU_END)
    }

    /// Upper bound of `|∇ψ|`.
    pub fn max_gradient(&self) -> f64 {
        let da = 1.5 / (Self::PLATEAU_START - Self::Z_START);
        let dr = 1.5 / self.radial_width();
        da.hypot(dr)
    }

    /// Integrates `g(z₁, ρ)` over the support with a tensor Gauss–Legendre
    /// rule split at the kinks of `ψ`.
    fn integrate<F: Fn(f64, f64) -> f64>(&self, rule: &GaussLegendre, g: F) -> f64 {
        let zs = [Self::Z_START, Self::PLATEAU_START, Self::PLATEAU_END, Self::Z_END];
        let d = self.radial_width();
        let mut total = 0.0;
        for w in zs.windows(2) {
            for (z, wz) in rule.mapped(w[0], w[1]) {
                for (r, wr) in rule.mapped(0.0, d) {
                    total += wz * wr * g(z, r);
                }
            }
        }
        total
    }
}

/// Area change of one face `{z₁e₁ + ρw : ρ ≥ 0}` under `z ↦ z + ψ(z₁, ρ)v`,
/// from the exact Jacobian. Returns (value, quadrature error estimate).
pub fn face_area_change(bump: &BumpSpec, v: &[f64], w: &[f64]) -> (f64, f64) {
    let beta = dot(v, w);
    let v3sq = (dot(v, v) - beta * beta).max(0.0);
    let integrand = |z1: f64, rho: f64| {
        let (d1, d2) = bump.gradient(z1, rho);
        let x = beta * d2;
        let y = (d1 * d1 + d2 * d2) * v3sq;
        let j = ((1.0 + x) * (1.0 + x) + y).sqrt();
        (2.0 * x + x * x + y) / (j + 1.0)
    };
    let coarse = bump.integrate(&GaussLegendre::new(16), integrand);
    let fine = bump.integrate(&GaussLegendre::new(32), integrand);
    (fine, (fine - coarse).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushReport {
    pub vertex: String,
    pub c: f64,
    /// Area of `φ⋆(X) ∩ B` minus area of its pushed image.
    pub gain: f64,
    pub s_norm: f64,
    pub alpha: f64,
    pub faces: usize,
    pub quadrature_error: f64,
    /// `(c/10)·|s|²`.
    pub claimed_gain: f64,
    /// `a·c·|s|²`, the first-order gain.
    pub first_order_gain: f64,
    pub first_order_coefficient: f64,
    /// Measured second-order loss divided by `|v|²`.
    pub remainder_constant: f64,
    /// Largest `c` for which the second-order loss stays below half the first-order gain.
    pub c_max: f64,
    pub c_admissible: bool,
    /// Whether `|v| ≤ η₀/200`.
    pub push_admissible: bool,
    pub contract_holds: bool,
}

/// Deviations below this are rounding noise of a balanced junction.
const NO_DEVIATION: f64 = 1e-12;

/// Pushes the cone near `φ(x)` along `v = c·s`, with `s` the sum of the unit
/// tangents at `φ(x)`, and measures the area saved.
///
/// Constraints on `c` and `|v|` from the construction are reported, not
/// enforced, so the second-order loss can be studied outside that range.
pub fn push_deformation_area_gain(
    net: &ConeNet,
    phi: &VertexMap,
    x: &str,
    c: f64,
) -> Result<PushReport, PerturbError> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(PerturbError::InvalidParameter(format!("c = {c}")));
    }
    let v = net.vertex_index(x).ok_or_else(|| PerturbError::UnknownVertex(x.to_string()))?;
    check_junctions(net)?;
    let images = phi.images(net)?;
    let pts = coords_of(&images);
    let tangents = tangents_raw(net, &pts, v)?;
    let kind = net.vertices()[v].kind;
    let alpha = junction_deviation(kind, &tangents);
    if alpha < NO_DEVIATION {
        return Err(PerturbError::NoDeviation(x.to_string()));
    }
    let bump = BumpSpec::new(net.eta0())?;
    let e1 = pts[v];
    // Inside the support, cone points lie within this angle of e1.
    let reach = (bump.radial_width() / BumpSpec::Z_START).atan();
    for &(k, _) in net.incident(v) {
        let a = &net.arcs()[k];
        if arc_len(pts[a.ends[0]], pts[a.ends[1]]) <= reach {
            return Err(PerturbError::FaceNotResolvable(x.to_string()));
        }
    }
    let moved = net.with_points(images.clone())?;
    for k in 0..net.arcs().len() {
        if net.incident(v).iter().any(|&(j, _)| j == k) {
            continue;
        }
        let (d, _) = moved.arc_frame(k).closest(e1);
        if d <= 2.0 * (0.5 * reach).sin() {
            return Err(PerturbError::FaceNotResolvable(x.to_string()));
        }
    }
    let mut s = vec![0.0; net.dimension()];
    for t in &tangents {
        for (si, ti) in s.iter_mut().zip(t) {
            *si += ti;
        }
    }
    let s_norm = norm(&s);
    let push: Vec<f64> = s.iter().map(|x| c * x).collect();
    let mut change = 0.0;
    let mut err = 0.0;
    for w in &tangents {
        let (value, e) = face_area_change(&bump, &push, w);
        change += value;
        err += e;
    }
    let gain = -change;
    let a = bump.first_order_coefficient();
    let first_order_gain = a * c * s_norm * s_norm;
    let vv = dot(&push, &push);
    let remainder_constant = if vv > 0.0 { (first_order_gain - gain) / vv } else { 0.0 };
    let c_max = if remainder_constant > 0.0 { a / (2.0 * remainder_constant) } else { f64::INFINITY };
    let claimed_gain = 0.1 * c * s_norm * s_norm;
    Ok(PushReport {
        vertex: x.to_string(),
        c,
        gain,
        s_norm,
        alpha,
        faces: tangents.len(),
        quadrature_error: err,
        claimed_gain,
        first_order_gain,
        first_order_coefficient: a,
        remainder_constant,
        c_max,
        c_admissible: c <= c_max,
        push_admissible: vv.sqrt() <= bump.max_push(),
        contract_holds: gain >= claimed_gain - err,
    })
}

/// Perturbation sampling parameters. Draw `i` uses a ChaCha8 stream seeded
/// with `seed` on stream `i`, so results do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Draws for the first estimate; the stability check uses twice as many.
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateSample {
    pub sample_id: usize,
    pub alpha_plus: f64,
    pub length_delta: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub component: String,
    pub seed: u64,
    pub budget: usize,
    pub eta0: f64,
    pub eta1: f64,
    pub eta1_within_structural_bound: bool,
    /// Sup of `length_delta / alpha_plus²` over the first `budget` draws.
    pub c_hat_budget: f64,
    /// Same over `2·budget` draws; this is the reported constant.
    pub c_hat: f64,
    pub kept_samples: usize,
    pub discarded_small_alpha: usize,
    pub stable: bool,
    pub gradient_norm: f64,
    /// Largest central-difference directional derivative of the length.
    pub max_directional_derivative: f64,
    pub critical: bool,
    pub pass: bool,
    #[serde(skip)]
    pub samples: Vec<CertificateSample>,
}

fn move_by(p: &[f64], dir: &[f64], angle: f64) -> Vec<f64> {
    let nd = norm(dir);
    if nd == 0.0 || angle == 0.0 {
        return p.to_vec();
    }
    let q = combine(angle.cos(), p, angle.sin() / nd, dir);
    let nq = norm(&q);
    q.into_iter().map(|x| x / nq).collect()
}

fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let d = dot(&u, b);
                u = combine(1.0, &u, -d, b);
            }
        }
        let nu = norm(&u);
        if nu > 1e-9 {
            basis.push(u.into_iter().map(|x| x / nu).collect());
        }
    }
    basis
}

fn gaussian_dir<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

struct Sampler<'a> {
    net: &'a ConeNet,
    base: Vec<Vec<f64>>,
    eta1: f64,
    max_angle: f64,
    /// Orthonormal bases of the span of incident tangents, per vertex.
    spans: Vec<Vec<Vec<f64>>>,
}

impl<'a> Sampler<'a> {
    fn new(net: &'a ConeNet, eta1: f64) -> Result<Self, PerturbError> {
        let base: Vec<Vec<f64>> = net.points().into_iter().map(Vec::from).collect();
        let spans = (0..net.vertices().len())
            .map(|v| Ok(orthonormalize(&net.tangents_at(v)?)))
            .collect::<Result<Vec<_>, NetError>>()?;
        Ok(Self { net, base, eta1, max_angle: 2.0 * (0.5 * eta1).min(1.0).asin(), spans })
    }

    fn draw(&self, seed: u64, id: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id as u64);
        let n = self.net.dimension();
        let mut pts = self.base.clone();
        if id % 2 == 0 {
            // Every vertex moves by a Gaussian tangent vector of random scale.
            let scale = self.max_angle * (1.0 - rng.gen::<f64>()) / ((n - 1) as f64).sqrt();
            for p in pts.iter_mut() {
                let g = gaussian_dir(&mut rng, n);
                let t = combine(1.0, &g, -dot(&g, p), p);
                let angle = (scale * norm(&t)).min(self.max_angle);
                *p = move_by(p, &t, angle);
            }
        } else {
            // One vertex moves along a structured direction.
            let v = rng.gen_range(0..pts.len());
            let family = rng.gen_range(0..3);
            let chord = self.eta1 * (1.0 - rng.gen::<f64>());
            let angle = 2.0 * (0.5 * chord).min(1.0).asin();
            let p = pts[v].clone();
            let span = &self.spans[v];
            let dir = match family {
                0 => {
                    let (k, end) = self.net.incident(v)[rng.gen_range(0..self.net.degree(v))];
                    let t = self.net.arc_tangent(k, end).unwrap_or_else(|_| span[0].clone());
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    t.into_iter().map(|x| sign * x).collect()
                }
                1 => self.in_span(&mut rng, span),
                _ => {
                    let g = gaussian_dir(&mut rng, n);
                    let mut t = combine(1.0, &g, -dot(&g, &p), &p);
                    for b in span {
                        let d = dot(&t, b);
                        t = combine(1.0, &t, -d, b);
                    }
                    if norm(&t) < 1e-9 {
                        self.in_span(&mut rng, span)
                    } else {
                        t
                    }
                }
            };
            pts[v] = move_by(&p, &dir, angle);
        }
        pts
    }

    fn in_span(&self, rng: &mut ChaCha8Rng, span: &[Vec<f64>]) -> Vec<f64> {
        let mut t = vec![0.0; self.net.dimension()];
        for b in span {
            let c: f64 = rng.sample(StandardNormal);
            for (ti, bi) in t.iter_mut().zip(b) {
                *ti += c * bi;
            }
        }
        t
    }
}

/// Central differences of the length along every tangent direction at every vertex.
fn max_directional_derivative(net: &ConeNet, h: f64) -> Result<f64, PerturbError> {
    let base: Vec<Vec<f64>> = net.points().into_iter().map(Vec::from).collect();
    let base_refs: Vec<&[f64]> = base.iter().map(|p| p.as_slice()).collect();
    let n = net.dimension();
    let mut worst: f64 = 0.0;
    for v in 0..base.len() {
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                combine(1.0, &e, -base[v][i], &base[v])
            })
            .collect();
        for dir in orthonormalize(&axes) {
            let eval = |sign: f64| {
                let mut pts = base.clone();
                pts[v] = move_by(&base[v], &dir, sign * h);
                let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
                length_delta_raw(net, &base_refs, &refs)
            };
            worst = worst.max(((eval(1.0) - eval(-1.0)) / (2.0 * h)).abs());
        }
    }
    Ok(worst)
}

/// Samples `φ` with displacements up to `η₁` and reports the sup of
/// `ΔL / α₊²` over draws that lengthen the net, along with the
/// critical-point check of the unperturbed net.
pub fn full_length_certificate(
    net: &ConeNet,
    eta1: f64,
    sampler: &SamplerConfig,
) -> Result<CertificateReport, PerturbError> {
    certificate_named(net, eta1, sampler, "net")
}

fn certificate_named(
    net: &ConeNet,
    eta1: f64,
    cfg: &SamplerConfig,
    component: &str,
) -> Result<CertificateReport, PerturbError> {
    if !(eta1 > 0.0 && eta1 < 1.0) {
        return Err(PerturbError::InvalidParameter(format!("η₁ = {eta1}")));
    }
    if cfg.budget == 0 {
        return Err(PerturbError::InvalidParameter("budget must be positive".into()));
    }
    let report = validate_minimal_looking(net);
    if !report.passed() {
        return Err(PerturbError::Validation(format!(
            "{} short arcs, {} angle defects, {} separation defects, {} degree defects",
            report.short_arcs.len(),
            report.angle_defects.len(),
            report.separation.len(),
            report.degree_defects.len()
        )));
    }
    check_junctions(net)?;
    let gradient_norm = length_gradient(net)?.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let max_dd = max_directional_derivative(net, 1e-6)?;
    let sampler = Sampler::new(net, eta1)?;
    let base: Vec<Vec<f64>> = sampler.base.clone();
    let base_refs: Vec<&[f64]> = base.iter().map(|p| p.as_slice()).collect();
    let samples: Vec<CertificateSample> = (0..2 * cfg.budget)
        .into_par_iter()
        .map(|id| {
            let pts = sampler.draw(cfg.seed, id);
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            let alpha_plus = deviations_raw(net, &refs)
                .map(|a| a.into_iter().fold(0.0, f64::max))
                .unwrap_or(f64::NAN);
            let length_delta = length_delta_raw(net, &base_refs, &refs);
            let ratio = (alpha_plus >= ALPHA_FLOOR && length_delta > LENGTH_NOISE)
                .then(|| length_delta / (alpha_plus * alpha_plus));
            CertificateSample { sample_id: id, alpha_plus, length_delta, ratio }
        })
        .collect();
    let sup = |upto: usize| {
        samples[..upto].iter().filter_map(|s| s.ratio).fold(0.0, f64::max)
    };
    let c_hat_budget = sup(cfg.budget);
    let c_hat = sup(2 * cfg.budget);
    let stable = c_hat.is_finite() && c_hat <= 1.25 * c_hat_budget || (c_hat == 0.0 && c_hat_budget == 0.0);
    let critical = gradient_norm < CRITICAL_GRADIENT && max_dd < CRITICAL_GRADIENT;
    Ok(CertificateReport {
        component: component.to_string(),
        seed: cfg.seed,
        budget: cfg.budget,
        eta0: net.eta0(),
        eta1,
        eta1_within_structural_bound: eta1 < net.eta0() / 10.0,
        c_hat_budget,
        c_hat,
        kept_samples: samples.iter().filter(|s| s.ratio.is_some()).count(),
        discarded_small_alpha: samples.iter().filter(|s| !(s.alpha_plus >= ALPHA_FLOOR)).count(),
        stable,
        gradient_norm,
        max_directional_derivative: max_dd,
        critical,
        pass: stable && critical && c_hat.is_finite(),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentwiseReport {
    pub components: Vec<CertificateReport>,
    /// Max of the component constants.
    pub c_hat: f64,
    pub pass: bool,
}

/// Seed for component `index`; component 0 keeps the caller's seed.
pub fn component_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs [`full_length_certificate`] on each connected component.
pub fn componentwise_certificate(
    net: &ConeNet,
    eta1: f64,
    sampler: &SamplerConfig,
) -> Result<ComponentwiseReport, PerturbError> {
    let components = net
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let cfg = SamplerConfig { seed: component_seed(sampler.seed, i), budget: sampler.budget };
            certificate_named(c, eta1, &cfg, &format!("component-{i}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let c_hat = components.iter().map(|c| c.c_hat).fold(0.0, f64::max);
    let pass = components.iter().all(|c| c.pass);
    Ok(ComponentwiseReport { components, c_hat, pass })
}

/// Moves vertex `x` of `net` by `angle` along the tangent direction `dir`
/// (projected to the tangent space), leaving the others fixed.
pub fn single_vertex_map(
    net: &ConeNet,
    x: &str,
    dir: &[f64],
    angle: f64,
    eta1: f64,
) -> Result<VertexMap, PerturbError> {
    let v = net.vertex_index(x).ok_or_else(|| PerturbError::UnknownVertex(x.to_string()))?;
    let mut pts = net.points();
    let t = pts[v].project_tangent(dir);
    if norm(&t) == 0.0 {
        return Err(PerturbError::InvalidParameter("direction is normal to the sphere".into()));
    }
    pts[v] = UnitVector::normalize(move_by(pts[v].coords(), &t, angle))?;
    Ok(VertexMap::from_points(net, pts, eta1)?)
}

/// Chord length of a displacement, for callers sizing `η₁`.
pub fn chord(a: &UnitVector, b: &UnitVector) -> f64 {
    norm(&sub(a.coords(), b.coords()))
}
