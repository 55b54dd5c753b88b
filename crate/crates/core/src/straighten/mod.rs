//! Straightening of near-geodesic curves on the sphere.
//!
//! A curve `γ` whose endpoints lie in a 2-plane `P` is written as
//! `z(t) = (cos θ(t)·w(t), sin θ(t)·w(t), v(t))` in coordinates adapted to
//! `P`, with `t` the arc length. Grid points where the non-centered maximal
//! function of `|v′|` exceeds `η/4`, or that of `f = 1 + 2|v|² − θ′` exceeds
//! `1/2`, form the bad set `Z`; each component of `Z` is replaced by the
//! geodesic between its endpoints. What remains is a graph over `P` with
//! slope at most `4η/5` in the angular variable.

mod io;
#[cfg(test)]
mod tests;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::harmonic::{HarmonicError, SectorProfile, MAX_APERTURE};
use crate::sphere::{dot, norm, Frame, GeometryError, UnitVector};
use crate::tolerances::DEFAULT_ETA0;

pub use io::{curve_from_csv, curve_from_json, curve_to_csv, curve_to_json, CurveFile};

pub const DEFAULT_RESAMPLE_STEP: f64 = 1e-4;
/// Slope bound of the straightened graph, as a multiple of `η`.
pub const CERTIFICATE_SLOPE: f64 = 0.8;
/// Constant in `∫|v′|² ≤ 14 ΔL`.
pub const V_ENERGY_CONSTANT: f64 = 14.0;
/// Constant in `∫f ≤ 30 ΔL`.
pub const F_INTEGRAL_CONSTANT: f64 = 30.0;

const ENDPOINT_TOL: f64 = 1e-9;
const ORIENTATION_TOL: f64 = 1e-8;
const MIN_SEGMENT: f64 = 1e-15;
// Allowance for summation noise in the energy bounds, relative to the length.
const ROUNDING_FLOOR: f64 = 1e-13;

/// Default `τ₁ = 10⁻⁴ η²`.
pub fn default_tau1(eta: f64) -> f64 {
    1e-4 * eta * eta
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StraightenError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("curve needs at least 2 distinct points")]
    TooFewPoints,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("plane must be given by exactly 2 orthonormal vectors")]
    BadPlane,
    #[error("length bound 9η₀ ≤ length ≤ 10π/11 fails: length {length}")]
    LengthOutOfRange { length: f64 },
    #[error("excess bound length ≤ dist(a, b) + τ₁ fails: excess {excess}, τ₁ {tau1}")]
    ExcessTooLarge { excess: f64, tau1: f64 },
    #[error("plane proximity bound dist(z, P) ≤ τ₁ fails at point {index}: {distance} > {tau1}")]
    OffPlane {
        index: usize,
        distance: f64,
        tau1: f64,
    },
    #[error("endpoint at distance {0} from the plane")]
    EndpointOffPlane(f64),
    #[error("total turning {total} does not match the endpoint distance {distance}")]
    Orientation { total: f64, distance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad set covers the whole parameter interval")]
    CoversInterval,
    #[error(transparent)]
    Handoff(#[from] HarmonicError),
    #[error("curve format: {0}")]
    Format(String),
}

/// Orthonormal basis of R^n whose first two vectors span `P`.
fn adapted_basis(plane: &Frame) -> Vec<Vec<f64>> {
    let n = plane.dim();
    let mut basis: Vec<Vec<f64>> = plane.vectors().iter().map(|u| u.coords().to_vec()).collect();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        for _ in 0..2 {
            for e in &basis {
                let d = dot(&c, e);
                c.iter_mut().zip(e).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nc = norm(&c);
        if nc > 1e-6 {
            basis.push(c.iter().map(|x| x / nc).collect());
        }
    }
    basis
}

fn to_adapted(basis: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    basis.iter().map(|e| dot(e, z)).collect()
}

fn from_adapted(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for (c, e) in y.iter().zip(basis) {
        out.iter_mut().zip(e).for_each(|(o, x)| *o += c * x);
    }
    out
}

fn arc(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
    2.0 * d.atan2(s)
}

// Point at arc length `s` along the geodesic from `a` to `b` (length `len`).
fn slerp(a: &[f64], b: &[f64], len: f64, s: f64) -> Vec<f64> {
    let raw: Vec<f64> = if len < 1e-9 {
        let t = if len > 0.0 { s / len } else { 0.0 };
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    } else {
        let sin_len = len.sin();
        let wa = (len - s).sin() / sin_len;
        let wb = s.sin() / sin_len;
        a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
    };
    let n = norm(&raw);
    raw.iter().map(|x| x / n).collect()
}

/// The plane through the origin containing `a` and `b`, with `a` as first vector.
pub fn plane_through_endpoints(a: &UnitVector, b: &UnitVector) -> Result<Frame, StraightenError> {
    let d = a.dot(b);
    let mut c: Vec<f64> = b.coords().iter().zip(a.coords()).map(|(x, y)| x - d * y).collect();
    let nc = norm(&c);
    if nc < 1e-12 {
        return Err(StraightenError::InvalidParameter(
            "endpoints coincide or are antipodal".into(),
        ));
    }
    c.iter_mut().for_each(|x| *x /= nc);
    Ok(Frame::new(vec![a.clone(), UnitVector::normalize(c)?])?)
}

/// A curve resampled by arc length, with its decomposition relative to `P`.
#[derive(Debug, Clone)]
pub struct SphericalCurve {
    basis: Vec<Vec<f64>>,
    tau1: f64,
    length: f64,
    distance: f64,
    /// Adapted coordinates `(x₁, x₂, v)` of each grid point.
    coords: Vec<Vec<f64>>,
    theta: Vec<f64>,
    reversed: bool,
    speed_deviation: f64,
}

/// Resamples `polyline` (consecutive points joined by geodesics) to grid
/// step at most `DEFAULT_RESAMPLE_STEP` and checks the length, excess and
/// plane-proximity hypotheses for the given `τ₁`.
pub fn parameterize(
    polyline: &[UnitVector],
    plane: &Frame,
    tau1: f64,
) -> Result<SphericalCurve, StraightenError> {
    parameterize_with_step(polyline, plane, tau1, DEFAULT_RESAMPLE_STEP)
}

pub fn parameterize_with_step(
    polyline: &[UnitVector],
    plane: &Frame,
    tau1: f64,
    max_step: f64,
) -> Result<SphericalCurve, StraightenError> {
    if plane.len() != 2 {
        return Err(StraightenError::BadPlane);
    }
    if !(tau1 > 0.0) || !(max_step > 0.0) {
        return Err(StraightenError::InvalidParameter(format!(
            "tau1 = {tau1}, step = {max_step}"
        )));
    }
    let n = plane.dim();
    for (index, p) in polyline.iter().enumerate() {
        if p.dim() != n {
            return Err(StraightenError::DimensionMismatch {
                index,
                found: p.dim(),
                expected: n,
            });
        }
    }
    let basis = adapted_basis(plane);
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(polyline.len());
    for p in polyline {
        let y = to_adapted(&basis, p.coords());
        if pts.last().is_none_or(|q: &Vec<f64>| arc(q, &y) > MIN_SEGMENT) {
            pts.push(y);
        }
    }
    if pts.len() < 2 {
        return Err(StraightenError::TooFewPoints);
    }
    for end in [&pts[0], &pts[pts.len() - 1]] {
        let off = norm(&end[2..]);
        if off > ENDPOINT_TOL {
            return Err(StraightenError::EndpointOffPlane(off));
        }
    }
    let segs: Vec<f64> = pts.windows(2).map(|w| arc(&w[0], &w[1])).collect();
    let length: f64 = segs.iter().sum();
    let distance = arc(&pts[0], &pts[pts.len() - 1]);
    if !(length >= 9.0 * DEFAULT_ETA0 && length <= MAX_APERTURE) {
        return Err(StraightenError::LengthOutOfRange { length });
    }
    if length > distance + tau1 {
        return Err(StraightenError::ExcessTooLarge {
            excess: length - distance,
            tau1,
        });
    }
    for (index, p) in pts.iter().enumerate() {
        let off = norm(&p[2..]);
        if off > tau1 {
            return Err(StraightenError::OffPlane {
                index,
                distance: off,
                tau1,
            });
        }
    }

    let intervals = (length / max_step).ceil() as usize;
    let step = length / intervals as f64;
    let mut coords = Vec::with_capacity(intervals + 1);
    coords.push(pts[0].clone());
    let mut seg = 0;
    let mut seg_start = 0.0;
    for j in 1..intervals {
        let s = step * j as f64;
        while seg + 1 < segs.len() && seg_start + segs[seg] < s {
            seg_start += segs[seg];
            seg += 1;
        }
        let local = (s - seg_start).clamp(0.0, segs[seg]);
        coords.push(slerp(&pts[seg], &pts[seg + 1], segs[seg], local));
    }
    coords.push(pts[pts.len() - 1].clone());

    let mut theta = unwrap_angles(&coords);
    let mut total = theta[intervals] - theta[0];
    let mut reversed = false;
    if total < 0.0 {
        coords.reverse();
        theta = unwrap_angles(&coords);
        total = theta[intervals] - theta[0];
        reversed = true;
    }
    if (total - distance).abs() > ORIENTATION_TOL {
        return Err(StraightenError::Orientation { total, distance });
    }
    let speed_deviation = coords
        .windows(2)
        .map(|w| (arc(&w[0], &w[1]) / step - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(SphericalCurve {
        basis,
        tau1,
        length,
        distance,
        coords,
        theta,
        reversed,
        speed_deviation,
    })
}

fn unwrap_angles(coords: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(coords.len());
    let mut prev = coords[0][1].atan2(coords[0][0]);
    out.push(prev);
    for y in &coords[1..] {
        let raw = y[1].atan2(y[0]);
        let mut d = raw - prev.rem_euclid(2.0 * std::f64::consts::PI);
        d = (d + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
        prev += d;
        out.push(prev);
    }
    out
}

impl SphericalCurve {
    pub fn intervals(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.length / self.intervals() as f64
    }

    /// Length of the input polyline.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Geodesic distance between the endpoints.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// `ΔL = length − distance`.
    pub fn length_excess(&self) -> f64 {
        self.length - self.distance
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Normal part `v(t_j)`.
    pub fn v(&self, j: usize) -> &[f64] {
        &self.coords[j][2..]
    }

    pub fn w(&self, j: usize) -> f64 {
        (1.0 - crate::sphere::dot(self.v(j), self.v(j))).sqrt()
    }

    /// Ambient coordinates of grid point `j`.
    pub fn point(&self, j: usize) -> Vec<f64> {
        from_adapted(&self.basis, &self.coords[j])
    }

    pub fn points(&self) -> Result<Vec<UnitVector>, StraightenError> {
        (0..self.coords.len())
            .map(|j| Ok(UnitVector::normalize(self.point(j))?))
            .collect()
    }

    /// Whether the input was traversed backwards to make `θ` increase on average.
    pub fn reversed(&self) -> bool {
        self.reversed
    }

    /// Largest `|dist(z_j, z_{j+1})/h − 1|`.
    pub fn speed_deviation(&self) -> f64 {
        self.speed_deviation
    }

    /// `|v_{j+1} − v_j| / h` on each cell.
    pub fn v_slopes(&self) -> Vec<f64> {
        let h = self.step();
        self.coords
            .windows(2)
            .map(|w| {
                w[0][2..]
                    .iter()
                    .zip(&w[1][2..])
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum::<f64>()
                    .sqrt()
                    / h
            })
            .collect()
    }

    /// `f = 1 + 2|v|² − θ′` on each cell, `|v|²` averaged over the cell ends.
    pub fn f_values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.intervals())
            .map(|c| {
                let v2 = 0.5 * (dot(self.v(c), self.v(c)) + dot(self.v(c + 1), self.v(c + 1)));
                1.0 + 2.0 * v2 - (self.theta[c + 1] - self.theta[c]) / h
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub v_derivative_energy: f64,
    pub f_integral: f64,
    pub length_excess: f64,
    /// `14 ΔL − ∫|v′|²`.
    pub v_energy_margin: f64,
    /// `30 ΔL − ∫f`.
    pub f_margin: f64,
    pub min_f: f64,
    /// Slack added to both bounds to absorb summation rounding.
    pub rounding_allowance: f64,
    pub v_bound_holds: bool,
    pub f_bound_holds: bool,
}

pub fn energy_diagnostics(c: &SphericalCurve) -> EnergyReport {
    let h = c.step();
    let v_energy: f64 = c.v_slopes().iter().map(|s| s * s * h).sum();
    let f = c.f_values();
    let f_integral: f64 = f.iter().sum::<f64>() * h;
    let dl = c.length_excess();
    let slack = ROUNDING_FLOOR * c.length();
    EnergyReport {
        v_derivative_energy: v_energy,
        f_integral,
        length_excess: dl,
        v_energy_margin: V_ENERGY_CONSTANT * dl - v_energy,
        f_margin: F_INTEGRAL_CONSTANT * dl - f_integral,
        min_f: f.iter().copied().fold(f64::INFINITY, f64::min),
        rounding_allowance: slack,
        v_bound_holds: v_energy <= V_ENERGY_CONSTANT * dl + slack,
        f_bound_holds: f_integral <= F_INTEGRAL_CONSTANT * dl + slack,
    }
}

/// Non-centered maximal function at grid points of a function given by its
/// cell averages: for grid point `i` (of `cells.len() + 1`), the largest
/// average of `cells[p..q]` over `p ≤ i ≤ q`, `p < q`.
pub fn noncentered_maximal(cells: &[f64]) -> Vec<f64> {
    let m = cells.len();
    let mut out = vec![f64::NEG_INFINITY; m + 1];
    let mut avg = vec![0.0; m + 1];
    for p in 0..m {
        let mut s = 0.0;
        for q in p + 1..=m {
            s += cells[q - 1];
            avg[q] = s / (q - p) as f64;
        }
        // Suffix maxima over q ≥ i give the best window starting at p that
        // still contains i.
        let mut best = f64::NEG_INFINITY;
        for q in (p + 1..=m).rev() {
            best = best.max(avg[q]);
            out[q] = out[q].max(best);
        }
        out[p] = out[p].max(best);
    }
    out
}

/// Grid points where the maximal function of `cells` exceeds `level`, in
/// linear time: `i` qualifies iff some `p ≤ i ≤ q` has
/// `S_q − level·q > S_p − level·p` for the prefix sums `S`.
pub fn maximal_superlevel(cells: &[f64], level: f64) -> Vec<bool> {
    let m = cells.len();
    let mut shifted = Vec::with_capacity(m + 1);
    let mut s = 0.0;
    shifted.push(0.0);
    for (k, c) in cells.iter().enumerate() {
        s += c;
        shifted.push(s - level * (k + 1) as f64);
    }
    let mut suffix_max = shifted.clone();
    for i in (0..m).rev() {
        suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
    }
    let mut prefix_min = f64::INFINITY;
    (0..=m)
        .map(|i| {
            prefix_min = prefix_min.min(shifted[i]);
            suffix_max[i] > prefix_min
        })
        .collect()
}

/// One component `(a_j, b_j)` of the bad set, with endpoints snapped to the
/// surrounding good grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BadInterval {
    pub start_index: usize,
    pub end_index: usize,
    pub start: f64,
    pub end: f64,
    /// Length of `γ` over the interval.
    pub arc_length: f64,
    /// Length of the replacing geodesic.
    pub geodesic_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StraightenResult {
    pub eta: f64,
    pub step: f64,
    pub intervals: Vec<BadInterval>,
    /// Grid points flagged by the `|v′|` threshold.
    pub v_bad_points: usize,
    /// Grid points flagged by the `f` threshold.
    pub f_bad_points: usize,
    /// `|Z|`.
    pub bad_measure: f64,
    /// `H¹(γ \ Γ)`.
    pub removed_length: f64,
    /// `H¹(Γ \ γ)`.
    pub added_length: f64,
    pub input_length: f64,
    pub output_length: f64,
    pub length_excess: f64,
    /// `|Z| η² / ΔL` when `ΔL > 0`.
    pub c_hat: Option<f64>,
    /// Largest `|Δṽ| / Δθ̃` over consecutive grid points.
    pub certificate_slope: f64,
    pub certificate_bound: f64,
    pub theta_increasing: bool,
    pub certificate_holds: bool,
    #[serde(skip)]
    basis: Vec<Vec<f64>>,
    #[serde(skip)]
    coords: Vec<Vec<f64>>,
    #[serde(skip)]
    theta: Vec<f64>,
}

impl StraightenResult {
    /// `θ̃` at the grid points.
    pub fn output_theta(&self) -> &[f64] {
        &self.theta
    }

    /// `ṽ` at grid point `j`.
    pub fn output_v(&self, j: usize) -> &[f64] {
        &self.coords[j][2..]
    }

    pub fn output_len(&self) -> usize {
        self.coords.len()
    }

    pub fn output_points(&self) -> Result<Vec<UnitVector>, StraightenError> {
        self.coords
            .iter()
            .map(|y| Ok(UnitVector::normalize(from_adapted(&self.basis, y))?))
            .collect()
    }

    /// The plane `P` the curve was decomposed against.
    pub fn plane(&self) -> Result<Frame, StraightenError> {
        Ok(Frame::new(vec![
            UnitVector::normalize(self.basis[0].clone())?,
            UnitVector::normalize(self.basis[1].clone())?,
        ])?)
    }

    /// Whether grid point `j` lies strictly inside a replaced interval.
    pub fn is_replaced(&self, j: usize) -> bool {
        self.intervals
            .iter()
            .any(|iv| iv.start_index < j && j < iv.end_index)
    }

    /// Rewrites `Γ` as a sector profile over `[0, T]`, `T = θ̃(l) − θ̃(0)`,
    /// by linear interpolation of `ṽ` in `θ̃` on `intervals` uniform cells.
    pub fn to_sector_profile(
        &self,
        eta: f64,
        intervals: usize,
    ) -> Result<SectorProfile, StraightenError> {
        if !self.theta_increasing {
            return Err(StraightenError::InvalidParameter(
                "output angle is not increasing".into(),
            ));
        }
        let theta0 = self.theta[0];
        let aperture = self.theta[self.theta.len() - 1] - theta0;
        let dim = self.coords[0].len() - 2;
        let mut values = Vec::with_capacity(intervals + 1);
        let mut k = 0;
        for j in 0..=intervals {
            let u = aperture * j as f64 / intervals as f64;
            while k + 2 < self.theta.len() && self.theta[k + 1] - theta0 < u {
                k += 1;
            }
            let (t0, t1) = (self.theta[k] - theta0, self.theta[k + 1] - theta0);
            let s = ((u - t0) / (t1 - t0)).clamp(0.0, 1.0);
            let v: Vec<f64> = (0..dim)
                .map(|d| {
                    let a = self.coords[k][2 + d];
                    let b = self.coords[k + 1][2 + d];
                    a + s * (b - a)
                })
                .collect();
            values.push(v);
        }
        for end in [0, intervals] {
            let off = norm(&values[end]);
            if off > ENDPOINT_TOL {
                return Err(StraightenError::EndpointOffPlane(off));
            }
            values[end].iter_mut().for_each(|x| *x = 0.0);
        }
        Ok(SectorProfile::new(aperture, values, eta)?)
    }
}

// Point of the great circle through `ya`, `yb` whose projection on P points
// in direction θ.
fn geodesic_at_angle(ya: &[f64], yb: &[f64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let cross_a = ya[0] * s - ya[1] * c;
    let cross_b = yb[0] * s - yb[1] * c;
    let mut xi: Vec<f64> = ya
        .iter()
        .zip(yb)
        .map(|(a, b)| cross_b * a - cross_a * b)
        .collect();
    let n = norm(&xi);
    if n < 1e-300 {
        return ya.to_vec();
    }
    let sign = if xi[0] * c + xi[1] * s < 0.0 { -1.0 } else { 1.0 };
    xi.iter_mut().for_each(|x| *x *= sign / n);
    xi
}

pub fn straighten(c: &SphericalCurve, eta: f64) -> Result<StraightenResult, StraightenError> {
    if !(eta > 0.0 && eta <= 0.1) {
        return Err(StraightenError::InvalidParameter(format!(
            "eta = {eta} outside (0, 0.1]"
        )));
    }
    let m = c.intervals();
    let h = c.step();
    let bad_v = maximal_superlevel(&c.v_slopes(), eta / 4.0);
    let bad_f = maximal_superlevel(&c.f_values(), 0.5);
    let bad: Vec<bool> = bad_v.iter().zip(&bad_f).map(|(a, b)| *a || *b).collect();

    let mut coords = c.coords.clone();
    let mut theta = c.theta.clone();
    let mut intervals = Vec::new();
    let mut i = 0;
    while i <= m {
        if !bad[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        while i <= m && bad[i] {
            i += 1;
        }
        let a = run_start.saturating_sub(1);
        let b = i.min(m);
        if a == 0 && b == m {
            return Err(StraightenError::CoversInterval);
        }
        let arc_length: f64 = (a..b).map(|k| arc(&c.coords[k], &c.coords[k + 1])).sum();
        let geodesic_length = arc(&c.coords[a], &c.coords[b]);
        let (ta, tb) = (c.theta[a], c.theta[b]);
        for k in a + 1..b {
            let th = ta + (tb - ta) * (k - a) as f64 / (b - a) as f64;
            coords[k] = geodesic_at_angle(&c.coords[a], &c.coords[b], th);
            theta[k] = th;
        }
        intervals.push(BadInterval {
            start_index: a,
            end_index: b,
            start: h * a as f64,
            end: h * b as f64,
            arc_length,
            geodesic_length,
        });
    }

    let bad_measure = intervals.iter().fold(0.0, |acc, iv| acc + (iv.end - iv.start));
    let removed_length = intervals.iter().fold(0.0, |acc, iv| acc + iv.arc_length);
    let added_length = intervals.iter().fold(0.0, |acc, iv| acc + iv.geodesic_length);
    let mut slope: f64 = 0.0;
    let mut increasing = true;
    for k in 0..m {
        let dth = theta[k + 1] - theta[k];
        if dth <= 0.0 {
            increasing = false;
            continue;
        }
        let dv = coords[k][2..]
            .iter()
            .zip(&coords[k + 1][2..])
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        slope = slope.max(dv / dth);
    }
    let bound = CERTIFICATE_SLOPE * eta;
    let length_excess = c.length_excess();
    let input_length: f64 = c.coords.windows(2).map(|w| arc(&w[0], &w[1])).sum();
    Ok(StraightenResult {
        eta,
        step: h,
        v_bad_points: bad_v.iter().filter(|b| **b).count(),
        f_bad_points: bad_f.iter().filter(|b| **b).count(),
        bad_measure,
        removed_length,
        added_length,
        input_length,
        output_length: input_length - removed_length + added_length,
        length_excess,
        c_hat: (length_excess > 0.0).then(|| bad_measure * eta * eta / length_excess),
        certificate_slope: slope,
        certificate_bound: bound,
        theta_increasing: increasing,
        certificate_holds: increasing && slope <= bound,
        intervals,
        basis: c.basis.clone(),
        coords,
        theta,
    })
}

/// Parameters of [`random_admissible_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRecipe {
    pub dim: usize,
    pub tau1: f64,
    pub min_distance: f64,
    pub max_distance: f64,
    /// Angular spacing of the generated polyline.
    pub spacing: f64,
}

impl Default for CurveRecipe {
    fn default() -> Self {
        Self {
            dim: 3,
            tau1: 1e-3,
            min_distance: 0.5,
            max_distance: 2.5,
            spacing: 2.5e-5,
        }
    }
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

/// A random curve satisfying the straightening hypotheses for `recipe.tau1`:
/// a graph over a random plane made of a few smooth modes plus narrow bumps,
/// scaled until `|v| ≤ 0.9τ₁` and `ΔL ≤ 0.9τ₁`. Returns the polyline and the plane.
pub fn random_admissible_curve<R: Rng + ?Sized>(
    rng: &mut R,
    recipe: &CurveRecipe,
) -> Result<(Vec<UnitVector>, Frame), StraightenError> {
    let n = recipe.dim;
    let frame = Frame::random(n, n, rng)?;
    let basis: Vec<Vec<f64>> = frame.vectors().iter().map(|u| u.coords().to_vec()).collect();
    let d = rng.gen_range(recipe.min_distance..recipe.max_distance);
    let normals = n - 2;
    let modes: Vec<Vec<f64>> = (0..normals)
        .map(|_| {
            (1..=3)
                .map(|k| rng.sample::<f64, _>(StandardNormal) / (k * k) as f64)
                .collect()
        })
        .collect();
    let bump_count = rng.gen_range(1..=4);
    let bumps: Vec<(f64, f64, Vec<f64>)> = (0..bump_count)
        .map(|_| {
            let width = 10f64.powf(rng.gen_range(-3.5..-1.5));
            let center = rng.gen_range(width..d - width);
            let heights = (0..normals)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            (center, width, heights)
        })
        .collect();
    let count = (d / recipe.spacing).ceil() as usize;
    let raw: Vec<Vec<f64>> = (0..=count)
        .map(|j| {
            let th = d * j as f64 / count as f64;
            (0..normals)
                .map(|c| {
                    let smooth: f64 = modes[c]
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * (std::f64::consts::PI * (k + 1) as f64 * th / d).sin())
                        .sum();
                    let spikes: f64 = bumps
                        .iter()
                        .map(|(center, width, hs)| hs[c] * bump((th - center) / width))
                        .sum();
                    if j == 0 || j == count {
                        0.0
                    } else {
                        smooth + spikes
                    }
                })
                .collect()
        })
        .collect();
    let peak = raw.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut scale = if peak > 0.0 { 0.9 * recipe.tau1 / peak } else { 0.0 };
    loop {
        let pts: Vec<Vec<f64>> = raw
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let th = d * j as f64 / count as f64;
                let vs: Vec<f64> = v.iter().map(|x| x * scale).collect();
                let w = (1.0 - dot(&vs, &vs)).sqrt();
                let mut y = vec![w * th.cos(), w * th.sin()];
                y.extend(vs);
                from_adapted(&basis, &y)
            })
            .collect();
        let length: f64 = pts.windows(2).map(|w| arc(&w[0], &w[1])).sum();
        let excess = length - arc(&pts[0], &pts[count]);
        if excess <= 0.9 * recipe.tau1 {
            let polyline = pts
                .into_iter()
                .map(UnitVector::normalize)
                .collect::<Result<Vec<_>, _>>()?;
            let plane = Frame::new(frame.vectors()[..2].to_vec())?;
            return Ok((polyline, plane));
        }
        scale *= (0.8 * recipe.tau1 / excess).sqrt().min(0.95);
    }
}

/// Curve `index` of a seeded battery, drawn from ChaCha8 stream `index`.
pub fn battery_curve(
    seed: u64,
    index: u64,
    recipe: &CurveRecipe,
) -> Result<(Vec<UnitVector>, Frame), StraightenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_admissible_curve(&mut rng, recipe)
}
