//! Harmonic replacement of the cone over a small Lipschitz graph.
//!
//! A [`SectorProfile`] describes a curve on the sphere as a graph
//! `t ↦ (cos t·w(t), sin t·w(t), v(t))` over `[0, T]` with `w = (1 − |v|²)^{1/2}`.
//! The cone over that curve is the graph of the 1-homogeneous map
//! `F(ρ cos t, ρ sin t) = ρ f(t)`, `f = v / w`. The replacement `G` agrees with
//! `F` near the unit circle, follows a rescaled harmonic extension in the
//! middle of the sector, and is cut down to zero near the origin.
//!
//! Every surface here is built from the same truncated sine series of `f`,
//! so the zones glue exactly and all areas and energies refer to one
//! continuous model.

mod io;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::{Estimate, GaussLegendre};
use crate::tolerances::DEFAULT_ETA0;

pub use io::{profile_from_csv, profile_from_json, profile_to_csv, profile_to_json};

/// Largest admissible sector aperture.
pub const MAX_APERTURE: f64 = 10.0 * PI / 11.0;
/// Radius (in rescaled units) where the annulus interpolation starts.
pub const INTERP_RADIUS: f64 = 1.0 - 1e-6;
/// Radius beyond which the replacement equals the cone.
pub const OUTER_RADIUS: f64 = 0.9;
pub const DEFAULT_KAPPA: f64 = 1e-2;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_MODES: usize = 512;
/// Largest Lipschitz bound accepted by [`SectorProfile::new`].
pub const PROFILE_ETA_CAP: f64 = 0.1;
/// Largest Lipschitz bound accepted by [`area_saving`].
pub const SAVING_ETA_MAX: f64 = 0.05;
/// Required saving per unit of `∫|v′|²`.
pub const SAVING_CONSTANT: f64 = 1e-4;

// Trailing sine coefficients below this fraction of the largest one are
// dropped from the continuous model.
const MODE_CUTOFF: f64 = 1e-15;
const LIPSCHITZ_SLACK: f64 = 1e-12;
const GAUSS_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error("aperture {aperture} outside [{min}, 10π/11]")]
    ApertureOutOfRange { aperture: f64, min: f64 },
    #[error("profile needs at least 2 intervals, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} has dimension {found}, expected {expected}")]
    RaggedSamples {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("profile values must have at least one component")]
    ZeroDimension,
    #[error("profile must vanish exactly at both ends")]
    NonzeroEnds,
    #[error("non-finite profile value at sample {0}")]
    NonFinite(usize),
    #[error("discrete Lipschitz constant {measured} exceeds eta = {eta}")]
    LipschitzExceeded { measured: f64, eta: f64 },
    #[error("eta = {eta} outside (0, {max}]")]
    EtaOutOfRange { eta: f64, max: f64 },
    #[error("|v| = {norm} ≥ 1 at sample {index}")]
    OutsideBall { index: usize, norm: f64 },
    #[error("{modes} modes requested but the grid resolves at most {max}")]
    TooManyModes { modes: usize, max: usize },
    #[error("kappa = {kappa} invalid: need 0 < 3κ < 9/10")]
    ZoneOverlap { kappa: f64 },
    #[error("sample grid is not uniform at index {0}")]
    NonUniformGrid(usize),
    #[error("profile format: {0}")]
    Format(String),
}

fn max_abs_difference_quotient(values: &[Vec<f64>], step: f64) -> f64 {
    values
        .windows(2)
        .map(|w| {
            let d2: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) * (b - a)).sum();
            d2.sqrt() / step
        })
        .fold(0.0, f64::max)
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Boundary data `v : [0, T] → R^m` sampled on a uniform grid of `M + 1` points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorProfile {
    aperture: f64,
    eta: f64,
    values: Vec<Vec<f64>>,
}

impl SectorProfile {
    /// Checks the aperture range, exact zeros at both ends and the discrete
    /// Lipschitz bound `eta`.
    pub fn new(aperture: f64, values: Vec<Vec<f64>>, eta: f64) -> Result<Self, HarmonicError> {
        let min = 8.0 * DEFAULT_ETA0;
        if !(aperture >= min && aperture <= MAX_APERTURE * (1.0 + 1e-12)) {
            return Err(HarmonicError::ApertureOutOfRange { aperture, min });
        }
        if !(eta > 0.0 && eta <= PROFILE_ETA_CAP) {
            return Err(HarmonicError::EtaOutOfRange {
                eta,
                max: PROFILE_ETA_CAP,
            });
        }
        if values.len() < 3 {
            return Err(HarmonicError::TooFewSamples(values.len().saturating_sub(1)));
        }
        let dim = values[0].len();
        if dim == 0 {
            return Err(HarmonicError::ZeroDimension);
        }
        for (index, v) in values.iter().enumerate() {
            if v.len() != dim {
                return Err(HarmonicError::RaggedSamples {
                    index,
                    found: v.len(),
                    expected: dim,
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(HarmonicError::NonFinite(index));
            }
        }
        let last = values.len() - 1;
        if values[0].iter().chain(&values[last]).any(|&x| x != 0.0) {
            return Err(HarmonicError::NonzeroEnds);
        }
        let step = aperture / last as f64;
        let measured = max_abs_difference_quotient(&values, step);
        if measured > eta * (1.0 + LIPSCHITZ_SLACK) {
            return Err(HarmonicError::LipschitzExceeded { measured, eta });
        }
        Ok(Self {
            aperture,
            eta,
            values,
        })
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    /// Number of grid intervals `M`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.aperture / self.intervals() as f64
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        if j == self.intervals() {
            self.aperture
        } else {
            self.step() * j as f64
        }
    }

    /// Largest `|v_{j+1} − v_j| / h` on the grid.
    pub fn discrete_lipschitz(&self) -> f64 {
        max_abs_difference_quotient(&self.values, self.step())
    }

    /// `Σ |v_{j+1} − v_j|² / h`.
    pub fn discrete_derivative_energy(&self) -> f64 {
        discrete_energy(&self.values, self.step())
    }
}

fn discrete_energy(values: &[Vec<f64>], step: f64) -> f64 {
    values
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) * (b - a)).sum::<f64>())
        .sum::<f64>()
        / step
}

/// Samples of `f = v / (1 − |v|²)^{1/2}` on the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    aperture: f64,
    values: Vec<Vec<f64>>,
}

impl BoundarySamples {
    /// Wraps samples of a function that vanishes at both ends.
    pub fn new(aperture: f64, values: Vec<Vec<f64>>) -> Result<Self, HarmonicError> {
        if values.len() < 3 {
            return Err(HarmonicError::TooFewSamples(values.len().saturating_sub(1)));
        }
        let dim = values[0].len();
        if dim == 0 {
            return Err(HarmonicError::ZeroDimension);
        }
        for (index, v) in values.iter().enumerate() {
            if v.len() != dim {
                return Err(HarmonicError::RaggedSamples {
                    index,
                    found: v.len(),
                    expected: dim,
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(HarmonicError::NonFinite(index));
            }
        }
        let last = values.len() - 1;
        if values[0].iter().chain(&values[last]).any(|&x| x != 0.0) {
            return Err(HarmonicError::NonzeroEnds);
        }
        Ok(Self { aperture, values })
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn step(&self) -> f64 {
        self.aperture / self.intervals() as f64
    }

    pub fn discrete_lipschitz(&self) -> f64 {
        max_abs_difference_quotient(&self.values, self.step())
    }

    pub fn discrete_derivative_energy(&self) -> f64 {
        discrete_energy(&self.values, self.step())
    }
}

pub fn boundary_function(p: &SectorProfile) -> Result<BoundarySamples, HarmonicError> {
    let mut values = Vec::with_capacity(p.values.len());
    for (index, v) in p.values.iter().enumerate() {
        let n2 = norm_sq(v);
        if n2 >= 1.0 {
            return Err(HarmonicError::OutsideBall {
                index,
                norm: n2.sqrt(),
            });
        }
        let scale = 1.0 / (1.0 - n2).sqrt();
        values.push(v.iter().map(|x| x * scale).collect());
    }
    Ok(BoundarySamples {
        aperture: p.aperture,
        values,
    })
}

/// Accuracy of a sine expansion against the samples it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionDiagnostics {
    /// Largest reconstruction error at the grid points.
    pub reconstruction_error: f64,
    /// `Σ |f_{j+1} − f_j|² / h`.
    pub discrete_energy: f64,
    /// `|(π²/2T) Σ k²|β_k|² − discrete_energy|`.
    pub parseval_residual: f64,
}

/// `f(t) = Σ_k β_k sin(πkt/T)` with vector coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSineSeries {
    aperture: f64,
    coefficients: Vec<Vec<f64>>,
    diagnostics: Option<ExpansionDiagnostics>,
}

impl FourierSineSeries {
    /// `coefficients[k − 1]` is `β_k`.
    pub fn from_coefficients(
        aperture: f64,
        coefficients: Vec<Vec<f64>>,
    ) -> Result<Self, HarmonicError> {
        if !(aperture > 0.0 && aperture <= PI) {
            return Err(HarmonicError::ApertureOutOfRange { aperture, min: 0.0 });
        }
        let dim = coefficients.first().map_or(1, Vec::len);
        if dim == 0 {
            return Err(HarmonicError::ZeroDimension);
        }
        for (index, b) in coefficients.iter().enumerate() {
            if b.len() != dim {
                return Err(HarmonicError::RaggedSamples {
                    index,
                    found: b.len(),
                    expected: dim,
                });
            }
        }
        Ok(Self {
            aperture,
            coefficients,
            diagnostics: None,
        })
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn modes(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dim(&self) -> usize {
        self.coefficients.first().map_or(1, Vec::len)
    }

    /// `β_k` for `k ≥ 1`.
    pub fn coefficient(&self, k: usize) -> &[f64] {
        &self.coefficients[k - 1]
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn diagnostics(&self) -> Option<&ExpansionDiagnostics> {
        self.diagnostics.as_ref()
    }

    /// Frequency `πk/T` of mode `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        PI * k as f64 / self.aperture
    }

    /// `∫₀ᵀ |f′|² = (π²/2T) Σ k²|β_k|²`.
    pub fn derivative_energy(&self) -> f64 {
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, b)| ((i + 1) * (i + 1)) as f64 * norm_sq(b))
            .sum();
        PI * PI / (2.0 * self.aperture) * s
    }

    /// `∫₀ᵀ |f|² = (T/2) Σ |β_k|²`.
    pub fn l2_energy(&self) -> f64 {
        0.5 * self.aperture * self.coefficients.iter().map(|b| norm_sq(b)).sum::<f64>()
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        let modes = ModeSet::from_series(self, 0.0);
        let mut f = vec![0.0; modes.dim];
        let mut fp = vec![0.0; modes.dim];
        modes.boundary(t, &mut f, &mut fp);
        f
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let modes = ModeSet::from_series(self, 0.0);
        let mut f = vec![0.0; modes.dim];
        let mut fp = vec![0.0; modes.dim];
        modes.boundary(t, &mut f, &mut fp);
        fp
    }
}

/// Trapezoid-rule sine coefficients on the sample grid (a type-I discrete
/// sine transform), exact for modes below the Nyquist limit.
pub fn sine_expand(f: &BoundarySamples, modes: usize) -> Result<FourierSineSeries, HarmonicError> {
    let m = f.intervals();
    if modes == 0 || modes >= m {
        return Err(HarmonicError::TooManyModes {
            modes,
            max: m - 1,
        });
    }
    let dim = f.dim();
    // sin(πi/M) for i in 0..2M, indexed by (k·j) mod 2M.
    let table: Vec<f64> = (0..2 * m).map(|i| (PI * i as f64 / m as f64).sin()).collect();
    let period = 2 * m;
    let mut coefficients = vec![vec![0.0; dim]; modes];
    for (k, beta) in coefficients.iter_mut().enumerate() {
        let k = k + 1;
        let mut idx = 0usize;
        for j in 1..m {
            idx += k;
            if idx >= period {
                idx -= period;
            }
            let s = table[idx];
            for (b, x) in beta.iter_mut().zip(&f.values[j]) {
                *b += x * s;
            }
        }
        for b in beta.iter_mut() {
            *b *= 2.0 / m as f64;
        }
    }
    let mut reconstruction_error: f64 = 0.0;
    let mut row = vec![0.0; dim];
    for j in 1..m {
        row.iter_mut().for_each(|x| *x = 0.0);
        let mut idx = 0usize;
        for beta in &coefficients {
            idx += j;
            if idx >= period {
                idx -= period;
            }
            let s = table[idx];
            for (r, b) in row.iter_mut().zip(beta) {
                *r += b * s;
            }
        }
        let err: f64 = row
            .iter()
            .zip(&f.values[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        reconstruction_error = reconstruction_error.max(err);
    }
    let mut series = FourierSineSeries {
        aperture: f.aperture,
        coefficients,
        diagnostics: None,
    };
    let discrete = f.discrete_derivative_energy();
    series.diagnostics = Some(ExpansionDiagnostics {
        reconstruction_error,
        discrete_energy: discrete,
        parseval_residual: (series.derivative_energy() - discrete).abs(),
    });
    Ok(series)
}

/// `∫_{D_T} |∇F|²` for `F(ρ cos t, ρ sin t) = ρ f(t)`.
pub fn cone_energy(s: &FourierSineSeries) -> f64 {
    let t = s.aperture;
    t / 4.0
        * s.coefficients
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let lam = PI * (i + 1) as f64 / t;
                (1.0 + lam * lam) * norm_sq(b)
            })
            .sum::<f64>()
}

/// `∫_{D_T} |∇G₁|²` for the harmonic extension `G₁` of `f`.
pub fn harmonic_energy(s: &FourierSineSeries) -> f64 {
    PI / 2.0
        * s.coefficients
            .iter()
            .enumerate()
            .map(|(i, b)| (i + 1) as f64 * norm_sq(b))
            .sum::<f64>()
}

/// `(2T/π) / (1 + (T/π)²)`: worst ratio of harmonic to cone energy.
pub fn contraction_factor(aperture: f64) -> f64 {
    let x = aperture / PI;
    2.0 * x / (1.0 + x * x)
}

/// Energy ratio of a single mode `k`: `2λ/(1+λ²)` with `λ = kπ/T`.
pub fn single_mode_ratio(k: usize, aperture: f64) -> f64 {
    let lam = PI * k as f64 / aperture;
    2.0 * lam / (1.0 + lam * lam)
}

// Truncated series in flat storage, with evaluation kernels shared by all
// the surfaces below. Trig values come from angle-addition recurrences.
#[derive(Debug, Clone)]
struct ModeSet {
    aperture: f64,
    dim: usize,
    count: usize,
    coeffs: Vec<f64>,
}

impl ModeSet {
    fn from_series(s: &FourierSineSeries, cutoff: f64) -> Self {
        let dim = s.dim();
        let biggest = s
            .coefficients
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let count = s
            .coefficients
            .iter()
            .rposition(|b| b.iter().any(|x| x.abs() > cutoff * biggest))
            .map_or(0, |i| i + 1);
        let coeffs = s.coefficients[..count].iter().flatten().copied().collect();
        Self {
            aperture: s.aperture,
            dim,
            count,
            coeffs,
        }
    }

    fn base(&self) -> f64 {
        PI / self.aperture
    }

    fn max_frequency(&self) -> f64 {
        self.base() * self.count.max(1) as f64
    }

    fn beta(&self, k: usize) -> &[f64] {
        &self.coeffs[(k - 1) * self.dim..k * self.dim]
    }

    // Angular panels that resolve products of the highest modes.
    fn angular_panels(&self) -> usize {
        ((0.8 * self.count as f64).ceil() as usize).max(4)
    }

    /// f(t) and f′(t).
    fn boundary(&self, t: f64, f: &mut [f64], fp: &mut [f64]) {
        f.iter_mut().for_each(|x| *x = 0.0);
        fp.iter_mut().for_each(|x| *x = 0.0);
        let base = self.base();
        let (s1, c1) = (base * t).sin_cos();
        let (mut s, mut c) = (s1, c1);
        for k in 1..=self.count {
            let lam = base * k as f64;
            for (d, b) in self.beta(k).iter().enumerate() {
                f[d] += b * s;
                fp[d] += b * lam * c;
            }
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
        }
    }

    /// G₁(σ, t) and ∂_t G₁(σ, t).
    fn extension(&self, sigma: f64, t: f64, g: &mut [f64], gt: &mut [f64]) {
        g.iter_mut().for_each(|x| *x = 0.0);
        gt.iter_mut().for_each(|x| *x = 0.0);
        if sigma <= 0.0 {
            return;
        }
        let base = self.base();
        let q = sigma.powf(base);
        let (s1, c1) = (base * t).sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut p = q;
        for k in 1..=self.count {
            let lam = base * k as f64;
            for (d, b) in self.beta(k).iter().enumerate() {
                g[d] += b * p * s;
                gt[d] += b * p * lam * c;
            }
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            p *= q;
            if p == 0.0 {
                break;
            }
        }
    }

    /// ∂_σ G₁ and σ⁻¹ ∂_t G₁.
    fn extension_gradient(&self, sigma: f64, t: f64, a: &mut [f64], b: &mut [f64]) {
        a.iter_mut().for_each(|x| *x = 0.0);
        b.iter_mut().for_each(|x| *x = 0.0);
        if sigma <= 0.0 {
            return;
        }
        let base = self.base();
        let q = sigma.powf(base);
        let (s1, c1) = (base * t).sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut p = q / sigma;
        for k in 1..=self.count {
            let lam = base * k as f64;
            for (d, beta) in self.beta(k).iter().enumerate() {
                let w = beta * lam * p;
                a[d] += w * s;
                b[d] += w * c;
            }
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            p *= q;
            if p == 0.0 {
                break;
            }
        }
    }

    /// f(t) − G₁(r, t), computed mode by mode to avoid cancellation.
    fn boundary_gap(&self, r: f64, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let base = self.base();
        let ln_r = r.ln();
        let (s1, c1) = (base * t).sin_cos();
        let (mut s, mut c) = (s1, c1);
        for k in 1..=self.count {
            let lam = base * k as f64;
            let gap = -(lam * ln_r).exp_m1();
            for (d, b) in self.beta(k).iter().enumerate() {
                out[d] += b * gap * s;
            }
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
        }
    }

    // Gradient of the annulus interpolation G₂ at σ ∈ [r, 1].
    fn annulus_gradient(&self, r: f64, sigma: f64, t: f64, a: &mut [f64], b: &mut [f64]) {
        let dim = self.dim;
        let mut g = vec![0.0; dim];
        let mut gt = vec![0.0; dim];
        let mut f = vec![0.0; dim];
        let mut fp = vec![0.0; dim];
        self.extension(r, t, &mut g, &mut gt);
        self.boundary(t, &mut f, &mut fp);
        self.boundary_gap(r, t, a);
        let width = 1.0 - r;
        for d in 0..dim {
            a[d] /= width;
            b[d] = ((1.0 - sigma) * gt[d] + (sigma - r) * fp[d]) / (width * sigma);
        }
    }

    fn annulus_value(&self, r: f64, sigma: f64, t: f64, out: &mut [f64]) {
        let dim = self.dim;
        let mut g = vec![0.0; dim];
        let mut gt = vec![0.0; dim];
        let mut f = vec![0.0; dim];
        let mut fp = vec![0.0; dim];
        self.extension(r, t, &mut g, &mut gt);
        self.boundary(t, &mut f, &mut fp);
        let width = 1.0 - r;
        for d in 0..dim {
            out[d] = ((1.0 - sigma) * g[d] + (sigma - r) * f[d]) / width;
        }
    }
}

/// Radial panel edges for harmonic-type integrands on `[s0, s1]` (σ units):
/// geometric near the origin, where powers `σ^λ` are not smooth, and
/// narrower than `2/λ_max` near the unit circle.
fn harmonic_edges(s0: f64, s1: f64, max_frequency: f64) -> Vec<f64> {
    let mut edges = vec![s0];
    let mut s = s0;
    if s < 0.05 {
        for j in (0..=12).rev() {
            let x = 0.05 * 0.5f64.powi(j);
            if x > s * (1.0 + 1e-9) && x < s1 {
                edges.push(x);
                s = x;
            }
        }
    }
    while s < s1 {
        let w = (0.25 * (1.0 - s)).max(2.0 / max_frequency).min(0.1);
        let mut next = (s + w).min(s1);
        if s1 - next < 0.2 * w {
            next = s1;
        }
        edges.push(next);
        s = next;
    }
    edges
}

fn clip_edges(full: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![lo];
    out.extend(full.iter().copied().filter(|&e| e > lo && e < hi));
    out.push(hi);
    out.dedup();
    out
}

/// A graph over the closed sector `{ρ ∈ [0,1], t ∈ [0,T]}` with values in `R^m`.
pub trait SectorGraph {
    fn aperture(&self) -> f64;
    fn dim(&self) -> usize;
    fn value(&self, rho: f64, t: f64) -> Vec<f64>;
    /// Writes `∂_ρ G` into `radial` and `ρ⁻¹ ∂_t G` into `angular`.
    fn polar_gradient(&self, rho: f64, t: f64, radial: &mut [f64], angular: &mut [f64]);
    /// Radial panel edges covering `[lo, hi]`, split at zone seams.
    fn radial_edges(&self, lo: f64, hi: f64) -> Vec<f64>;
    fn angular_panels(&self) -> usize;
}

/// The cone `F(ρ cos t, ρ sin t) = ρ f(t)`.
#[derive(Debug, Clone)]
pub struct ConeGraph {
    modes: ModeSet,
}

impl ConeGraph {
    pub fn new(series: &FourierSineSeries) -> Self {
        Self {
            modes: ModeSet::from_series(series, MODE_CUTOFF),
        }
    }
}

impl SectorGraph for ConeGraph {
    fn aperture(&self) -> f64 {
        self.modes.aperture
    }

    fn dim(&self) -> usize {
        self.modes.dim
    }

    fn value(&self, rho: f64, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.modes.dim];
        let mut fp = vec![0.0; self.modes.dim];
        self.modes.boundary(t, &mut f, &mut fp);
        f.iter_mut().for_each(|x| *x *= rho);
        f
    }

    fn polar_gradient(&self, _rho: f64, t: f64, radial: &mut [f64], angular: &mut [f64]) {
        self.modes.boundary(t, radial, angular);
    }

    fn radial_edges(&self, lo: f64, hi: f64) -> Vec<f64> {
        vec![lo, hi]
    }

    fn angular_panels(&self) -> usize {
        self.modes.angular_panels()
    }
}

/// The harmonic extension `G₁(ρ cos t, ρ sin t) = Σ β_k ρ^{πk/T} sin(πkt/T)`.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    modes: ModeSet,
}

impl HarmonicExtension {
    pub fn new(series: &FourierSineSeries) -> Self {
        Self {
            modes: ModeSet::from_series(series, MODE_CUTOFF),
        }
    }
}

impl SectorGraph for HarmonicExtension {
    fn aperture(&self) -> f64 {
        self.modes.aperture
    }

    fn dim(&self) -> usize {
        self.modes.dim
    }

    fn value(&self, rho: f64, t: f64) -> Vec<f64> {
        let mut g = vec![0.0; self.modes.dim];
        let mut gt = vec![0.0; self.modes.dim];
        self.modes.extension(rho, t, &mut g, &mut gt);
        g
    }

    fn polar_gradient(&self, rho: f64, t: f64, radial: &mut [f64], angular: &mut [f64]) {
        self.modes.extension_gradient(rho, t, radial, angular);
    }

    fn radial_edges(&self, lo: f64, hi: f64) -> Vec<f64> {
        clip_edges(&harmonic_edges(0.0, 1.0, self.modes.max_frequency()), lo, hi)
    }

    fn angular_panels(&self) -> usize {
        self.modes.angular_panels()
    }
}

/// `G₁` inside radius `r`, linear in `ρ` between `G₁(r, ·)` and `f` on `[r, 1]`.
#[derive(Debug, Clone)]
pub struct InterpolatedExtension {
    modes: ModeSet,
    radius: f64,
}

impl InterpolatedExtension {
    pub fn new(series: &FourierSineSeries, radius: f64) -> Self {
        Self {
            modes: ModeSet::from_series(series, MODE_CUTOFF),
            radius,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl SectorGraph for InterpolatedExtension {
    fn aperture(&self) -> f64 {
        self.modes.aperture
    }

    fn dim(&self) -> usize {
        self.modes.dim
    }

    fn value(&self, rho: f64, t: f64) -> Vec<f64> {
        let mut g = vec![0.0; self.modes.dim];
        if rho <= self.radius {
            let mut gt = vec![0.0; self.modes.dim];
            self.modes.extension(rho, t, &mut g, &mut gt);
        } else {
            self.modes.annulus_value(self.radius, rho, t, &mut g);
        }
        g
    }

    fn polar_gradient(&self, rho: f64, t: f64, radial: &mut [f64], angular: &mut [f64]) {
        if rho <= self.radius {
            self.modes.extension_gradient(rho, t, radial, angular);
        } else {
            self.modes
                .annulus_gradient(self.radius, rho, t, radial, angular);
        }
    }

    fn radial_edges(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut full = harmonic_edges(0.0, self.radius, self.modes.max_frequency());
        full.push(1.0);
        clip_edges(&full, lo, hi)
    }

    fn angular_panels(&self) -> usize {
        self.modes.angular_panels()
    }
}

/// Radial zone of the replacement graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Zone {
    /// `ρ < 2κ`: identically zero.
    Core,
    /// `2κ ≤ ρ < 3κ`: linear ramp from zero.
    Collar,
    /// `3κ ≤ ρ < (9/10)·r`: rescaled harmonic extension.
    Middle,
    /// `(9/10)·r ≤ ρ < 9/10`: rescaled annulus interpolation.
    Annulus,
    /// `ρ ≥ 9/10`: the cone itself.
    Outer,
}

/// The replacement `G` over the closed sector.
#[derive(Debug, Clone)]
pub struct ReplacementGraph {
    modes: ModeSet,
    kappa: f64,
    interp_radius: f64,
}

impl ReplacementGraph {
    pub fn from_series(series: &FourierSineSeries, kappa: f64) -> Result<Self, HarmonicError> {
        if !(kappa > 0.0 && 3.0 * kappa < OUTER_RADIUS) {
            return Err(HarmonicError::ZoneOverlap { kappa });
        }
        Ok(Self {
            modes: ModeSet::from_series(series, MODE_CUTOFF),
            kappa,
            interp_radius: INTERP_RADIUS,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn interp_radius(&self) -> f64 {
        self.interp_radius
    }

    /// Modes kept in the continuous model after dropping negligible tails.
    pub fn effective_modes(&self) -> usize {
        self.modes.count
    }

    pub fn zone(&self, rho: f64) -> Zone {
        if rho < 2.0 * self.kappa {
            Zone::Core
        } else if rho < 3.0 * self.kappa {
            Zone::Collar
        } else if rho < OUTER_RADIUS * self.interp_radius {
            Zone::Middle
        } else if rho < OUTER_RADIUS {
            Zone::Annulus
        } else {
            Zone::Outer
        }
    }

    /// Interface radii between consecutive zones.
    pub fn interfaces(&self) -> [f64; 4] {
        [
            2.0 * self.kappa,
            3.0 * self.kappa,
            OUTER_RADIUS * self.interp_radius,
            OUTER_RADIUS,
        ]
    }

    fn collar_sigma(&self) -> f64 {
        3.0 * self.kappa / OUTER_RADIUS
    }

    /// Evaluates the formula of `zone` at `(ρ, t)` regardless of where `ρ` lies.
    pub fn value_in(&self, zone: Zone, rho: f64, t: f64) -> Vec<f64> {
        let dim = self.modes.dim;
        let mut out = vec![0.0; dim];
        let mut scratch = vec![0.0; dim];
        match zone {
            Zone::Core => {}
            Zone::Collar => {
                self.modes
                    .extension(self.collar_sigma(), t, &mut out, &mut scratch);
                let s = OUTER_RADIUS * (rho - 2.0 * self.kappa) / self.kappa;
                out.iter_mut().for_each(|x| *x *= s);
            }
            Zone::Middle => {
                self.modes
                    .extension(rho / OUTER_RADIUS, t, &mut out, &mut scratch);
                out.iter_mut().for_each(|x| *x *= OUTER_RADIUS);
            }
            Zone::Annulus => {
                self.modes
                    .annulus_value(self.interp_radius, rho / OUTER_RADIUS, t, &mut out);
                out.iter_mut().for_each(|x| *x *= OUTER_RADIUS);
            }
            Zone::Outer => {
                self.modes.boundary(t, &mut out, &mut scratch);
                out.iter_mut().for_each(|x| *x *= rho);
            }
        }
        out
    }

    /// Largest jump of `G` across the four interface circles, sampled at
    /// `samples + 1` angles.
    pub fn continuity_defect(&self, samples: usize) -> f64 {
        let zones = [Zone::Core, Zone::Collar, Zone::Middle, Zone::Annulus, Zone::Outer];
        let t_max = self.modes.aperture;
        let mut worst: f64 = 0.0;
        for (i, &radius) in self.interfaces().iter().enumerate() {
            for j in 0..=samples {
                let t = t_max * j as f64 / samples as f64;
                let inner = self.value_in(zones[i], radius, t);
                let outer = self.value_in(zones[i + 1], radius, t);
                let gap: f64 = inner
                    .iter()
                    .zip(&outer)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(gap);
            }
        }
        worst
    }

    /// Largest `|G|` on the two bounding half-lines, sampled at `samples + 1` radii.
    pub fn boundary_defect(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..=samples {
            let rho = j as f64 / samples as f64;
            for t in [0.0, self.modes.aperture] {
                worst = worst.max(norm_sq(&self.value(rho, t)).sqrt());
            }
        }
        worst
    }
}

impl SectorGraph for ReplacementGraph {
    fn aperture(&self) -> f64 {
        self.modes.aperture
    }

    fn dim(&self) -> usize {
        self.modes.dim
    }

    fn value(&self, rho: f64, t: f64) -> Vec<f64> {
        self.value_in(self.zone(rho), rho, t)
    }

    fn polar_gradient(&self, rho: f64, t: f64, radial: &mut [f64], angular: &mut [f64]) {
        let sigma = rho / OUTER_RADIUS;
        match self.zone(rho) {
            Zone::Core => {
                radial.iter_mut().for_each(|x| *x = 0.0);
                angular.iter_mut().for_each(|x| *x = 0.0);
            }
            Zone::Collar => {
                self.modes
                    .extension(self.collar_sigma(), t, radial, angular);
                let ramp = OUTER_RADIUS / self.kappa;
                let tangential = ramp * (rho - 2.0 * self.kappa) / rho;
                radial.iter_mut().for_each(|x| *x *= ramp);
                angular.iter_mut().for_each(|x| *x *= tangential);
            }
            Zone::Middle => self.modes.extension_gradient(sigma, t, radial, angular),
            Zone::Annulus => {
                self.modes
                    .annulus_gradient(self.interp_radius, sigma, t, radial, angular)
            }
            Zone::Outer => self.modes.boundary(t, radial, angular),
        }
    }

    fn radial_edges(&self, lo: f64, hi: f64) -> Vec<f64> {
        let [core, collar, annulus, outer] = self.interfaces();
        let mut full = vec![core];
        full.push(0.5 * (core + collar));
        let middle = harmonic_edges(
            self.collar_sigma(),
            self.interp_radius,
            self.modes.max_frequency(),
        );
        full.extend(middle.iter().map(|s| s * OUTER_RADIUS));
        full.push(annulus);
        full.push(outer);
        full.push(1.0);
        clip_edges(&full, lo, hi)
    }

    fn angular_panels(&self) -> usize {
        self.modes.angular_panels()
    }
}

/// A polar rectangle `{ρ ∈ [ρ₀, ρ₁], t ∈ [t₀, t₁]}` inside the sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubSector {
    pub rho: (f64, f64),
    pub t: (f64, f64),
}

impl SubSector {
    pub fn full(aperture: f64) -> Self {
        Self {
            rho: (0.0, 1.0),
            t: (0.0, aperture),
        }
    }

    pub fn disk(aperture: f64, radius: f64) -> Self {
        Self {
            rho: (0.0, radius),
            t: (0.0, aperture),
        }
    }

    pub fn annulus(aperture: f64, inner: f64, outer: f64) -> Self {
        Self {
            rho: (inner, outer),
            t: (0.0, aperture),
        }
    }

    pub fn flat_area(&self) -> f64 {
        0.5 * (self.t.1 - self.t.0) * (self.rho.1 * self.rho.1 - self.rho.0 * self.rho.0)
    }
}

// Tensor Gauss–Legendre over radial panels × equal angular panels; the
// integrand receives (ρ, t, ∂_ρG, ρ⁻¹∂_tG). Returns the integral and the
// largest gradient norm seen at the nodes.
fn polar_sum<G, F>(
    graph: &G,
    rule: &GaussLegendre,
    radial: &[f64],
    region: &SubSector,
    angular_panels: usize,
    mut integrand: F,
) -> (f64, f64)
where
    G: SectorGraph + ?Sized,
    F: FnMut(&[f64], &[f64]) -> f64,
{
    let dim = graph.dim();
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    let (t0, t1) = region.t;
    let h = (t1 - t0) / angular_panels as f64;
    let t_nodes: Vec<(f64, f64)> = (0..angular_panels)
        .flat_map(|p| {
            let lo = t0 + h * p as f64;
            let hi = if p + 1 == angular_panels { t1 } else { lo + h };
            rule.mapped(lo, hi).collect::<Vec<_>>()
        })
        .collect();
    let mut total = 0.0;
    let mut max_gradient: f64 = 0.0;
    for w in radial.windows(2) {
        for (rho, wr) in rule.mapped(w[0], w[1]) {
            let mut ring = 0.0;
            for &(t, wt) in &t_nodes {
                graph.polar_gradient(rho, t, &mut a, &mut b);
                max_gradient = max_gradient.max((norm_sq(&a) + norm_sq(&b)).sqrt());
                ring += wt * integrand(&a, &b);
            }
            total += wr * rho * ring;
        }
    }
    (total, max_gradient)
}

fn refine(edges: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * edges.len());
    for w in edges.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*edges.last().unwrap());
    out
}

fn polar_estimate<G, F>(graph: &G, region: &SubSector, mut integrand: F) -> (Estimate, f64)
where
    G: SectorGraph + ?Sized,
    F: FnMut(&[f64], &[f64]) -> f64,
{
    let rule = GaussLegendre::new(GAUSS_ORDER);
    let coarse_edges = graph.radial_edges(region.rho.0, region.rho.1);
    let fine_edges = refine(&coarse_edges);
    let panels = graph.angular_panels();
    let (coarse, _) = polar_sum(graph, &rule, &coarse_edges, region, panels, &mut integrand);
    let (fine, max_gradient) = polar_sum(graph, &rule, &fine_edges, region, 2 * panels, &mut integrand);
    (
        Estimate {
            value: fine,
            error: (fine - coarse).abs(),
        },
        max_gradient,
    )
}

/// `J − 1` for the graph map with polar partials `a`, `b`, written to stay
/// accurate when the gradient is tiny.
fn jacobian_excess(a: &[f64], b: &[f64]) -> f64 {
    let aa = norm_sq(a);
    let bb = norm_sq(b);
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let u = aa + bb + (aa * bb - ab * ab).max(0.0);
    u / (1.0 + (1.0 + u).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaEstimate {
    /// Area of the graph over the region.
    pub area: f64,
    /// Area minus the flat area of the region.
    pub excess: f64,
    /// Difference between two quadrature resolutions.
    pub error: f64,
    /// Largest `|∇G|` over the quadrature nodes.
    pub max_gradient: f64,
}

/// Area of the graph over `region` by the area formula.
pub fn graph_area<G: SectorGraph + ?Sized>(graph: &G, region: &SubSector) -> AreaEstimate {
    let (excess, max_gradient) = polar_estimate(graph, region, jacobian_excess);
    AreaEstimate {
        area: region.flat_area() + excess.value,
        excess: excess.value,
        error: excess.error,
        max_gradient,
    }
}

/// `∫ |∇G|²` over `region`.
pub fn dirichlet_energy<G: SectorGraph + ?Sized>(graph: &G, region: &SubSector) -> Estimate {
    polar_estimate(graph, region, |a, b| norm_sq(a) + norm_sq(b)).0
}

/// `∫₀ᵀ |v′|²` and `length(Γ) − T` for the curve encoded by the series of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveIntegrals {
    pub v_derivative_energy: f64,
    pub length_excess: f64,
    pub error: f64,
}

pub fn curve_integrals(series: &FourierSineSeries) -> CurveIntegrals {
    let modes = ModeSet::from_series(series, MODE_CUTOFF);
    let rule = GaussLegendre::new(GAUSS_ORDER);
    let dim = modes.dim;
    let eval = |panels: usize| -> (f64, f64) {
        let mut f = vec![0.0; dim];
        let mut fp = vec![0.0; dim];
        let mut energy = 0.0;
        let mut excess = 0.0;
        let h = modes.aperture / panels as f64;
        for p in 0..panels {
            let lo = h * p as f64;
            let hi = if p + 1 == panels { modes.aperture } else { lo + h };
            for (t, w) in rule.mapped(lo, hi) {
                modes.boundary(t, &mut f, &mut fp);
                // v = f/s, w = 1/s with s = (1 + |f|²)^{1/2}.
                let s2 = 1.0 + norm_sq(&f);
                let s = s2.sqrt();
                let ffp: f64 = f.iter().zip(&fp).map(|(x, y)| x * y).sum();
                let vp2: f64 = f
                    .iter()
                    .zip(&fp)
                    .map(|(x, y)| {
                        let vp = y / s - x * ffp / (s2 * s);
                        vp * vp
                    })
                    .sum();
                let v2 = norm_sq(&f) / s2;
                let wp = -ffp / (s2 * s);
                // |z′|² − 1 = −|v|² + w′² + |v′|².
                let d = -v2 + wp * wp + vp2;
                energy += w * vp2;
                excess += w * d / ((1.0 + d).sqrt() + 1.0);
            }
        }
        (energy, excess)
    };
    let panels = modes.angular_panels();
    let (e1, x1) = eval(panels);
    let (e2, x2) = eval(2 * panels);
    CurveIntegrals {
        v_derivative_energy: e2,
        length_excess: x2,
        error: (e2 - e1).abs().max((x2 - x1).abs()),
    }
}

/// Everything measured by one harmonic-replacement run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavingReport {
    pub aperture: f64,
    pub dim: usize,
    pub eta: f64,
    pub kappa: f64,
    pub modes: usize,
    pub effective_modes: usize,
    pub cone_energy: f64,
    pub harmonic_energy: f64,
    /// `harmonic_energy / cone_energy`, absent for a flat profile.
    pub ratio: Option<f64>,
    pub contraction_factor: f64,
    pub f_derivative_energy: f64,
    pub v_derivative_energy: f64,
    pub length_excess: f64,
    pub parseval_residual: f64,
    pub reconstruction_error: f64,
    /// Area of the cone graph minus area of the replacement over `ρ < 9/10`.
    pub saving: f64,
    pub lower_bound: f64,
    pub quadrature_error: f64,
    /// Largest `|∇G|` at the quadrature nodes.
    pub lipschitz_estimate: f64,
    pub cone_lipschitz_estimate: f64,
    /// Discrete Lipschitz constant of `v`.
    pub v_lipschitz: f64,
    /// `∫ |∇G|²` over the collar `2κ ≤ ρ ≤ 3κ`.
    pub collar_energy: f64,
    /// `∫ |∇G₂|²` over the interpolation annulus of the unscaled sector.
    pub annulus_energy: f64,
    pub continuity_defect: f64,
    pub boundary_defect: f64,
    pub contract_holds: bool,
}

pub fn build_replacement(
    p: &SectorProfile,
    kappa: f64,
    modes: usize,
) -> Result<ReplacementGraph, HarmonicError> {
    let series = sine_expand(&boundary_function(p)?, modes)?;
    ReplacementGraph::from_series(&series, kappa)
}

/// Runs the whole replacement and compares the saving with
/// `10⁻⁴·max(∫|v′|², length(Γ) − T)`.
pub fn area_saving(
    p: &SectorProfile,
    kappa: f64,
    modes: usize,
) -> Result<SavingReport, HarmonicError> {
    if p.eta > SAVING_ETA_MAX {
        return Err(HarmonicError::EtaOutOfRange {
            eta: p.eta,
            max: SAVING_ETA_MAX,
        });
    }
    let samples = boundary_function(p)?;
    let series = sine_expand(&samples, modes)?;
    let diagnostics = *series.diagnostics().expect("expansion records diagnostics");
    let graph = ReplacementGraph::from_series(&series, kappa)?;
    let cone = ConeGraph::new(&series);
    let inner = SubSector::disk(p.aperture, OUTER_RADIUS);
    let cone_area = graph_area(&cone, &inner);
    let replaced_area = graph_area(&graph, &inner);
    let curve = curve_integrals(&series);
    let ce = cone_energy(&series);
    let he = harmonic_energy(&series);
    let collar = dirichlet_energy(
        &graph,
        &SubSector::annulus(p.aperture, 2.0 * kappa, 3.0 * kappa),
    );
    let g2 = InterpolatedExtension::new(&series, INTERP_RADIUS);
    let annulus = dirichlet_energy(&g2, &SubSector::annulus(p.aperture, INTERP_RADIUS, 1.0));
    let saving = cone_area.excess - replaced_area.excess;
    let lower_bound =
        SAVING_CONSTANT * curve.v_derivative_energy.max(curve.length_excess).max(0.0);
    let quadrature_error = cone_area.error + replaced_area.error + SAVING_CONSTANT * curve.error;
    Ok(SavingReport {
        aperture: p.aperture,
        dim: p.dim(),
        eta: p.eta,
        kappa,
        modes,
        effective_modes: graph.effective_modes(),
        cone_energy: ce,
        harmonic_energy: he,
        ratio: (ce > 0.0).then(|| he / ce),
        contraction_factor: contraction_factor(p.aperture),
        f_derivative_energy: series.derivative_energy(),
        v_derivative_energy: curve.v_derivative_energy,
        length_excess: curve.length_excess,
        parseval_residual: diagnostics.parseval_residual,
        reconstruction_error: diagnostics.reconstruction_error,
        saving,
        lower_bound,
        quadrature_error,
        lipschitz_estimate: replaced_area.max_gradient,
        cone_lipschitz_estimate: cone_area.max_gradient,
        v_lipschitz: p.discrete_lipschitz(),
        collar_energy: collar.value,
        annulus_energy: annulus.value,
        continuity_defect: graph.continuity_defect(256),
        boundary_defect: graph.boundary_defect(256),
        contract_holds: saving + quadrature_error >= lower_bound,
    })
}

/// A smooth random profile: a few sine modes per component with decaying
/// Gaussian amplitudes, scaled so the discrete Lipschitz constant is `0.95·eta`.
pub fn random_profile<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    aperture: f64,
    eta: f64,
    intervals: usize,
) -> Result<SectorProfile, HarmonicError> {
    const MODES: usize = 4;
    let amps: Vec<Vec<f64>> = (0..dim)
        .map(|_| {
            (1..=MODES)
                .map(|k| rng.sample::<f64, _>(StandardNormal) / (k * k) as f64)
                .collect()
        })
        .collect();
    let mut values: Vec<Vec<f64>> = (0..=intervals)
        .map(|j| {
            let t = aperture * j as f64 / intervals as f64;
            amps.iter()
                .map(|a| {
                    a.iter()
                        .enumerate()
                        .map(|(k, c)| c * (PI * (k + 1) as f64 * t / aperture).sin())
                        .sum()
                })
                .collect()
        })
        .collect();
    values[0].iter_mut().for_each(|x| *x = 0.0);
    values[intervals].iter_mut().for_each(|x| *x = 0.0);
    let lip = max_abs_difference_quotient(&values, aperture / intervals as f64);
    if lip > 0.0 {
        let scale = 0.95 * eta / lip;
        values
            .iter_mut()
            .for_each(|v| v.iter_mut().for_each(|x| *x *= scale));
    }
    SectorProfile::new(aperture, values, eta)
}

/// Profile `index` of the seeded saving battery: aperture uniform in
/// `[1, 10π/11]`, `η = 0.05`, drawn from ChaCha8 stream `index`.
pub fn battery_profile(
    seed: u64,
    index: u64,
    dim: usize,
    intervals: usize,
) -> Result<SectorProfile, HarmonicError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let aperture = rng.gen_range(1.0..MAX_APERTURE);
    random_profile(&mut rng, dim, aperture, SAVING_ETA_MAX, intervals)
}

/// Samples `v(t) = amplitude · sin(kπt/T)` in the first component.
pub fn single_mode_profile(
    aperture: f64,
    k: usize,
    amplitude: f64,
    dim: usize,
    intervals: usize,
    eta: f64,
) -> Result<SectorProfile, HarmonicError> {
    let mut values: Vec<Vec<f64>> = (0..=intervals)
        .map(|j| {
            let mut v = vec![0.0; dim];
            v[0] = amplitude * (PI * k as f64 * j as f64 / intervals as f64).sin();
            v
        })
        .collect();
    values[0][0] = 0.0;
    values[intervals][0] = 0.0;
    SectorProfile::new(aperture, values, eta)
}
