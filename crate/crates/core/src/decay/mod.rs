//! Density profiles and decay estimates for the density excess.
//!
//! A profile tabulates `θ(r) = r⁻² H²(E ∩ B(x, r))` together with the limit
//! density `d₀`; the excess is `f = θ − d₀`. The decay estimates integrate
//! `r f′ ≥ a f − 24 h(2r)` (and the weaker `r f′ ≥ 2α f₊^N − C h(2r)`)
//! backwards from a radius `y` to a smaller radius `x`.

mod io;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{adaptive, adaptive_semi_infinite, QuadratureError};

pub use io::{profile_from_csv, profile_to_csv};

/// Constant in front of the gauge integral of the power-law decay bound.
pub const DECAY_CONSTANT: f64 = 24.0;
/// Tolerance of the near-monotonicity check.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Local error tolerance of the envelope certification integrator.
pub const ODE_TOL: f64 = 1e-9;
/// Number of radii at which an envelope is compared with the ODE solution.
pub const ENVELOPE_POINTS: usize = 1000;

const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_ABS_TOL: f64 = 1e-300;
// Relative slack when checking that r²θ is nondecreasing.
const MEASURE_SLACK: f64 = 1e-12;
// Safety factor applied to the smallest admissible envelope constant.
const ENVELOPE_MARGIN: f64 = 1.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),
    #[error("Dini condition fails: log gauge needs b > 1, got {0}")]
    DiniFails(f64),
    #[error("radius {r} outside the range of the gauge (need {bound})")]
    OutOfRange { r: f64, bound: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("profile: {0}")]
    InvalidProfile(String),
    #[error("r²θ decreases between r = {r0} and r = {r1}")]
    MeasureDecreasing { r0: f64, r1: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("ODE integration failed at r = {0}")]
    Integration(f64),
    #[error("profile format: {0}")]
    Format(String),
}

/// A gauge function `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaugeSpec {
    /// `h(r) = c0·r^b`, `b ∈ (0, 1]`.
    Power { c0: f64, b: f64 },
    /// `h(r) = c·[log(A/r)]^{−b}` for `r < A`.
    Log { c: f64, scale: f64, b: f64 },
}

impl GaugeSpec {
    pub fn power(c0: f64, b: f64) -> Result<Self, DecayError> {
        let g = GaugeSpec::Power { c0, b };
        g.validate()?;
        Ok(g)
    }

    pub fn log(c: f64, scale: f64, b: f64) -> Result<Self, DecayError> {
        let g = GaugeSpec::Log { c, scale, b };
        g.validate()?;
        Ok(g)
    }

    /// The zero gauge.
    pub fn zero() -> Self {
        GaugeSpec::Power { c0: 0.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<(), DecayError> {
        match *self {
            GaugeSpec::Power { c0, b } => {
                if !(c0 >= 0.0 && c0.is_finite()) || !(b > 0.0 && b <= 1.0) {
                    return Err(DecayError::InvalidGauge(format!(
                        "power gauge needs c0 ≥ 0 and b ∈ (0, 1], got c0 = {c0}, b = {b}"
                    )));
                }
            }
            GaugeSpec::Log { c, scale, b } => {
                if !(c >= 0.0 && c.is_finite()) || !(scale > 0.0) || !(b > 0.0) {
                    return Err(DecayError::InvalidGauge(format!(
                        "log gauge needs c ≥ 0, A > 0, b > 0, got c = {c}, A = {scale}, b = {b}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            GaugeSpec::Power { c0, .. } => c0 == 0.0,
            GaugeSpec::Log { c, .. } => c == 0.0,
        }
    }

    /// `h(r)`; the log gauge is defined for `0 < r < A`.
    pub fn h(&self, r: f64) -> Result<f64, DecayError> {
        if !(r > 0.0) {
            return Err(DecayError::OutOfRange {
                r,
                bound: "r > 0".into(),
            });
        }
        match *self {
            GaugeSpec::Power { c0, b } => Ok(c0 * r.powf(b)),
            GaugeSpec::Log { c, scale, b } => {
                if r >= scale {
                    return Err(DecayError::OutOfRange {
                        r,
                        bound: format!("r < A = {scale}"),
                    });
                }
                Ok(c * (scale / r).ln().powf(-b))
            }
        }
    }

    /// Largest radius `y` for which `h(2r)` is defined on `(0, y]`.
    fn doubled_limit(&self) -> f64 {
        match *self {
            GaugeSpec::Power { .. } => f64::INFINITY,
            GaugeSpec::Log { scale, .. } => scale / 2.0,
        }
    }
}

/// `h₁(r) = ∫₀^r h(2t) dt/t`: closed form for power gauges, quadrature for
/// log gauges.
pub fn gauge_h1(g: &GaugeSpec, r: f64) -> Result<f64, DecayError> {
    g.validate()?;
    if !(r > 0.0) {
        return Err(DecayError::OutOfRange {
            r,
            bound: "r > 0".into(),
        });
    }
    match *g {
        GaugeSpec::Power { c0, b } => Ok(c0 * 2f64.powf(b) * r.powf(b) / b),
        GaugeSpec::Log { c, scale, b } => {
            if b <= 1.0 {
                return Err(DecayError::DiniFails(b));
            }
            if r >= scale / 2.0 {
                return Err(DecayError::OutOfRange {
                    r,
                    bound: format!("r < A/2 = {}", scale / 2.0),
                });
            }
            if c == 0.0 {
                return Ok(0.0);
            }
            // With s = log(A/2t) = s₀eʷ the integral is s₀^{1−b} ∫₀^∞ e^{(1−b)w} dw.
            let s0 = (scale / (2.0 * r)).ln();
            let tail = adaptive_semi_infinite(
                |w| ((1.0 - b) * w).exp(),
                0.0,
                QUAD_ABS_TOL,
                QUAD_REL_TOL,
            )?;
            Ok(c * s0.powf(1.0 - b) * tail.value)
        }
    }
}

/// Converts the full-length exponent to the decay exponent `a = 4α/(1 − 2α)`.
pub fn alpha_to_a(alpha: f64) -> Result<f64, DecayError> {
    if !(alpha > 0.0 && alpha < 1.0 / 3.0) {
        return Err(DecayError::InvalidParameter(format!(
            "alpha = {alpha} outside (0, 1/3)"
        )));
    }
    Ok(4.0 * alpha / (1.0 - 2.0 * alpha))
}

fn check_radii(x: f64, y: f64) -> Result<(), DecayError> {
    if !(x > 0.0 && x < y && y.is_finite()) {
        return Err(DecayError::InvalidParameter(format!(
            "need 0 < x < y, got x = {x}, y = {y}"
        )));
    }
    Ok(())
}

fn check_exponent(a: f64) -> Result<(), DecayError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(DecayError::InvalidParameter(format!("need a > 0, got {a}")));
    }
    Ok(())
}

/// `∫ₓ^y r^{−a−1} h(2r) dr`, in closed form for power gauges.
pub fn decay_integral(a: f64, g: &GaugeSpec, x: f64, y: f64) -> Result<f64, DecayError> {
    check_exponent(a)?;
    check_radii(x, y)?;
    g.validate()?;
    if g.is_zero() {
        return Ok(0.0);
    }
    match *g {
        GaugeSpec::Power { c0, b } => {
            // C₀2^b x^{b−a} (e^{(b−a)L} − 1)/(b − a), L = log(y/x).
            let d = b - a;
            let l = (y / x).ln();
            let factor = if d == 0.0 { l } else { (d * l).exp_m1() / d };
            Ok(c0 * 2f64.powf(b) * x.powf(d) * factor)
        }
        GaugeSpec::Log { .. } => {
            if y >= g.doubled_limit() {
                return Err(DecayError::OutOfRange {
                    r: y,
                    bound: format!("y < A/2 = {}", g.doubled_limit()),
                });
            }
            decay_integral_quadrature(a, g, x, y)
        }
    }
}

/// The same integral by adaptive quadrature in `log r`, for any gauge.
pub fn decay_integral_quadrature(
    a: f64,
    g: &GaugeSpec,
    x: f64,
    y: f64,
) -> Result<f64, DecayError> {
    check_exponent(a)?;
    check_radii(x, y)?;
    let mut failure = None;
    let est = adaptive(
        |u| {
            let r = u.exp();
            match g.h(2.0 * r) {
                Ok(h) => (-a * u).exp() * h,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        x.ln(),
        y.ln(),
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// `(x/y)^a f_y + 24 x^a ∫ₓ^y r^{−a−1} h(2r) dr`.
pub fn decay_bound(f_y: f64, a: f64, g: &GaugeSpec, x: f64, y: f64) -> Result<f64, DecayError> {
    let integral = decay_integral(a, g, x, y)?;
    Ok((x / y).powf(a) * f_y + DECAY_CONSTANT * x.powf(a) * integral)
}

/// `a⁻¹x^{−a}h(2z) + a⁻¹z^{−a}h(2y)`, an upper bound for the decay integral
/// for any `z ∈ [x, y]`.
pub fn split_integral_bound(
    a: f64,
    g: &GaugeSpec,
    x: f64,
    y: f64,
    z: f64,
) -> Result<f64, DecayError> {
    check_exponent(a)?;
    check_radii(x, y)?;
    if !(z >= x && z <= y) {
        return Err(DecayError::InvalidParameter(format!(
            "split point z = {z} outside [{x}, {y}]"
        )));
    }
    Ok((x.powf(-a) * g.h(2.0 * z)? + z.powf(-a) * g.h(2.0 * y)?) / a)
}

/// The explicit log-gauge decay bound
/// `(x/y)^a f_y + K₁(x/A)^{a/2} + K₂[log(A/2x)]^{−b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDecayBound {
    pub value: f64,
    pub power_term: f64,
    /// `K₁ = 24·C·2^{a/2} / (a [log(A/2y)]^b)`, from radii where `log(A/2r)` is small.
    pub near_constant: f64,
    /// `K₂ = 24·C·2^b / a`, from radii where `log(A/2r) ≥ log(A/2x)/2`.
    pub far_constant: f64,
    pub near_term: f64,
    pub far_term: f64,
}

pub fn log_gauge_decay(
    f_y: f64,
    a: f64,
    c: f64,
    scale: f64,
    b: f64,
    x: f64,
    y: f64,
) -> Result<LogDecayBound, DecayError> {
    check_exponent(a)?;
    check_radii(x, y)?;
    GaugeSpec::log(c, scale, b)?;
    if !(y < scale / 3.0) {
        return Err(DecayError::OutOfRange {
            r: y,
            bound: format!("y < A/3 = {}", scale / 3.0),
        });
    }
    let power_term = (x / y).powf(a) * f_y;
    let near_constant =
        DECAY_CONSTANT * c * 2f64.powf(a / 2.0) / (a * (scale / (2.0 * y)).ln().powf(b));
    let far_constant = DECAY_CONSTANT * c * 2f64.powf(b) / a;
    let near_term = near_constant * (x / scale).powf(a / 2.0);
    let far_term = far_constant * (scale / (2.0 * x)).ln().powf(-b);
    Ok(LogDecayBound {
        value: power_term + near_term + far_term,
        power_term,
        near_constant,
        far_constant,
        near_term,
        far_term,
    })
}

/// Tabulated `θ(r)` with the limit density `d₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    radii: Vec<f64>,
    theta: Vec<f64>,
    d0: f64,
}

impl DensityProfile {
    /// Checks `r > 0` strictly increasing, `θ ≥ 0` and `r²θ` nondecreasing.
    pub fn new(radii: Vec<f64>, theta: Vec<f64>, d0: f64) -> Result<Self, DecayError> {
        if radii.len() != theta.len() {
            return Err(DecayError::InvalidProfile(format!(
                "{} radii but {} densities",
                radii.len(),
                theta.len()
            )));
        }
        if radii.is_empty() {
            return Err(DecayError::InvalidProfile("empty profile".into()));
        }
        if !d0.is_finite() {
            return Err(DecayError::InvalidProfile(format!("d0 = {d0}")));
        }
        for (j, (r, t)) in radii.iter().zip(&theta).enumerate() {
            if !(r.is_finite() && *r > 0.0) || !(t.is_finite() && *t >= 0.0) {
                return Err(DecayError::InvalidProfile(format!(
                    "sample {j}: r = {r}, θ = {t}"
                )));
            }
        }
        for j in 1..radii.len() {
            if radii[j] <= radii[j - 1] {
                return Err(DecayError::InvalidProfile(format!(
                    "radii not strictly increasing at sample {j}"
                )));
            }
            let m0 = radii[j - 1] * radii[j - 1] * theta[j - 1];
            let m1 = radii[j] * radii[j] * theta[j];
            if m1 < m0 * (1.0 - MEASURE_SLACK) {
                return Err(DecayError::MeasureDecreasing {
                    r0: radii[j - 1],
                    r1: radii[j],
                });
            }
        }
        Ok(Self { radii, theta, d0 })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Density excess `f(r_j) = θ(r_j) − d₀`.
    pub fn excess(&self, j: usize) -> f64 {
        self.theta[j] - self.d0
    }
}

/// Tabulates `theta` on `radii`, rejecting models whose `r²θ` decreases.
pub fn synthesize_profile<F: Fn(f64) -> f64>(
    theta: F,
    d0: f64,
    radii: &[f64],
) -> Result<DensityProfile, DecayError> {
    let values = radii.iter().map(|&r| theta(r)).collect();
    DensityProfile::new(radii.to_vec(), values, d0)
}

/// `count` log-spaced radii from `r_min` to `r_max`.
pub fn log_grid(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    let (l0, l1) = (r_min.ln(), r_max.ln());
    (0..count)
        .map(|j| {
            if j + 1 == count {
                r_max
            } else {
                (l0 + (l1 - l0) * j as f64 / (count - 1).max(1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub r: f64,
    /// Amount by which the inequality fails.
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub lambda: f64,
    pub gauge: GaugeSpec,
    pub samples: usize,
    pub tolerance: f64,
    /// First sample where `θe^{λh₁}` drops below its predecessor.
    pub monotone_violation: Option<Violation>,
    pub excess_constant: Option<f64>,
    /// First `s` with `f(r) > f(s) + C h₁(s)` for some earlier `r`.
    pub upper_violation: Option<Violation>,
    /// First `s` with `f(s) < −C h₁(s)`.
    pub lower_violation: Option<Violation>,
    pub passed: bool,
}

/// Checks that `θ(r)e^{λh₁(r)}` is nondecreasing; with an excess constant
/// `C` also checks `f(r) ≤ f(s) + C h₁(s)` for `r < s` and `f(s) ≥ −C h₁(s)`.
pub fn check_near_monotonicity(
    p: &DensityProfile,
    g: &GaugeSpec,
    lambda: f64,
    excess_constant: Option<f64>,
) -> Result<MonotonicityReport, DecayError> {
    if !lambda.is_finite() {
        return Err(DecayError::InvalidParameter(format!("lambda = {lambda}")));
    }
    let h1: Vec<f64> = p
        .radii
        .iter()
        .map(|&r| gauge_h1(g, r))
        .collect::<Result<_, _>>()?;
    let weighted: Vec<f64> = p
        .theta
        .iter()
        .zip(&h1)
        .map(|(t, h)| t * (lambda * h).exp())
        .collect();
    let monotone_violation = (1..p.len()).find_map(|j| {
        let drop = weighted[j - 1] - weighted[j];
        (drop > MONOTONE_TOL).then_some(Violation {
            index: j,
            r: p.radii[j],
            amount: drop,
        })
    });
    let (mut upper_violation, mut lower_violation) = (None, None);
    if let Some(c) = excess_constant {
        let mut prefix_max = f64::NEG_INFINITY;
        for s in 0..p.len() {
            let allowance = p.excess(s) + c * h1[s];
            if upper_violation.is_none() && prefix_max - allowance > MONOTONE_TOL {
                upper_violation = Some(Violation {
                    index: s,
                    r: p.radii[s],
                    amount: prefix_max - allowance,
                });
            }
            if lower_violation.is_none() && -c * h1[s] - p.excess(s) > MONOTONE_TOL {
                lower_violation = Some(Violation {
                    index: s,
                    r: p.radii[s],
                    amount: -c * h1[s] - p.excess(s),
                });
            }
            prefix_max = prefix_max.max(p.excess(s));
        }
    }
    Ok(MonotonicityReport {
        lambda,
        gauge: *g,
        samples: p.len(),
        tolerance: MONOTONE_TOL,
        passed: monotone_violation.is_none()
            && upper_violation.is_none()
            && lower_violation.is_none(),
        monotone_violation,
        excess_constant,
        upper_violation,
        lower_violation,
    })
}

/// Parameters of the weak differential inequality `r f′ ≥ 2α f₊^N − C_h h(2r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakDecayParams {
    pub f_y: f64,
    pub alpha: f64,
    pub exponent: f64,
    pub y: f64,
    pub c_h: f64,
}

impl WeakDecayParams {
    pub fn validate(&self) -> Result<(), DecayError> {
        if !(self.exponent > 1.0 && self.exponent.is_finite()) {
            return Err(DecayError::InvalidParameter(format!(
                "need N > 1, got {}",
                self.exponent
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(DecayError::InvalidParameter(format!(
                "alpha = {} outside (0, 1/2)",
                self.alpha
            )));
        }
        if !(self.y > 0.0 && self.y.is_finite()) || !self.f_y.is_finite() {
            return Err(DecayError::InvalidParameter(format!(
                "need y > 0 and finite f_y, got y = {}, f_y = {}",
                self.y, self.f_y
            )));
        }
        if !(self.c_h >= 0.0 && self.c_h.is_finite()) {
            return Err(DecayError::InvalidParameter(format!("C_h = {}", self.c_h)));
        }
        Ok(())
    }

    fn log_ratio(&self, r: f64) -> f64 {
        (2.0 * self.y / r).ln()
    }

    /// Worst admissible forcing `C_h [log(2y/r)]^{−N/(N−1)}`.
    pub fn forcing(&self, r: f64) -> f64 {
        let n = self.exponent;
        self.c_h * self.log_ratio(r).powf(-n / (n - 1.0))
    }

    /// Right side of `r f′ = 2α f₊^N − forcing(r)`.
    pub fn rate(&self, r: f64, f: f64) -> f64 {
        2.0 * self.alpha * f.max(0.0).powf(self.exponent) - self.forcing(r)
    }

    /// Smallest envelope constant meeting the three constraints, times a
    /// safety margin.
    pub fn envelope_constant(&self) -> EnvelopeConstant {
        let n = self.exponent;
        let start = self.f_y.max(0.0) * std::f64::consts::LN_2.powf(1.0 / (n - 1.0));
        let forcing = 2.0 * (n - 1.0) * self.c_h;
        // 2α C^N − C/(N−1) − C_h is convex in C ≥ 0 and ≤ 0 at 0.
        let g = |c: f64| 2.0 * self.alpha * c.powf(n) - c / (n - 1.0) - self.c_h;
        let mut hi = 1.0;
        while g(hi) <= 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let contradiction = hi;
        EnvelopeConstant {
            start,
            forcing,
            contradiction,
            value: ENVELOPE_MARGIN * start.max(forcing).max(contradiction),
        }
    }

    /// `φ(r) = C₁ [log(2y/r)]^{−1/(N−1)}`.
    pub fn envelope(&self, c1: f64, r: f64) -> f64 {
        c1 * self.log_ratio(r).powf(-1.0 / (self.exponent - 1.0))
    }
}

/// The constraints on the envelope constant `C₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConstant {
    /// `φ(y) > f_y` needs `C₁ > f_y (log 2)^{1/(N−1)}`.
    pub start: f64,
    /// `C₁ > 2(N−1)C_h`.
    pub forcing: f64,
    /// Root of `2αC^N = C_h + C/(N−1)`.
    pub contradiction: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakEnvelope {
    pub params: WeakDecayParams,
    pub x: f64,
    pub constant: EnvelopeConstant,
    /// `φ(x)`.
    pub envelope: f64,
    /// Worst-case ODE solution at `x`.
    pub ode_value: f64,
    pub checked_points: usize,
    /// `min (φ − f)` over the checked radii.
    pub min_margin: f64,
    pub min_margin_at: f64,
    pub ode_steps: usize,
    pub certified: bool,
}

// One RK4 step of df/du = rate(e^u, f).
fn rk4(p: &WeakDecayParams, u: f64, f: f64, du: f64) -> f64 {
    let k = |u: f64, f: f64| p.rate(u.exp(), f);
    let k1 = k(u, f);
    let k2 = k(u + du / 2.0, f + du * k1 / 2.0);
    let k3 = k(u + du / 2.0, f + du * k2 / 2.0);
    let k4 = k(u + du, f + du * k3);
    f + du * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Integrates `r f′ = rate(r, f)` from `(u0, f0)` to `u1` in `u = log r`
/// with step doubling. Returns the value and the number of accepted steps.
fn integrate_log_radius(
    p: &WeakDecayParams,
    u0: f64,
    f0: f64,
    u1: f64,
    step_hint: &mut f64,
) -> Result<(f64, usize), DecayError> {
    let dir = (u1 - u0).signum();
    let (mut u, mut f) = (u0, f0);
    let mut steps = 0;
    while (u1 - u) * dir > 0.0 {
        let mut du = step_hint.min((u1 - u).abs()) * dir;
        loop {
            let full = rk4(p, u, f, du);
            let half = rk4(p, u + du / 2.0, rk4(p, u, f, du / 2.0), du / 2.0);
            let err = (full - half).abs() / 15.0;
            if !half.is_finite() {
                return Err(DecayError::Integration(u.exp()));
            }
            if err <= ODE_TOL * (1.0 + half.abs()) {
                u = if (u1 - (u + du)) * dir <= 0.0 { u1 } else { u + du };
                f = half + (half - full) / 15.0;
                steps += 1;
                if err < ODE_TOL * (1.0 + half.abs()) / 64.0 {
                    *step_hint = (du.abs() * 2.0).min(1.0);
                } else {
                    *step_hint = du.abs();
                }
                break;
            }
            du /= 2.0;
            if du.abs() < 1e-14 {
                return Err(DecayError::Integration(u.exp()));
            }
        }
    }
    Ok((f, steps))
}

/// Envelope `φ(x) = C₁[log(2y/x)]^{−1/(N−1)}` for solutions of the weak
/// inequality, certified against the worst-case ODE solution at
/// [`ENVELOPE_POINTS`] log-spaced radii in `[x, y]`.
pub fn weak_decay_envelope(params: &WeakDecayParams, x: f64) -> Result<WeakEnvelope, DecayError> {
    params.validate()?;
    check_radii(x, params.y)?;
    let constant = params.envelope_constant();
    let c1 = constant.value;
    let radii = log_grid(x, params.y, ENVELOPE_POINTS);
    let mut f = params.f_y;
    let mut min_margin = params.envelope(c1, params.y) - f;
    let mut min_margin_at = params.y;
    let mut total_steps = 0;
    let mut step_hint = 1e-2;
    for j in (0..radii.len() - 1).rev() {
        let (next, steps) =
            integrate_log_radius(params, radii[j + 1].ln(), f, radii[j].ln(), &mut step_hint)?;
        f = next;
        total_steps += steps;
        let margin = params.envelope(c1, radii[j]) - f;
        if margin < min_margin {
            min_margin = margin;
            min_margin_at = radii[j];
        }
    }
    Ok(WeakEnvelope {
        params: *params,
        x,
        constant,
        envelope: params.envelope(c1, x),
        ode_value: f,
        checked_points: radii.len(),
        min_margin,
        min_margin_at,
        ode_steps: total_steps,
        certified: min_margin > 0.0,
    })
}
