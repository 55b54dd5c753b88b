//! Numerical tolerances shared across the library.
//!
//! The constants are the defaults; [`Tolerances`] bundles them so a caller
//! (typically the CLI config loader) can override individual values.

use serde::{Deserialize, Serialize};

/// Allowed deviation of `|u|` from 1 for a unit vector.
pub const TOL_UNIT: f64 = 1e-12;
/// Consistency tolerance for spherical-trigonometry quantities.
pub const TOL_TRIG: f64 = 1e-9;
/// Allowed deviation of junction angles from 2π/3 (triple points) or π.
pub const ANGLE_TOL: f64 = 1e-9;
/// Chord length below which two points are treated as coincident or antipodal.
pub const DEGENERATE_CHORD: f64 = 1e-12;
/// Default structural constant of a cone net.
pub const DEFAULT_ETA0: f64 = 0.01;
/// Longest arc kept whole by the standard decomposition.
pub const MAX_ARC: f64 = 0.9 * std::f64::consts::PI;
/// Default Hausdorff sampling step, relative to the ball radius.
pub const HAUSDORFF_STEP: f64 = 1e-3;
/// Samples with a smaller angular deviation are dropped from ratio sups.
pub const ALPHA_FLOOR: f64 = 1e-6;
/// Length increments at or below this level are treated as rounding noise.
pub const LENGTH_NOISE: f64 = 1e-12;
/// Threshold for the gradient norm of the length functional at a critical cone.
pub const CRITICAL_GRADIENT: f64 = 1e-8;

/// Overridable tolerance set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unit: f64,
    pub trig: f64,
    pub angle: f64,
    pub hausdorff_step: f64,
    pub alpha_floor: f64,
    pub length_noise: f64,
    pub critical_gradient: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit: TOL_UNIT,
            trig: TOL_TRIG,
            angle: ANGLE_TOL,
            hausdorff_step: HAUSDORFF_STEP,
            alpha_floor: ALPHA_FLOOR,
            length_noise: LENGTH_NOISE,
            critical_gradient: CRITICAL_GRADIENT,
        }
    }
}

impl Tolerances {
    /// Sets a tolerance by name. Returns `false` for an unknown name or a
    /// non-positive value, leaving `self` unchanged.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        if !(value > 0.0 && value.is_finite()) {
            return false;
        }
        let slot = match name {
            "unit" => &mut self.unit,
            "trig" => &mut self.trig,
            "angle" => &mut self.angle,
            "hausdorff_step" => &mut self.hausdorff_step,
            "alpha_floor" => &mut self.alpha_floor,
            "length_noise" => &mut self.length_noise,
            "critical_gradient" => &mut self.critical_gradient,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_reject_nonpositive_and_unknown() {
        let mut t = Tolerances::default();
        assert!(t.set("angle", 1e-7));
        assert_eq!(t.angle, 1e-7);
        assert!(!t.set("angle", 0.0));
        assert!(!t.set("angle", -1.0));
        assert!(!t.set("bogus", 1.0));
        assert_eq!(t.angle, 1e-7);
    }
}
