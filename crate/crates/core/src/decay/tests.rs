use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn h1_power_closed_form() {
    let g = GaugeSpec::power(1.0, 1.0).unwrap();
    assert!((gauge_h1(&g, 0.5).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(gauge_h1(&GaugeSpec::zero(), 0.3).unwrap(), 0.0);
    // Independent quadrature of ∫₀^r h(2t) dt/t.
    let g = GaugeSpec::power(0.7, 0.35).unwrap();
    let q = adaptive(|t| 0.7 * (2.0 * t).powf(0.35) / t, 0.0, 0.2, 1e-15, 1e-13).unwrap();
    assert!(rel(gauge_h1(&g, 0.2).unwrap(), q.value) < 1e-10);
}

#[test]
fn h1_log_matches_antiderivative() {
    let g = GaugeSpec::log(1.0, 1.0, 2.0).unwrap();
    let want = 1.0 / (1.0f64 / 0.2).ln();
    assert!((gauge_h1(&g, 0.1).unwrap() - want).abs() < 1e-8);
    let g = GaugeSpec::log(0.5, 2.0, 3.5).unwrap();
    let want = 0.5 * (2.0f64 / 0.06).ln().powf(-2.5) / 2.5;
    assert!(rel(gauge_h1(&g, 0.03).unwrap(), want) < 1e-10);
}

#[test]
fn h1_log_needs_dini() {
    let g = GaugeSpec::log(1.0, 1.0, 1.0).unwrap();
    assert_eq!(gauge_h1(&g, 0.1), Err(DecayError::DiniFails(1.0)));
    let g = GaugeSpec::log(1.0, 1.0, 2.0).unwrap();
    assert!(matches!(gauge_h1(&g, 0.6), Err(DecayError::OutOfRange { .. })));
}

#[test]
fn gauge_validation() {
    assert!(GaugeSpec::power(-1.0, 0.5).is_err());
    assert!(GaugeSpec::power(1.0, 1.5).is_err());
    assert!(GaugeSpec::power(1.0, 0.0).is_err());
    assert!(GaugeSpec::log(1.0, 0.0, 2.0).is_err());
    assert!(GaugeSpec::log(1.0, 1.0, -2.0).is_err());
}

#[test]
fn alpha_conversion() {
    assert!((alpha_to_a(0.25).unwrap() - 2.0).abs() < 1e-15);
    assert!(alpha_to_a(0.0).is_err());
    assert!(alpha_to_a(1.0 / 3.0).is_err());
}

#[test]
fn gauge_free_bound_is_pure_power() {
    let b = decay_bound(0.3, 0.7, &GaugeSpec::zero(), 0.02, 0.9).unwrap();
    assert_eq!(b, (0.02f64 / 0.9).powf(0.7) * 0.3);
    assert!(decay_bound(0.3, 0.0, &GaugeSpec::zero(), 0.02, 0.9).is_err());
    assert!(decay_bound(0.3, 0.5, &GaugeSpec::zero(), 0.9, 0.02).is_err());
}

#[test]
fn exact_power_solution_attains_bound() {
    // f = K r^a solves r f′ = a f.
    for (k, a) in [(0.4, 0.2), (2.0, 1.3), (0.01, 0.05)] {
        let (x, y) = (1e-3, 0.8);
        let f = |r: f64| k * r.powf(a);
        let b = decay_bound(f(y), a, &GaugeSpec::zero(), x, y).unwrap();
        assert!(rel(b, f(x)) < 1e-12);
    }
}

#[test]
fn power_integral_matches_quadrature_on_grid() {
    for i in 0..10 {
        for j in 0..10 {
            let a = 0.1 + 0.2 * i as f64;
            let b = 0.1 + 0.1 * j as f64;
            let g = GaugeSpec::power(1.3, b).unwrap();
            let closed = decay_integral(a, &g, 1e-3, 0.7).unwrap();
            let quad = decay_integral_quadrature(a, &g, 1e-3, 0.7).unwrap();
            assert!(rel(closed, quad) < 1e-10, "a={a} b={b}: {closed} vs {quad}");
        }
    }
}

#[test]
fn gauged_bound_is_not_monotone_in_x() {
    // With f_y = 0 the bound vanishes at x = y and as x → 0 but is positive
    // in between, so no monotonicity in x survives a nonzero gauge.
    let g = GaugeSpec::power(1.0, 0.5).unwrap();
    let at = |x: f64| decay_bound(0.0, 1.0, &g, x, 1.0).unwrap();
    assert!(at(1e-8) < at(0.3));
    assert!(at(0.3) > at(0.999));
}

#[test]
fn power_gauge_example_bound() {
    // For b < a: bound ≤ (x/y)^a f_y + 24·C₀·2^b (a−b)⁻¹ x^b.
    let (a, b, c0, fy, y) = (0.8, 0.3, 2.0, 0.5, 1.0);
    let g = GaugeSpec::power(c0, b).unwrap();
    for x in [1e-6, 1e-4, 0.01, 0.5] {
        let bound = decay_bound(fy, a, &g, x, y).unwrap();
        let simple =
            (x / y).powf(a) * fy + DECAY_CONSTANT * c0 * 2f64.powf(b) / (a - b) * x.powf(b);
        assert!(bound <= simple);
    }
}

#[test]
fn spec_cli_example_value() {
    // fy 0.1, a 0.2, b 0.1, C0 1, x 0.01, y 1.
    let g = GaugeSpec::power(1.0, 0.1).unwrap();
    let got = decay_bound(0.1, 0.2, &g, 0.01, 1.0).unwrap();
    let integral = 2f64.powf(0.1) * (1.0 - 0.01f64.powf(-0.1)) / -0.1;
    let want = 0.01f64.powf(0.2) * 0.1 + 24.0 * 0.01f64.powf(0.2) * integral;
    assert!(rel(got, want) < 1e-13);
}

#[test]
fn log_decay_without_gauge() {
    let b = log_gauge_decay(0.2, 0.5, 0.0, 1.0, 2.0, 0.01, 0.3).unwrap();
    assert_eq!(b.value, (0.01f64 / 0.3).powf(0.5) * 0.2);
    assert!(log_gauge_decay(0.2, 0.5, 1.0, 1.0, 2.0, 0.01, 0.34).is_err());
}

#[test]
fn log_decay_tail_is_logarithmic() {
    // bound · [log(A/2x)]^b → K₂ as x → 0.
    let (a, c, scale, b, y) = (0.6, 1.0, 1.0, 2.0, 0.3);
    let mut prev = f64::INFINITY;
    let mut far = 0.0;
    for e in [10, 50, 150, 300] {
        let x = 10f64.powi(-e);
        let bd = log_gauge_decay(0.1, a, c, scale, b, x, y).unwrap();
        let scaled = bd.value * (scale / (2.0 * x)).ln().powf(b);
        let gap = (scaled - bd.far_constant).abs();
        assert!(gap < prev || gap < 1e-12 * bd.far_constant);
        prev = gap;
        far = bd.far_constant;
    }
    assert!(prev / far < 1e-6);
}

#[test]
fn log_decay_dominates_quadrature_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let scale = rng.gen_range(0.5..5.0);
        let b = rng.gen_range(1.1..4.0);
        let y = rng.gen_range(0.05..0.33) * scale;
        let x = y * 10f64.powf(-rng.gen_range(0.1..8.0));
        let a = rng.gen_range(0.05..2.0);
        let fy = rng.gen_range(0.0..1.0);
        let g = GaugeSpec::log(1.0, scale, b).unwrap();
        let direct = decay_bound(fy, a, &g, x, y).unwrap();
        let split = log_gauge_decay(fy, a, 1.0, scale, b, x, y).unwrap();
        assert!(split.value >= direct, "{split:?} vs {direct}");
    }
}

#[test]
fn constant_profile_is_monotone() {
    let radii = log_grid(1e-3, 1.0, 50);
    let p = synthesize_profile(|_| PI, PI, &radii).unwrap();
    let r = check_near_monotonicity(&p, &GaugeSpec::zero(), 1.0, Some(1.0)).unwrap();
    assert!(r.passed);
}

#[test]
fn increasing_profile_is_monotone() {
    let radii = log_grid(1e-3, 1.0, 80);
    let p = synthesize_profile(|r| 1.5 * PI + r.powf(0.3), 1.5 * PI, &radii).unwrap();
    assert!(check_near_monotonicity(&p, &GaugeSpec::zero(), 1.0, Some(0.0)).unwrap().passed);
}

#[test]
fn dip_is_located() {
    let radii = log_grid(1e-2, 1.0, 40);
    let dip_at = 25;
    let mut theta: Vec<f64> = radii.iter().map(|r| PI + 0.1 * r).collect();
    // Small enough to keep r²θ nondecreasing, too large for e^{λh₁}.
    theta[dip_at] -= 0.01;
    let p = DensityProfile::new(radii.clone(), theta, PI).unwrap();
    let g = GaugeSpec::power(1e-4, 1.0).unwrap();
    let r = check_near_monotonicity(&p, &g, 1.0, Some(1e-3)).unwrap();
    assert!(!r.passed);
    let v = r.monotone_violation.unwrap();
    assert_eq!(v.index, dip_at);
    assert_eq!(v.r, radii[dip_at]);
    assert_eq!(r.upper_violation.unwrap().index, dip_at);
}

#[test]
fn lower_excess_bound_is_checked() {
    let radii = log_grid(1e-2, 1.0, 10);
    let p = synthesize_profile(|r| PI - 0.01 + 0.001 * r, PI, &radii).unwrap();
    let r = check_near_monotonicity(&p, &GaugeSpec::zero(), 1.0, Some(1.0)).unwrap();
    assert_eq!(r.lower_violation.unwrap().index, 0);
}

#[test]
fn synthesized_profiles() {
    let radii = log_grid(1e-3, 2.0, 200);
    assert!(synthesize_profile(|_| PI, PI, &radii).is_ok());
    assert!(synthesize_profile(|r| 1.5 * PI + r.powf(0.3), 1.5 * PI, &radii).is_ok());
    // r²(π − r) increases up to r = 2π/3.
    assert!(synthesize_profile(|r| PI - r, PI, &radii).is_ok());
    let past = log_grid(1e-3, 2.2, 200);
    assert!(matches!(
        synthesize_profile(|r| PI - r, PI, &past),
        Err(DecayError::MeasureDecreasing { .. })
    ));
    let edge = log_grid(1e-3, 2.0 * PI / 3.0, 200);
    assert!(synthesize_profile(|r| PI - r, PI, &edge).is_ok());
    assert!(DensityProfile::new(vec![0.1, 0.1], vec![1.0, 1.0], 1.0).is_err());
    assert!(DensityProfile::new(vec![0.1, 0.2], vec![1.0, -1.0], 1.0).is_err());
}

#[test]
fn csv_round_trip() {
    let p = synthesize_profile(|r| PI + r * r, PI, &log_grid(0.01, 1.0, 7)).unwrap();
    let back = profile_from_csv(&profile_to_csv(&p), Some(PI)).unwrap();
    assert_eq!(back, p);
    let defaulted = profile_from_csv("r,theta\n0.1,2.0\n0.2,2.5\n", None).unwrap();
    assert_eq!(defaulted.d0(), 2.0);
    assert!(profile_from_csv("0.1,2.0,3.0\n", None).is_err());
}

fn params(f_y: f64, alpha: f64, exponent: f64, y: f64, c_h: f64) -> WeakDecayParams {
    WeakDecayParams {
        f_y,
        alpha,
        exponent,
        y,
        c_h,
    }
}

#[test]
fn weak_envelope_zero_solution() {
    let w = weak_decay_envelope(&params(0.0, 0.25, 2.0, 0.5, 0.0), 1e-6).unwrap();
    assert_eq!(w.ode_value, 0.0);
    assert!(w.certified);
    assert_eq!(w.checked_points, ENVELOPE_POINTS);
}

#[test]
fn weak_envelope_separable_case() {
    // N = 2, h = 0: f(r) = [1/f_y + 2α log(y/r)]⁻¹.
    let p = params(0.4, 0.25, 2.0, 0.5, 0.0);
    for x in [0.3, 1e-3, 1e-8] {
        let w = weak_decay_envelope(&p, x).unwrap();
        let exact = 1.0 / (1.0 / 0.4 + 0.5 * (0.5 / x).ln());
        assert!((w.ode_value - exact).abs() < 1e-8, "{} vs {exact}", w.ode_value);
        assert!(w.certified);
        assert!(w.envelope >= exact);
    }
}

#[test]
fn envelope_solves_its_ode() {
    // r φ′ = C₁^{1−N}/(N−1) · φ^N.
    let p = params(0.2, 0.3, 2.5, 0.4, 0.1);
    let c1 = p.envelope_constant().value;
    for r in [1e-5, 1e-2, 0.3] {
        let hstep = r * 1e-5;
        let deriv = (p.envelope(c1, r + hstep) - p.envelope(c1, r - hstep)) / (2.0 * hstep);
        let lhs = r * deriv;
        let rhs = c1.powf(1.0 - 2.5) / 1.5 * p.envelope(c1, r).powf(2.5);
        assert!(rel(lhs, rhs) < 1e-8);
    }
}

#[test]
fn envelope_constant_constraints() {
    let p = params(0.7, 0.2, 3.0, 0.5, 0.4);
    let k = p.envelope_constant();
    let c1 = k.value;
    assert!(p.envelope(c1, p.y) > p.f_y);
    assert!(c1 > 2.0 * 2.0 * p.c_h);
    assert!(2.0 * p.alpha * c1.powf(3.0) > p.c_h + c1 / 2.0);
}

#[test]
fn weak_envelope_rejects_bad_parameters() {
    assert!(weak_decay_envelope(&params(0.1, 0.25, 1.0, 0.5, 0.0), 0.1).is_err());
    assert!(weak_decay_envelope(&params(0.1, 0.5, 2.0, 0.5, 0.0), 0.1).is_err());
    assert!(weak_decay_envelope(&params(0.1, 0.25, 2.0, 0.5, -1.0), 0.1).is_err());
    assert!(weak_decay_envelope(&params(0.1, 0.25, 2.0, 0.5, 0.0), 0.6).is_err());
}

#[test]
fn weak_envelope_battery() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let p = params(
            rng.gen_range(-0.5..2.0),
            rng.gen_range(0.01..0.49),
            rng.gen_range(1.2..4.0),
            rng.gen_range(0.01..1.0),
            rng.gen_range(0.0..2.0),
        );
        let x = p.y * 10f64.powf(-rng.gen_range(1.0..12.0));
        let w = weak_decay_envelope(&p, x).unwrap();
        assert!(w.certified, "{w:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_free_bound_shrinks_with_x(
        fy in 0.0f64..2.0, a in 0.05f64..2.0, x1 in 1e-6f64..0.5, t in 0.0f64..1.0,
    ) {
        let g = GaugeSpec::zero();
        let x2 = x1 + t * (0.9 - x1);
        let b1 = decay_bound(fy, a, &g, x1, 1.0).unwrap();
        let b2 = decay_bound(fy, a, &g, x2, 1.0).unwrap();
        prop_assert!(b1 <= b2);
    }

    #[test]
    fn gauge_free_bound_composes(
        fy in -1.0f64..2.0, a in 0.05f64..3.0, x in 1e-6f64..0.1, s in 0.0f64..1.0,
    ) {
        let (y, z) = (1.0, x + s * (1.0 - x));
        prop_assume!(z > x && z < y);
        let g = GaugeSpec::zero();
        let two_step = decay_bound(decay_bound(fy, a, &g, z, y).unwrap(), a, &g, x, z).unwrap();
        let one_step = decay_bound(fy, a, &g, x, y).unwrap();
        prop_assert!((two_step - one_step).abs() <= 1e-14 * one_step.abs().max(1e-300));
    }

    #[test]
    fn split_bound_dominates_integral(
        a in 0.05f64..2.0, b in 0.05f64..1.0, c0 in 0.0f64..3.0,
        x in 1e-6f64..0.1, s in 0.0f64..1.0,
    ) {
        let g = GaugeSpec::power(c0, b).unwrap();
        let y = 0.9;
        let z = x + s * (y - x);
        let integral = decay_integral(a, &g, x, y).unwrap();
        let split = split_integral_bound(a, &g, x, y, z).unwrap();
        prop_assert!(integral <= split * (1.0 + 1e-12));
    }

    #[test]
    fn split_bound_dominates_log_integral(
        a in 0.05f64..2.0, b in 0.2f64..3.0, x in 1e-6f64..0.1, s in 0.0f64..1.0,
    ) {
        let g = GaugeSpec::log(1.0, 2.0, b).unwrap();
        let y = 0.6;
        let z = x + s * (y - x);
        let integral = decay_integral(a, &g, x, y).unwrap();
        let split = split_integral_bound(a, &g, x, y, z).unwrap();
        prop_assert!(integral <= split * (1.0 + 1e-10));
    }
}
