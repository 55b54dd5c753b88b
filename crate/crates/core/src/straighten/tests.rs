use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// O(M³) maximal function: every window, accumulated in the same order.
fn naive_maximal(cells: &[f64]) -> Vec<f64> {
    let m = cells.len();
    (0..=m)
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            for p in 0..=i.min(m - 1) {
                for q in (p + 1).max(i)..=m {
                    let s: f64 = cells[p..q].iter().sum();
                    best = best.max(s / (q - p) as f64);
                }
            }
            best
        })
        .collect()
}

fn unit(c: Vec<f64>) -> UnitVector {
    UnitVector::normalize(c).unwrap()
}

fn equator_plane() -> Frame {
    Frame::new(vec![unit(vec![1.0, 0.0, 0.0]), unit(vec![0.0, 1.0, 0.0])]).unwrap()
}

// Graph over the equator with normal part `v(θ)` on [0, d].
fn graph_curve(d: f64, count: usize, v: impl Fn(f64) -> f64) -> Vec<UnitVector> {
    (0..=count)
        .map(|j| {
            let th = d * j as f64 / count as f64;
            let z = v(th);
            let w = (1.0 - z * z).sqrt();
            unit(vec![w * th.cos(), w * th.sin(), z])
        })
        .collect()
}

#[test]
fn maximal_function_matches_naive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [1, 2, 5, 17, 40] {
        let cells: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..2.0)).collect();
        assert_eq!(noncentered_maximal(&cells), naive_maximal(&cells));
    }
}

#[test]
fn maximal_function_of_indicator() {
    // One unit cell among zeros: at distance k cells the best window has length k + 1.
    let mut cells = vec![0.0; 9];
    cells[4] = 1.0;
    let mf = noncentered_maximal(&cells);
    assert_eq!(mf[4], 1.0);
    assert_eq!(mf[5], 1.0);
    assert_eq!(mf[0], 0.2);
    assert_eq!(mf[9], 0.2);
    assert_eq!(mf[7], 1.0 / 3.0);
}

#[test]
fn straight_geodesic_needs_nothing() {
    let poly = graph_curve(1.2, 10, |_| 0.0);
    let c = parameterize(&poly, &equator_plane(), 1e-6).unwrap();
    assert_eq!(c.intervals(), 12000);
    assert!(c.length_excess().abs() < 1e-14);
    assert!(c.speed_deviation() < 1e-9);
    let r = straighten(&c, 0.05).unwrap();
    assert!(r.intervals.is_empty());
    assert_eq!(r.bad_measure, 0.0);
    assert!(r.certificate_holds);
    assert_eq!(r.certificate_slope, 0.0);
}

#[test]
fn hypotheses_are_checked() {
    let plane = equator_plane();
    let short = graph_curve(0.05, 4, |_| 0.0);
    assert!(matches!(
        parameterize(&short, &plane, 1e-3),
        Err(StraightenError::LengthOutOfRange { .. })
    ));
    let long = graph_curve(3.0, 30, |_| 0.0);
    assert!(matches!(
        parameterize(&long, &plane, 1e-3),
        Err(StraightenError::LengthOutOfRange { .. })
    ));
    let wiggly = graph_curve(1.0, 4000, |t| 1e-3 * (40.0 * std::f64::consts::PI * t).sin());
    assert!(matches!(
        parameterize(&wiggly, &plane, 1e-3),
        Err(StraightenError::ExcessTooLarge { .. })
    ));
    let high = graph_curve(1.0, 4000, |t| 2e-3 * (std::f64::consts::PI * t).sin());
    assert!(matches!(
        parameterize(&high, &plane, 1.5e-3),
        Err(StraightenError::OffPlane { .. })
    ));
    let lifted = graph_curve(1.0, 100, |_| 1e-6);
    assert!(matches!(
        parameterize(&lifted, &plane, 1e-3),
        Err(StraightenError::EndpointOffPlane(_))
    ));
}

#[test]
fn reversed_input_is_reoriented() {
    let mut poly = graph_curve(1.0, 2000, |t| 1e-4 * (std::f64::consts::PI * t).sin());
    poly.reverse();
    let c = parameterize(&poly, &equator_plane(), 1e-3).unwrap();
    assert!(c.reversed());
    assert!(c.theta()[c.intervals()] > c.theta()[0]);
    assert!((c.theta()[c.intervals()] - c.theta()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn plane_through_endpoints_contains_them() {
    let a = unit(vec![1.0, 2.0, 0.5, -1.0]);
    let b = unit(vec![0.3, -1.0, 2.0, 0.0]);
    let f = plane_through_endpoints(&a, &b).unwrap();
    let proj = |x: &UnitVector| {
        f.vectors()
            .iter()
            .map(|e| e.dot(x).powi(2))
            .sum::<f64>()
    };
    assert!((proj(&a) - 1.0).abs() < 1e-14);
    assert!((proj(&b) - 1.0).abs() < 1e-14);
}

#[test]
fn geodesic_replacement_hits_requested_angle() {
    let ya = vec![0.6f64.cos(), 0.6f64.sin(), 0.0];
    let yb = {
        let v = 3e-4;
        let w = (1.0 - v * v as f64).sqrt();
        vec![w * 1.1f64.cos(), w * 1.1f64.sin(), v]
    };
    for th in [0.6, 0.7, 0.95, 1.1] {
        let p = geodesic_at_angle(&ya, &yb, th);
        assert!((norm(&p) - 1.0).abs() < 1e-15);
        assert!((p[1].atan2(p[0]) - th).abs() < 1e-13);
        // In the span of ya and yb: orthogonal to their cross product.
        let cr = [
            ya[1] * yb[2] - ya[2] * yb[1],
            ya[2] * yb[0] - ya[0] * yb[2],
            ya[0] * yb[1] - ya[1] * yb[0],
        ];
        assert!(dot(&cr, &p).abs() < 1e-15);
    }
}

#[test]
fn narrow_spike_is_removed() {
    // A spike of height 2e-4 over width 2e-3: slope ≈ 0.1 > η/4.
    let eta = 0.05;
    let poly = graph_curve(1.0, 40000, |t| 2e-4 * bump((t - 0.5) / 1e-3));
    let c = parameterize(&poly, &equator_plane(), 1e-3).unwrap();
    let e = energy_diagnostics(&c);
    assert!(e.v_bound_holds && e.f_bound_holds);
    let r = straighten(&c, eta).unwrap();
    assert_eq!(r.intervals.len(), 1);
    let iv = &r.intervals[0];
    assert!(iv.start < 0.499 && iv.end > 0.501);
    assert!(r.certificate_holds, "slope {}", r.certificate_slope);
    assert!(r.added_length <= r.removed_length);
    assert!(r.output_length <= r.input_length);
    for j in iv.start_index + 1..iv.end_index {
        assert!(r.is_replaced(j));
    }
    let c_hat = r.c_hat.unwrap();
    assert!(c_hat.is_finite() && c_hat > 0.0);
}

#[test]
fn bad_set_covering_everything_errors() {
    let poly = graph_curve(1.0, 40000, |t| 4e-4 * (std::f64::consts::PI * t).sin());
    let c = parameterize(&poly, &equator_plane(), 1e-3).unwrap();
    // Slope up to 1.3e-3; a tiny η flags every point.
    assert_eq!(straighten(&c, 1e-4).unwrap_err(), StraightenError::CoversInterval);
}

#[test]
fn handoff_to_sector_profile() {
    let poly = graph_curve(1.0, 40000, |t| {
        2e-4 * bump((t - 0.3) / 1e-3) + 3e-4 * (std::f64::consts::PI * t).sin()
    });
    let c = parameterize(&poly, &equator_plane(), 1e-3).unwrap();
    let r = straighten(&c, 0.05).unwrap();
    assert!(r.certificate_holds);
    let p = r.to_sector_profile(0.05, 2000).unwrap();
    assert!((p.aperture() - 1.0).abs() < 1e-9);
    // Linear interpolation does not raise the slope.
    assert!(p.discrete_lipschitz() <= r.certificate_slope * (1.0 + 1e-9));
    assert!((p.values()[1000][0] - 3e-4).abs() < 1e-7);
}

#[test]
fn energy_identity_for_f() {
    // ∫f telescopes to ΔL + 2∫|v|² exactly.
    let poly = graph_curve(1.3, 20000, |t| 5e-4 * (2.0 * std::f64::consts::PI * t / 1.3).sin());
    let c = parameterize(&poly, &equator_plane(), 1e-3).unwrap();
    let e = energy_diagnostics(&c);
    let h = c.step();
    let v2: f64 = (0..c.intervals())
        .map(|k| 0.5 * (c.v(k)[0].powi(2) + c.v(k + 1)[0].powi(2)) * h)
        .sum();
    assert!((e.f_integral - (c.length_excess() + 2.0 * v2)).abs() < 1e-12);
    assert!(e.v_bound_holds && e.f_bound_holds);
}

#[test]
fn random_curves_are_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let recipe = CurveRecipe {
        dim: 4,
        ..CurveRecipe::default()
    };
    for _ in 0..3 {
        let (poly, plane) = random_admissible_curve(&mut rng, &recipe).unwrap();
        let c = parameterize(&poly, &plane, recipe.tau1).unwrap();
        assert!(c.length_excess() <= 0.9 * recipe.tau1 + 1e-12);
        let r = straighten(&c, 0.05).unwrap();
        assert!(r.certificate_holds, "slope {}", r.certificate_slope);
    }
}

#[test]
fn curve_file_round_trips() {
    let poly = graph_curve(1.0, 5, |t| 1e-5 * t * (1.0 - t));
    let plane = equator_plane();
    let json = curve_to_json(&poly, Some(&plane));
    let back = curve_from_json(&json).unwrap();
    assert_eq!(back.polyline().unwrap(), poly);
    assert_eq!(back.frame().unwrap().unwrap().vectors(), plane.vectors());
    let csv = curve_to_csv(&poly);
    assert_eq!(curve_from_csv(&csv).unwrap().polyline().unwrap(), poly);
    assert!(curve_from_json(r#"{"points": [], "extra": 1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn superlevel_matches_maximal_function(
        cells in prop::collection::vec(-1.0f64..1.0, 1..30),
        level in -0.5f64..0.8,
    ) {
        let mf = naive_maximal(&cells);
        let fast = maximal_superlevel(&cells, level);
        for (i, flag) in fast.iter().enumerate() {
            // Ignore ties within rounding of the level.
            if (mf[i] - level).abs() > 1e-12 {
                prop_assert_eq!(*flag, mf[i] > level, "point {}", i);
            }
        }
    }

    #[test]
    fn maximal_dominates_adjacent_cells(cells in prop::collection::vec(-2.0f64..2.0, 1..40)) {
        let mf = noncentered_maximal(&cells);
        for (k, c) in cells.iter().enumerate() {
            prop_assert!(mf[k] >= *c && mf[k + 1] >= *c);
        }
    }

    #[test]
    fn straightening_certificate(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (poly, plane) = random_admissible_curve(&mut rng, &CurveRecipe::default()).unwrap();
        let c = parameterize(&poly, &plane, 1e-3).unwrap();
        let r = straighten(&c, 0.05).unwrap();
        prop_assert!(r.theta_increasing);
        prop_assert!(r.certificate_holds);
        prop_assert!(r.added_length <= r.removed_length + 1e-15);
    }
}
