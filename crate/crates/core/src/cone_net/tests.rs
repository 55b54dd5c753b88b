use std::f64::consts::{FRAC_PI_2, PI, TAU};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::sphere::{vertex_angle, Frame};

fn frame(n: usize, k: usize) -> Frame {
    Frame::standard(n, k).unwrap()
}

fn tetra_edge() -> f64 {
    (-1.0f64 / 3.0).acos()
}

#[test]
fn plane_builder() {
    let net = build_plane(3, &frame(3, 2)).unwrap();
    assert_eq!(net.vertices().len(), 3);
    assert_eq!(net.arcs().len(), 3);
    for (i, v) in net.vertices().iter().enumerate() {
        let t = TAU * i as f64 / 3.0;
        assert_abs_diff_eq!(v.point.coords()[0], t.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.point.coords()[1], t.sin(), epsilon = 1e-15);
        assert_eq!(v.kind, VertexKind::V1);
    }
    assert_abs_diff_eq!(net_length(&net), TAU, epsilon = 1e-13);
    assert_abs_diff_eq!(net_density(&net), PI, epsilon = 1e-13);
    assert!(validate_minimal_looking(&net).passed_with_ball_condition());
    let skew = Frame::new(vec![
        UnitVector::basis(3, 0).unwrap(),
        UnitVector::normalize(vec![0.6, 0.8, 0.0]).unwrap(),
    ]);
    assert!(skew.is_err());
}

#[test]
fn y_builder() {
    let net = build_y(3, &frame(3, 3)).unwrap();
    assert_eq!((net.vertices().len(), net.arcs().len()), (5, 6));
    for k in 0..6 {
        assert_abs_diff_eq!(net.arc_length(k), FRAC_PI_2, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(net_density(&net), 1.5 * PI, epsilon = 1e-13);
    let pole = &net.vertices()[0].point;
    for k in 0..3 {
        let a = &net.vertices()[2 + k].point;
        let b = &net.vertices()[2 + (k + 1) % 3].point;
        assert_abs_diff_eq!(vertex_angle(pole, a, b).unwrap(), TAU / 3.0, epsilon = 1e-12);
    }
    assert!(validate_minimal_looking(&net).passed_with_ball_condition());
}

#[test]
fn t_builder() {
    let net = build_t(3, &frame(3, 3)).unwrap();
    for k in 0..6 {
        assert_abs_diff_eq!(net.arc_length(k), tetra_edge(), epsilon = 1e-14);
    }
    assert_abs_diff_eq!(tetra_edge(), 1.910_633_236_2, epsilon = 1e-10);
    let d = net_density(&net);
    assert_abs_diff_eq!(d, 3.0 * tetra_edge(), epsilon = 1e-12);
    assert!(d > 1.5 * PI);
    let report = validate_minimal_looking(&net);
    assert!(report.passed_with_ball_condition(), "{report:?}");
    assert!(report.max_angle_deviation < 1e-12);
}

#[test]
fn t_builder_in_higher_dimension_with_random_placement() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let f = Frame::random(6, 3, &mut rng).unwrap();
    let net = build_t(6, &f).unwrap();
    assert_abs_diff_eq!(net_density(&net), 3.0 * tetra_edge(), epsilon = 1e-12);
    assert!(validate_minimal_looking(&net).passed());
}

#[test]
fn cube_cone_looks_minimal() {
    let net = build_cube(3, &frame(3, 3)).unwrap();
    assert_eq!((net.vertices().len(), net.arcs().len()), (8, 12));
    let report = validate_minimal_looking(&net);
    assert!(report.passed_with_ball_condition(), "{report:?}");
    for k in 0..12 {
        assert_abs_diff_eq!(net.arc_length(k), (1.0f64 / 3.0).acos(), epsilon = 1e-14);
    }
}

#[test]
fn union_builder() {
    let p1 = build_plane(4, &Frame::standard_offset(4, 0, 2).unwrap()).unwrap();
    let p2 = build_plane(4, &Frame::standard_offset(4, 2, 2).unwrap()).unwrap();
    let u = build_union(&[p1.clone(), p2]).unwrap();
    assert_abs_diff_eq!(net_density(&u), TAU, epsilon = 1e-12);
    assert_eq!(u.components().len(), 2);
    assert!(validate_minimal_looking(&u).passed());

    let y = build_y(5, &Frame::standard_offset(5, 0, 3).unwrap()).unwrap();
    let p = build_plane(5, &Frame::standard_offset(5, 3, 2).unwrap()).unwrap();
    let u = build_union(&[y.clone(), p.clone()]).unwrap();
    assert_abs_diff_eq!(net_density(&u), net_density(&y) + net_density(&p), epsilon = 1e-12);
    assert_abs_diff_eq!(net_density(&u), 2.5 * PI, epsilon = 1e-12);
    let comps = u.components();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0].vertices().len(), 5);

    let overlapping = build_plane(4, &Frame::standard_offset(4, 1, 2).unwrap()).unwrap();
    assert!(matches!(build_union(&[p1, overlapping]), Err(NetError::OverlappingSubspaces(0, 1))));
    assert!(matches!(build_union(&[]), Err(NetError::EmptyUnion)));
}

#[test]
fn decomposition_leaves_short_arcs_alone() {
    let net = build_plane(3, &frame(3, 2)).unwrap();
    let d = standard_decompose(&net).unwrap();
    assert_eq!(d.arcs().len(), 3);
    assert_eq!(d.vertices(), net.vertices());
    assert_eq!(net_length(&d), net_length(&net));
}

#[test]
fn decomposition_splits_long_arcs_into_fewest_equal_pieces() {
    // Arcs of 2.9 and 2π − 2.9 ≈ 3.383: both exceed 9π/10 ≈ 2.827, both fit in two pieces.
    let net = build_circle(3, &frame(3, 2), &[0.0, 2.9], "q").unwrap();
    assert!(2.9 > 0.9 * PI);
    let d = standard_decompose(&net).unwrap();
    assert_eq!(d.arcs().len(), 4);
    let halves: Vec<f64> = (0..2).map(|k| d.arc_length(k)).collect();
    for h in halves {
        assert_abs_diff_eq!(h, 1.45, epsilon = 1e-14);
    }
    assert_abs_diff_eq!(net_length(&d), net_length(&net), epsilon = 1e-12);
    assert_abs_diff_eq!(net_length(&net), TAU, epsilon = 1e-12);

    // An arc of 5.9 exceeds 2·(9π/10) and needs three pieces.
    let net = build_circle(3, &frame(3, 2), &[0.0, 5.9], "q").unwrap();
    let d = standard_decompose(&net).unwrap();
    let long: Vec<f64> = (0..d.arcs().len())
        .filter(|&k| d.arcs()[k].id.starts_with("q0-q1"))
        .map(|k| d.arc_length(k))
        .collect();
    assert_eq!(long.len(), 3);
    for l in long {
        assert_abs_diff_eq!(l, 5.9 / 3.0, epsilon = 1e-13);
    }
    assert_abs_diff_eq!(net_length(&d), TAU, epsilon = 1e-12);
    for k in 0..d.arcs().len() {
        let l = d.arc_length(k);
        assert!(l <= 0.9 * PI && l >= 10.0 * d.eta0());
    }
    // Cut points stay on the circle.
    for v in d.vertices() {
        assert!(v.point.coords()[2].abs() < 1e-15);
        assert_eq!(v.kind, VertexKind::V1);
    }
    assert!(validate_minimal_looking(&d).passed());
}

#[test]
fn decomposition_rejects_eta_violation() {
    let net = build_circle(3, &frame(3, 2), &[0.0, 0.05, 3.0], "q").unwrap();
    assert!(matches!(standard_decompose(&net), Err(NetError::EtaViolated { .. })));
}

#[test]
fn rotated_arm_is_an_angle_defect() {
    let net = build_y(3, &frame(3, 3)).unwrap();
    let mut points = net.points();
    let t: f64 = 0.1;
    points[2] = UnitVector::normalize(vec![0.0, t.cos(), t.sin()]).unwrap();
    let bent = net.with_points(points).unwrap();
    let report = validate_minimal_looking(&bent);
    assert!(!report.passed());
    assert_eq!(report.angle_defects.len(), 2);
    for d in &report.angle_defects {
        assert_eq!(d.kind, VertexKind::V0);
        assert_abs_diff_eq!(d.deviation, 0.1, epsilon = 1e-12);
    }
}

#[test]
fn free_endpoints_and_crossings_are_reported() {
    let e = |i| UnitVector::basis(3, i).unwrap();
    let lonely = ConeNet::new(
        0.01,
        vec![Vertex::new("a", VertexKind::V0, e(0)), Vertex::new("b", VertexKind::V0, e(1))],
        vec![Arc::geodesic("ab", [0, 1])],
    )
    .unwrap();
    let r = validate_minimal_looking(&lonely);
    assert_eq!(r.degree_defects.len(), 2);
    assert!(!r.passed());

    let c1 = build_plane(3, &frame(3, 2)).unwrap();
    let beta: f64 = 0.3;
    let tilted = Frame::new(vec![
        UnitVector::normalize(vec![0.5f64.cos(), 0.5f64.sin(), 0.0]).unwrap(),
        UnitVector::normalize(vec![-0.5f64.sin() * beta.cos(), 0.5f64.cos() * beta.cos(), beta.sin()]).unwrap(),
    ])
    .unwrap();
    let c2 = build_circle(3, &tilted, &[0.0, TAU / 3.0, 2.0 * TAU / 3.0], "r").unwrap();
    let mut vertices = c1.vertices().to_vec();
    vertices.extend(c2.vertices().iter().cloned());
    let mut arcs = c1.arcs().to_vec();
    arcs.extend(c2.arcs().iter().map(|a| Arc::geodesic(a.id.clone(), [a.ends[0] + 3, a.ends[1] + 3])));
    let crossing = ConeNet::new(0.01, vertices, arcs).unwrap();
    let r = validate_minimal_looking(&crossing);
    assert!(!r.separation.is_empty());
    assert!(r.separation.iter().all(|s| s.distance < 1e-6));
    assert!(!r.ball_condition.is_empty());
}

#[test]
fn vertex_map_identity_is_bit_stable() {
    for net in [
        build_plane(3, &frame(3, 2)).unwrap(),
        build_y(4, &frame(4, 3)).unwrap(),
        build_t(3, &frame(3, 3)).unwrap(),
    ] {
        let id = VertexMap::identity(&net, 0.05).unwrap();
        let moved = apply_vertex_map(&net, &id).unwrap();
        assert_eq!(moved, net);
        for k in 0..net.arcs().len() {
            assert_eq!(moved.arc_length(k).to_bits(), net.arc_length(k).to_bits());
        }
    }
}

#[test]
fn vertex_map_moves_along_circle_and_off_plane() {
    let net = build_plane(3, &frame(3, 2)).unwrap();
    let mut pts = net.points();
    let t: f64 = 0.05;
    pts[0] = UnitVector::normalize(vec![t.cos(), t.sin(), 0.0]).unwrap();
    let moved = apply_vertex_map(&net, &VertexMap::from_points(&net, pts, 0.06).unwrap()).unwrap();
    assert_abs_diff_eq!(net_length(&moved), TAU, epsilon = 1e-12);

    for delta in [0.05, 0.025, 0.0125] {
        let mut pts = net.points();
        let lift = 2.0 * (delta / 2.0f64).asin();
        pts[0] = UnitVector::normalize(vec![lift.cos(), 0.0, lift.sin()]).unwrap();
        let phi = VertexMap::from_points(&net, pts, delta * (1.0 + 1e-12)).unwrap();
        let moved = apply_vertex_map(&net, &phi).unwrap();
        let change = net_length(&moved) - TAU;
        assert!(change <= 2.0 * delta * delta, "{change}");
    }
}

#[test]
fn vertex_map_errors() {
    let net = build_plane(3, &frame(3, 2)).unwrap();
    let mut pts = net.points();
    pts[1] = UnitVector::basis(3, 2).unwrap();
    let phi = VertexMap::from_points(&net, pts, 0.05).unwrap();
    assert!(matches!(apply_vertex_map(&net, &phi), Err(NetError::DisplacementTooLarge { .. })));
    let phi = VertexMap::new(Default::default(), 0.05).unwrap();
    assert!(matches!(apply_vertex_map(&net, &phi), Err(NetError::MissingImage(_))));
    assert!(VertexMap::identity(&net, 0.0005).unwrap().within_structural_bound(0.01));
    assert!(!VertexMap::identity(&net, 0.05).unwrap().within_structural_bound(0.01));
}

#[test]
fn hausdorff_distance_of_rotated_planes() {
    let a = build_plane(3, &frame(3, 2)).unwrap();
    assert!(normalized_hausdorff_distance(&a, &a, &[0.0; 3], 1.0).unwrap() < 1e-14);
    for beta in [0.05f64, 0.2, 0.7] {
        let rotated = Frame::new(vec![
            UnitVector::basis(3, 0).unwrap(),
            UnitVector::normalize(vec![0.0, beta.cos(), beta.sin()]).unwrap(),
        ])
        .unwrap();
        let b = build_plane(3, &rotated).unwrap();
        let d = normalized_hausdorff_distance(&a, &b, &[0.0; 3], 1.0).unwrap();
        // Each one-sided sup equals sin β, attained on the unit circle orthogonal to the axis.
        assert_abs_diff_eq!(d, 2.0 * beta.sin(), epsilon = 2e-3);
        let coarse = normalized_hausdorff_distance_with_step(&a, &b, &[0.0; 3], 1.0, 2e-3).unwrap();
        assert!((coarse - d).abs() < 2.0 * 2e-3);
    }
}

#[test]
fn hausdorff_distance_away_from_the_cones() {
    let a = build_plane(3, &frame(3, 2)).unwrap();
    let b = build_y(3, &frame(3, 3)).unwrap();
    // The ball misses both cones entirely.
    let d = normalized_hausdorff_distance(&a, &b, &[0.0, 0.0, 10.0], 1.0).unwrap();
    assert_eq!(d, 0.0);
    assert!(normalized_hausdorff_distance(&a, &b, &[0.0; 3], -1.0).is_err());
}

#[test]
fn length_gradient_vanishes_on_balanced_cones() {
    for net in [
        build_plane(3, &frame(3, 2)).unwrap(),
        build_y(3, &frame(3, 3)).unwrap(),
        build_t(3, &frame(3, 3)).unwrap(),
        build_cube(4, &frame(4, 3)).unwrap(),
    ] {
        let g = length_gradient(&net).unwrap();
        let norm2: f64 = g.iter().flatten().map(|x| x * x).sum();
        assert!(norm2.sqrt() < 1e-12);
    }
}

#[test]
fn length_gradient_matches_finite_differences() {
    let net = build_t(4, &frame(4, 3)).unwrap();
    let mut pts = net.points();
    pts[1] = pts[1].exp(&pts[1].project_tangent(&[0.01, -0.02, 0.005, 0.03])).unwrap();
    let net = net.with_points(pts).unwrap();
    let grad = length_gradient(&net).unwrap();
    let h = 1e-5;
    for v in 0..net.vertices().len() {
        let base = net.vertices()[v].point.clone();
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            let dir = base.project_tangent(&e);
            let step: Vec<f64> = dir.iter().map(|x| x * h).collect();
            let back: Vec<f64> = dir.iter().map(|x| -x * h).collect();
            let eval = |d: &[f64]| {
                let mut p = net.points();
                p[v] = base.exp(d).unwrap();
                net_length(&net.with_points(p).unwrap())
            };
            let fd = (eval(&step) - eval(&back)) / (2.0 * h);
            let analytic: f64 = grad[v].iter().zip(&dir).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(fd, analytic, epsilon = 1e-6);
        }
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let net = build_t(5, &Frame::random(5, 3, &mut rng).unwrap()).unwrap();
    let text = to_json(&net).unwrap();
    let back = from_json(&text).unwrap();
    assert_eq!(back, net);
    for (a, b) in back.vertices().iter().zip(net.vertices()) {
        for (x, y) in a.point.coords().iter().zip(b.point.coords()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
    assert_eq!(to_json(&back).unwrap(), text);
}

#[test]
fn json_rejects_bad_input() {
    let net = build_plane(3, &frame(3, 2)).unwrap();
    let text = to_json(&net).unwrap();
    assert!(matches!(from_json(&text.replace("\"version\": 1", "\"version\": 2")), Err(NetError::UnsupportedVersion(2))));
    assert!(matches!(from_json("{"), Err(NetError::Format(_))));
    assert!(from_json(&text.replace("\"p1\",\n", "\"zz\",\n")).is_err());
    let circle = build_circle(3, &frame(3, 2), &[0.0, 1.0], "q").unwrap();
    assert!(matches!(to_json(&circle), Err(NetError::LongArc(_))));
}

#[test]
fn obj_export() {
    let net = build_y(3, &frame(3, 3)).unwrap();
    let obj = to_obj(&net, 2.0, 0.1).unwrap();
    let verts = obj.lines().filter(|l| l.starts_with("v ")).count();
    let faces = obj.lines().filter(|l| l.starts_with("f ")).count();
    // Each quarter circle is split into 16 segments.
    assert_eq!(faces, 6 * 16);
    assert_eq!(verts, 1 + 6 * 17);
    let far = build_plane(5, &Frame::standard_offset(5, 2, 2).unwrap()).unwrap();
    assert!(matches!(to_obj(&far, 1.0, 0.1), Err(NetError::NotThreeDimensional)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_preserves_length(a in 0.3f64..2.0, b in 0.3f64..3.0, c in 0.3f64..3.0) {
        let total = a + b + c;
        let angles = [0.0, TAU * a / total, TAU * (a + b) / total];
        let net = build_circle(4, &frame(4, 2), &angles, "q").unwrap();
        let d = standard_decompose(&net).unwrap();
        prop_assert!((net_length(&d) - net_length(&net)).abs() < 1e-12);
        for k in 0..d.arcs().len() {
            prop_assert!(d.arc_length(k) <= 0.9 * PI + 1e-12);
        }
    }

    #[test]
    fn union_density_is_additive(seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = Frame::random(7, 7, &mut rng).unwrap();
        let v = f.vectors();
        let t = build_t(7, &Frame::new(v[0..3].to_vec()).unwrap()).unwrap();
        let y = build_y(7, &Frame::new(v[3..6].to_vec()).unwrap()).unwrap();
        let u = build_union(&[t.clone(), y.clone()]).unwrap();
        prop_assert!((net_density(&u) - net_density(&t) - net_density(&y)).abs() < 1e-12);
    }

    #[test]
    fn identity_map_is_identity(seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let net = build_y(5, &Frame::random(5, 3, &mut rng).unwrap()).unwrap();
        let moved = apply_vertex_map(&net, &VertexMap::identity(&net, 0.01).unwrap()).unwrap();
        prop_assert_eq!(moved, net);
    }
}
