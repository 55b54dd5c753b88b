use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{ArcFrame, ConeNet, VertexKind};
use crate::sphere::{angle_between, norm, sub};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortArc {
    pub arc: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleDefect {
    pub vertex: String,
    pub kind: VertexKind,
    /// Largest deviation of a junction angle from 2π/3 (V0) or π (V1).
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationDefect {
    pub arcs: [String; 2],
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDefect {
    pub vertex: String,
    pub kind: VertexKind,
    pub degree: usize,
}

/// Structural checks of a net against a given η₀.
///
/// `separation` holds pairs of arcs without a common endpoint that come
/// closer than η₀. `ball_condition` holds the stricter pointwise form: a
/// point of one arc within η₀ of another arc must see a shared endpoint no
/// farther than that other arc. The ball condition is reported but does not
/// affect [`ValidationReport::passed`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub eta0: f64,
    pub short_arcs: Vec<ShortArc>,
    pub angle_defects: Vec<AngleDefect>,
    pub separation: Vec<SeparationDefect>,
    pub ball_condition: Vec<SeparationDefect>,
    pub degree_defects: Vec<DegreeDefect>,
    /// Smallest distance between two arcs without a common endpoint.
    pub min_separation: Option<f64>,
    /// Largest junction angle deviation over all vertices.
    pub max_angle_deviation: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.short_arcs.is_empty()
            && self.angle_defects.is_empty()
            && self.separation.is_empty()
            && self.degree_defects.is_empty()
    }

    pub fn passed_with_ball_condition(&self) -> bool {
        self.passed() && self.ball_condition.is_empty()
    }
}

pub fn validate_minimal_looking(net: &ConeNet) -> ValidationReport {
    validate_with(net, &Tolerances::default())
}

pub fn validate_with(net: &ConeNet, tol: &Tolerances) -> ValidationReport {
    let eta0 = net.eta0();
    let mut report = ValidationReport {
        eta0,
        short_arcs: Vec::new(),
        angle_defects: Vec::new(),
        separation: Vec::new(),
        ball_condition: Vec::new(),
        degree_defects: Vec::new(),
        min_separation: None,
        max_angle_deviation: 0.0,
    };
    for (k, a) in net.arcs().iter().enumerate() {
        let length = net.arc_length(k);
        if length < 10.0 * eta0 * (1.0 - 1e-12) {
            report.short_arcs.push(ShortArc { arc: a.id.clone(), length });
        }
    }
    for (v, vertex) in net.vertices().iter().enumerate() {
        let degree = net.degree(v);
        if degree != vertex.kind.expected_degree() {
            report.degree_defects.push(DegreeDefect { vertex: vertex.id.clone(), kind: vertex.kind, degree });
            continue;
        }
        let Ok(tangents) = net.tangents_at(v) else {
            report.angle_defects.push(AngleDefect { vertex: vertex.id.clone(), kind: vertex.kind, deviation: PI });
            continue;
        };
        let target = match vertex.kind {
            VertexKind::V0 => TAU / 3.0,
            VertexKind::V1 => PI,
        };
        let mut deviation: f64 = 0.0;
        for i in 0..tangents.len() {
            for j in i + 1..tangents.len() {
                deviation = deviation.max((angle_between(&tangents[i], &tangents[j]) - target).abs());
            }
        }
        report.max_angle_deviation = report.max_angle_deviation.max(deviation);
        if deviation > tol.angle {
            report.angle_defects.push(AngleDefect { vertex: vertex.id.clone(), kind: vertex.kind, deviation });
        }
    }
    let frames: Vec<ArcFrame> = (0..net.arcs().len()).map(|k| net.arc_frame(k)).collect();
    let step = tol.hausdorff_step;
    for i in 0..frames.len() {
        for j in 0..frames.len() {
            if i == j {
                continue;
            }
            let (ai, aj) = (&net.arcs()[i], &net.arcs()[j]);
            let shared: Vec<usize> = ai.ends.iter().filter(|e| aj.ends.contains(e)).copied().collect();
            if i < j && shared.is_empty() {
                let d = min_distance(&frames[i], &frames[j], step);
                report.min_separation = Some(report.min_separation.map_or(d, |m: f64| m.min(d)));
                if d < eta0 {
                    report.separation.push(SeparationDefect { arcs: [ai.id.clone(), aj.id.clone()], distance: d });
                }
            }
            if let Some(worst) = ball_condition_miss(net, &frames[i], &frames[j], &shared, eta0, step) {
                report
                    .ball_condition
                    .push(SeparationDefect { arcs: [ai.id.clone(), aj.id.clone()], distance: worst });
            }
        }
    }
    report
}

fn sample_params(length: f64, step: f64) -> impl Iterator<Item = f64> {
    let m = (length / step).ceil().max(1.0) as usize;
    (0..=m).map(move |i| length * i as f64 / m as f64)
}

/// Minimum Euclidean distance between two arcs: exact distance to `b` from
/// samples of `a`, refined by golden-section search around the best sample.
fn min_distance(a: &ArcFrame, b: &ArcFrame, step: f64) -> f64 {
    let dist = |s: f64| b.closest(&a.point(s)).0;
    let (mut best_s, mut best) = (0.0, f64::INFINITY);
    for s in sample_params(a.length, step) {
        let d = dist(s);
        if d < best {
            best = d;
            best_s = s;
        }
    }
    let (mut lo, mut hi) = ((best_s - step).max(0.0), (best_s + step).min(a.length));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if dist(m1) < dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best.min(dist(0.5 * (lo + hi)))
}

/// Largest violation of the ball condition for points of `a` near `b`.
fn ball_condition_miss(
    net: &ConeNet,
    a: &ArcFrame,
    b: &ArcFrame,
    shared: &[usize],
    eta0: f64,
    step: f64,
) -> Option<f64> {
    let slack = 1e-9;
    let mut worst: Option<f64> = None;
    for s in sample_params(a.length, step) {
        let x = a.point(s);
        let (d, _) = b.closest(&x);
        if d > eta0 {
            continue;
        }
        let ok = shared
            .iter()
            .any(|&v| norm(&sub(&x, net.vertices()[v].point.coords())) <= d + slack);
        if !ok {
            worst = Some(worst.map_or(d, |w: f64| w.min(d)));
        }
    }
    worst
}
