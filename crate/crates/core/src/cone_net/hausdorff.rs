use rayon::prelude::*;

use super::{ArcFrame, ConeNet, NetError};
use crate::sphere::{dot, norm};
use crate::tolerances::HAUSDORFF_STEP;

/// Normalized two-sided distance between the cones over `a` and `b` inside
/// the ball `B(center, r)`: the sum of the two one-sided sups of the
/// distance to the other cone, divided by `r`. A one-sided sup over an empty
/// intersection counts as 0.
///
/// Distances to a cone grow linearly along rays from the origin, so each
/// ray contributes its far intersection with the ball exactly; only the ray
/// directions are sampled, with spacing at most `1e-3·r` at the far end.
pub fn normalized_hausdorff_distance(a: &ConeNet, b: &ConeNet, center: &[f64], r: f64) -> Result<f64, NetError> {
    normalized_hausdorff_distance_with_step(a, b, center, r, HAUSDORFF_STEP)
}

/// As [`normalized_hausdorff_distance`] with sampling step `step_rel·r`.
pub fn normalized_hausdorff_distance_with_step(
    a: &ConeNet,
    b: &ConeNet,
    center: &[f64],
    r: f64,
    step_rel: f64,
) -> Result<f64, NetError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(NetError::InvalidParameter(format!("radius {r}")));
    }
    if !(step_rel > 0.0 && step_rel.is_finite()) {
        return Err(NetError::InvalidParameter(format!("sampling step {step_rel}")));
    }
    for net in [a, b] {
        if net.dimension() != center.len() {
            return Err(NetError::InvalidParameter(format!(
                "center has dimension {}, net has {}",
                center.len(),
                net.dimension()
            )));
        }
    }
    let ab = one_sided(a, b, center, r, step_rel * r);
    let ba = one_sided(b, a, center, r, step_rel * r);
    Ok((ab + ba) / r)
}

/// sup { dist(y, cone(b)) : y ∈ cone(a) ∩ B(center, r) }
fn one_sided(a: &ConeNet, b: &ConeNet, center: &[f64], r: f64, h: f64) -> f64 {
    let targets: Vec<ArcFrame> = (0..b.arcs().len()).map(|k| b.arc_frame(k)).collect();
    let dist_to_b = |y: &[f64]| targets.iter().map(|f| f.cone_distance(y)).fold(f64::INFINITY, f64::min);
    let cc = dot(center, center);
    let reach = cc.sqrt() + r;
    (0..a.arcs().len())
        .flat_map(|k| {
            let f = a.arc_frame(k);
            let m = (f.length * reach / h).ceil().max(1.0) as usize;
            (0..=m).map(move |i| (k, f.length * i as f64 / m as f64))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, s)| {
            let q = a.arc_frame(k).point(s);
            let qn = norm(&q);
            let q: Vec<f64> = q.iter().map(|x| x / qn).collect();
            // Ray t·q meets the ball for t in [c - w, c + w].
            let c = dot(&q, center);
            let disc = c * c - cc + r * r;
            if disc < 0.0 {
                return 0.0;
            }
            // The other cone is invariant under positive scaling, so the
            // distance grows linearly along the ray and peaks at its far end.
            let hi = c + disc.sqrt();
            if hi < 0.0 {
                return 0.0;
            }
            hi * dist_to_b(&q)
        })
        .reduce(|| 0.0, f64::max)
}
