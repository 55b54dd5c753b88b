use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use rayon::prelude::*;
use serde::Serialize;

use conelab::cone_net::{
    build_plane, build_t, build_union, build_y, from_json, net_density, net_length, to_json,
    to_obj, validate_with, Arc, ConeNet, Vertex,
};
use conelab::decay::{
    check_near_monotonicity, decay_bound, decay_integral, gauge_h1, log_gauge_decay,
    profile_from_csv as density_from_csv, weak_decay_envelope, GaugeSpec, WeakDecayParams,
};
use conelab::harmonic::{
    area_saving, battery_profile, profile_from_csv, profile_from_json, profile_to_csv,
    SavingReport, DEFAULT_KAPPA, DEFAULT_MODES, DEFAULT_SAMPLES,
};
use conelab::perturbation::{componentwise_certificate, full_length_certificate, SamplerConfig};
use conelab::sphere::{Frame, UnitVector};
use conelab::straighten::{
    battery_curve, curve_from_csv, curve_from_json, curve_to_csv, curve_to_json, default_tau1,
    energy_diagnostics, parameterize, plane_through_endpoints, straighten as straighten_curve,
    CurveRecipe, EnergyReport, StraightenResult,
};

use crate::config::RunConfig;
use crate::report::{format_float, render};
use crate::{
    BuildArgs, CheckMonotoneArgs, ConeKind, DecayCommand, EpiArgs, FullLengthArgs, NetFormat,
    Outcome, StraightenArgs,
};

pub struct Context {
    pub cfg: RunConfig,
    pub json: bool,
}

impl Context {
    fn emit<T: Serialize>(&self, report: &T) -> Result<()> {
        print!("{}", render(report, self.json)?);
        Ok(())
    }
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

/// Caps the rayon pool from `CONELAB_THREADS`, or the `threads` config key.
pub fn configure_threads(cfg: &RunConfig) -> Result<()> {
    let threads = match std::env::var("CONELAB_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| anyhow!("CONELAB_THREADS = `{v}`: {e}"))?,
        ),
        Err(_) => cfg.get::<usize>("threads")?,
    };
    if let Some(n) = threads {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

// Places `net` in coordinates `offset..offset + net.dimension()` of R^total.
fn embed(net: &ConeNet, total: usize, offset: usize) -> Result<ConeNet> {
    let lift = |u: &UnitVector| -> Result<UnitVector> {
        let mut c = vec![0.0; total];
        c[offset..offset + u.dim()].copy_from_slice(u.coords());
        Ok(UnitVector::new(c)?)
    };
    let vertices = net
        .vertices()
        .iter()
        .map(|v| Ok(Vertex::new(v.id.clone(), v.kind, lift(&v.point)?)))
        .collect::<Result<Vec<_>>>()?;
    let arcs = net
        .arcs()
        .iter()
        .map(|a| {
            Ok(match a.heading() {
                Some(h) => Arc::directed(a.id.clone(), a.ends, lift(h)?),
                None => Arc::geodesic(a.id.clone(), a.ends),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeNet::new(net.eta0(), vertices, arcs)?)
}

#[derive(Serialize)]
struct BuildSummary {
    kind: String,
    dim: usize,
    eta0: f64,
    vertices: usize,
    arcs: usize,
    length: f64,
    density: f64,
    density_over_pi: f64,
    validation_passed: bool,
}

pub fn build(ctx: &Context, a: &BuildArgs) -> Result<Outcome> {
    let dim = ctx.cfg.resolve(a.dim, "dim", 3)?;
    let net = match a.kind {
        ConeKind::Plane => build_plane(dim, &Frame::standard(dim, 2)?)?,
        ConeKind::Y => build_y(dim, &Frame::standard(dim, 3)?)?,
        ConeKind::T => build_t(dim, &Frame::standard(dim, 3)?)?,
        ConeKind::Union => {
            if a.parts.len() < 2 {
                bail!("union needs at least two --parts files");
            }
            let parts = a
                .parts
                .iter()
                .map(|p| from_json(&read(p)?).with_context(|| format!("parsing {}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            let total: usize = parts.iter().map(ConeNet::dimension).sum();
            let mut offset = 0;
            let mut lifted = Vec::with_capacity(parts.len());
            for p in &parts {
                lifted.push(embed(p, total, offset)?);
                offset += p.dimension();
            }
            build_union(&lifted)?
        }
    };
    let eta0 = match a.eta0 {
        Some(e) => Some(e),
        None => ctx.cfg.get("eta0")?,
    };
    let net = match eta0 {
        Some(e) => net.with_eta0(e)?,
        None => net,
    };
    let validation = validate_with(&net, &ctx.cfg.tolerances()?);
    let density = net_density(&net);
    let summary = BuildSummary {
        kind: format!("{:?}", a.kind).to_lowercase(),
        dim: net.dimension(),
        eta0: net.eta0(),
        vertices: net.vertices().len(),
        arcs: net.arcs().len(),
        length: net_length(&net),
        density,
        density_over_pi: density / std::f64::consts::PI,
        validation_passed: validation.passed(),
    };
    let body = match a.format {
        NetFormat::Json => to_json(&net)?,
        NetFormat::Obj => to_obj(&net, a.obj_radius, a.obj_step)?,
    };
    match &a.out {
        Some(path) => {
            write(path, &body)?;
            ctx.emit(&summary)?;
        }
        None => {
            print!("{body}");
            eprint!("{}", render(&summary, ctx.json)?);
        }
    }
    Ok(Outcome::Pass)
}

pub fn full_length(ctx: &Context, a: &FullLengthArgs) -> Result<Outcome> {
    let net = from_json(&read(&a.net)?).with_context(|| format!("parsing {}", a.net.display()))?;
    let eta1 = ctx.cfg.resolve(a.eta1, "eta1", 0.05)?;
    let sampler = SamplerConfig {
        seed: ctx.cfg.resolve(a.seed, "seed", 0)?,
        budget: ctx.cfg.resolve(a.budget, "budget", 100_000)?,
    };
    let reports = if a.componentwise {
        componentwise_certificate(&net, eta1, &sampler)?.components
    } else {
        vec![full_length_certificate(&net, eta1, &sampler)?]
    };
    if let Some(path) = &a.samples {
        let mut csv = String::from("component,sample_id,alpha_plus,length_delta,ratio\n");
        for r in &reports {
            for s in &r.samples {
                let ratio = s.ratio.map_or_else(String::new, format_float);
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.component,
                    s.sample_id,
                    format_float(s.alpha_plus),
                    format_float(s.length_delta),
                    ratio
                )?;
            }
        }
        write(path, &csv)?;
    }
    if let Some(path) = &a.summary {
        write(path, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    ctx.emit(&reports)?;
    Ok(outcome(reports.iter().all(|r| r.pass)))
}

#[derive(Serialize)]
struct BatteryEntry {
    index: u64,
    aperture: f64,
    saving: f64,
    lower_bound: f64,
    quadrature_error: f64,
    contract_holds: bool,
}

#[derive(Serialize)]
struct EpiBattery {
    seed: u64,
    count: usize,
    kappa: f64,
    modes: usize,
    passed: usize,
    /// Smallest `(saving + quadrature error) / lower bound`.
    min_margin_ratio: f64,
    entries: Vec<BatteryEntry>,
}

pub fn epi(ctx: &Context, a: &EpiArgs) -> Result<Outcome> {
    let kappa = ctx.cfg.resolve(a.kappa, "kappa", DEFAULT_KAPPA)?;
    if let Some(count) = a.battery {
        let seed = ctx.cfg.resolve(a.seed, "seed", 0)?;
        let dim = ctx.cfg.resolve(a.dim, "dim", 2)?;
        let intervals = ctx.cfg.resolve(a.intervals, "intervals", DEFAULT_SAMPLES)?;
        let modes = ctx.cfg.resolve(a.modes, "modes", DEFAULT_MODES)?;
        let reports: Vec<(u64, SavingReport)> = (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let p = battery_profile(seed, i, dim, intervals)?;
                Ok((i, area_saving(&p, kappa, modes)?))
            })
            .collect::<Result<_>>()?;
        let entries: Vec<BatteryEntry> = reports
            .iter()
            .map(|(i, r)| BatteryEntry {
                index: *i,
                aperture: r.aperture,
                saving: r.saving,
                lower_bound: r.lower_bound,
                quadrature_error: r.quadrature_error,
                contract_holds: r.contract_holds,
            })
            .collect();
        let passed = entries.iter().filter(|e| e.contract_holds).count();
        let min_margin_ratio = entries
            .iter()
            .filter(|e| e.lower_bound > 0.0)
            .map(|e| (e.saving + e.quadrature_error) / e.lower_bound)
            .fold(f64::INFINITY, f64::min);
        let report = EpiBattery {
            seed,
            count,
            kappa,
            modes,
            passed,
            min_margin_ratio,
            entries,
        };
        ctx.emit(&report)?;
        return Ok(outcome(passed == count));
    }
    let path = a
        .profile
        .as_ref()
        .ok_or_else(|| anyhow!("give a profile file or --battery"))?;
    let text = read(path)?;
    let profile = if is_json(path) {
        profile_from_json(&text)?
    } else {
        let eta = match a.eta {
            Some(e) => Some(e),
            None => ctx.cfg.get("eta")?,
        };
        profile_from_csv(&text, eta)?
    };
    let max_modes = profile.intervals() - 1;
    let modes = match ctx.cfg.resolve(a.modes, "modes", 0)? {
        0 => DEFAULT_MODES.min(max_modes),
        m => m,
    };
    let report = area_saving(&profile, kappa, modes)?;
    ctx.emit(&report)?;
    Ok(outcome(report.contract_holds))
}

#[derive(Serialize)]
struct StraightenReport {
    eta: f64,
    tau1: f64,
    length: f64,
    distance: f64,
    reversed: bool,
    grid_intervals: usize,
    energy: EnergyReport,
    result: StraightenResult,
    /// All straightening inequalities hold.
    pass: bool,
}

fn straighten_one(
    polyline: &[UnitVector],
    plane: &Frame,
    eta: f64,
    tau1: f64,
) -> Result<StraightenReport> {
    let c = parameterize(polyline, plane, tau1)?;
    let energy = energy_diagnostics(&c);
    let result = straighten_curve(&c, eta)?;
    let pass = energy.v_bound_holds
        && energy.f_bound_holds
        && result.certificate_holds
        && result.added_length <= result.removed_length;
    Ok(StraightenReport {
        eta,
        tau1,
        length: c.length(),
        distance: c.distance(),
        reversed: c.reversed(),
        grid_intervals: c.intervals(),
        energy,
        result,
        pass,
    })
}

#[derive(Serialize)]
struct CurveBatteryEntry {
    index: u64,
    length_excess: f64,
    v_derivative_energy: f64,
    f_integral: f64,
    bad_measure: f64,
    c_hat: Option<f64>,
    certificate_slope: f64,
    pass: bool,
}

#[derive(Serialize)]
struct StraightenBattery {
    seed: u64,
    count: usize,
    eta: f64,
    tau1: f64,
    passed: usize,
    c_hat_sup: f64,
    entries: Vec<CurveBatteryEntry>,
}

pub fn straighten(ctx: &Context, a: &StraightenArgs) -> Result<Outcome> {
    let eta = ctx.cfg.resolve(a.eta, "eta", 0.05)?;
    if let Some(count) = a.battery {
        let seed = ctx.cfg.resolve(a.seed, "seed", 0)?;
        let recipe = CurveRecipe {
            dim: ctx.cfg.resolve(a.dim, "dim", 3)?,
            tau1: ctx.cfg.resolve(a.tau1, "tau1", CurveRecipe::default().tau1)?,
            ..CurveRecipe::default()
        };
        let entries: Vec<CurveBatteryEntry> = (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let (poly, plane) = battery_curve(seed, i, &recipe)?;
                let r = straighten_one(&poly, &plane, eta, recipe.tau1)?;
                Ok(CurveBatteryEntry {
                    index: i,
                    length_excess: r.energy.length_excess,
                    v_derivative_energy: r.energy.v_derivative_energy,
                    f_integral: r.energy.f_integral,
                    bad_measure: r.result.bad_measure,
                    c_hat: r.result.c_hat,
                    certificate_slope: r.result.certificate_slope,
                    pass: r.pass,
                })
            })
            .collect::<Result<_>>()?;
        let passed = entries.iter().filter(|e| e.pass).count();
        let c_hat_sup = entries.iter().filter_map(|e| e.c_hat).fold(0.0, f64::max);
        ctx.emit(&StraightenBattery {
            seed,
            count,
            eta,
            tau1: recipe.tau1,
            passed,
            c_hat_sup,
            entries,
        })?;
        return Ok(outcome(passed == count));
    }
    let path = a
        .curve
        .as_ref()
        .ok_or_else(|| anyhow!("give a curve file or --battery"))?;
    let text = read(path)?;
    let file = if is_json(path) {
        curve_from_json(&text)?
    } else {
        curve_from_csv(&text)?
    };
    let polyline = file.polyline()?;
    let plane = match file.frame()? {
        Some(f) => f,
        None => {
            let (first, last) = match (polyline.first(), polyline.last()) {
                (Some(f), Some(l)) => (f, l),
                _ => bail!("curve file has no points"),
            };
            plane_through_endpoints(first, last)?
        }
    };
    let tau1 = ctx.cfg.resolve(a.tau1, "tau1", default_tau1(eta))?;
    let report = straighten_one(&polyline, &plane, eta, tau1)?;
    if let Some(out) = &a.out {
        let points = report.result.output_points()?;
        let body = if is_json(out) {
            curve_to_json(&points, Some(&plane))
        } else {
            curve_to_csv(&points)
        };
        write(out, &body)?;
    }
    if let Some(out) = &a.profile_out {
        let profile = report.result.to_sector_profile(eta, a.profile_intervals)?;
        write(out, &profile_to_csv(&profile))?;
    }
    ctx.emit(&report)?;
    Ok(outcome(report.pass))
}

#[derive(Serialize)]
struct BoundReport {
    gauge: GaugeSpec,
    f_y: f64,
    a: f64,
    x: f64,
    y: f64,
    decay_constant: f64,
    integral: f64,
    bound: f64,
}

pub fn decay(ctx: &Context, d: &DecayCommand) -> Result<Outcome> {
    match d {
        DecayCommand::Bound(a) => {
            let gauge = GaugeSpec::power(a.c0, a.b)?;
            let report = BoundReport {
                gauge,
                f_y: a.fy,
                a: a.a,
                x: a.x,
                y: a.y,
                decay_constant: conelab::decay::DECAY_CONSTANT,
                integral: decay_integral(a.a, &gauge, a.x, a.y)?,
                bound: decay_bound(a.fy, a.a, &gauge, a.x, a.y)?,
            };
            ctx.emit(&report)?;
            Ok(Outcome::Pass)
        }
        DecayCommand::LogBound(a) => {
            let b = log_gauge_decay(a.fy, a.a, a.c, a.scale, a.b, a.x, a.y)?;
            ctx.emit(&b)?;
            Ok(Outcome::Pass)
        }
        DecayCommand::WeakEnvelope(a) => {
            let params = WeakDecayParams {
                f_y: a.fy,
                alpha: a.alpha,
                exponent: a.exponent,
                y: a.y,
                c_h: a.c_h,
            };
            let w = weak_decay_envelope(&params, a.x)?;
            ctx.emit(&w)?;
            Ok(outcome(w.certified))
        }
        DecayCommand::CheckMonotone(a) => check_monotone(ctx, a),
    }
}

fn check_monotone(ctx: &Context, a: &CheckMonotoneArgs) -> Result<Outcome> {
    let profile = density_from_csv(&read(&a.profile)?, a.d0)?;
    let gauge = match (a.c0, a.log_c, a.log_a) {
        (_, Some(c), Some(scale)) => GaugeSpec::log(c, scale, a.b)?,
        (Some(c0), _, _) => GaugeSpec::power(c0, a.b)?,
        _ => GaugeSpec::zero(),
    };
    // Surface a Dini failure before checking.
    if let Some(r) = profile.radii().last() {
        gauge_h1(&gauge, *r)?;
    }
    let lambda = ctx.cfg.resolve(a.lambda, "lambda", 1.0)?;
    let report = check_near_monotonicity(&profile, &gauge, lambda, a.excess_constant)?;
    ctx.emit(&report)?;
    Ok(outcome(report.passed))
}
