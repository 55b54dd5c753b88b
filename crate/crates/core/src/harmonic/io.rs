//! CSV and JSON forms of sector profiles.
//!
//! CSV rows are `t, v₁, …, v_m` with a header line; JSON is
//! `{"aperture": T, "eta": η, "values": [[…], …]}`.

use serde::Deserialize;

use super::{HarmonicError, SectorProfile};

const GRID_TOL: f64 = 1e-9;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    aperture: f64,
    eta: Option<f64>,
    values: Vec<Vec<f64>>,
}

fn finish(aperture: f64, values: Vec<Vec<f64>>, eta: Option<f64>) -> Result<SectorProfile, HarmonicError> {
    let eta = match eta {
        Some(e) => e,
        None => {
            if values.len() < 2 {
                return Err(HarmonicError::TooFewSamples(values.len().saturating_sub(1)));
            }
            let step = aperture / (values.len() - 1) as f64;
            let lip = super::max_abs_difference_quotient(&values, step);
            // A flat profile still needs a positive bound.
            if lip > 0.0 {
                lip
            } else {
                f64::MIN_POSITIVE
            }
        }
    };
    SectorProfile::new(aperture, values, eta)
}

/// Parses a CSV profile. Without `eta` the measured discrete Lipschitz
/// constant is used as the bound.
pub fn profile_from_csv(text: &str, eta: Option<f64>) -> Result<SectorProfile, HarmonicError> {
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) if row.len() >= 2 => {
                ts.push(row[0]);
                values.push(row[1..].to_vec());
            }
            Ok(_) => {
                return Err(HarmonicError::Format(format!(
                    "line {}: need t and at least one component",
                    line_no + 1
                )))
            }
            // Header line.
            Err(_) if ts.is_empty() => continue,
            Err(e) => return Err(HarmonicError::Format(format!("line {}: {e}", line_no + 1))),
        }
    }
    if ts.len() < 3 {
        return Err(HarmonicError::TooFewSamples(ts.len().saturating_sub(1)));
    }
    if ts[0] != 0.0 {
        return Err(HarmonicError::Format("first t must be 0".into()));
    }
    let aperture = *ts.last().unwrap();
    let m = (ts.len() - 1) as f64;
    for (j, t) in ts.iter().enumerate() {
        if (t - aperture * j as f64 / m).abs() > GRID_TOL * aperture.max(1.0) {
            return Err(HarmonicError::NonUniformGrid(j));
        }
    }
    finish(aperture, values, eta)
}

pub fn profile_to_csv(p: &SectorProfile) -> String {
    let mut out = String::from("t");
    for d in 0..p.dim() {
        out.push_str(&format!(",v{}", d + 1));
    }
    out.push('\n');
    for (j, v) in p.values().iter().enumerate() {
        out.push_str(&format!("{:?}", p.grid_point(j)));
        for x in v {
            out.push_str(&format!(",{x:?}"));
        }
        out.push('\n');
    }
    out
}

pub fn profile_from_json(text: &str) -> Result<SectorProfile, HarmonicError> {
    let file: ProfileFile =
        serde_json::from_str(text).map_err(|e| HarmonicError::Format(e.to_string()))?;
    finish(file.aperture, file.values, file.eta)
}

pub fn profile_to_json(p: &SectorProfile) -> String {
    serde_json::to_string_pretty(p).expect("profile serializes")
}
