//! CSV form of density profiles: rows `r, theta`, optional header.

use super::{DecayError, DensityProfile};

/// Parses `r, theta` rows. Without `d0` the density at the smallest radius
/// stands in for the limit density.
pub fn profile_from_csv(text: &str, d0: Option<f64>) -> Result<DensityProfile, DecayError> {
    let mut radii = Vec::new();
    let mut theta = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match row {
            Ok(r) if r.len() == 2 => {
                radii.push(r[0]);
                theta.push(r[1]);
            }
            Ok(r) => {
                return Err(DecayError::Format(format!(
                    "line {}: expected 2 columns, found {}",
                    line_no + 1,
                    r.len()
                )))
            }
            Err(_) if radii.is_empty() => continue,
            Err(e) => return Err(DecayError::Format(format!("line {}: {e}", line_no + 1))),
        }
    }
    let d0 = match d0 {
        Some(d) => d,
        None => *theta
            .first()
            .ok_or_else(|| DecayError::InvalidProfile("empty profile".into()))?,
    };
    DensityProfile::new(radii, theta, d0)
}

pub fn profile_to_csv(p: &DensityProfile) -> String {
    let mut out = String::from("r,theta\n");
    for (r, t) in p.radii().iter().zip(p.theta()) {
        out.push_str(&format!("{r:?},{t:?}\n"));
    }
    out
}
