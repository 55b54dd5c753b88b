//! Curve files: CSV with one point per row (`x₁, …, x_n`, optional header),
//! or JSON `{"points": [[…], …], "plane": [[…], […]]}`. A plane given in the
//! file overrides the default plane through the endpoints.

use serde::{Deserialize, Serialize};

use super::StraightenError;
use crate::sphere::{Frame, UnitVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<[Vec<f64>; 2]>,
}

impl CurveFile {
    pub fn polyline(&self) -> Result<Vec<UnitVector>, StraightenError> {
        self.points
            .iter()
            .map(|p| Ok(UnitVector::new(p.clone())?))
            .collect()
    }

    pub fn frame(&self) -> Result<Option<Frame>, StraightenError> {
        match &self.plane {
            None => Ok(None),
            Some([a, b]) => Ok(Some(Frame::new(vec![
                UnitVector::new(a.clone())?,
                UnitVector::new(b.clone())?,
            ])?)),
        }
    }
}

pub fn curve_from_csv(text: &str) -> Result<CurveFile, StraightenError> {
    let mut points = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => points.push(r),
            Err(_) if points.is_empty() => continue,
            Err(e) => {
                return Err(StraightenError::Format(format!("line {}: {e}", line_no + 1)))
            }
        }
    }
    Ok(CurveFile { points, plane: None })
}

pub fn curve_to_csv(points: &[UnitVector]) -> String {
    let dim = points.first().map_or(0, UnitVector::dim);
    let header: Vec<String> = (1..=dim).map(|d| format!("x{d}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn curve_from_json(text: &str) -> Result<CurveFile, StraightenError> {
    serde_json::from_str(text).map_err(|e| StraightenError::Format(e.to_string()))
}

pub fn curve_to_json(points: &[UnitVector], plane: Option<&Frame>) -> String {
    let file = CurveFile {
        points: points.iter().map(|p| p.coords().to_vec()).collect(),
        plane: plane.map(|f| {
            let v = f.vectors();
            [v[0].coords().to_vec(), v[1].coords().to_vec()]
        }),
    };
    serde_json::to_string_pretty(&file).expect("curve serializes")
}
