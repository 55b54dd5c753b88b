//! `key = value` run configuration, merged under command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use conelab::tolerances::Tolerances;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "seed", "budget", "eta", "eta1", "eta0", "tau1", "kappa", "modes", "lambda", "threads",
    "dim", "intervals",
];

const TOLERANCE_KEYS: &[&str] = &[
    "unit",
    "trig",
    "angle",
    "hausdorff_step",
    "alpha_floor",
    "length_noise",
    "critical_gradient",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value", no + 1))?;
            let key = k.trim().to_string();
            let known = KNOWN_KEYS.contains(&key.as_str())
                || key
                    .strip_prefix("tol.")
                    .is_some_and(|t| TOLERANCE_KEYS.contains(&t));
            if !known {
                bail!("config line {}: unknown key `{key}`", no + 1);
            }
            values.insert(key, v.trim().to_string());
        }
        let cfg = Self { values };
        cfg.tolerances()?;
        Ok(cfg)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("config key `{key}` = `{v}`: {e}"))
            })
            .transpose()
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    /// Default tolerances with `tol.*` overrides; every override must be positive.
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut tol = Tolerances::default();
        for name in TOLERANCE_KEYS {
            let key = format!("tol.{name}");
            if let Some(v) = self.get::<f64>(&key)? {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("tolerance `{key}` must be positive, got {v}");
                }
                let slot = match *name {
                    "unit" => &mut tol.unit,
                    "trig" => &mut tol.trig,
                    "angle" => &mut tol.angle,
                    "hausdorff_step" => &mut tol.hausdorff_step,
                    "alpha_floor" => &mut tol.alpha_floor,
                    "length_noise" => &mut tol.length_noise,
                    _ => &mut tol.critical_gradient,
                };
                *slot = v;
            }
        }
        Ok(tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let cfg = RunConfig::parse("# run\nseed = 7\neta1=0.02  # comment\ntol.angle = 1e-8\n").unwrap();
        assert_eq!(cfg.resolve(None, "seed", 0u64).unwrap(), 7);
        assert_eq!(cfg.resolve(Some(3), "seed", 0u64).unwrap(), 3);
        assert_eq!(cfg.resolve(None, "budget", 10usize).unwrap(), 10);
        assert_eq!(cfg.tolerances().unwrap().angle, 1e-8);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(RunConfig::parse("nonsense").is_err());
        assert!(RunConfig::parse("color = red").is_err());
        assert!(RunConfig::parse("tol.unit = -1").is_err());
        assert!(RunConfig::parse("seed = x").unwrap().get::<u64>("seed").is_err());
    }
}
