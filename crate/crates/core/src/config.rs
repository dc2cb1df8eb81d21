//! Key-value configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. List values are comma separated. The same file carries the
//! geometry keys (`outer_radius`, `inner_radius`, `n`, `m`,
//! `electrode_coverage`, `partition_phase`, `electrode_phase`,
//! `refinement`), solver keys (`gap_tol`, `feas_tol`, `max_outer`,
//! `max_newton`, `seed`) and per-command experiment keys; see
//! `docs/experiments.md` for the full table.

use crate::geometry::GeometryConfig;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Parsed configuration file.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

/// Every key any command understands; unknown keys are rejected to catch
/// typos early.
pub const KNOWN_KEYS: &[&str] = &[
    // geometry
    "outer_radius",
    "inner_radius",
    "n",
    "m",
    "electrode_coverage",
    "partition_phase",
    "electrode_phase",
    "refinement",
    // experiment ranges
    "a",
    "b",
    "n_list",
    "m_list",
    "m_max",
    "delta_list",
    "grid_resolution",
    "seed",
    "data",
    "cache",
    // solver
    "gap_tol",
    "feas_tol",
    "max_outer",
    "max_newton",
];

impl ConfigMap {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: empty key or value in `{raw}`",
                    lineno + 1
                )));
            }
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(ConfigMap { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("key `{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("key `{key}`: `{v}` is not a count")))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("key `{key}`: `{v}` is not an integer")))
            })
            .transpose()
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>> {
        self.get(key)
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("key `{key}`: `{v}` is not an integer")))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::Parse(format!("key `{key}`: `{other}` is not a boolean"))),
            })
            .transpose()
    }

    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| {
                            Error::Parse(format!("key `{key}`: `{t}` is not a number"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn get_usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|_| {
                            Error::Parse(format!("key `{key}`: `{t}` is not a count"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        self.get_usize(key)?
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }
}

/// Geometry configuration and refinement level from a config map; `n` and
/// `m` are required, everything else has the documented defaults.
pub fn geometry_from_config(map: &ConfigMap) -> Result<(GeometryConfig, u32)> {
    let defaults = GeometryConfig::default();
    let cfg = GeometryConfig {
        outer_radius: map.get_f64("outer_radius")?.unwrap_or(defaults.outer_radius),
        inner_radius: map.get_f64("inner_radius")?.unwrap_or(defaults.inner_radius),
        n: map.require_usize("n")?,
        m: map.require_usize("m")?,
        electrode_coverage: map
            .get_f64("electrode_coverage")?
            .unwrap_or(defaults.electrode_coverage),
        partition_phase: map
            .get_f64("partition_phase")?
            .unwrap_or(defaults.partition_phase),
        electrode_phase: map
            .get_f64("electrode_phase")?
            .unwrap_or(defaults.electrode_phase),
    };
    cfg.validate()?;
    let refinement = map.get_u32("refinement")?.unwrap_or(1);
    if refinement < 1 {
        return Err(Error::Config("refinement must be at least 1".into()));
    }
    Ok((cfg, refinement))
}
