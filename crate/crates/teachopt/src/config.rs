//! Application configuration: a flat key-value text format with section
//! headers, UTF-8, `#` comments. Every physical constant and algorithm
//! parameter has a baked-in default; unknown keys are rejected so typos
//! cannot silently fall back to defaults.

use crate::constants::ManipulatorConstants;
use crate::force::TrajectorySpec;
use crate::moea::RunConfig;
use crate::problem::Bounds;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Aggregated configuration with provenance of which keys were overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppConfig {
    pub constants: ManipulatorConstants,
    pub bounds: Bounds,
    pub trajectory: TrajectorySpec,
    pub run: RunConfig,
    /// Keys explicitly present in the loaded file.
    pub explicit: BTreeSet<String>,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            constants: ManipulatorConstants::default(),
            bounds: Bounds::default(),
            trajectory: TrajectorySpec::default(),
            run: RunConfig::default(),
            explicit: BTreeSet::new(),
        }
    }
}

impl AppConfig {
    pub fn parse(text: &str) -> Result<AppConfig, ConfigError> {
        let mut cfg = AppConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !["constants", "bounds", "trajectory", "run"].contains(&section.as_str()) {
                    return Err(ConfigError::UnknownSection {
                        line: lineno + 1,
                        section: section.clone(),
                    });
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: lineno + 1, text: raw.to_string() });
            };
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value, lineno + 1)?;
            cfg.explicit.insert(format!("{section}.{key}"));
        }
        cfg.run.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.bounds.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if cfg.trajectory.t_end <= cfg.trajectory.t_start {
            return Err(ConfigError::Invalid("trajectory t_end must be > t_start".into()));
        }
        if cfg.trajectory.segments < 2 {
            return Err(ConfigError::Invalid("trajectory needs at least 2 segments".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<AppConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        AppConfig::parse(&text)
    }

    fn apply(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), ConfigError> {
        let bad_key = || ConfigError::UnknownKey {
            line,
            section: section.to_string(),
            key: key.to_string(),
        };
        let num = |v: &str| {
            v.parse::<f64>().map_err(|_| ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: v.to_string(),
            })
        };
        match section {
            "constants" => {
                let c = &mut self.constants;
                let slot = match key {
                    "m1" => &mut c.joint_mass[0],
                    "m2" => &mut c.joint_mass[1],
                    "m3" => &mut c.joint_mass[2],
                    "m4" => &mut c.joint_mass[3],
                    "m5" => &mut c.joint_mass[4],
                    "m6" => &mut c.joint_mass[5],
                    "mL1" => &mut c.link_mass[0],
                    "mL2" => &mut c.link_mass[1],
                    "mL3" => &mut c.link_mass[2],
                    "mL4" => &mut c.link_mass[3],
                    "mL5" => &mut c.link_mass[4],
                    "L2" => &mut c.l2,
                    "L3" => &mut c.l3,
                    "L4" => &mut c.l4,
                    "L5" => &mut c.l5,
                    "rhoA" => &mut c.rho_a,
                    "rhoB" => &mut c.rho_b,
                    "g" => &mut c.g,
                    _ => return Err(bad_key()),
                };
                *slot = num(value)?;
            }
            "bounds" => {
                let idx = crate::balance::DesignVector::NAMES
                    .iter()
                    .position(|n| *n == key)
                    .ok_or_else(bad_key)?;
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        value: value.to_string(),
                    });
                }
                self.bounds.low[idx] = num(parts[0])?;
                self.bounds.high[idx] = num(parts[1])?;
            }
            "trajectory" => match key {
                "t_start" => self.trajectory.t_start = num(value)?,
                "t_end" => self.trajectory.t_end = num(value)?,
                "segments" => {
                    self.trajectory.segments = num(value)? as usize;
                }
                "euler_z" => self.trajectory.euler[0] = num(value)?,
                "euler_y" => self.trajectory.euler[1] = num(value)?,
                "euler_x" => self.trajectory.euler[2] = num(value)?,
                _ => return Err(bad_key()),
            },
            "run" => match key {
                "pop" => self.run.pop_size = num(value)? as usize,
                "generations" => self.run.generations = num(value)? as usize,
                "p_crossover" => self.run.p_crossover = num(value)?,
                "p_mutation" => self.run.p_mutation = num(value)?,
                "eta_sbx" => self.run.eta_sbx = num(value)?,
                "eta_pm" => self.run.eta_pm = num(value)?,
                "seed" => {
                    self.run.seed = value.parse::<u64>().map_err(|_| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        value: value.to_string(),
                    })?
                }
                _ => return Err(bad_key()),
            },
            "" => {
                return Err(ConfigError::Syntax {
                    line,
                    text: format!("{key} = {value} (outside any section)"),
                })
            }
            _ => unreachable!("section validated at header"),
        }
        Ok(())
    }

    /// Warnings for model gaps that are running on shipped defaults.
    pub fn gap_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.explicit.contains("constants.L5") {
            w.push(format!(
                "WARNING: L5 (Link 5 length) has no catalogued value; using default {} m",
                self.constants.l5
            ));
        }
        if !self.explicit.contains("trajectory.t_start")
            && !self.explicit.contains("trajectory.t_end")
        {
            w.push(format!(
                "WARNING: trajectory parameter range is a modeling default: t in [{}, {:.6}]",
                self.trajectory.t_start, self.trajectory.t_end
            ));
        }
        w
    }

    /// FNV-1a hash of the canonical JSON rendering, for archive provenance.
    ///
    /// `run.generations` is deliberately excluded: a longer run is an exact
    /// prefix-extension of a shorter one with the same seed, so `--resume`
    /// with a larger `--gens` must be accepted against an existing archive.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            constants: &'a ManipulatorConstants,
            bounds: &'a Bounds,
            trajectory: &'a TrajectorySpec,
            run: RunConfig,
        }
        let mut run = self.run;
        run.generations = 0;
        let json = serde_json::to_string(&Canonical {
            constants: &self.constants,
            bounds: &self.bounds,
            trajectory: &self.trajectory,
            run,
        })
        .expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: cannot parse `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: bad value `{value}` for key `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(String),
}
