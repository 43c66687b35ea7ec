//! Run configuration: a flat TOML file merged with command-line overrides.
//!
//! Recognized keys (all optional):
//!
//! | key          | type                   | default                     |
//! |--------------|------------------------|-----------------------------|
//! | `alpha_sq`   | float or float array   | `[0.5, 0.6, 0.7, 0.8, 0.9]` |
//! | `theta_ab`   | float (radians)        | `0.0`                       |
//! | `qnd_theta`  | float or `"pi"`        | `"pi"`                      |
//! | `rounds`     | integer ≥ 1            | `5`                         |
//! | `swap_depth` | integer ≥ 1            | `5`                         |
//! | `p_a`, `p_b` | float or float array   | `0.016`, `0.004`            |
//! | `trials`     | integer ≥ 0            | `0`                         |
//! | `seed`       | integer                | `0`                         |
//! | `format`     | `"csv"` or `"json"`    | `"csv"`                     |
//! | `output`     | path                   | standard output             |

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use serde::Deserialize;
use crate::CliError;

/// Largest accepted iteration depth; matches the exact oracle's limit.
pub const MAX_ROUNDS: usize = railconc::analytics::MAX_ORACLE_ROUNDS;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A scalar or a list, as written in the config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl From<OneOrMany> for Vec<f64> {
    fn from(v: OneOrMany) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Angle {
    Number(f64),
    Named(String),
}

/// Raw file contents; every field optional so flags can fill gaps.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha_sq: Option<OneOrMany>,
    theta_ab: Option<f64>,
    qnd_theta: Option<Angle>,
    rounds: Option<i64>,
    swap_depth: Option<i64>,
    p_a: Option<OneOrMany>,
    p_b: Option<OneOrMany>,
    trials: Option<i64>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// Values given on the command line. `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub alpha_sq: Option<Vec<f64>>,
    pub theta_ab: Option<f64>,
    pub qnd_theta: Option<String>,
    pub rounds: Option<usize>,
    pub swap_depth: Option<usize>,
    pub p_a: Option<Vec<f64>>,
    pub p_b: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

/// Fully resolved and validated parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha_sq: Vec<f64>,
    pub theta_ab: f64,
    pub qnd_theta: f64,
    pub rounds: usize,
    pub swap_depth: usize,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha_sq: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            theta_ab: 0.0,
            qnd_theta: PI,
            rounds: 5,
            swap_depth: 5,
            p_a: vec![0.016],
            p_b: vec![0.004],
            trials: 0,
            seed: 0,
            format: Format::Csv,
            output: None,
        }
    }
}

fn parse_angle(text: &str) -> Result<f64, CliError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "pi" | "π" => Ok(PI),
        other => other.parse::<f64>()
            .map_err(|_| CliError::Config(format!("qnd_theta: cannot parse {text:?}"))),
    }
}

fn count(name: &str, v: i64) -> Result<u64, CliError> {
    u64::try_from(v).map_err(|_| CliError::Config(format!("{name} must be non-negative, got {v}")))
}

impl RunConfig {
    /// Parses TOML text on top of the defaults.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text)
            .map_err(|e| CliError::Config(format!("config: {}", e.message())))?;
        let mut cfg = Self::default();
        if let Some(v) = file.alpha_sq { cfg.alpha_sq = v.into(); }
        if let Some(v) = file.theta_ab { cfg.theta_ab = v; }
        if let Some(v) = file.qnd_theta {
            cfg.qnd_theta = match v {
                Angle::Number(x) => x,
                Angle::Named(s) => parse_angle(&s)?,
            };
        }
        if let Some(v) = file.rounds { cfg.rounds = count("rounds", v)? as usize; }
        if let Some(v) = file.swap_depth { cfg.swap_depth = count("swap_depth", v)? as usize; }
        if let Some(v) = file.p_a { cfg.p_a = v.into(); }
        if let Some(v) = file.p_b { cfg.p_b = v.into(); }
        if let Some(v) = file.trials { cfg.trials = count("trials", v)?; }
        if let Some(v) = file.seed { cfg.seed = v; }
        if let Some(v) = file.format { cfg.format = v; }
        if file.output.is_some() { cfg.output = file.output; }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Loads the optional file, applies overrides and validates.
    pub fn resolve(path: Option<&Path>, overrides: Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), CliError> {
        if let Some(v) = o.alpha_sq { self.alpha_sq = v; }
        if let Some(v) = o.theta_ab { self.theta_ab = v; }
        if let Some(v) = o.qnd_theta { self.qnd_theta = parse_angle(&v)?; }
        if let Some(v) = o.rounds { self.rounds = v; }
        if let Some(v) = o.swap_depth { self.swap_depth = v; }
        if let Some(v) = o.p_a { self.p_a = v; }
        if let Some(v) = o.p_b { self.p_b = v; }
        if let Some(v) = o.trials { self.trials = v; }
        if let Some(v) = o.seed { self.seed = v; }
        if let Some(v) = o.format { self.format = v; }
        if o.output.is_some() { self.output = o.output; }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.alpha_sq.is_empty() {
            return bad("alpha_sq must contain at least one value".into());
        }
        if let Some(x) = self.alpha_sq.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return bad(format!("alpha_sq = {x} must lie in (0, 1)"));
        }
        for (name, list) in [("p_a", &self.p_a), ("p_b", &self.p_b)] {
            if list.is_empty() {
                return bad(format!("{name} must contain at least one value"));
            }
            if let Some(x) = list.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                return bad(format!("{name} = {x} must lie in (0, 1)"));
            }
        }
        if !self.theta_ab.is_finite() || !self.qnd_theta.is_finite() {
            return bad("angles must be finite".into());
        }
        if !(1..=MAX_ROUNDS).contains(&self.rounds) {
            return bad(format!("rounds = {} must lie in 1..={MAX_ROUNDS}", self.rounds));
        }
        if self.swap_depth < 1 {
            return bad("swap_depth must be >= 1".into());
        }
        Ok(())
    }

    /// Whether the QND phase is π, where the parity classes allow recycling.
    pub fn parity_qnd(&self) -> bool {
        (self.qnd_theta.rem_euclid(2.0 * PI) - PI).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_and_lists() {
        let c = RunConfig::from_toml("alpha_sq = 0.8\np_a = [0.1, 0.2]\nqnd_theta = \"pi\"").unwrap();
        assert_eq!(c.alpha_sq, vec![0.8]);
        assert_eq!(c.p_a, vec![0.1, 0.2]);
        assert_eq!(c.qnd_theta, PI);
        let c = RunConfig::from_toml("qnd_theta = 0.3").unwrap();
        assert_eq!(c.qnd_theta, 0.3);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::from_toml("alpha = 0.8"), Err(CliError::Config(_))));
    }

    #[test]
    fn flags_win() {
        let mut c = RunConfig::from_toml("rounds = 3\nseed = 9").unwrap();
        c.apply(Overrides { rounds: Some(4), ..Default::default() }).unwrap();
        assert_eq!((c.rounds, c.seed), (4, 9));
    }

    #[test]
    fn validation() {
        for text in ["alpha_sq = 1.0", "alpha_sq = []", "rounds = 0", "trials = -1", "swap_depth = 0", "rounds = 17"] {
            let r = RunConfig::from_toml(text).and_then(|c| c.validate());
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }
}
