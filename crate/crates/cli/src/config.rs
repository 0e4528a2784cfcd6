//! Run configuration: flags (and their environment variables) over a TOML
//! file over built-in defaults.

use std::path::{Path, PathBuf};

use dioph_core::certified::ThetaSpec;
use dioph_core::corpus;
use serde::Deserialize;

use crate::exit::Failure;

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_TAIL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub theta: Option<String>,
    pub precision: Option<u32>,
    pub budget: Option<u64>,
    pub tail: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::data(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::data(format!("config {}: {e}", path.display())))
    }
}

/// Values given on the command line or through the environment.
#[derive(Debug, Default)]
pub struct Overrides {
    pub theta: Option<String>,
    pub precision: Option<u32>,
    pub budget: Option<u64>,
    pub tail: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub theta: Option<ThetaSpec>,
    pub precision: u32,
    pub budget: u64,
    pub tail: f64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(flags: Overrides, file: FileConfig) -> Result<RunConfig, Failure> {
        let theta = match flags.theta.or(file.theta) {
            Some(s) => Some(corpus::resolve(&s).map_err(|e| Failure::usage(format!("--theta: {e}")))?),
            None => None,
        };
        let precision = flags.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION);
        let budget = flags.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET);
        let tail = flags.tail.or(file.tail).unwrap_or(DEFAULT_TAIL);
        if precision == 0 {
            return Err(Failure::usage("precision must be positive"));
        }
        if budget == 0 {
            return Err(Failure::usage("budget must be positive"));
        }
        if !(tail > 0.0 && tail <= 1.0) {
            return Err(Failure::usage("tail must lie in (0, 1]"));
        }
        Ok(RunConfig {
            theta,
            precision,
            budget,
            tail,
            format: flags.format.or(file.format),
            output: flags.output.or(file.output),
            svg: flags.svg.or(file.svg),
        })
    }

    pub fn theta(&self) -> Result<&ThetaSpec, Failure> {
        self.theta.as_ref().ok_or_else(|| Failure::usage("--theta is required (a spec or a corpus name)"))
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: FileConfig = toml::from_str("precision = 256\nbudget = 5\ntheta = \"sqrt2\"").unwrap();
        let flags = Overrides { precision: Some(64), ..Default::default() };
        let c = RunConfig::resolve(flags, file).unwrap();
        assert_eq!(c.precision, 64);
        assert_eq!(c.budget, 5);
        assert_eq!(c.tail, DEFAULT_TAIL);
        assert_eq!(c.theta.unwrap().to_string(), "sqrt:2");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_limits() {
        assert!(toml::from_str::<FileConfig>("precison = 1").is_err());
        let bad = Overrides { tail: Some(1.5), ..Default::default() };
        assert_eq!(RunConfig::resolve(bad, FileConfig::default()).unwrap_err().code, 64);
    }
}
