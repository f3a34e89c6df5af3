//! Run configuration: command-line values overridden by an optional TOML file.

use crate::counting::TestFunction;
use crate::error::{Error, Result};
use crate::hecke::MomentMode;
use crate::numfield::{builtin_field, FieldSpec, NumberField};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "FIXRANK_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "fixrank-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CountRank,
    C1Sum,
    SchmidtTable,
    HeckeMoment,
    IdentityCheck,
    Factorize,
    FieldInfo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CountRank => "count-rank",
            Command::C1Sum => "c1-sum",
            Command::SchmidtTable => "schmidt-table",
            Command::HeckeMoment => "hecke-moment",
            Command::IdentityCheck => "identity-check",
            Command::Factorize => "factorize",
            Command::FieldInfo => "field-info",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Builtin field name, used when `field_file` is absent.
    pub field: String,
    pub field_file: Option<PathBuf>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub t: Vec<f64>,
    pub primes: Vec<u64>,
    pub cutoff: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
    /// `ball`, `product_of_balls` or `product_of_annuli`.
    pub function: String,
    pub radius: f64,
    pub inner: f64,
    /// `exact`, `sampled:<count>`, `auto` or `auto:<max_exact>:<samples>`.
    pub mode: String,
    /// Identity for `identity-check`: `primitive-zeta` or `koecher`.
    pub kind: String,
    /// Matrix for `factorize`: rows split by `;`, entries by `,`, power-basis
    /// coordinates of an entry by `|`.
    pub matrix: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::FieldInfo,
            field: "Q".into(),
            field_file: None,
            n: None,
            m: None,
            k: None,
            s: None,
            t: Vec::new(),
            primes: Vec::new(),
            cutoff: None,
            mc_samples: 20_000,
            seed: 0,
            function: "ball".into(),
            radius: 1.0,
            inner: 0.0,
            mode: "auto".into(),
            kind: "primitive-zeta".into(),
            matrix: None,
            output_dir: None,
            format: Format::Json,
            threads: None,
        }
    }
}

impl RunConfig {
    /// Applies every key present in a TOML document on top of `self`. The
    /// merge runs on JSON values so flag values outside TOML's `i64` range
    /// survive it.
    pub fn overridden_by(&self, toml_text: &str) -> Result<Self> {
        let over: toml::Table = toml::from_str(toml_text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut merged = serde_json::to_value(self)?;
        for (k, v) in over {
            merged[k] = serde_json::to_value(v)?;
        }
        serde_json::from_value(merged).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn overridden_by_file(&self, path: &Path) -> Result<Self> {
        self.overridden_by(&std::fs::read_to_string(path)?)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn load_field(&self) -> Result<Arc<NumberField>> {
        match &self.field_file {
            Some(p) => FieldSpec::parse(&std::fs::read_to_string(p)?)?.build(),
            None => builtin_field(&self.field),
        }
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Validation(format!("radius must be positive, got {}", self.radius)));
        }
        match self.function.as_str() {
            "ball" => Ok(TestFunction::ball(self.radius)),
            "product_of_balls" => Ok(TestFunction::product_of_balls(self.radius)),
            "product_of_annuli" => {
                if !(self.inner >= 0.0 && self.inner < self.radius) {
                    return Err(Error::Validation(format!(
                        "need 0 <= inner < radius, got inner={}, radius={}",
                        self.inner, self.radius
                    )));
                }
                Ok(TestFunction::ProductOfAnnuli {
                    inner: self.inner,
                    outer: self.radius,
                })
            }
            other => Err(Error::Validation(format!("unknown test function `{other}`"))),
        }
    }

    pub fn moment_mode(&self) -> Result<MomentMode> {
        let bad = || Error::Validation(format!("bad mode `{}`", self.mode));
        let parts: Vec<&str> = self.mode.split(':').collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["exact"] => Ok(MomentMode::Exact),
            ["sampled", c] => Ok(MomentMode::Sampled { count: num(c)? }),
            ["auto"] => Ok(MomentMode::Auto {
                max_exact: 100_000,
                samples: 2000,
            }),
            ["auto", a, b] => Ok(MomentMode::Auto {
                max_exact: num(a)?,
                samples: num(b)?,
            }),
            _ => Err(bad()),
        }
    }

    pub fn require(&self, name: &str, v: Option<usize>) -> Result<usize> {
        v.ok_or_else(|| Error::Validation(format!("`{}` needs --{name}", self.command.name())))
    }

    pub fn require_cutoff(&self) -> Result<f64> {
        match self.cutoff {
            Some(c) if c > 0.0 && c.is_finite() => Ok(c),
            Some(c) => Err(Error::Validation(format!("cutoff must be positive, got {c}"))),
            None => Err(Error::Validation(format!("`{}` needs --cutoff", self.command.name()))),
        }
    }

    /// `n > m >= k >= 1`.
    pub fn counting_dims(&self) -> Result<(usize, usize, usize)> {
        let n = self.require("n", self.n)?;
        let m = self.require("m", self.m)?;
        let k = self.require("k", self.k)?;
        if !(n > m && m >= k && k >= 1) {
            return Err(Error::Validation(format!("need n > m >= k >= 1, got n={n}, m={m}, k={k}")));
        }
        Ok((n, m, k))
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_flags() {
        let flags = RunConfig {
            command: Command::CountRank,
            n: Some(3),
            seed: 5,
            ..RunConfig::default()
        };
        let c = flags.overridden_by("n = 4\nt = [2.0, 4.0]\nformat = \"csv\"").unwrap();
        assert_eq!(c.n, Some(4));
        assert_eq!(c.seed, 5);
        assert_eq!(c.t, vec![2.0, 4.0]);
        assert_eq!(c.format, Format::Csv);
        assert!(flags.overridden_by("bogus = 1").is_err());
        let big = RunConfig {
            seed: u64::MAX,
            ..flags
        };
        assert_eq!(big.overridden_by("n = 2").unwrap().seed, u64::MAX);
    }

    #[test]
    fn mode_parsing() {
        let mut c = RunConfig::default();
        c.mode = "sampled:2000".into();
        assert_eq!(c.moment_mode().unwrap(), MomentMode::Sampled { count: 2000 });
        c.mode = "exact".into();
        assert_eq!(c.moment_mode().unwrap(), MomentMode::Exact);
        c.mode = "sampled:x".into();
        assert!(c.moment_mode().is_err());
    }
}
