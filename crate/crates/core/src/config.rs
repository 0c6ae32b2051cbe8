//! Run configuration: TOML loading, validation, and defaults.
//!
//! A config file needs only the keys that differ from the defaults; the
//! defaults are the parameter set used throughout the scenario studies
//! (lambda = 50, rho = 10, b = 50, c_F = 1, c_I = 5, p_G = 0.5, r = 1).
//! Unknown keys are rejected with an error naming the key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ClassificationOutcome, GameParameters, OutcomeTable, Scenario};

/// Which scenario a config selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Baseline,
    ManipulationProof,
    Recourse,
    Custom,
}

/// Outcomes of one institution row of a custom table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeRow {
    pub good: GoodOutcomes,
    pub bad: BadOutcomes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodOutcomes {
    pub not_adapt: ClassificationOutcome,
    pub adapt: ClassificationOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BadOutcomes {
    pub fake: ClassificationOutcome,
    pub improve: ClassificationOutcome,
}

/// The eight outcome entries of a custom scenario, keyed
/// `outcome.<M|H>.<good|bad>.<strategy>` in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomOutcomes {
    #[serde(rename = "M")]
    pub medium: OutcomeRow,
    #[serde(rename = "H")]
    pub high: OutcomeRow,
}

impl CustomOutcomes {
    fn to_table(self) -> OutcomeTable {
        OutcomeTable::new([
            [
                [self.medium.good.not_adapt, self.medium.good.adapt],
                [self.medium.bad.fake, self.medium.bad.improve],
            ],
            [
                [self.high.good.not_adapt, self.high.good.adapt],
                [self.high.bad.fake, self.high.bad.improve],
            ],
        ])
    }
}

/// A validated run configuration: scenario selection, game parameters,
/// integrator settings and grid/census settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "defaults::scenario")]
    pub scenario: ScenarioName,

    #[serde(default = "defaults::rho")]
    pub rho: f64,
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::b")]
    pub b: f64,
    #[serde(rename = "c_I", default = "defaults::c_i")]
    pub c_i: f64,
    #[serde(rename = "c_F", default = "defaults::c_f")]
    pub c_f: f64,
    #[serde(rename = "p_G", default = "defaults::p_g")]
    pub p_g: f64,
    #[serde(default = "defaults::r")]
    pub r: f64,

    #[serde(default = "defaults::t_end")]
    pub t_end: f64,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::record_every")]
    pub record_every: usize,

    #[serde(default = "defaults::n_per_axis")]
    pub n_per_axis: usize,
    #[serde(default = "defaults::n_random")]
    pub n_random: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,

    /// Default output path; subcommand flags override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Outcome table for `scenario = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<CustomOutcomes>,
}

mod defaults {
    use super::ScenarioName;

    pub fn scenario() -> ScenarioName {
        ScenarioName::Baseline
    }
    pub fn rho() -> f64 {
        10.0
    }
    pub fn lambda() -> f64 {
        50.0
    }
    pub fn b() -> f64 {
        50.0
    }
    pub fn c_i() -> f64 {
        5.0
    }
    pub fn c_f() -> f64 {
        1.0
    }
    pub fn p_g() -> f64 {
        0.5
    }
    pub fn r() -> f64 {
        1.0
    }
    pub fn t_end() -> f64 {
        200.0
    }
    pub fn dt() -> f64 {
        0.01
    }
    pub fn record_every() -> usize {
        10
    }
    pub fn n_per_axis() -> usize {
        20
    }
    pub fn n_random() -> usize {
        200
    }
    pub fn seed() -> u64 {
        42
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config is valid")
    }
}

impl RunConfig {
    /// Game parameters of this config, validated.
    pub fn params(&self) -> Result<GameParameters> {
        GameParameters::new(self.rho, self.lambda, self.b, self.c_i, self.c_f, self.p_g, self.r)
    }

    /// The configured scenario; `custom` requires a full outcome table.
    pub fn scenario(&self) -> Result<Scenario> {
        match (self.scenario, &self.outcome) {
            (ScenarioName::Baseline, None) => Ok(Scenario::Baseline),
            (ScenarioName::ManipulationProof, None) => Ok(Scenario::ManipulationProof),
            (ScenarioName::Recourse, None) => Ok(Scenario::Recourse),
            (ScenarioName::Custom, Some(outcomes)) => Ok(Scenario::Custom(outcomes.to_table())),
            (ScenarioName::Custom, None) => Err(Error::ConfigValidation(
                "scenario = \"custom\" requires the eight outcome.* entries".into(),
            )),
            (_, Some(_)) => Err(Error::ConfigValidation(
                "outcome.* entries are only valid with scenario = \"custom\"".into(),
            )),
        }
    }

    /// Checks every invariant: game parameters, integrator settings, grid
    /// and census settings, scenario/outcome consistency.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.scenario()?;
        if self.t_end <= 0.0 || !self.t_end.is_finite() {
            return Err(Error::ConfigValidation(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::ConfigValidation(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_every == 0 {
            return Err(Error::ConfigValidation("record_every must be >= 1".into()));
        }
        if self.n_per_axis < 2 {
            return Err(Error::ConfigValidation(format!(
                "n_per_axis must be >= 2, got {}",
                self.n_per_axis
            )));
        }
        Ok(())
    }

    /// Serializes the config back to TOML; `load_config` on the result
    /// reproduces an equivalent config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }
}

/// Loads and validates a TOML config file. Omitted keys take their
/// defaults; unknown keys and invariant violations are reported with the
/// offending key or invariant named.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// Parses config text; split out from file I/O for tests and in-memory use.
pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mapped = |e: Error| match e {
        Error::InvalidParameters(msg) => Error::ConfigValidation(msg),
        other => other,
    };
    config.validate().map_err(mapped)?;
    Ok(config)
}
