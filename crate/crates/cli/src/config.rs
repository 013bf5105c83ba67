//! Scenario files.
//!
//! ```toml
//! [scenario]
//! d_ds = 10.0          # m
//! ratio_dr = 0.5       # d_DR / d_DS
//! sigma_n_sq = 1e-6    # W
//! r = 4
//! p_d = 0.5            # W
//! p_s = 0.1            # W
//! variants = ["EFA", "NoEF"]
//!
//! [monte_carlo]
//! n_trials = 1000
//! seed = 7
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use efa_relay::channel::PathLoss;
use efa_relay::experiments::{MonteCarloConfig, SweepFamily, SweepSpec};
use efa_relay::mimo::ps_grid;
use efa_relay::{Geometry, NoiseModel, PowerBudget, Variant};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{field}`: {message}")]
    Validation { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field,
        message: message.into(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub monte_carlo: MonteCarlo,
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub d_ds: f64,
    pub ratio_dr: f64,
    pub sigma_n_sq: f64,
    pub r: usize,
    pub p_d: f64,
    pub p_s: f64,
    pub path_loss_exponent: f64,
    /// Fixed splitting ratio for `optimize`; searched on `ps_grid` when absent.
    pub rho: Option<f64>,
    /// Variant names; the sweep's defaults when absent.
    pub variants: Option<Vec<String>>,
    /// Sweep points; the sweep's defaults when absent.
    pub sweep_values: Option<Vec<f64>>,
    pub ps_grid: GridRange,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            d_ds: 10.0,
            ratio_dr: 0.5,
            sigma_n_sq: 1e-6,
            r: 4,
            p_d: 0.5,
            p_s: 0.1,
            path_loss_exponent: 3.0,
            rho: None,
            variants: None,
            sweep_values: None,
            ps_grid: GridRange::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl Default for GridRange {
    fn default() -> Self {
        Self {
            start: 0.01,
            step: 0.01,
            stop: 0.99,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarlo {
    pub n_trials: usize,
    pub seed: u64,
    /// Worker threads; all available cores when absent.
    pub parallelism: Option<usize>,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            n_trials: efa_relay::experiments::DEFAULT_TRIALS,
            seed: 0,
            parallelism: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

fn positive(field: &'static str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

fn open_unit(field: &'static str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie strictly between 0 and 1, got {x}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        positive("d_ds", s.d_ds)?;
        open_unit("ratio_dr", s.ratio_dr)?;
        positive("sigma_n_sq", s.sigma_n_sq)?;
        if s.r == 0 || s.r > 64 {
            return Err(invalid("r", format!("must be between 1 and 64, got {}", s.r)));
        }
        if !(s.p_d >= 0.0 && s.p_d.is_finite()) {
            return Err(invalid("p_d", format!("must be nonnegative and finite, got {}", s.p_d)));
        }
        positive("p_s", s.p_s)?;
        positive("path_loss_exponent", s.path_loss_exponent)?;
        if let Some(rho) = s.rho {
            open_unit("rho", rho)?;
        }
        self.variants()?;
        if let Some(values) = &s.sweep_values {
            if values.is_empty() || !values.windows(2).all(|w| w[0] < w[1]) {
                return Err(invalid("sweep_values", "must be nonempty and strictly increasing"));
            }
        }
        let g = s.ps_grid;
        open_unit("ps_grid.start", g.start)?;
        open_unit("ps_grid.stop", g.stop)?;
        positive("ps_grid.step", g.step)?;
        if g.stop < g.start {
            return Err(invalid("ps_grid.stop", "must not be below ps_grid.start"));
        }
        if self.monte_carlo.n_trials == 0 {
            return Err(invalid("n_trials", "must be at least 1"));
        }
        if self.monte_carlo.parallelism == Some(0) {
            return Err(invalid("parallelism", "must be at least 1"));
        }
        Ok(())
    }

    pub fn variants(&self) -> Result<Option<Vec<Variant>>, ConfigError> {
        self.scenario
            .variants
            .as_ref()
            .map(|names| {
                names
                    .iter()
                    .map(|n| n.parse::<Variant>().map_err(|e| invalid("variants", e.to_string())))
                    .collect()
            })
            .transpose()
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.scenario.d_ds, self.scenario.ratio_dr).expect("validated geometry")
    }

    pub fn budgets(&self) -> PowerBudget {
        PowerBudget::new(self.scenario.p_d, self.scenario.p_s).expect("validated budget")
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel::new(self.scenario.sigma_n_sq).expect("validated noise")
    }

    pub fn path_loss(&self) -> PathLoss<f64> {
        PathLoss {
            exponent: self.scenario.path_loss_exponent,
        }
    }

    pub fn ps_grid(&self) -> Vec<f64> {
        let g = self.scenario.ps_grid;
        ps_grid(g.start, g.step, g.stop)
    }

    pub fn monte_carlo(&self) -> MonteCarloConfig {
        let mc = &self.monte_carlo;
        MonteCarloConfig {
            n_trials: mc.n_trials,
            master_seed: mc.seed,
            parallelism: mc
                .parallelism
                .unwrap_or_else(|| MonteCarloConfig::default().parallelism),
        }
    }

    /// Sweep specification for `family`, with config overrides applied.
    pub fn sweep_spec(&self, family: SweepFamily) -> Result<SweepSpec, ConfigError> {
        let mut spec = SweepSpec::defaults(family);
        spec.geometry = self.geometry();
        spec.budgets = self.budgets();
        spec.noise = self.noise();
        spec.path_loss = self.path_loss();
        spec.r = self.scenario.r;
        spec.ps_grid = self.ps_grid();
        if let Some(v) = self.variants()? {
            spec.variants = v;
        }
        if let Some(values) = &self.scenario.sweep_values {
            spec.sweep_values = values.clone();
        }
        spec.validate().map_err(|e| invalid("scenario", e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.scenario.d_ds, 10.0);
        assert_eq!(cfg.scenario.sigma_n_sq, 1e-6);
        assert_eq!(cfg.scenario.r, 4);
        assert_eq!(cfg.scenario.p_d, 0.5);
        assert_eq!(cfg.scenario.p_s, 0.1);
        assert_eq!(cfg.ps_grid().len(), 99);
    }

    #[test]
    fn out_of_range_ratio_names_the_field() {
        let err = parse_config_str("[scenario]\nratio_dr = 1.5\n").unwrap_err();
        match err {
            ConfigError::Validation { field, .. } => assert_eq!(field, "ratio_dr"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(parse_config_str("bogus = 1\n"), Err(ConfigError::Parse(_))));
        assert!(matches!(
            parse_config_str("[scenario]\nd_dss = 3.0\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(parse_config_str("[scenario\n"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn validation_covers_each_field() {
        let cases = [
            ("[scenario]\nd_ds = 0.0", "d_ds"),
            ("[scenario]\nsigma_n_sq = -1.0", "sigma_n_sq"),
            ("[scenario]\nr = 0", "r"),
            ("[scenario]\np_d = -0.1", "p_d"),
            ("[scenario]\np_s = 0.0", "p_s"),
            ("[scenario]\nrho = 1.0", "rho"),
            ("[scenario]\nvariants = [\"EFA\", \"nope\"]", "variants"),
            ("[scenario]\nsweep_values = [0.2, 0.1]", "sweep_values"),
            ("[scenario.ps_grid]\nstep = 0.0", "ps_grid.step"),
            ("[monte_carlo]\nn_trials = 0", "n_trials"),
            ("[monte_carlo]\nparallelism = 0", "parallelism"),
        ];
        for (text, expected) in cases {
            match parse_config_str(text) {
                Err(ConfigError::Validation { field, .. }) => assert_eq!(field, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let text = "[scenario]\nratio_dr = 0.3\np_d = 5.0\np_s = 0.01\nrho = 0.25\nvariants = [\"EFA\", \"GenieEFA\"]\nsweep_values = [0.1, 0.2]\n\n[monte_carlo]\nn_trials = 17\nseed = 99\nparallelism = 2\n\n[output]\npath = \"out.csv\"\n";
        let cfg = parse_config_str(text).unwrap();
        let again = parse_config_str(&to_toml(&cfg)).unwrap();
        assert_eq!(cfg, again);
        let defaults = RunConfig::default();
        assert_eq!(parse_config_str(&to_toml(&defaults)).unwrap(), defaults);
    }

    #[test]
    fn sweep_spec_applies_overrides() {
        let cfg = parse_config_str("[scenario]\nvariants = [\"efa\"]\nsweep_values = [2.0, 3.0]\nr = 2\n").unwrap();
        let spec = cfg.sweep_spec(SweepFamily::RateVsAntennas).unwrap();
        assert_eq!(spec.variants, vec![Variant::Efa]);
        assert_eq!(spec.sweep_values, vec![2.0, 3.0]);
        let bad = parse_config_str("[scenario]\nvariants = [\"GenieEFA\"]\n").unwrap();
        assert!(bad.sweep_spec(SweepFamily::RateVsDistanceSiso).is_err());
    }
}
