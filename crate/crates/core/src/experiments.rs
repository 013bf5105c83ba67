//! Seeded Monte Carlo sweeps over splitting ratio, antenna count and relay
//! position.
//!
//! Trial `t` always draws its channels from the `(master_seed, t)` streams, so
//! every variant and every sweep point sees the same small-scale fading. Trials
//! run on a rayon pool but results are reduced in trial order, which keeps the
//! output bit-identical for any worker count.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{Geometry, NoiseModel, PathLoss, PowerBudget, StreamSampler};
use crate::error::{Error, Result};
use crate::mimo::{default_ps_grid, grid_search_ps, solve_at, MimoBase, Variant};
use crate::siso::{optimize_no_ef, optimize_ps_closed_form, SisoChannel};

pub const DEFAULT_TRIALS: usize = 1000;
pub const CSV_HEADER: &str = "sweep_value,variant,mean_rate_bits,std_error,n_trials";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub n_trials: usize,
    pub master_seed: u64,
    /// Worker threads; does not affect results.
    pub parallelism: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n_trials: DEFAULT_TRIALS,
            master_seed: 0,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl MonteCarloConfig {
    pub fn new(n_trials: usize, master_seed: u64, parallelism: usize) -> Result<Self> {
        let mc = Self {
            n_trials,
            master_seed,
            parallelism,
        };
        mc.validate()?;
        Ok(mc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidInput("n_trials must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidInput("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepFamily {
    RateVsRho,
    RateVsAntennas,
    RateVsDistanceSiso,
    RateVsDistanceMimo,
}

impl SweepFamily {
    pub const ALL: [SweepFamily; 4] = [
        SweepFamily::RateVsRho,
        SweepFamily::RateVsAntennas,
        SweepFamily::RateVsDistanceSiso,
        SweepFamily::RateVsDistanceMimo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepFamily::RateVsRho => "rate-vs-rho",
            SweepFamily::RateVsAntennas => "rate-vs-antennas",
            SweepFamily::RateVsDistanceSiso => "rate-vs-distance-siso",
            SweepFamily::RateVsDistanceMimo => "rate-vs-distance-mimo",
        }
    }

    fn allows(self, v: Variant) -> bool {
        match self {
            SweepFamily::RateVsDistanceSiso => matches!(v, Variant::Efa | Variant::NoEf),
            _ => true,
        }
    }
}

impl fmt::Display for SweepFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `{0.1, 0.2, …, 0.9}`
pub fn default_distance_ratios() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// `{1, 2, …, 8}`
pub fn default_antenna_counts() -> Vec<f64> {
    (1..=8).map(|r| r as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub family: SweepFamily,
    /// ρ, antenna counts or `d_DR/d_DS` ratios depending on the family.
    pub sweep_values: Vec<f64>,
    /// For distance sweeps the ratio is overridden per sweep point.
    pub geometry: Geometry<f64>,
    pub budgets: PowerBudget<f64>,
    pub noise: NoiseModel<f64>,
    pub path_loss: PathLoss<f64>,
    /// Relay antennas; ignored by the antenna and SISO sweeps.
    pub r: usize,
    pub variants: Vec<Variant>,
    pub ps_grid: Vec<f64>,
}

impl SweepSpec {
    /// Defaults for a family: `d_DS = 10 m`, `d_DR/d_DS = 0.5`, `σ² = 1 µW`,
    /// `r = 4`, `P_D = 0.5 W`, `P_S = 0.1 W`.
    pub fn defaults(family: SweepFamily) -> Self {
        let (sweep_values, variants) = match family {
            SweepFamily::RateVsRho => (
                default_ps_grid(),
                vec![Variant::Efa, Variant::NoEf, Variant::GenieEfa, Variant::MrcMrtEfa],
            ),
            SweepFamily::RateVsAntennas => (
                default_antenna_counts(),
                vec![Variant::GenieEfa, Variant::Efa, Variant::MrcMrtEfa],
            ),
            SweepFamily::RateVsDistanceSiso => (default_distance_ratios(), vec![Variant::Efa, Variant::NoEf]),
            SweepFamily::RateVsDistanceMimo => (
                default_distance_ratios(),
                vec![Variant::Efa, Variant::NoEf, Variant::MrcMrtEfa, Variant::MrcMrtNoEf],
            ),
        };
        Self {
            family,
            sweep_values,
            geometry: Geometry::new(10.0, 0.5).expect("valid default geometry"),
            budgets: PowerBudget::new(0.5, 0.1).expect("valid default budget"),
            noise: NoiseModel::new(1e-6).expect("valid default noise"),
            path_loss: PathLoss::default(),
            r: 4,
            variants,
            ps_grid: default_ps_grid(),
        }
    }

    pub fn with_budgets(mut self, budgets: PowerBudget<f64>) -> Self {
        self.budgets = budgets;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidInput("sweep_values must not be empty".into()));
        }
        if !self.sweep_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("sweep_values must be strictly increasing".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidInput("at least one variant is required".into()));
        }
        if let Some(v) = self.variants.iter().find(|v| !self.family.allows(**v)) {
            return Err(Error::InvalidInput(format!(
                "variant {v} is not available for {}",
                self.family
            )));
        }
        let in_unit = |x: &f64| *x > 0.0 && *x < 1.0;
        match self.family {
            SweepFamily::RateVsRho => {
                if !self.sweep_values.iter().all(in_unit) {
                    return Err(Error::InvalidInput("splitting ratios must lie in (0, 1)".into()));
                }
            }
            SweepFamily::RateVsAntennas => {
                if !self
                    .sweep_values
                    .iter()
                    .all(|x| *x >= 1.0 && x.fract() == 0.0 && *x <= 64.0)
                {
                    return Err(Error::InvalidInput("antenna counts must be integers in 1..=64".into()));
                }
            }
            SweepFamily::RateVsDistanceSiso | SweepFamily::RateVsDistanceMimo => {
                if !self.sweep_values.iter().all(in_unit) {
                    return Err(Error::InvalidInput("distance ratios must lie in (0, 1)".into()));
                }
            }
        }
        if self.r == 0 {
            return Err(Error::InvalidInput("antenna count must be at least 1".into()));
        }
        let needs_grid = matches!(
            self.family,
            SweepFamily::RateVsAntennas | SweepFamily::RateVsDistanceMimo
        );
        if needs_grid && (self.ps_grid.is_empty() || !self.ps_grid.iter().all(in_unit)) {
            return Err(Error::InvalidInput("ps_grid must be nonempty and inside (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub variant: Variant,
    /// Bits per channel use.
    pub mean_rate: f64,
    pub std_error: f64,
    pub n_trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub family: SweepFamily,
    rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows are stored sorted by sweep value, then variant name.
    pub fn new(family: SweepFamily, mut rows: Vec<SweepRow>) -> Self {
        sort_rows(&mut rows);
        Self { family, rows }
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn row(&self, sweep_value: f64, variant: Variant) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.sweep_value == sweep_value)
    }

    /// Rows of one variant in sweep order.
    pub fn curve(&self, variant: Variant) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.variant == variant).collect()
    }
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then_with(|| a.variant.name().cmp(b.variant.name()))
    });
}

/// Mean and standard error (sample standard deviation over `√n`).
pub fn mean_and_std_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn pool(mc: &MonteCarloConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(mc.parallelism)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))
}

/// Rates of every variant in `spec` for trial `trial` at one sweep point.
fn trial_rates(spec: &SweepSpec, sampler: &StreamSampler, value: f64, trial: u64) -> Result<Vec<f64>> {
    match spec.family {
        SweepFamily::RateVsRho => {
            let ch = sampler.realize(trial, &spec.geometry, &spec.path_loss, spec.r)?;
            spec.variants
                .iter()
                .map(|&v| {
                    let base = MimoBase::new(ch.clone(), spec.budgets, spec.noise, v);
                    Ok(solve_at(&base.at(value)?)?.rate)
                })
                .collect()
        }
        SweepFamily::RateVsAntennas => {
            let ch = sampler.realize(trial, &spec.geometry, &spec.path_loss, value as usize)?;
            spec.variants
                .iter()
                .map(|&v| {
                    let base = MimoBase::new(ch.clone(), spec.budgets, spec.noise, v);
                    Ok(grid_search_ps(&base, &spec.ps_grid)?.rate)
                })
                .collect()
        }
        SweepFamily::RateVsDistanceSiso => {
            let geom = spec.geometry.with_ratio(value)?;
            let ch = SisoChannel::from_realization(&sampler.realize(trial, &geom, &spec.path_loss, 1)?)?;
            spec.variants
                .iter()
                .map(|&v| match v {
                    Variant::Efa => Ok(optimize_ps_closed_form(&ch, &spec.budgets, &spec.noise).rate),
                    Variant::NoEf => Ok(optimize_no_ef(&ch, spec.budgets.p_s, &spec.noise)?.rate),
                    other => Err(Error::InvalidInput(format!("variant {other} has no SISO form"))),
                })
                .collect()
        }
        SweepFamily::RateVsDistanceMimo => {
            let geom = spec.geometry.with_ratio(value)?;
            let ch = sampler.realize(trial, &geom, &spec.path_loss, spec.r)?;
            spec.variants
                .iter()
                .map(|&v| {
                    let base = MimoBase::new(ch.clone(), spec.budgets, spec.noise, v);
                    Ok(grid_search_ps(&base, &spec.ps_grid)?.rate)
                })
                .collect()
        }
    }
}

/// Per-trial rates at one sweep point, indexed `[trial][variant]` in the
/// order of `spec.variants`.
pub fn sample_rates(spec: &SweepSpec, mc: &MonteCarloConfig, value: f64) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    mc.validate()?;
    let sampler = StreamSampler::new(mc.master_seed);
    let n = if spec.family == SweepFamily::RateVsRho {
        1
    } else {
        mc.n_trials
    };
    pool(mc)?.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|t| trial_rates(spec, &sampler, value, t))
            .collect()
    })
}

fn run(spec: &SweepSpec, mc: &MonteCarloConfig, family: SweepFamily) -> Result<SweepResult> {
    if spec.family != family {
        return Err(Error::InvalidInput(format!(
            "expected a {family} sweep, got {}",
            spec.family
        )));
    }
    let mut rows = Vec::with_capacity(spec.sweep_values.len() * spec.variants.len());
    for &value in &spec.sweep_values {
        let samples = sample_rates(spec, mc, value)?;
        for (k, &variant) in spec.variants.iter().enumerate() {
            let column: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            let (mean_rate, std_error) = mean_and_std_error(&column);
            rows.push(SweepRow {
                sweep_value: value,
                variant,
                mean_rate,
                std_error,
                n_trials: column.len(),
            });
        }
    }
    Ok(SweepResult::new(family, rows))
}

/// Rate against ρ for one channel realization (trial 0 of the seed).
pub fn run_rate_vs_rho(spec: &SweepSpec, mc: &MonteCarloConfig) -> Result<SweepResult> {
    run(spec, mc, SweepFamily::RateVsRho)
}

/// Mean rate against antenna count, each variant at its best grid ρ.
pub fn run_rate_vs_antennas(spec: &SweepSpec, mc: &MonteCarloConfig) -> Result<SweepResult> {
    run(spec, mc, SweepFamily::RateVsAntennas)
}

/// Mean single-antenna rate against `d_DR/d_DS` at the optimal ρ.
pub fn run_rate_vs_distance_siso(spec: &SweepSpec, mc: &MonteCarloConfig) -> Result<SweepResult> {
    run(spec, mc, SweepFamily::RateVsDistanceSiso)
}

/// Mean multi-antenna rate against `d_DR/d_DS` at the best grid ρ.
pub fn run_rate_vs_distance_mimo(spec: &SweepSpec, mc: &MonteCarloConfig) -> Result<SweepResult> {
    run(spec, mc, SweepFamily::RateVsDistanceMimo)
}

pub fn run_sweep(spec: &SweepSpec, mc: &MonteCarloConfig) -> Result<SweepResult> {
    run(spec, mc, spec.family)
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{:.16e},{},{:.16e},{:.16e},{}\n",
            r.sweep_value, r.variant, r.mean_rate, r.std_error, r.n_trials
        ));
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_csv_string(result))?;
    Ok(())
}

/// Parses text written by [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidInput("missing CSV header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = || Error::InvalidInput(format!("malformed CSV row {}: {line}", i + 2));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad());
            }
            Ok(SweepRow {
                sweep_value: fields[0].parse().map_err(|_| bad())?,
                variant: Variant::from_str(fields[1]).map_err(|_| bad())?,
                mean_rate: fields[2].parse().map_err(|_| bad())?,
                std_error: fields[3].parse().map_err(|_| bad())?,
                n_trials: fields[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
