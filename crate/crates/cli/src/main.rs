//! Batch simulation front end.
//!
//! Exit codes: 0 success, 1 usage, 2 config, 3 computation or output,
//! 4 verification failure.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use efa_relay::channel::StreamSampler;
use efa_relay::experiments::{run_sweep, to_csv_string, SweepFamily};
use efa_relay::mimo::{grid_search_ps, solve_at, MimoBase, RelayDesign};
use efa_relay::oracles::{reports_to_csv, run_oracle_suite};
use efa_relay::siso::{optimize_no_ef, optimize_ps_closed_form, optimize_ps_fractional, SisoChannel};
use efa_relay::Variant;

use crate::config::{parse_config, to_toml, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "efa-relay", version, about = "Energy-flow-assisted relaying simulations")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output file; overrides the config. Results go to stdout otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Monte Carlo trials; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize one channel realization and print the solutions.
    Optimize,
    /// Rate against splitting ratio for one realization.
    SweepRho,
    /// Mean rate against relay antenna count.
    SweepAntennas,
    /// Mean single-antenna rate against relay position.
    SweepDistanceSiso,
    /// Mean multi-antenna rate against relay position.
    SweepDistanceMimo,
    /// Run the oracle suite; exits 4 if any check fails.
    Verify,
    /// Print the resolved configuration as TOML.
    ShowConfig,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(ConfigError),
    Compute(String),
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) => 2,
            Failure::Compute(_) => 3,
            Failure::Verification => 4,
        }
    }
}

impl From<efa_relay::Error> for Failure {
    fn from(e: efa_relay::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

struct Context {
    cfg: RunConfig,
    out: Option<PathBuf>,
    quiet: bool,
}

impl Context {
    fn progress(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?;
                self.progress(&format!("wrote {}", path.display()));
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::Compute(format!("cannot write to stdout: {e}")))?;
            }
        }
        Ok(())
    }
}

fn load(cli: &Cli) -> Result<Context, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.monte_carlo.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.monte_carlo.n_trials = trials;
    }
    cfg.validate()?;
    let out = cli.out.clone().or_else(|| cfg.output.path.clone());
    Ok(Context {
        cfg,
        out,
        quiet: cli.quiet,
    })
}

fn sweep(ctx: &Context, family: SweepFamily) -> Result<(), Failure> {
    let spec = ctx.cfg.sweep_spec(family)?;
    let mc = ctx.cfg.monte_carlo();
    let trials = if family == SweepFamily::RateVsRho {
        1
    } else {
        mc.n_trials
    };
    ctx.progress(&format!(
        "{family}: {} points x {} variants, {trials} trials, seed {}",
        spec.sweep_values.len(),
        spec.variants.len(),
        mc.master_seed
    ));
    let result = run_sweep(&spec, &mc)?;
    ctx.emit(&to_csv_string(&result))
}

fn optimize(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let sampler = StreamSampler::new(cfg.monte_carlo.seed);
    let ch = sampler.realize(0, &cfg.geometry(), &cfg.path_loss(), cfg.scenario.r)?;
    let (pb, noise) = (cfg.budgets(), cfg.noise());
    let mut text = String::new();
    let _ = writeln!(text, "seed = {}", cfg.monte_carlo.seed);
    let _ = writeln!(text, "antennas = {}", cfg.scenario.r);
    let _ = writeln!(text, "h_rs_gain = {:.12e}", ch.h_rs().norm_sqr());
    let _ = writeln!(text, "h_dr_gain = {:.12e}", ch.h_dr().norm_sqr());

    if cfg.scenario.r == 1 {
        let siso = SisoChannel::from_realization(&ch)?;
        let closed = optimize_ps_closed_form(&siso, &pb, &noise);
        let numeric = optimize_ps_fractional(&siso, &pb, &noise, 1e-12)?;
        let no_ef = optimize_no_ef(&siso, pb.p_s, &noise)?;
        for (name, sol) in [("EFA", closed), ("EFA-interior-point", numeric), ("NoEF", no_ef)] {
            let _ = writeln!(text, "\n[{name}]");
            let _ = writeln!(text, "rho_star = {:.12}", sol.rho_star);
            let _ = writeln!(text, "f_sq = {:.12e}", sol.f_sq);
            let _ = writeln!(text, "gamma1 = {:.12e}", sol.gamma1);
            let _ = writeln!(text, "rate_bits = {:.12}", sol.rate);
        }
        return ctx.emit(&text);
    }

    let variants = cfg.variants()?.unwrap_or_else(|| Variant::ALL.to_vec());
    let grid = cfg.ps_grid();
    for v in variants {
        let base = MimoBase::new(ch.clone(), pb, noise, v);
        let sol = match cfg.scenario.rho {
            Some(rho) => solve_at(&base.at(rho)?)?,
            None => grid_search_ps(&base, &grid)?,
        };
        let _ = writeln!(text, "\n[{v}]");
        let _ = writeln!(text, "rho = {:.12}", sol.rho);
        let _ = writeln!(text, "gamma2 = {:.12e}", sol.gamma2);
        let _ = writeln!(text, "rate_bits = {:.12}", sol.rate);
        let _ = writeln!(text, "relay_frobenius_norm = {:.12e}", sol.relay.frobenius_norm());
        match sol.design {
            RelayDesign::Eigen { eigenvalue, .. } => {
                let _ = writeln!(text, "eigenvalue = {eigenvalue:.12e}");
            }
            RelayDesign::MrcMrt { eta } => {
                let _ = writeln!(text, "eta = {eta:.12e}");
            }
            RelayDesign::RankOne => {}
        }
    }
    ctx.emit(&text)
}

fn verify(ctx: &Context) -> Result<(), Failure> {
    let seed = ctx.cfg.monte_carlo.seed;
    ctx.progress(&format!("running oracle suite with seed {seed}"));
    let reports = run_oracle_suite(seed)?;
    if !ctx.quiet {
        for r in &reports {
            eprintln!("{r}");
        }
    }
    ctx.emit(&reports_to_csv(&reports))?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let Some(command) = &cli.command else {
        return Err(Failure::Usage(Cli::command().render_usage().to_string()));
    };
    let ctx = load(&cli)?;
    match command {
        Command::Optimize => optimize(&ctx),
        Command::SweepRho => sweep(&ctx, SweepFamily::RateVsRho),
        Command::SweepAntennas => sweep(&ctx, SweepFamily::RateVsAntennas),
        Command::SweepDistanceSiso => sweep(&ctx, SweepFamily::RateVsDistanceSiso),
        Command::SweepDistanceMimo => sweep(&ctx, SweepFamily::RateVsDistanceMimo),
        Command::Verify => verify(&ctx),
        Command::ShowConfig => ctx.emit(&to_toml(&ctx.cfg)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(usage) => {
                    eprintln!("{usage}");
                    eprintln!("Run with --help for the list of subcommands.");
                }
                Failure::Config(e) => eprintln!("error: {e}"),
                Failure::Compute(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
