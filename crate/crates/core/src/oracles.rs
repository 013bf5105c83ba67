//! Brute-force and sampling verifiers for the optimized solvers.
//!
//! Nothing here touches the Kronecker operators or the eigen path: power and
//! SNR are re-evaluated from the raw channels and the relay matrix, so a bug
//! in the optimized code cannot hide behind a shared helper.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{ChannelRealization, Geometry, NoiseModel, PathLoss, PowerBudget, Stream, StreamSampler};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::mimo::{optimize_mrcmrt, solve_at, MimoBase, MimoProblem, MimoSolution, Variant};
use crate::siso::{optimize_ps_closed_form, optimize_ps_fractional, SisoChannel};

/// Relative tolerance for sampled optimality checks.
pub const SAMPLING_TOL: f64 = 1e-8;
/// Relative tolerance for the MRC/MRT substitution check.
pub const SUBSTITUTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub instances: usize,
    pub worst_relative_gap: f64,
    pub passed: bool,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, instances: usize, worst_relative_gap: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            instances,
            worst_relative_gap,
            passed: worst_relative_gap <= tolerance,
            tolerance,
        }
    }

    /// Folds several reports of the same check into one.
    fn merge(name: &str, tolerance: f64, parts: &[OracleReport]) -> Self {
        let instances = parts.iter().map(|r| r.instances).sum();
        let worst = parts.iter().map(|r| r.worst_relative_gap).fold(0.0, nan_max);
        Self::new(name, instances, worst, tolerance)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} instances={} worst_gap={:.3e} tol={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.worst_relative_gap,
            self.tolerance
        )
    }
}

/// A NaN anywhere poisons the maximum so it can never pass.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub fn reports_to_csv(reports: &[OracleReport]) -> String {
    let mut out = String::from("name,instances,worst_relative_gap,tolerance,passed\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{}\n",
            r.name, r.instances, r.worst_relative_gap, r.tolerance, r.passed
        ));
    }
    out
}

/// `γ₁(ρ)` with the power constraint substituted, evaluated directly.
fn siso_gamma(rho: f64, g_rs: f64, g_dr: f64, pb: &PowerBudget<f64>, noise: &NoiseModel<f64>) -> f64 {
    let received = g_rs * pb.p_s + g_dr * pb.p_d;
    let gain = rho * received / ((1.0 - rho) * received + noise.sigma_n_sq);
    (1.0 - rho) * g_dr * gain * g_rs * pb.p_s / ((1.0 + g_dr * gain) * noise.sigma_n_sq)
}

/// Best `(ρ, γ₁)` over `{0, step, 2·step, …, 1}`.
pub fn grid_oracle_siso(
    ch: &SisoChannel<f64>,
    pb: &PowerBudget<f64>,
    noise: &NoiseModel<f64>,
    step: f64,
) -> Result<(f64, f64)> {
    if !(step > 0.0 && step <= 0.01) {
        return Err(Error::Domain(format!("grid step must lie in (0, 0.01], got {step}")));
    }
    let n = (1.0 / step).round() as usize;
    let (g_rs, g_dr) = (ch.gain_rs(), ch.gain_dr());
    let mut best = (0.0, 0.0);
    for i in 0..=n {
        let rho = (i as f64 * step).min(1.0);
        let gamma = siso_gamma(rho, g_rs, g_dr, pb, noise);
        if gamma > best.1 {
            best = (rho, gamma);
        }
    }
    Ok(best)
}

/// Physical quantities of one MIMO instance as the oracles see them.
struct Instance<'a> {
    ch: &'a ChannelRealization<f64>,
    rho: f64,
    p_s: f64,
    /// Energy-flow power counted at the harvester.
    p_d_harvest: f64,
    /// Energy-flow power leaking into the forwarded signal.
    p_d_forward: f64,
    sigma_sq: f64,
}

impl<'a> Instance<'a> {
    fn new(p: &'a MimoProblem<f64>) -> Self {
        let p_d = if p.variant.has_energy_flow() {
            p.budgets.p_d
        } else {
            0.0
        };
        Self {
            ch: &p.channels,
            rho: p.rho,
            p_s: p.budgets.p_s,
            p_d_harvest: p_d,
            p_d_forward: if p.variant == Variant::GenieEfa { 0.0 } else { p_d },
            sigma_sq: p.noise.sigma_n_sq,
        }
    }

    fn r(&self) -> usize {
        self.ch.antennas()
    }

    fn harvested(&self) -> f64 {
        self.rho * (self.p_s * self.ch.h_rs().norm_sqr() + self.p_d_harvest * self.ch.h_rd().norm_sqr())
    }

    /// `(1−ρ)(P_S‖Fh_RS‖² + P_D‖Fh_RD‖²) + σ²‖F‖²_F`
    fn relay_power(&self, f: &Matrix<f64>) -> f64 {
        let info = f.mul_vec(self.ch.h_rs()).norm_sqr();
        let leak = f.mul_vec(self.ch.h_rd()).norm_sqr();
        let fro = f.frobenius_norm();
        (1.0 - self.rho) * (self.p_s * info + self.p_d_forward * leak) + self.sigma_sq * fro * fro
    }

    fn snr(&self, f: &Matrix<f64>) -> f64 {
        let h_dr = self.ch.h_dr();
        let through: Complex<f64> = h_dr
            .iter()
            .enumerate()
            .map(|(i, &hi)| {
                (0..self.r())
                    .map(|j| hi * f[(i, j)] * self.ch.h_rs()[j])
                    .sum::<Complex<f64>>()
            })
            .sum();
        let noise_gain: f64 = (0..self.r())
            .map(|j| {
                (0..self.r())
                    .map(|i| h_dr[i] * f[(i, j)])
                    .sum::<Complex<f64>>()
                    .norm_sqr()
            })
            .sum();
        (1.0 - self.rho) * self.p_s * through.norm_sqr() / (self.sigma_sq * (noise_gain + 1.0))
    }

    fn to_budget(&self, f: &Matrix<f64>) -> Option<Matrix<f64>> {
        let spent = self.relay_power(f);
        (spent > 0.0).then(|| f.scale((self.harvested() / spent).sqrt()))
    }
}

fn as_matrix(f: &Vector<f64>, r: usize) -> Result<Matrix<f64>> {
    Matrix::unvec(f, r, r)
}

/// Relay power spent by `f = vec(F)`, evaluated independently.
pub fn oracle_relay_power(f: &Vector<f64>, p: &MimoProblem<f64>) -> Result<f64> {
    let inst = Instance::new(p);
    Ok(inst.relay_power(&as_matrix(f, inst.r())?))
}

/// Destination SNR at `f = vec(F)`, evaluated independently; the power
/// constraint is not checked.
pub fn oracle_snr(f: &Vector<f64>, p: &MimoProblem<f64>) -> Result<f64> {
    let inst = Instance::new(p);
    Ok(inst.snr(&as_matrix(f, inst.r())?))
}

/// Isotropic unit direction: i.i.d. circular Gaussian entries, normalized.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let v: Vec<Complex<f64>> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(re * s, im * s)
            })
            .collect();
        if let Some(u) = Vector::new(v).ok().and_then(|v| v.normalized()) {
            return u;
        }
    }
}

fn check_on_budget(inst: &Instance<'_>, f: &Matrix<f64>) -> Result<()> {
    let p_r = inst.harvested();
    let residual = ((inst.relay_power(f) - p_r) / p_r).abs();
    if !(residual <= 1e-6) {
        return Err(Error::ConstraintViolated { residual });
    }
    Ok(())
}

/// Samples `n` isotropic directions, rescales each onto the power constraint
/// and reports the largest SNR excess over `reference`. With
/// `include_reference` the reference itself is evaluated as one more sample.
pub fn random_direction_oracle_against<R: Rng + ?Sized>(
    p: &MimoProblem<f64>,
    reference: &Vector<f64>,
    n: usize,
    include_reference: bool,
    rng: &mut R,
) -> Result<OracleReport> {
    if n == 0 {
        return Err(Error::InvalidInput("oracle needs at least one sample".into()));
    }
    let inst = Instance::new(p);
    let r = inst.r();
    let f_ref = as_matrix(reference, r)?;
    check_on_budget(&inst, &f_ref)?;
    let best = inst.snr(&f_ref);
    let mut worst = f64::NEG_INFINITY;
    if include_reference {
        worst = (inst.snr(&f_ref) - best) / best;
    }
    for _ in 0..n {
        let dir = as_matrix(&random_direction(r * r, rng), r)?;
        let Some(f) = inst.to_budget(&dir) else { continue };
        worst = nan_max(worst, (inst.snr(&f) - best) / best);
    }
    Ok(OracleReport::new(
        "mimo_random_direction",
        1,
        nan_max(worst, 0.0),
        SAMPLING_TOL,
    ))
}

/// Checks the optimized relay matrix of `p` against `n` random feasible directions.
pub fn random_direction_oracle_mimo<R: Rng + ?Sized>(
    p: &MimoProblem<f64>,
    n: usize,
    rng: &mut R,
) -> Result<OracleReport> {
    let sol = solve_at(p)?;
    random_direction_oracle_against(p, &sol.f, n, false, rng)
}

/// Perturbs `sol.f` by `n` random steps of length `radius·‖f*‖`, rescales
/// each back to the power constraint and reports the largest SNR excess.
/// `radius = 0` evaluates `f*` itself without rescaling.
pub fn perturbation_check<R: Rng + ?Sized>(
    sol: &MimoSolution<f64>,
    p: &MimoProblem<f64>,
    n: usize,
    radius: f64,
    rng: &mut R,
) -> Result<OracleReport> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "perturbation radius must be nonnegative, got {radius}"
        )));
    }
    let inst = Instance::new(p);
    let r = inst.r();
    let f_star = as_matrix(&sol.f, r)?;
    check_on_budget(&inst, &f_star)?;
    let best = inst.snr(&f_star);
    let step = radius * sol.f.norm();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let candidate = if radius == 0.0 {
            f_star.clone()
        } else {
            let moved = &sol.f + &random_direction(r * r, rng).scale(step);
            match inst.to_budget(&as_matrix(&moved, r)?) {
                Some(f) => f,
                None => continue,
            }
        };
        worst = nan_max(worst, (inst.snr(&candidate) - best) / best);
    }
    Ok(OracleReport::new(
        "mimo_perturbation",
        1,
        nan_max(worst, 0.0),
        SAMPLING_TOL,
    ))
}

/// Compares the scalarized MRC/MRT SNR with a direct evaluation at
/// `vec(F′)`; the power-constraint residual counts as a gap too.
pub fn mrcmrt_consistency(p: &MimoProblem<f64>) -> Result<OracleReport> {
    if !p.variant.is_mrcmrt() {
        return Err(Error::InvalidInput(format!(
            "variant {} is not an MRC/MRT variant",
            p.variant
        )));
    }
    let sol = optimize_mrcmrt(p)?;
    let inst = Instance::new(p);
    let f = as_matrix(&sol.f, inst.r())?;
    let direct = inst.snr(&f);
    let snr_gap = ((direct - sol.gamma2) / direct).abs();
    let p_r = inst.harvested();
    let power_gap = ((inst.relay_power(&f) - p_r) / p_r).abs();
    Ok(OracleReport::new(
        "mrcmrt_consistency",
        1,
        nan_max(snr_gap, power_gap),
        SUBSTITUTION_TOL,
    ))
}

const SUITE_INSTANCES: u64 = 20;
const SUITE_SAMPLES: usize = 10_000;
const SUITE_PERTURBATIONS: usize = 1_000;
const SUITE_RADIUS: f64 = 1e-3;
const SUITE_ANTENNAS: usize = 4;

fn suite_problems(seed: u64, variant: Variant) -> Result<Vec<MimoProblem<f64>>> {
    let sampler = StreamSampler::new(seed);
    let geom = Geometry::new(10.0, 0.5)?;
    let pb = PowerBudget::new(0.5, 0.1)?;
    let noise = NoiseModel::new(1e-6)?;
    (0..SUITE_INSTANCES)
        .map(|trial| {
            let ch = sampler.realize(trial, &geom, &PathLoss::default(), SUITE_ANTENNAS)?;
            let rho = sampler.stream(trial, Stream::Oracle).random_range(0.05..0.95);
            MimoBase::new(ch, pb, noise, variant).at(rho)
        })
        .collect()
}

fn siso_reports(seed: u64) -> Result<Vec<OracleReport>> {
    let sampler = StreamSampler::new(seed);
    let geom = Geometry::new(10.0, 0.5)?;
    let noise = NoiseModel::new(1e-6)?;
    let mut grid_gap: f64 = 0.0;
    let mut agree_gap: f64 = 0.0;
    let mut instances = 0;
    for pb in [PowerBudget::new(0.5, 0.1)?, PowerBudget::new(5.0, 0.01)?] {
        for trial in 0..SUITE_INSTANCES {
            let ch = SisoChannel::from_realization(&sampler.realize(trial, &geom, &PathLoss::default(), 1)?)?;
            let closed = optimize_ps_closed_form(&ch, &pb, &noise);
            let numeric = optimize_ps_fractional(&ch, &pb, &noise, 1e-12)?;
            let (_, grid_best) = grid_oracle_siso(&ch, &pb, &noise, 1e-4)?;
            let reference = closed.gamma1.min(numeric.gamma1);
            grid_gap = nan_max(grid_gap, (grid_best - reference) / reference);
            agree_gap = nan_max(agree_gap, ((closed.gamma1 - numeric.gamma1) / closed.gamma1).abs());
            instances += 1;
        }
    }
    Ok(vec![
        OracleReport::new("siso_grid", instances, nan_max(grid_gap, 0.0), SAMPLING_TOL),
        OracleReport::new("siso_fractional_agreement", instances, agree_gap, 1e-6),
    ])
}

/// Every oracle on a fixed batch of instances derived from `seed`.
pub fn run_oracle_suite(seed: u64) -> Result<Vec<OracleReport>> {
    let mut reports = siso_reports(seed)?;

    let mut sampled = Vec::new();
    let mut perturbed = Vec::new();
    for variant in [Variant::Efa, Variant::NoEf, Variant::GenieEfa] {
        for (i, p) in suite_problems(seed, variant)?.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((i as u64) << 8) | Stream::Oracle as u64);
            sampled.push(random_direction_oracle_mimo(p, SUITE_SAMPLES, &mut rng)?);
            let sol = solve_at(p)?;
            perturbed.push(perturbation_check(
                &sol,
                p,
                SUITE_PERTURBATIONS,
                SUITE_RADIUS,
                &mut rng,
            )?);
        }
    }
    reports.push(OracleReport::merge("mimo_random_direction", SAMPLING_TOL, &sampled));
    reports.push(OracleReport::merge("mimo_perturbation", SAMPLING_TOL, &perturbed));

    let mut consistency = Vec::new();
    for variant in [Variant::MrcMrtEfa, Variant::MrcMrtNoEf] {
        for p in suite_problems(seed, variant)? {
            consistency.push(mrcmrt_consistency(&p)?);
        }
    }
    reports.push(OracleReport::merge(
        "mrcmrt_consistency",
        SUBSTITUTION_TOL,
        &consistency,
    ));

    let mut no_ef_gap: f64 = 0.0;
    for p in suite_problems(seed, Variant::NoEf)? {
        let optimized = solve_at(&p)?;
        let mrc = solve_at(&p.with_variant(Variant::MrcMrtNoEf))?;
        no_ef_gap = nan_max(no_ef_gap, ((mrc.rate - optimized.rate) / optimized.rate).abs());
    }
    reports.push(OracleReport::new(
        "mrcmrt_no_ef_optimality",
        SUITE_INSTANCES as usize,
        no_ef_gap,
        SAMPLING_TOL,
    ));

    let mut reduction_gap: f64 = 0.0;
    for p in suite_problems(seed, Variant::Efa)? {
        let p1 = MimoProblem::new(p.channels.truncated(1)?, p.budgets, p.noise, p.rho, Variant::Efa)?;
        let mimo = solve_at(&p1)?;
        let ch = SisoChannel::from_realization(&p1.channels)?;
        let siso = siso_gamma(p.rho, ch.gain_rs(), ch.gain_dr(), &p.budgets, &p.noise);
        reduction_gap = nan_max(reduction_gap, ((mimo.gamma2 - siso) / siso).abs());
    }
    reports.push(OracleReport::new(
        "siso_reduction",
        SUITE_INSTANCES as usize,
        reduction_gap,
        1e-10,
    ));
    Ok(reports)
}
