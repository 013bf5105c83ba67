//! Multiple-antenna relaying.
//!
//! The relay matrix `F` is found per splitting ratio `ρ` as a generalized
//! Rayleigh quotient: after the power constraint is made active, the SNR is
//! `(P_S/σ²)·fᴴK̃f / fᴴJ̃f` with `f = vec(F)`. Whitening by the Cholesky
//! factor of `J̃` turns it into an ordinary Rayleigh quotient whose dominant
//! eigenvector gives the optimal direction; the norm follows from the
//! power constraint. `ρ` itself is searched on a grid.

mod diagnostics;
mod mrcmrt;
mod operators;

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelRealization, NoiseModel, PowerBudget};
use crate::error::{Error, Result};
use crate::linalg::{dominant_eigenpair_by, Matrix, Vector};
use crate::scalar::Real;
use crate::siso::rate_from_snr;

pub use diagnostics::{angular_objective, diagnostics, DiagnosticsReport};
pub use mrcmrt::{mrcmrt_matrix, mrcmrt_ratio_program, optimize_mrcmrt, optimize_mrcmrt_ps, MrcMrtScalars};
pub use operators::{assemble_operators, genie_operators, KroneckerOperators};

pub const EIGEN_MAX_ITERS: usize = 100_000;

/// Relative power-constraint residual above which the `J̃` form of the SNR no
/// longer applies.
pub const CONSTRAINT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Energy-flow-assisted relaying with the optimized relay matrix.
    Efa,
    /// Destination silent in phase 1.
    NoEf,
    /// Energy leakage removed from the forwarded signal; an upper bound.
    GenieEfa,
    /// Rank-one MRC/MRT relay matrix with energy flow.
    MrcMrtEfa,
    /// Rank-one MRC/MRT relay matrix without energy flow.
    MrcMrtNoEf,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Efa,
        Variant::NoEf,
        Variant::GenieEfa,
        Variant::MrcMrtEfa,
        Variant::MrcMrtNoEf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Efa => "EFA",
            Variant::NoEf => "NoEF",
            Variant::GenieEfa => "GenieEFA",
            Variant::MrcMrtEfa => "MrcMrtEFA",
            Variant::MrcMrtNoEf => "MrcMrtNoEF",
        }
    }

    pub fn has_energy_flow(self) -> bool {
        !matches!(self, Variant::NoEf | Variant::MrcMrtNoEf)
    }

    pub fn is_mrcmrt(self) -> bool {
        matches!(self, Variant::MrcMrtEfa | Variant::MrcMrtNoEf)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown protocol variant `{s}`")))
    }
}

/// Received power at the relay's energy harvester, `ρ(‖h_RD‖²P_D + ‖h_RS‖²P_S)`.
pub fn harvested_power<T: Real>(rho: T, ch: &ChannelRealization<T>, pb: &PowerBudget<T>) -> T {
    rho * (ch.h_rd().norm_sqr() * pb.p_d + ch.h_rs().norm_sqr() * pb.p_s)
}

/// Everything but the splitting ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct MimoBase<T> {
    pub channels: ChannelRealization<T>,
    pub budgets: PowerBudget<T>,
    pub noise: NoiseModel<T>,
    pub variant: Variant,
}

impl<T: Real> MimoBase<T> {
    pub fn new(
        channels: ChannelRealization<T>,
        budgets: PowerBudget<T>,
        noise: NoiseModel<T>,
        variant: Variant,
    ) -> Self {
        Self {
            channels,
            budgets,
            noise,
            variant,
        }
    }

    pub fn at(&self, rho: T) -> Result<MimoProblem<T>> {
        MimoProblem::new(self.channels.clone(), self.budgets, self.noise, rho, self.variant)
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MimoProblem<T> {
    pub channels: ChannelRealization<T>,
    pub budgets: PowerBudget<T>,
    pub noise: NoiseModel<T>,
    pub rho: T,
    pub variant: Variant,
}

impl<T: Real> MimoProblem<T> {
    pub fn new(
        channels: ChannelRealization<T>,
        budgets: PowerBudget<T>,
        noise: NoiseModel<T>,
        rho: T,
        variant: Variant,
    ) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) {
            return Err(Error::Domain(format!("splitting ratio must lie in (0, 1), got {rho}")));
        }
        Ok(Self {
            channels,
            budgets,
            noise,
            rho,
            variant,
        })
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn antennas(&self) -> usize {
        self.channels.antennas()
    }

    /// Budgets as seen by this variant: no-energy-flow variants force `P_D = 0`.
    pub fn effective_budget(&self) -> PowerBudget<T> {
        if self.variant.has_energy_flow() {
            self.budgets
        } else {
            self.budgets.without_energy_flow()
        }
    }

    pub fn harvested_power(&self) -> T {
        harvested_power(self.rho, &self.channels, &self.effective_budget())
    }

    /// `h_RS h_RSᴴ P_S + h_RD h_RDᴴ P_D`, without the second term for the genie.
    pub fn forwarded_covariance(&self) -> Matrix<T> {
        let pb = self.effective_budget();
        let h_rs = self.channels.h_rs();
        let h_rd = self.channels.h_rd();
        let info = Matrix::outer(h_rs, h_rs).scale(pb.p_s);
        if self.variant == Variant::GenieEfa || pb.p_d == T::zero() {
            info
        } else {
            &info + &Matrix::outer(h_rd, h_rd).scale(pb.p_d)
        }
    }
}

/// Forwarded power of relay matrix `F` evaluated in matrix form:
/// `(1−ρ)Tr{FᴴF·Q} + σ²Tr{FᴴF}`.
pub fn forwarded_power<T: Real>(f: &Matrix<T>, p: &MimoProblem<T>) -> Result<T> {
    let r = p.antennas();
    if f.rows() != r || f.cols() != r {
        return Err(Error::DimensionMismatch(format!(
            "relay matrix is {}x{}, expected {r}x{r}",
            f.rows(),
            f.cols()
        )));
    }
    let gram = &f.adjoint() * f;
    let q = p.forwarded_covariance();
    let signal = (&gram * &q).trace().re;
    Ok((T::one() - p.rho) * signal + p.noise.sigma_n_sq * gram.trace().re)
}

/// SNR at the destination evaluated from the relay matrix directly:
/// `(1−ρ)P_S|h_DRᵀFh_RS|² / (σ²(‖h_DRᵀF‖² + 1))`.
pub fn snr_from_matrix<T: Real>(f: &Matrix<T>, p: &MimoProblem<T>) -> T {
    let h_rs = p.channels.h_rs();
    let h_dr = p.channels.h_dr();
    let signal = h_dr.dot(&f.mul_vec(h_rs)).norm_sqr();
    let noise_gain = f.transpose().mul_vec(h_dr).norm_sqr();
    (T::one() - p.rho) * p.budgets.p_s * signal / (p.noise.sigma_n_sq * (noise_gain + T::one()))
}

/// Both SNR evaluations at a vectorized relay matrix, plus the relative
/// residual of the power constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gamma2Forms<T> {
    /// From `F` directly.
    pub matrix_form: T,
    /// `P_S fᴴK̃f / (σ² fᴴJ̃f)`; valid only when the constraint holds.
    pub quadratic_form: T,
    pub constraint_residual: T,
}

pub fn gamma2_forms<T: Real>(f: &Vector<T>, p: &MimoProblem<T>) -> Result<Gamma2Forms<T>> {
    let r = p.antennas();
    let fm = Matrix::unvec(f, r, r)?;
    let ops = assemble_operators(p)?;
    let matrix_form = snr_from_matrix(&fm, p);
    let quadratic_form =
        p.budgets.p_s * ops.k_tilde.quadratic_form(f) / (p.noise.sigma_n_sq * ops.j_tilde.quadratic_form(f));
    let constraint_residual = ((ops.forwarded_power(f) - ops.p_r) / ops.p_r).abs();
    Ok(Gamma2Forms {
        matrix_form,
        quadratic_form,
        constraint_residual,
    })
}

/// SNR at `f = vec(F)`, which must meet the relay power constraint with equality.
pub fn snr_gamma2<T: Real>(f: &Vector<T>, p: &MimoProblem<T>) -> Result<T> {
    let r = p.antennas();
    let fm = Matrix::unvec(f, r, r)?;
    let p_r = p.harvested_power();
    if !(p_r > T::zero()) {
        return Err(Error::DegenerateChannel("relay harvests no power"));
    }
    let residual = ((forwarded_power(&fm, p)? - p_r) / p_r).abs();
    if !(residual <= T::lit(CONSTRAINT_TOL)) {
        return Err(Error::ConstraintViolated {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(snr_from_matrix(&fm, p))
}

/// How a relay matrix was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum RelayDesign<T> {
    /// Whitened dominant eigenvector `g̃` scaled by `‖g‖`; `eigenvalue` is the
    /// optimal `fᴴK̃f / fᴴJ̃f`.
    Eigen { g_dir: Vector<T>, g_norm: T, eigenvalue: T },
    /// `f ∝ J̃⁻¹k_vec`, valid because `K̃` has rank one.
    RankOne,
    /// Rank-one MRC/MRT matrix with gain `η`.
    MrcMrt { eta: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MimoSolution<T> {
    pub relay: Matrix<T>,
    /// `vec(relay)`
    pub f: Vector<T>,
    pub gamma2: T,
    /// Bits per channel use.
    pub rate: T,
    pub rho: T,
    pub variant: Variant,
    pub design: RelayDesign<T>,
}

impl<T: Real> MimoSolution<T> {
    fn from_vector(f: Vector<T>, p: &MimoProblem<T>, design: RelayDesign<T>) -> Result<Self> {
        let r = p.antennas();
        let relay = Matrix::unvec(&f, r, r)?;
        let gamma2 = snr_from_matrix(&relay, p);
        Ok(Self {
            relay,
            f,
            gamma2,
            rate: rate_from_snr(gamma2),
            rho: p.rho,
            variant: p.variant,
            design,
        })
    }

    /// `g̃`, `‖g‖` and the eigenvalue when the eigen path produced this solution.
    pub fn whitened(&self) -> Option<(&Vector<T>, T, T)> {
        match &self.design {
            RelayDesign::Eigen {
                g_dir,
                g_norm,
                eigenvalue,
            } => Some((g_dir, *g_norm, *eigenvalue)),
            _ => None,
        }
    }
}

fn require_optimized_variant(v: Variant) -> Result<()> {
    if v.is_mrcmrt() {
        return Err(Error::InvalidInput(format!(
            "variant {v} uses the fixed MRC/MRT structure, not the optimized relay matrix"
        )));
    }
    Ok(())
}

/// Optimal relay matrix at the problem's `ρ` via the whitened eigenproblem.
pub fn optimize_relay_matrix<T: Real>(p: &MimoProblem<T>) -> Result<MimoSolution<T>> {
    require_optimized_variant(p.variant)?;
    let ops = assemble_operators(p)?;
    let n = ops.k_vec.len();
    let whitened = |v: &Vector<T>| {
        let x = ops.l_j.solve_factor(v);
        ops.l_j.solve_factor_adjoint(&ops.k_tilde.mul_vec(&x))
    };
    let pair = dominant_eigenpair_by(n, whitened, T::default_tol(), EIGEN_MAX_ITERS)?;
    let f_dir = ops.l_j.solve_factor(&pair.vector);
    // ‖g‖² from the power constraint along the unit direction g̃.
    let g_norm = (ops.p_r / ops.forwarded_power(&f_dir)).sqrt();
    let f = f_dir.scale(g_norm);
    MimoSolution::from_vector(
        f,
        p,
        RelayDesign::Eigen {
            g_dir: pair.vector,
            g_norm,
            eigenvalue: pair.value,
        },
    )
}

/// Same optimum through `f ∝ J̃⁻¹k_vec`, skipping the eigen iteration.
pub fn optimize_relay_matrix_rank_one<T: Real>(p: &MimoProblem<T>) -> Result<MimoSolution<T>> {
    require_optimized_variant(p.variant)?;
    let ops = assemble_operators(p)?;
    let dir = ops.l_j.solve(&ops.k_vec);
    let f = ops.scale_to_budget(&dir)?;
    MimoSolution::from_vector(f, p, RelayDesign::RankOne)
}

/// Relay design for any variant at the problem's `ρ`.
pub fn solve_at<T: Real>(p: &MimoProblem<T>) -> Result<MimoSolution<T>> {
    if p.variant.is_mrcmrt() {
        optimize_mrcmrt(p)
    } else {
        optimize_relay_matrix(p)
    }
}

/// `{0.01, 0.02, …, 0.99}`
pub fn default_ps_grid<T: Real>() -> Vec<T> {
    ps_grid(T::lit(0.01), T::lit(0.01), T::lit(0.99))
}

/// Inclusive grid `start, start+step, …, stop`, each point computed as
/// `start + i·step` to avoid accumulated drift.
pub fn ps_grid<T: Real>(start: T, step: T, stop: T) -> Vec<T> {
    if !(step > T::zero()) || stop < start {
        return Vec::new();
    }
    let count = ((stop - start) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    (0..=count).map(|i| start + T::from_usize(i).unwrap() * step).collect()
}

/// Best rate over a grid of splitting ratios; ties go to the smaller ratio.
pub fn grid_search_ps<T: Real>(base: &MimoBase<T>, grid: &[T]) -> Result<MimoSolution<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty splitting-ratio grid".into()));
    }
    let mut best: Option<MimoSolution<T>> = None;
    for &rho in grid {
        let sol = solve_at(&base.at(rho)?)?;
        let better = best
            .as_ref()
            .is_none_or(|b| sol.rate > b.rate || (sol.rate == b.rate && sol.rho < b.rho));
        if better {
            best = Some(sol);
        }
    }
    Ok(best.expect("grid is nonempty"))
}

#[cfg(test)]
mod tests;
