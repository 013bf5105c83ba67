//! MRC/MRT baseline: `F′ = η·h_DR* h_RSᴴ / (‖h_DR‖‖h_RS‖)`.
//!
//! Substituting `F′` gives, with `g_rs = ‖h_RS‖²`, `g_dr = ‖h_DR‖²`,
//!
//! ```text
//! forwarded power = η²((1−ρ)q + σ²),   q = h̃_RSᴴ Q h̃_RS
//! γ₂             = (1−ρ)P_S g_rs g_dr η² / (σ²(g_dr η² + 1))
//! ```
//!
//! The active constraint fixes `η² = ρp₂ / ((1−ρ)q + σ²)` with
//! `p₂ = ‖h_RD‖²P_D + ‖h_RS‖²P_S`, which leaves
//! `γ₂ ∝ ρ(1−ρ) / ((q + σ²) + (g_dr p₂ − q)ρ)`, the same ratio program as
//! the single-antenna case.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::fractional::RatioProgram;
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::siso::rate_from_snr;

use super::{MimoBase, MimoProblem, MimoSolution, RelayDesign};

/// Scalar reduction of the MRC/MRT design for one channel and variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MrcMrtScalars<T> {
    pub g_rs: T,
    pub g_dr: T,
    /// Forwarded signal power per unit `η²` before the `(1−ρ)` split.
    pub q: T,
    /// Harvestable power at `ρ = 1`.
    pub p2: T,
    pub p_s: T,
    pub sigma_n_sq: T,
}

impl<T: Real> MrcMrtScalars<T> {
    pub fn new(base: &MimoBase<T>) -> Result<Self> {
        if !base.variant.is_mrcmrt() {
            return Err(Error::InvalidInput(format!(
                "variant {} is not an MRC/MRT variant",
                base.variant
            )));
        }
        let pb = if base.variant.has_energy_flow() {
            base.budgets
        } else {
            base.budgets.without_energy_flow()
        };
        let h_rs = base.channels.h_rs();
        let h_rd = base.channels.h_rd();
        let g_rs = h_rs.norm_sqr();
        let g_dr = h_rd.norm_sqr();
        if !(g_rs > T::zero()) || !(g_dr > T::zero()) {
            return Err(Error::DegenerateChannel("MRC/MRT needs nonzero h_RS and h_DR"));
        }
        let q = pb.p_s * g_rs + pb.p_d * h_rs.inner(h_rd).norm_sqr() / g_rs;
        Ok(Self {
            g_rs,
            g_dr,
            q,
            p2: g_dr * pb.p_d + g_rs * pb.p_s,
            p_s: pb.p_s,
            sigma_n_sq: base.noise.sigma_n_sq,
        })
    }

    /// `η²` spending exactly the harvested power.
    pub fn eta_sq(&self, rho: T) -> T {
        rho * self.p2 / ((T::one() - rho) * self.q + self.sigma_n_sq)
    }

    pub fn snr(&self, rho: T) -> T {
        let eta_sq = self.eta_sq(rho);
        (T::one() - rho) * self.p_s * self.g_rs * self.g_dr * eta_sq
            / (self.sigma_n_sq * (self.g_dr * eta_sq + T::one()))
    }

    pub fn ratio_program(&self) -> Result<RatioProgram<T>> {
        RatioProgram::new(self.q + self.sigma_n_sq, self.g_dr * self.p2 - self.q)
    }
}

/// The rank-one MRC/MRT relay matrix with Frobenius norm `eta`.
pub fn mrcmrt_matrix<T: Real>(eta: T, ch: &ChannelRealization<T>) -> Result<Matrix<T>> {
    let n_dr = ch.h_dr().norm();
    let n_rs = ch.h_rs().norm();
    if !(n_dr > T::zero()) || !(n_rs > T::zero()) {
        return Err(Error::DegenerateChannel("MRC/MRT needs nonzero h_RS and h_DR"));
    }
    let scale = eta / (n_dr * n_rs);
    Ok(Matrix::outer(&ch.h_dr().conj(), ch.h_rs()).scale(scale))
}

/// MRC/MRT design at the problem's `ρ`, with `η` eliminated by the power
/// constraint. `gamma2` is the scalarized SNR.
pub fn optimize_mrcmrt<T: Real>(p: &MimoProblem<T>) -> Result<MimoSolution<T>> {
    let base = MimoBase::new(p.channels.clone(), p.budgets, p.noise, p.variant);
    let scalars = MrcMrtScalars::new(&base)?;
    let eta = scalars.eta_sq(p.rho).sqrt();
    let relay = mrcmrt_matrix(eta, &p.channels)?;
    let gamma2 = scalars.snr(p.rho);
    Ok(MimoSolution {
        f: relay.vec(),
        relay,
        gamma2,
        rate: rate_from_snr(gamma2),
        rho: p.rho,
        variant: p.variant,
        design: RelayDesign::MrcMrt { eta },
    })
}

pub fn mrcmrt_ratio_program<T: Real>(base: &MimoBase<T>) -> Result<RatioProgram<T>> {
    MrcMrtScalars::new(base)?.ratio_program()
}

/// MRC/MRT with the splitting ratio chosen in closed form rather than on a grid.
pub fn optimize_mrcmrt_ps<T: Real>(base: &MimoBase<T>) -> Result<MimoSolution<T>> {
    let rho = mrcmrt_ratio_program(base)?.maximize_closed_form();
    // The stationary point is strictly interior for a valid program.
    let eps = T::epsilon();
    optimize_mrcmrt(&base.at(rho.max(eps).min(T::one() - eps))?)
}
