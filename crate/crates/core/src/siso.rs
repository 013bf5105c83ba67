//! Single-antenna relaying: SNR and rate at a given power-splitting ratio,
//! and the optimal ratio with or without the destination's energy flow.

use num_complex::Complex;

use crate::channel::{ChannelRealization, NoiseModel, PowerBudget};
use crate::error::{Error, Result};
use crate::fractional::RatioProgram;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SisoChannel<T> {
    pub h_rs: Complex<T>,
    /// Also the relay-to-destination channel, by reciprocity.
    pub h_rd: Complex<T>,
}

impl<T: Real> SisoChannel<T> {
    pub fn new(h_rs: Complex<T>, h_rd: Complex<T>) -> Result<Self> {
        let finite = |z: Complex<T>| z.re.is_finite() && z.im.is_finite();
        if !finite(h_rs) || !finite(h_rd) {
            return Err(Error::InvalidInput("channel entries must be finite".into()));
        }
        Ok(Self { h_rs, h_rd })
    }

    /// From real channel power gains `|h_RS|²`, `|h_RD|²` (zero phase).
    pub fn from_gains(g_rs: T, g_rd: T) -> Self {
        Self {
            h_rs: Complex::new(g_rs.sqrt(), T::zero()),
            h_rd: Complex::new(g_rd.sqrt(), T::zero()),
        }
    }

    pub fn from_realization(ch: &ChannelRealization<T>) -> Result<Self> {
        if ch.antennas() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "SISO channel from a {}-antenna realization",
                ch.antennas()
            )));
        }
        Self::new(ch.h_rs()[0], ch.h_rd()[0])
    }

    pub fn gain_rs(&self) -> T {
        self.h_rs.norm_sqr()
    }

    pub fn gain_dr(&self) -> T {
        self.h_rd.norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SisoSolution<T> {
    pub rho_star: T,
    /// Amplification power gain `|f|²`.
    pub f_sq: T,
    pub gamma1: T,
    /// Bits per channel use.
    pub rate: T,
}

impl<T: Real> SisoSolution<T> {
    /// Nothing reaches the relay: no forwarding, zero rate.
    pub fn silent() -> Self {
        Self {
            rho_star: T::zero(),
            f_sq: T::zero(),
            gamma1: T::zero(),
            rate: T::zero(),
        }
    }
}

/// Total received power at the relay, `|h_RS|²P_S + |h_RD|²P_D`.
pub fn p1<T: Real>(ch: &SisoChannel<T>, pb: &PowerBudget<T>) -> T {
    ch.gain_rs() * pb.p_s + ch.h_rd.norm_sqr() * pb.p_d
}

/// `|f|²` that spends exactly the harvested power on forwarding.
pub fn amplification_gain_sq<T: Real>(rho: T, p1: T, sigma_n_sq: T) -> T {
    rho * p1 / ((T::one() - rho) * p1 + sigma_n_sq)
}

pub fn snr_gamma1<T: Real>(rho: T, f_sq: T, ch: &SisoChannel<T>, pb: &PowerBudget<T>, noise: &NoiseModel<T>) -> T {
    let g_dr = ch.gain_dr();
    let num = (T::one() - rho) * g_dr * f_sq * ch.gain_rs() * pb.p_s;
    let den = (T::one() + g_dr * f_sq) * noise.sigma_n_sq;
    num / den
}

/// Half-duplex rate `½·log₂(1 + γ)`.
pub fn rate_from_snr<T: Real>(gamma: T) -> T {
    T::lit(0.5) * gamma.ln_1p() / T::LN_2()
}

/// Rate at a fixed splitting ratio with the power constraint active.
pub fn evaluate_at<T: Real>(
    rho: T,
    ch: &SisoChannel<T>,
    pb: &PowerBudget<T>,
    noise: &NoiseModel<T>,
) -> SisoSolution<T> {
    let f_sq = amplification_gain_sq(rho, p1(ch, pb), noise.sigma_n_sq);
    let gamma1 = snr_gamma1(rho, f_sq, ch, pb, noise);
    SisoSolution {
        rho_star: rho,
        f_sq,
        gamma1,
        rate: rate_from_snr(gamma1),
    }
}

/// After substituting the active power constraint, `γ₁(ρ) ∝ ρ(1−ρ)/(a + bρ)`
/// with `a = p1 + σ²` and `b = p1(|h_DR|² − 1)`. `None` when `p1 = 0`.
pub fn ratio_program<T: Real>(
    ch: &SisoChannel<T>,
    pb: &PowerBudget<T>,
    noise: &NoiseModel<T>,
) -> Option<RatioProgram<T>> {
    let p1 = p1(ch, pb);
    if !(p1 > T::zero()) {
        return None;
    }
    let a = p1 + noise.sigma_n_sq;
    let b = p1 * (ch.gain_dr() - T::one());
    RatioProgram::new(a, b).ok()
}

/// Optimal splitting ratio from the stationarity condition.
///
/// A relay that receives nothing (`p1 = 0`) yields [`SisoSolution::silent`].
pub fn optimize_ps_closed_form<T: Real>(
    ch: &SisoChannel<T>,
    pb: &PowerBudget<T>,
    noise: &NoiseModel<T>,
) -> SisoSolution<T> {
    match ratio_program(ch, pb, noise) {
        Some(prog) => evaluate_at(prog.maximize_closed_form(), ch, pb, noise),
        None => SisoSolution::silent(),
    }
}

/// Optimal splitting ratio by an interior-point solve of the
/// Charnes–Cooper transformed program.
pub fn optimize_ps_fractional<T: Real>(
    ch: &SisoChannel<T>,
    pb: &PowerBudget<T>,
    noise: &NoiseModel<T>,
    tol: T,
) -> Result<SisoSolution<T>> {
    match ratio_program(ch, pb, noise) {
        Some(prog) => Ok(evaluate_at(prog.maximize_interior_point(tol)?, ch, pb, noise)),
        None => Ok(SisoSolution::silent()),
    }
}

/// Relaying without energy flow: the destination stays silent in phase 1.
pub fn optimize_no_ef<T: Real>(ch: &SisoChannel<T>, p_s: T, noise: &NoiseModel<T>) -> Result<SisoSolution<T>> {
    let pb = PowerBudget::new(T::zero(), p_s)?;
    Ok(optimize_ps_closed_form(ch, &pb, noise))
}
