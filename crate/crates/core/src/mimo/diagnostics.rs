//! Alignment of an optimized relay matrix with the channel directions.
//!
//! With `F̃ = F/‖F‖_F = UΣVᴴ`, the SNR objective depends on `F̃` only through
//! the singular values and the inner products of the singular vectors with
//! the normalized channels. Inner products here are `⟨x, y⟩ = xᴴy`.

use num_complex::Complex;

use crate::channel::{ChannelRealization, NoiseModel, PowerBudget};
use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix, Vector};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsReport<T> {
    /// Descending, with unit sum of squares.
    pub singular_values: Vec<T>,
    /// `|⟨h̃_DR*, u_i⟩|`
    pub xi_1: Vec<T>,
    /// `|⟨h̃_RS, v_i⟩|`
    pub xi_2: Vec<T>,
    /// `|⟨h̃_RD, v_i⟩|`
    pub xi_3: Vec<T>,
    pub theta_1: Vec<T>,
    pub theta_2: Vec<T>,
    pub theta_3: Vec<T>,
    pub eps_1: T,
    pub eps_2: T,
    pub p2: T,
    pub rho: T,
}

fn unit<T: Real>(v: &Vector<T>) -> Result<Vector<T>> {
    v.normalized()
        .ok_or(Error::DegenerateChannel("diagnostics need nonzero channels"))
}

/// Magnitudes (Hermitian-angle cosines) and arguments (pseudo-angles).
fn split<T: Real>(values: impl Iterator<Item = Complex<T>>) -> (Vec<T>, Vec<T>) {
    values.map(|z| (z.norm(), z.arg())).unzip()
}

pub fn diagnostics<T: Real>(
    f: &Matrix<T>,
    ch: &ChannelRealization<T>,
    pb: &PowerBudget<T>,
    rho: T,
) -> Result<DiagnosticsReport<T>> {
    let norm = f.frobenius_norm();
    if !(norm > T::zero()) {
        return Err(Error::InvalidInput("diagnostics of a zero relay matrix".into()));
    }
    let r = ch.antennas();
    if f.rows() != r || f.cols() != r {
        return Err(Error::DimensionMismatch(format!(
            "relay matrix is {}x{}, expected {r}x{r}",
            f.rows(),
            f.cols()
        )));
    }
    let dec = svd(&f.scale(norm.recip()))?;
    let h_dr = unit(ch.h_dr())?;
    let h_rs = unit(ch.h_rs())?;
    let h_rd = unit(ch.h_rd())?;
    let h_dr_conj = h_dr.conj();

    let u: Vec<_> = (0..r).map(|i| dec.u.column(i)).collect();
    let v: Vec<_> = (0..r).map(|i| dec.v.column(i)).collect();
    let (xi_1, theta_1) = split(u.iter().map(|ui| h_dr_conj.inner(ui)));
    let (xi_2, theta_2) = split(v.iter().map(|vi| h_rs.inner(vi)));
    let (xi_3, theta_3) = split(v.iter().map(|vi| h_rd.inner(vi)));

    let g_dr = ch.h_dr().norm_sqr();
    let g_rs = ch.h_rs().norm_sqr();
    let one_minus = T::one() - rho;
    Ok(DiagnosticsReport {
        singular_values: dec.singular_values,
        xi_1,
        xi_2,
        xi_3,
        theta_1,
        theta_2,
        theta_3,
        eps_1: one_minus * pb.p_s / (rho * g_dr),
        eps_2: one_minus * pb.p_d / (rho * g_rs),
        p2: g_dr * pb.p_d + g_rs * pb.p_s,
        rho,
    })
}

/// The objective `fᴴK̃f / fᴴJ̃f` rebuilt from the angular quantities of a
/// report:
///
/// ```text
/// (1−ρ)|Σ ξ₁ᵢe^{jθ₁ᵢ}·ξ₂ᵢe^{−jθ₂ᵢ}·λᵢ|²
///   / ( Σξ₁ᵢ²λᵢ²/‖h_RS‖² + ε₁Σξ₂ᵢ²λᵢ²/p₂ + ε₂Σξ₃ᵢ²λᵢ²/p₂ + σ²/(ρp₂‖h_DR‖²‖h_RS‖²) )
/// ```
///
/// The conjugate on the second factor comes from `⟨x, y⟩ = xᴴy`.
pub fn angular_objective<T: Real>(
    report: &DiagnosticsReport<T>,
    ch: &ChannelRealization<T>,
    noise: &NoiseModel<T>,
) -> T {
    let g_dr = ch.h_dr().norm_sqr();
    let g_rs = ch.h_rs().norm_sqr();
    let lam = &report.singular_values;
    let mut coherent = Complex::new(T::zero(), T::zero());
    let (mut s1, mut s2, mut s3) = (T::zero(), T::zero(), T::zero());
    for (i, &l) in lam.iter().enumerate() {
        let a = Complex::from_polar(report.xi_1[i], report.theta_1[i]);
        let b = Complex::from_polar(report.xi_2[i], report.theta_2[i]).conj();
        coherent = coherent + a * b * l;
        let l2 = l * l;
        s1 = s1 + report.xi_1[i] * report.xi_1[i] * l2;
        s2 = s2 + report.xi_2[i] * report.xi_2[i] * l2;
        s3 = s3 + report.xi_3[i] * report.xi_3[i] * l2;
    }
    let rho = report.rho;
    let den = s1 / g_rs
        + report.eps_1 * s2 / report.p2
        + report.eps_2 * s3 / report.p2
        + noise.sigma_n_sq / (rho * report.p2 * g_dr * g_rs);
    (T::one() - rho) * coherent.norm_sqr() / den
}
