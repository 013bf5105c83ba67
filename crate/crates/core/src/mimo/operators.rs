use crate::error::{Error, Result};
use crate::linalg::{kron, Cholesky, Matrix, Vector};
use crate::scalar::Real;

use super::MimoProblem;

/// The vectorized quantities of the relay-matrix design at one `ρ`.
///
/// With `f = vec(F)` (column stacking), the forwarded power is
/// `fᴴ((1−ρ)Q̃ + σ²I)f`, the useful signal power is `(1−ρ)fᴴKf`, and the
/// amplified destination noise is `fᴴJf`.
#[derive(Clone, Debug)]
pub struct KroneckerOperators<T> {
    /// Covariance of the relay's received signal that gets forwarded. Drops the
    /// energy-flow term for the genie-aided variant.
    pub q_r: Matrix<T>,
    /// `Q_Rᵀ ⊗ I`
    pub q_tilde: Matrix<T>,
    /// `(h_RSᵀ ⊗ h_DRᵀ)ᴴ`
    pub k_vec: Vector<T>,
    /// `k_vec·k_vecᴴ`
    pub k: Matrix<T>,
    /// `(1−ρ)K`
    pub k_tilde: Matrix<T>,
    /// `I ⊗ (h_DR* h_DRᵀ)`
    pub j: Matrix<T>,
    /// `(1−ρ)Q̃ + σ²I`
    pub forward: Matrix<T>,
    /// `J + forward / P_R`
    pub j_tilde: Matrix<T>,
    /// `J̃ = L_Jᴴ L_J`
    pub l_j: Cholesky<T>,
    /// Harvested power, the relay's forwarding budget.
    pub p_r: T,
    pub rho: T,
}

/// Builds every operator for `p`, including the Cholesky factor of `J̃`.
pub fn assemble_operators<T: Real>(p: &MimoProblem<T>) -> Result<KroneckerOperators<T>> {
    let p_r = p.harvested_power();
    if !(p_r > T::zero()) {
        return Err(Error::DegenerateChannel("relay harvests no power"));
    }
    let r = p.channels.antennas();
    let n = r * r;
    let rho = p.rho;
    let sigma_sq = p.noise.sigma_n_sq;
    let h_rs = p.channels.h_rs();
    let h_dr = p.channels.h_dr();

    let eye_r = Matrix::identity(r);
    let q_r = p.forwarded_covariance();
    let q_tilde = kron(&q_r.transpose(), &eye_r);

    let k_vec = h_rs.kron(h_dr).conj();
    let k = Matrix::outer(&k_vec, &k_vec);
    let k_tilde = k.scale(T::one() - rho);

    let h_dr_conj = h_dr.conj();
    let j = kron(&eye_r, &Matrix::outer(&h_dr_conj, &h_dr_conj));

    let forward = &q_tilde.scale(T::one() - rho) + &Matrix::identity(n).scale(sigma_sq);
    let j_tilde = &j + &forward.scale(p_r.recip());
    let l_j = Cholesky::new(&j_tilde)?;

    Ok(KroneckerOperators {
        q_r,
        q_tilde,
        k_vec,
        k,
        k_tilde,
        j,
        forward,
        j_tilde,
        l_j,
        p_r,
        rho,
    })
}

/// Operators with the energy leakage removed from the forwarded signal.
/// Harvesting still counts the energy flow.
pub fn genie_operators<T: Real>(p: &MimoProblem<T>) -> Result<KroneckerOperators<T>> {
    if p.variant != super::Variant::GenieEfa {
        return Err(Error::InvalidInput(format!(
            "genie operators requested for variant {}",
            p.variant
        )));
    }
    assemble_operators(p)
}

impl<T: Real> KroneckerOperators<T> {
    /// Forwarded power `fᴴ((1−ρ)Q̃ + σ²I)f`.
    pub fn forwarded_power(&self, f: &Vector<T>) -> T {
        self.forward.quadratic_form(f)
    }

    /// `fᴴK̃f / fᴴJ̃f`
    pub fn whitened_objective(&self, f: &Vector<T>) -> T {
        self.k_tilde.quadratic_form(f) / self.j_tilde.quadratic_form(f)
    }

    /// Rescales a direction so the relay spends exactly `P_R`.
    pub fn scale_to_budget(&self, dir: &Vector<T>) -> Result<Vector<T>> {
        let spent = self.forwarded_power(dir);
        if !(spent > T::zero()) {
            return Err(Error::InvalidInput("zero relay direction".into()));
        }
        Ok(dir.scale((self.p_r / spent).sqrt()))
    }
}
