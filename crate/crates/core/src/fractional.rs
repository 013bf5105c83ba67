//! The one-dimensional fractional program behind every power-splitting choice:
//!
//! ```text
//! maximize  φ(ρ)/ψ(ρ) = ρ(1 − ρ) / (a + bρ)   over 0 ≤ ρ ≤ 1
//! ```
//!
//! with `a > 0` and `a + b > 0`, so `ψ` is positive and affine on the interval
//! and `φ` is concave. Two independent solvers are provided: the stationary
//! point in closed form, and a log-barrier interior-point method on the
//! Charnes–Cooper transformed convex program in `(s, t) = (ρ/ψ, 1/ψ)`, solved
//! in the coordinates `(s, t − s)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioProgram<T> {
    a: T,
    b: T,
}

impl<T: Real> RatioProgram<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "ratio program needs a > 0, got a = {a}, b = {b}"
            )));
        }
        if !(a + b > T::zero()) {
            return Err(Error::Domain(format!(
                "ratio program needs a + b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn numerator(&self, rho: T) -> T {
        rho * (T::one() - rho)
    }

    pub fn denominator(&self, rho: T) -> T {
        self.a + self.b * rho
    }

    pub fn objective(&self, rho: T) -> T {
        self.numerator(rho) / self.denominator(rho)
    }

    /// Root of `bρ² + 2aρ − a = 0` in (0, 1), written as `a / (a + √(a(a+b)))`
    /// so the `b → 0` limit (ρ = 1/2) needs no special case.
    pub fn maximize_closed_form(&self) -> T {
        let a = self.a;
        let rho = a / (a + (a * (a + self.b)).sqrt());
        rho.max(T::zero()).min(T::one())
    }

    /// Interior-point solution of the transformed program; returns `ρ = s/t`.
    ///
    /// `tol` bounds the duality gap relative to the optimal objective. It is
    /// floored at `√ε / 10`: beyond that the slacks near the active
    /// constraint are swamped by rounding. The returned `ρ` lies on the
    /// central path and is typically far more accurate than the gap.
    pub fn maximize_interior_point(&self, tol: T) -> Result<T> {
        let floor = T::epsilon().sqrt() * T::lit(0.1);
        // Scale ψ so that its larger endpoint value on [0, 1] is one.
        let scale = self.a.max(self.a + self.b);
        interior_point(self.a / scale, (self.a + self.b) / scale, tol.max(floor))
    }
}

/// Barrier method for the transformed program
///
/// ```text
/// maximize   s·u / (s + u)
/// subject to c₁s + c₀u ≤ 1,  s ≥ 0,  u ≥ 0
/// ```
///
/// where `(s, u) = (ρ, 1 − ρ)/ψ(ρ)` and `ψ(ρ) = c₀(1 − ρ) + c₁ρ` is the
/// denominator normalized so `max(c₀, c₁) = 1`. The objective is the
/// perspective of `ρ(1 − ρ)`; both it and the constraint barrier have rank-one
/// Hessians, which keeps the 2×2 Newton system free of cancellation even when
/// one of `c₀`, `c₁` is tiny.
fn interior_point<T: Real>(c0: T, c1: T, tol: T) -> Result<T> {
    const CONSTRAINTS: f64 = 3.0;
    const MAX_NEWTON: usize = 200;
    const MAX_OUTER: usize = 100;

    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    // Strictly feasible start: ρ = 1/2 with half the constraint budget.
    let mut s = half / (c0 + c1);
    let mut u = s;
    let mut mu = one;

    let slack = |s: T, u: T| one - c1 * s - c0 * u;
    let barrier = |s: T, u: T, mu: T| -> Option<T> {
        let c = slack(s, u);
        if !(c > T::zero() && s > T::zero() && u > T::zero()) {
            return None;
        }
        Some(-mu * s * u / (s + u) - c.ln() - s.ln() - u.ln())
    };

    for _ in 0..MAX_OUTER {
        let mut centered = false;
        for _ in 0..MAX_NEWTON {
            let c = slack(s, u);
            let w = s + u;
            let gs = -mu * u * u / (w * w) - one / s + c1 / c;
            let gu = -mu * s * s / (w * w) - one / u + c0 / c;
            // H = diag(d) + α·aaᵀ + β·vvᵀ with a = (c₁, c₀), v = (u, −s).
            let (d1, d2) = (one / (s * s), one / (u * u));
            let alpha = one / (c * c);
            let beta = two * mu / (w * w * w);
            let h11 = d1 + alpha * c1 * c1 + beta * u * u;
            let h22 = d2 + alpha * c0 * c0 + beta * s * s;
            let h12 = alpha * c1 * c0 - beta * u * s;
            let cross = c1 * s + c0 * u;
            let det = d1 * d2
                + alpha * (d2 * c1 * c1 + d1 * c0 * c0)
                + beta * (d2 * u * u + d1 * s * s)
                + alpha * beta * cross * cross;
            if !(det > T::zero()) || !det.is_finite() {
                return Err(Error::NoConvergence { iterations: 0 });
            }
            let ds = -(h22 * gs - h12 * gu) / det;
            let du = -(h11 * gu - h12 * gs) / det;
            let decrement_sq = -(gs * ds + gu * du);
            let f0 = barrier(s, u, mu).expect("iterate stays strictly feasible");
            // The decrement estimates the suboptimality, which cannot be
            // resolved below the rounding of the barrier value itself.
            let resolvable = T::lit(1e-14) + T::lit(64.0) * T::epsilon() * f0.abs();
            if decrement_sq * half <= resolvable {
                centered = true;
                break;
            }
            let mut step = one;
            loop {
                let (sn, un) = (s + step * ds, u + step * du);
                if let Some(fv) = barrier(sn, un, mu) {
                    if fv <= f0 - T::lit(0.25) * step * decrement_sq {
                        s = sn;
                        u = un;
                        break;
                    }
                }
                step = step * half;
                if step < T::lit(1e-20) {
                    // No further progress at machine precision: accept the center.
                    centered = true;
                    break;
                }
            }
            if centered {
                break;
            }
        }
        if !centered {
            return Err(Error::NoConvergence { iterations: MAX_NEWTON });
        }
        let value = s * u / (s + u);
        if T::lit(CONSTRAINTS) / mu <= tol * value {
            return Ok(s / (s + u));
        }
        mu = mu * T::lit(10.0);
    }
    Err(Error::NoConvergence { iterations: MAX_OUTER })
}
