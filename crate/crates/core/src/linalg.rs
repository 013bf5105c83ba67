//! Dense complex linear algebra for the relay optimizations.
//!
//! Only what the relay design needs: Kronecker products, the Hermitian
//! Cholesky factorization in the `M = LᴴL` convention (upper-triangular `L`),
//! triangular and Hermitian solves, power iteration for the dominant
//! eigenpair, and a small one-sided Jacobi SVD used by the diagnostics.
//!
//! Vectorization is column-stacking throughout: `vec(A)` lists the first
//! column, then the second, and so on.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

const EIGEN_START_SEED: u64 = 0x5eed_e16e;
const STALL_WINDOW: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T> {
    data: Vec<Complex<T>>,
}

impl<T: Real> Vector<T> {
    /// Validated constructor: nonempty with finite entries.
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput("vector must be nonempty".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("vector entries must be finite".into()));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![Complex::zero(); n],
        }
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[k] = Complex::one();
        v
    }

    pub fn from_real(values: &[T]) -> Self {
        Self {
            data: values.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.data.iter()
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `selfᴴ · other`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Plain bilinear product `selfᵀ · other` (no conjugation).
    pub fn dot(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale(n.recip()))
        } else {
            None
        }
    }

    /// Kronecker product of two column vectors.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.len() * other.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Self { data }
    }

    /// Rotates by a global phase so that the first entry that is not negligible
    /// (relative to the largest magnitude) is real and nonnegative.
    pub fn normalize_phase(&self) -> Self {
        let max = self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        if max == T::zero() {
            return self.clone();
        }
        let thresh = max * T::lit(1e-8);
        let pivot = self
            .data
            .iter()
            .find(|z| z.norm() > thresh)
            .copied()
            .unwrap_or_else(Complex::one);
        let rot = pivot.conj() / pivot.norm();
        let mut out = self.scale_complex(rot);
        // Make the pivot exactly real.
        if let Some(z) = out.data.iter_mut().find(|z| z.norm() > thresh) {
            *z = Complex::new(z.norm(), T::zero());
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut Complex<T> {
        &mut self.data[i]
    }
}

impl<T: Real> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        Vector::from_vec(self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl<T: Real> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        Vector::from_vec(self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major entries; fails if the length is not `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::from_diag(&d)
    }

    /// `x · yᴴ`
    pub fn outer(x: &Vector<T>, y: &Vector<T>) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    /// Reshapes a column-stacked vector into a `rows × cols` matrix.
    pub fn unvec(v: &Vector<T>, rows: usize, cols: usize) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape length {} into {rows}x{cols}",
                v.len()
            )));
        }
        Ok(Self::from_fn(rows, cols, |i, j| v[j * rows + i]))
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Vector<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)]);
            }
        }
        Vector::from_vec(data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn mul_vec(&self, x: &Vector<T>) -> Vector<T> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        Vector::from_vec(
            self.data
                .chunks_exact(self.cols)
                .map(|row| {
                    row.iter()
                        .zip(x.iter())
                        .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    /// Real part of `xᴴ M x`; exact for Hermitian `M` up to roundoff.
    pub fn quadratic_form(&self, x: &Vector<T>) -> T {
        x.inner(&self.mul_vec(x)).re
    }

    /// Relative Hermitian defect `‖M − Mᴴ‖_F / ‖M‖_F` is at most `tol`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.frobenius_norm();
        let mut defect = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                defect = defect + (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        defect.sqrt() <= tol * scale
    }

    /// Averages with the adjoint, removing roundoff asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * T::lit(0.5)
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = Matrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s.is_zero() {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Cholesky factorization `M = LᴴL` with `L` upper triangular and a real
/// positive diagonal.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    factor: Matrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Reads only the upper triangle of `m`.
    pub fn new(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky of a {}x{} matrix",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            let mut d = m[(i, i)].re;
            for k in 0..i {
                d = d - l[(k, i)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: d.to_f64_lossy(),
                });
            }
            let lii = d.sqrt();
            l[(i, i)] = Complex::new(lii, T::zero());
            for j in (i + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..i {
                    s = s - l[(k, i)].conj() * l[(k, j)];
                }
                l[(i, j)] = s / lii;
            }
        }
        Ok(Self { factor: l })
    }

    /// The upper-triangular factor `L`.
    pub fn factor(&self) -> &Matrix<T> {
        &self.factor
    }

    pub fn into_factor(self) -> Matrix<T> {
        self.factor
    }

    pub fn dim(&self) -> usize {
        self.factor.rows
    }

    /// `L⁻¹ b` by back substitution.
    pub fn solve_factor(&self, b: &Vector<T>) -> Vector<T> {
        let l = &self.factor;
        let n = l.rows;
        assert_eq!(b.len(), n);
        let mut x = b.clone();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - l[(i, j)] * x[j];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// `L⁻ᴴ b` by forward substitution on the lower-triangular `Lᴴ`.
    pub fn solve_factor_adjoint(&self, b: &Vector<T>) -> Vector<T> {
        let l = &self.factor;
        let n = l.rows;
        assert_eq!(b.len(), n);
        let mut x = b.clone();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s = s - l[(k, i)].conj() * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// `M⁻¹ b`
    pub fn solve(&self, b: &Vector<T>) -> Vector<T> {
        self.solve_factor(&self.solve_factor_adjoint(b))
    }

    /// Explicit `L⁻¹`, column by column.
    pub fn factor_inverse(&self) -> Matrix<T> {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.solve_factor(&Vector::basis(n, j));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Upper-triangular `L` with `LᴴL = m`.
pub fn cholesky_hermitian<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    Cholesky::new(m).map(Cholesky::into_factor)
}

/// Solves `m x = b` for Hermitian positive definite `m`.
pub fn solve_hermitian<T: Real>(m: &Matrix<T>, b: &Vector<T>) -> Result<Vector<T>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for a {}x{} system",
            b.len(),
            m.rows,
            m.cols
        )));
    }
    Ok(Cholesky::new(m)?.solve(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: Vector<T>,
}

/// Dominant eigenpair of a Hermitian positive semidefinite matrix by power
/// iteration.
pub fn dominant_eigenpair<T: Real>(m: &Matrix<T>, tol: T, max_iters: usize) -> Result<EigenPair<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenpair of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    dominant_eigenpair_by(m.rows, |v| m.mul_vec(v), tol, max_iters)
}

/// Power iteration against a linear operator given as a closure, for
/// operators that are cheaper to apply than to form.
///
/// Stops when `‖Av − λv‖ ≤ tol·λ` with `λ` the Rayleigh quotient at `v`.
/// The start vector is drawn from a fixed seed, so results are reproducible.
pub fn dominant_eigenpair_by<T, F>(n: usize, mut apply: F, tol: T, max_iters: usize) -> Result<EigenPair<T>>
where
    T: Real,
    F: FnMut(&Vector<T>) -> Vector<T>,
{
    if n == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EIGEN_START_SEED);
    let start: Vec<Complex<T>> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    let mut v = Vector::from_vec(start)
        .normalized()
        .expect("gaussian start vector is nonzero");

    // Ill-conditioned operators (applied through triangular solves) have a
    // residual floor above `tol`; accept once the relative residual sits below
    // √ε and has stopped improving.
    let floor = T::epsilon().sqrt();
    let mut best_residual = T::infinity();
    let mut stalled = 0usize;
    for _ in 0..max_iters {
        let w = apply(&v);
        let lambda = v.inner(&w).re;
        let w_norm = w.norm();
        if w_norm == T::zero() {
            // Zero operator: every unit vector is an eigenvector for 0.
            return Ok(EigenPair {
                value: T::zero(),
                vector: v.normalize_phase(),
            });
        }
        let rel = (&w - &v.scale(lambda)).norm() / lambda.abs();
        if rel <= tol || (stalled >= STALL_WINDOW && rel <= floor) {
            let vector = v.normalize_phase();
            let value = vector.inner(&apply(&vector)).re;
            return Ok(EigenPair { value, vector });
        }
        if rel < best_residual {
            best_residual = rel;
            stalled = 0;
        } else {
            stalled += 1;
        }
        v = w.scale(w_norm.recip());
    }
    Err(Error::NoConvergence { iterations: max_iters })
}

/// Singular value decomposition `A = U·diag(σ)·Vᴴ` of a square matrix, with
/// `σ` descending and `U`, `V` unitary.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub singular_values: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD. Columns belonging to numerically zero
/// singular values are completed to an orthonormal basis.
pub fn svd<T: Real>(a: &Matrix<T>) -> Result<Svd<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("svd expects a square matrix".into()));
    }
    let n = a.rows;
    let mut w: Vec<Vector<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vector<T>> = (0..n).map(|j| Vector::basis(n, j)).collect();
    let eps = T::epsilon();
    let max_sweeps = 80;

    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w[p].norm_sqr();
                let beta = w[q].norm_sqr();
                let gamma = w[p].inner(&w[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = if zeta >= T::zero() {
                    (zeta + (T::one() + zeta * zeta).sqrt()).recip()
                } else {
                    -(-zeta + (T::one() + zeta * zeta).sqrt()).recip()
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                // Columns p, q ← [p q]·J with J = [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]].
                let e = phase.conj();
                rotate_pair(&mut w, p, q, c, s, e);
                rotate_pair(&mut vcols, p, q, c, s, e);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: max_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = w.iter().map(Vector::norm).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma_max = norms[order[0]];
    let cutoff = sigma_max * eps * T::lit(n as f64 * 16.0);

    let mut ucols: Vec<Vector<T>> = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    let mut v = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > cutoff {
            ucols.push(w[j].scale(s.recip()));
            singular_values.push(s);
        } else {
            singular_values.push(T::zero());
        }
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
    }
    complete_orthonormal_basis(&mut ucols, n);
    let u = Matrix::from_fn(n, n, |i, j| ucols[j][i]);
    Ok(Svd { u, singular_values, v })
}

#[allow(clippy::needless_range_loop)] // two columns indexed in lockstep
fn rotate_pair<T: Real>(cols: &mut [Vector<T>], p: usize, q: usize, c: T, s: T, e: Complex<T>) {
    let n = cols[p].len();
    for i in 0..n {
        let xp = cols[p][i];
        let xq = cols[q][i];
        cols[p][i] = xp * c - xq * e * s;
        cols[q][i] = xp * s + xq * e * c;
    }
}

/// Extends an orthonormal set to a basis of `C^n` by Gram–Schmidt over the
/// standard basis vectors.
fn complete_orthonormal_basis<T: Real>(cols: &mut Vec<Vector<T>>, n: usize) {
    while cols.len() < n {
        let mut best: Option<Vector<T>> = None;
        let mut best_norm = T::zero();
        for k in 0..n {
            let mut cand = Vector::basis(n, k);
            for _ in 0..2 {
                for q in cols.iter() {
                    let proj = q.inner(&cand);
                    cand = &cand - &q.scale_complex(proj);
                }
            }
            let nrm = cand.norm();
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(cand);
            }
        }
        let b = best.expect("a standard basis vector escapes any proper subspace");
        cols.push(b.scale(best_norm.recip()));
    }
}
