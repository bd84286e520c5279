//! Dense complex operator algebra on small Hilbert spaces.
//!
//! Everything here is sized for the model dimensions the bounds need (a
//! handful to a few hundred levels). Matrices are stored row-major.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{BoundsError, Result};
use crate::scalar::Scalar;

/// Absolute per-entry tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative support cutoff: eigenvalues at or below `SUPPORT_TOL * lambda_max` are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Eigenvalues above `-NEGATIVITY_TOL * lambda_max` are clamped to zero; anything below is an error.
pub const NEGATIVITY_TOL: f64 = 1e-8;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Square complex matrix with no structural guarantees.
#[derive(Clone, PartialEq)]
pub struct GeneralOperator<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> GeneralOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.data[i * dim + i] = Complex::one();
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(BoundsError::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    /// Real matrix from rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Complex::new(T::lit(v), T::zero())).collect())
                .collect(),
        )
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut out = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            out.data[i * dim + i] = Complex::new(d, T::zero());
        }
        out
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(BoundsError::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.data[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(Complex::zero(), |a, b| a + b)
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(BoundsError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j) * v[j])
                    .fold(Complex::zero(), |a, b| a + b)
            })
            .collect())
    }

    /// `U^H A U`, i.e. this operator written in the basis given by the columns of `basis`.
    pub fn in_basis(&self, basis: &Self) -> Result<Self> {
        basis.adjoint().checked_mul(&self.checked_mul(basis)?)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(BoundsError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for GeneralOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GeneralOperator({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = &self.data[i * self.dim + j];
                write!(f, "({:?}, {:?})  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Mul for &GeneralOperator<T> {
    type Output = GeneralOperator<T>;

    /// Panics on dimension mismatch; use [`GeneralOperator::checked_mul`] for fallible code paths.
    fn mul(self, rhs: Self) -> GeneralOperator<T> {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl<T: Scalar> Add for &GeneralOperator<T> {
    type Output = GeneralOperator<T>;

    fn add(self, rhs: Self) -> GeneralOperator<T> {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &GeneralOperator<T> {
    type Output = GeneralOperator<T>;

    fn sub(self, rhs: Self) -> GeneralOperator<T> {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Square complex matrix that equals its adjoint within [`HERMITIAN_TOL`].
#[derive(Clone, PartialEq)]
pub struct HermitianOperator<T>(GeneralOperator<T>);

impl<T: Scalar> HermitianOperator<T> {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] (absolute, per entry).
    pub fn new(op: GeneralOperator<T>) -> Result<Self> {
        let deviation = op.hermitian_deviation();
        if deviation > T::tol(HERMITIAN_TOL) || deviation.is_nan() {
            return Err(BoundsError::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self(op))
    }

    /// `(A + A^H)/2`; used on results that are Hermitian up to rounding.
    pub fn symmetrized(op: &GeneralOperator<T>) -> Self {
        let half = T::lit(0.5);
        Self(GeneralOperator::from_fn(op.dim, |i, j| {
            (op.get(i, j) + op.get(j, i).conj()) * half
        }))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(GeneralOperator::from_real_rows(rows)?)
    }

    pub fn diagonal(diag: &[T]) -> Self {
        Self(GeneralOperator::diagonal(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self(GeneralOperator::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(GeneralOperator::zeros(dim))
    }

    /// Pure-state projector `|psi><psi|` (not renormalized).
    pub fn projector(psi: &[Complex<T>]) -> Self {
        Self(GeneralOperator::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0.get(i, j)
    }

    pub fn as_general(&self) -> &GeneralOperator<T> {
        &self.0
    }

    pub fn into_general(self) -> GeneralOperator<T> {
        self.0
    }

    pub fn real_trace(&self) -> T {
        self.0.trace().re
    }

    pub fn scale(&self, factor: T) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.checked_add(&other.0)?))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.checked_sub(&other.0)?))
    }

    /// Checks the density-operator invariants: eigenvalues at least `-1e-10` and
    /// trace within `1e-10` of `expected_trace`.
    pub fn validate_state(&self, expected_trace: T) -> Result<()> {
        let tol = T::lit(1e-10);
        let trace = self.real_trace();
        if (trace - expected_trace).abs() > tol {
            return Err(BoundsError::InvalidState(format!(
                "trace {trace} differs from {expected_trace}"
            )));
        }
        let eig = eig_hermitian(self);
        if let Some(&lowest) = eig.eigenvalues.first() {
            if lowest < -tol {
                return Err(BoundsError::Negative {
                    eigenvalue: lowest.as_f64(),
                    largest: eig.eigenvalues.last().copied().unwrap_or(lowest).as_f64(),
                });
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for HermitianOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

/// Spectral decomposition `A = V diag(eigenvalues) V^H` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigDecomposition<T> {
    pub eigenvalues: Vec<T>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: GeneralOperator<T>,
}

impl<T: Scalar> EigDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn largest(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    pub fn reconstruct(&self) -> GeneralOperator<T> {
        self.map_spectrum(|l| Some(l))
    }

    /// `sum_k f(lambda_k) |k><k|`, skipping eigenvalues where `f` returns `None`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> Option<T>) -> GeneralOperator<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Option<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        GeneralOperator::from_fn(n, |i, j| {
            let mut acc = Complex::zero();
            for (k, w) in weights.iter().enumerate() {
                if let Some(w) = *w {
                    acc = acc + v.get(i, k) * v.get(j, k).conj() * w;
                }
            }
            acc
        })
    }

    /// Largest eigenvalue magnitude used as the reference for relative cutoffs.
    fn reference_scale(&self) -> T {
        let top = self.largest();
        if top > T::zero() {
            top
        } else {
            self.eigenvalues.iter().fold(T::zero(), |m, l| m.max(l.abs()))
        }
    }

    /// Fails if any eigenvalue is more negative than `-NEGATIVITY_TOL * lambda_max`.
    pub fn check_positive(&self) -> Result<()> {
        let scale = self.reference_scale();
        let floor = -T::lit(NEGATIVITY_TOL) * scale;
        match self.eigenvalues.first() {
            Some(&lowest) if lowest < floor => Err(BoundsError::Negative {
                eigenvalue: lowest.as_f64(),
                largest: self.largest().as_f64(),
            }),
            _ => Ok(()),
        }
    }

    /// Cutoff below which an eigenvalue is outside the support.
    pub fn support_cutoff(&self, support_tol: T) -> T {
        support_tol * self.largest().max(T::zero())
    }

    /// Indicator of eigenvalues strictly above the support cutoff.
    pub fn support_mask(&self, support_tol: T) -> Vec<bool> {
        let cutoff = self.support_cutoff(support_tol);
        let top = self.largest();
        self.eigenvalues
            .iter()
            .map(|&l| top > T::zero() && l > cutoff)
            .collect()
    }

    /// `rho^s` restricted to the support; see [`frac_power_on_support`].
    pub fn power_on_support(&self, s: T, support_tol: T) -> Result<HermitianOperator<T>> {
        self.check_positive()?;
        let cutoff = self.support_cutoff(support_tol);
        if self.largest() <= T::zero() {
            return Ok(HermitianOperator::zeros(self.dim()));
        }
        let powered = self.map_spectrum(|l| if l > cutoff { Some(l.powf(s)) } else { None });
        Ok(HermitianOperator::symmetrized(&powered))
    }
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending; eigenvectors are the matching columns.
pub fn eig_hermitian<T: Scalar>(a: &HermitianOperator<T>) -> EigDecomposition<T> {
    let n = a.dim();
    let mut m: Vec<Complex<T>> = a.as_general().entries().to_vec();
    let mut v = GeneralOperator::<T>::identity(n).data;
    let idx = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        m[idx(i, i)] = Complex::new(m[idx(i, i)].re, T::zero());
    }

    let norm = m.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let stop = T::epsilon() * T::lit(1e-2) * norm;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[idx(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                let r = apq.norm();
                if r.is_zero() {
                    continue;
                }
                // Phase-rotate q so the pivot is real, then a real Givens rotation.
                let w = (apq / r).conj();
                let app = m[idx(p, p)].re;
                let aqq = m[idx(q, q)].re;
                let two = T::one() + T::one();
                let theta = (two * r).atan2(aqq - app) / two;
                let (s, c) = theta.sin_cos();
                let u_pp = Complex::new(c, T::zero());
                let u_pq = Complex::new(s, T::zero());
                let u_qp = w * (-s);
                let u_qq = w * c;

                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = akp * u_pp + akq * u_qp;
                    m[idx(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    m[idx(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                m[idx(p, q)] = Complex::zero();
                m[idx(q, p)] = Complex::zero();
                m[idx(p, p)] = Complex::new(m[idx(p, p)].re, T::zero());
                m[idx(q, q)] = Complex::new(m[idx(q, q)].re, T::zero());

                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[idx(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[idx(i, i)]
            .re
            .partial_cmp(&m[idx(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&k| m[idx(k, k)].re).collect();
    let eigenvectors = GeneralOperator::from_fn(n, |i, col| v[idx(i, order[col])]);
    EigDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Validating entry point: checks squareness and Hermiticity of a raw matrix first.
pub fn eig_general_checked<T: Scalar>(a: &GeneralOperator<T>) -> Result<EigDecomposition<T>> {
    Ok(eig_hermitian(&HermitianOperator::new(a.clone())?))
}

/// `sum_{lambda > support_tol * lambda_max} lambda^s |a><a|`.
///
/// `s = 0` gives the support projector and negative `s` the generalized inverse
/// power. Eigenvalues in `[-1e-8 lambda_max, cutoff]` are treated as zero.
pub fn frac_power_on_support<T: Scalar>(
    rho: &HermitianOperator<T>,
    s: T,
    support_tol: T,
) -> Result<HermitianOperator<T>> {
    eig_hermitian(rho).power_on_support(s, support_tol)
}

/// Jordan product `(AB + BA)/2`.
pub fn jordan_product<T: Scalar>(a: &GeneralOperator<T>, b: &GeneralOperator<T>) -> Result<GeneralOperator<T>> {
    let ab = a.checked_mul(b)?;
    let ba = b * a;
    Ok((&ab + &ba).scale(T::lit(0.5)))
}

/// `Re tr(A^H B rho)`.
pub fn real_trace_form<T: Scalar>(
    a: &GeneralOperator<T>,
    b: &GeneralOperator<T>,
    rho: &HermitianOperator<T>,
) -> Result<T> {
    let n = a.dim();
    if b.dim() != n || rho.dim() != n {
        return Err(BoundsError::DimensionMismatch {
            expected: n,
            found: if b.dim() != n { b.dim() } else { rho.dim() },
        });
    }
    // tr(A^H B rho) = sum_{i,j,k} conj(A_ji) B_jk rho_ki
    let br = b.checked_mul(rho.as_general())?;
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + (a.get(j, i).conj() * br.get(j, i)).re;
        }
    }
    Ok(acc)
}
