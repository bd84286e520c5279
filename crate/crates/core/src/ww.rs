//! Quantum Weiss-Weinstein bounds on discretized hybrid models.
//!
//! For each test point `(h, s)` the score operators `L(x_i)` solve
//!
//! ```text
//! D(x) = (L(x) rho(x) + rho(x) L(x)^H) / 2,
//! D(x) = [V(x + h) - V(x)] / |h|,
//! V(x) = N rho(x)^s o rho(x - h)^(1-s),
//! ```
//!
//! with `o` the Jordan product and `N` fixing `sum_i tr V(x_i) = 1`. The Gram
//! matrix `G_kk' = sum_i Re tr[L_k^H L_k' rho(x_i)]` together with
//! `C_jk = h_kj / |h_k|` gives the error-matrix bound `C (G - Delta)^-1 C^T`.
//!
//! Shifts are whole numbers of grid steps, so `V(x_i + h)` is another grid
//! entry and states beyond the grid edge are zero.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{BoundsError, Result};
use crate::models::{GridHybridModel, JointTable};
use crate::operator::{
    eig_hermitian, jordan_product, EigDecomposition, GeneralOperator, HermitianOperator, SUPPORT_TOL,
};
use crate::scalar::Scalar;

/// Pairs with `lambda_a + lambda_b <= PAIR_CUTOFF * lambda_max` are dropped from the solve.
pub const PAIR_CUTOFF: f64 = 1e-12;
/// Accepted solve residual relative to `max |D|`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Smallest admissible normalization denominator of `V`.
pub const DEGENERACY_TOL: f64 = 1e-14;
/// `G` must have smallest eigenvalue above this fraction of its largest.
pub const CONDITION_TOL: f64 = 1e-12;
/// Largest admissible `s`; the `s -> 1` end is only reached as a continuity check.
pub const MAX_EXPONENT: f64 = 1.0 - 1e-6;
const GRID_ALIGN_TOL: f64 = 1e-9;

/// Displacement `h` and interpolation exponent `s` of one score function.
#[derive(Clone, Debug, PartialEq)]
pub struct TestPoint<T> {
    pub h: Vec<T>,
    pub s: T,
}

impl<T: Scalar> TestPoint<T> {
    pub fn new(h: Vec<T>, s: T) -> Result<Self> {
        let tp = Self { h, s };
        if tp.h.is_empty() || !(tp.norm() > T::zero()) || tp.h.iter().any(|v| !v.is_finite()) {
            return Err(BoundsError::InvalidParameter(format!(
                "test point needs a finite nonzero displacement, got {:?}",
                tp.h
            )));
        }
        if !(tp.s > T::zero() && tp.s <= T::lit(MAX_EXPONENT)) {
            return Err(BoundsError::InvalidParameter(format!(
                "test point exponent must lie in (0, 1 - 1e-6], got {}",
                tp.s
            )));
        }
        Ok(tp)
    }

    /// Single-parameter test point.
    pub fn scalar(h: T, s: T) -> Result<Self> {
        Self::new(vec![h], s)
    }

    pub fn norm(&self) -> T {
        self.h.iter().map(|&v| v * v).sum::<T>().sqrt()
    }
}

/// A test point moved onto the nearest grid multiple.
#[derive(Clone, Debug, PartialEq)]
pub struct SnappedTestPoint<T> {
    pub test_point: TestPoint<T>,
    pub steps: isize,
    /// `h_snapped - h_requested`.
    pub snap_error: T,
}

/// Rounds a single-parameter displacement to the nearest nonzero multiple of `dx`.
pub fn snap_to_grid<T: Scalar>(h: T, s: T, dx: T) -> Result<SnappedTestPoint<T>> {
    let steps = (h / dx).round();
    let steps_i = steps.to_isize().unwrap_or(0);
    if steps_i == 0 {
        return Err(BoundsError::DegenerateTestPoint(format!(
            "displacement {h} rounds to zero grid steps (dx = {dx})"
        )));
    }
    let snapped = steps * dx;
    Ok(SnappedTestPoint {
        test_point: TestPoint::scalar(snapped, s)?,
        steps: steps_i,
        snap_error: snapped - h,
    })
}

fn grid_steps<T: Scalar>(model: &GridHybridModel<T>, tp: &TestPoint<T>) -> Result<isize> {
    if tp.h.len() != model.param_dim() {
        return Err(BoundsError::DimensionMismatch {
            expected: model.param_dim(),
            found: tp.h.len(),
        });
    }
    let ratio = tp.h[0] / model.dx();
    let steps = ratio.round();
    if (ratio - steps).abs() > T::tol(GRID_ALIGN_TOL) * T::one().max(steps.abs()) {
        return Err(BoundsError::InvalidParameter(format!(
            "displacement {} is not a multiple of the grid step {}; snap it first",
            tp.h[0],
            model.dx()
        )));
    }
    Ok(steps.to_isize().unwrap_or(0))
}

fn shifted(i: usize, steps: isize, len: usize) -> Option<usize> {
    let j = i as isize + steps;
    (j >= 0 && (j as usize) < len).then_some(j as usize)
}

/// Eigendecompositions of every grid state, reused across test points.
pub struct GridSpectra<T> {
    eigs: Vec<EigDecomposition<T>>,
}

impl<T: Scalar> GridSpectra<T> {
    pub fn new(model: &GridHybridModel<T>) -> Result<Self> {
        let eigs: Vec<_> = model.states().par_iter().map(eig_hermitian).collect();
        for e in &eigs {
            e.check_positive()?;
        }
        Ok(Self { eigs })
    }

    fn powers(&self, s: T) -> Result<Vec<HermitianOperator<T>>> {
        let tol = T::lit(SUPPORT_TOL);
        self.eigs.par_iter().map(|e| e.power_on_support(s, tol)).collect()
    }
}

/// `V(x_i)` for one test point.
#[derive(Clone, Debug)]
pub struct VTerms<T> {
    pub ops: Vec<HermitianOperator<T>>,
    /// `N`, the inverse of `sum_i tr[rho(x_i)^s o rho(x_i - h)^(1-s)]`.
    pub normalization: T,
}

impl<T: Scalar> VTerms<T> {
    /// `sum_i tr V(x_i) / N`, the overlap before normalization.
    pub fn raw_total(&self) -> T {
        T::one() / self.normalization
    }
}

fn build_v_with<T: Scalar>(spectra: &GridSpectra<T>, steps: isize, s: T) -> Result<VTerms<T>> {
    let lead = spectra.powers(s)?;
    let lag = spectra.powers(T::one() - s)?;
    let n = lead.len();
    let raw: Vec<HermitianOperator<T>> = (0..n)
        .into_par_iter()
        .map(|i| match shifted(i, -steps, n) {
            Some(j) => {
                jordan_product(lead[i].as_general(), lag[j].as_general()).map(|op| HermitianOperator::symmetrized(&op))
            }
            None => Ok(HermitianOperator::zeros(lead[i].dim())),
        })
        .collect::<Result<_>>()?;
    let total: T = raw.iter().map(|v| v.real_trace()).sum();
    if !(total > T::lit(DEGENERACY_TOL)) {
        return Err(BoundsError::DegenerateTestPoint(format!(
            "shifted and unshifted hybrid states are orthogonal (overlap {total:e})"
        )));
    }
    let normalization = T::one() / total;
    Ok(VTerms {
        ops: raw.into_iter().map(|v| v.scale(normalization)).collect(),
        normalization,
    })
}

/// `V(x_i) = N rho(x_i)^s o rho(x_i - h)^(1-s)`, normalized to unit total trace.
pub fn build_v<T: Scalar>(model: &GridHybridModel<T>, tp: &TestPoint<T>) -> Result<VTerms<T>> {
    let steps = grid_steps(model, tp)?;
    build_v_with(&GridSpectra::new(model)?, steps, tp.s)
}

fn build_d_from_v<T: Scalar>(v: &VTerms<T>, steps: isize, h_norm: T) -> Vec<HermitianOperator<T>> {
    let n = v.ops.len();
    let inv = T::one() / h_norm;
    (0..n)
        .map(|i| {
            let here = &v.ops[i];
            let diff = match shifted(i, steps, n) {
                Some(j) => v.ops[j].as_general() - here.as_general(),
                None => here.as_general().scale(-T::one()),
            };
            HermitianOperator::symmetrized(&diff.scale(inv))
        })
        .collect()
}

/// `D(x_i) = [V(x_i + h) - V(x_i)] / |h|`.
pub fn build_d<T: Scalar>(model: &GridHybridModel<T>, tp: &TestPoint<T>) -> Result<Vec<HermitianOperator<T>>> {
    let steps = grid_steps(model, tp)?;
    let v = build_v_with(&GridSpectra::new(model)?, steps, tp.s)?;
    Ok(build_d_from_v(&v, steps, tp.norm()))
}

/// Hermitian score operator with the residual of its defining equation.
#[derive(Clone, Debug)]
pub struct LSolution<T> {
    pub op: GeneralOperator<T>,
    /// `max |(L rho + rho L)/2 - D|`.
    pub residual: T,
}

fn solve_l_with<T: Scalar>(
    eig: &EigDecomposition<T>,
    rho: &HermitianOperator<T>,
    d: &HermitianOperator<T>,
) -> Result<LSolution<T>> {
    let n = rho.dim();
    if d.dim() != n {
        return Err(BoundsError::DimensionMismatch {
            expected: n,
            found: d.dim(),
        });
    }
    let u = &eig.eigenvectors;
    let d_eig = d.as_general().in_basis(u)?;
    let lambda: Vec<T> = eig.eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
    let cutoff = T::lit(PAIR_CUTOFF) * eig.largest().max(T::zero());
    let two = T::lit(2.0);
    let l_eig = GeneralOperator::from_fn(n, |a, b| {
        let sum = lambda[a] + lambda[b];
        if sum > cutoff {
            d_eig.get(a, b) * (two / sum)
        } else {
            Complex::zero()
        }
    });
    let op = &(u * &l_eig) * &u.adjoint();
    let lr = op.checked_mul(rho.as_general())?;
    let rl = rho.as_general() * &op;
    let residual = (&(&lr + &rl).scale(T::lit(0.5)) - d.as_general()).max_abs();
    let tolerance = T::lit(RESIDUAL_TOL) * d.as_general().max_abs();
    if residual > tolerance {
        return Err(BoundsError::UnsolvableComponent {
            residual: residual.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    Ok(LSolution { op, residual })
}

/// Hermitian solution of `(L rho + rho L)/2 = D`:
/// `L = sum 2 <a|D|b> / (lambda_a + lambda_b) |a><b|` over pairs above the cutoff.
///
/// Fails with [`BoundsError::UnsolvableComponent`] when `D` has weight on the
/// kernel-kernel block of `rho` (residual above `1e-8 max|D|`).
pub fn solve_l_hermitian<T: Scalar>(rho: &HermitianOperator<T>, d: &HermitianOperator<T>) -> Result<LSolution<T>> {
    let eig = eig_hermitian(rho);
    eig.check_positive()?;
    solve_l_with(&eig, rho, d)
}

/// Dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> RealMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(BoundsError::InvalidParameter("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Ascending eigenvalues and eigenvectors (columns) of a symmetric matrix.
    pub fn symmetric_eigen(&self) -> EigDecomposition<T> {
        let op = GeneralOperator::from_fn(self.rows, |i, j| {
            Complex::new(T::lit(0.5) * (self.get(i, j) + self.get(j, i)), T::zero())
        });
        eig_hermitian(&HermitianOperator::symmetrized(&op))
    }

    /// Solves `A X = B` for symmetric positive-definite `A` by Cholesky; `None` if `A` is not.
    pub fn cholesky_solve(&self, b: &Self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut diag = self.get(j, j);
            for k in 0..j {
                diag = diag - l.get(j, k) * l.get(j, k);
            }
            if !(diag > T::zero()) {
                return None;
            }
            let ljj = diag.sqrt();
            l.set(j, j, ljj);
            for i in (j + 1)..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v = v - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, v / ljj);
            }
        }
        let mut x = b.clone();
        for c in 0..b.cols {
            for i in 0..n {
                let mut v = x.get(i, c);
                for k in 0..i {
                    v = v - l.get(i, k) * x.get(k, c);
                }
                x.set(i, c, v / l.get(i, i));
            }
            for i in (0..n).rev() {
                let mut v = x.get(i, c);
                for k in (i + 1)..n {
                    v = v - l.get(k, i) * x.get(k, c);
                }
                x.set(i, c, v / l.get(i, i));
            }
        }
        Some(x)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, v);
            }
        }
        out
    }
}

/// Everything the covariance bound needs: `G`, `C`, `Delta` and the score operators.
#[derive(Clone, Debug)]
pub struct WwAssembly<T> {
    /// `K x K`, symmetric positive definite.
    pub g: RealMatrix<T>,
    /// `J x K`, `C_jk = h_kj / |h_k|`.
    pub c: RealMatrix<T>,
    /// `K x K`, `Delta_kk' = Im<L_k> Im<L_k'>`.
    pub delta: RealMatrix<T>,
    /// `l_ops[k][i]` is `L_k(x_i)`; empty when the assembly was built from matrices.
    pub l_ops: Vec<Vec<GeneralOperator<T>>>,
    pub test_points: Vec<TestPoint<T>>,
}

impl<T: Scalar> WwAssembly<T> {
    /// Assembly from explicit matrices, checking shapes only.
    pub fn from_parts(g: RealMatrix<T>, c: RealMatrix<T>, delta: RealMatrix<T>) -> Result<Self> {
        let k = g.rows();
        if g.cols() != k || c.cols() != k || delta.rows() != k || delta.cols() != k {
            return Err(BoundsError::DimensionMismatch {
                expected: k,
                found: c.cols(),
            });
        }
        Ok(Self {
            g,
            c,
            delta,
            l_ops: Vec::new(),
            test_points: Vec::new(),
        })
    }

    pub fn num_test_points(&self) -> usize {
        self.g.rows()
    }
}

/// `C_jk = h_kj / |h_k|`.
pub fn c_matrix<T: Scalar>(test_points: &[TestPoint<T>]) -> RealMatrix<T> {
    let j = test_points.first().map_or(0, |tp| tp.h.len());
    let mut c = RealMatrix::zeros(j, test_points.len());
    for (k, tp) in test_points.iter().enumerate() {
        let norm = tp.norm();
        for (row, &hj) in tp.h.iter().enumerate() {
            c.set(row, k, hj / norm);
        }
    }
    c
}

fn check_positive_definite<T: Scalar>(m: &RealMatrix<T>, what: &str) -> Result<()> {
    let eig = m.symmetric_eigen();
    let top = eig.largest();
    let bottom = eig.eigenvalues.first().copied().unwrap_or_else(T::zero);
    if !(top > T::zero()) || !(bottom > T::lit(CONDITION_TOL) * top) {
        let v = eig.eigenvector(0);
        let offending: Vec<usize> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > T::lit(0.1))
            .map(|(k, _)| k)
            .collect();
        return Err(BoundsError::SingularAssembly {
            test_points: offending,
            detail: format!("{what} eigenvalues span [{:e}, {:e}]", bottom.as_f64(), top.as_f64()),
        });
    }
    Ok(())
}

/// Solves for every `L_k(x_i)` and assembles `G`, `C` and `Delta`.
pub fn assemble<T: Scalar>(model: &GridHybridModel<T>, test_points: &[TestPoint<T>]) -> Result<WwAssembly<T>> {
    if test_points.is_empty() {
        return Err(BoundsError::InvalidParameter("need at least one test point".into()));
    }
    let spectra = GridSpectra::new(model)?;
    let n = model.len();
    let mut l_ops: Vec<Vec<GeneralOperator<T>>> = Vec::with_capacity(test_points.len());
    for tp in test_points {
        let steps = grid_steps(model, tp)?;
        let v = build_v_with(&spectra, steps, tp.s)?;
        let d = build_d_from_v(&v, steps, tp.norm());
        let ls: Vec<GeneralOperator<T>> = (0..n)
            .into_par_iter()
            .map(|i| solve_l_with(&spectra.eigs[i], model.state(i), &d[i]).map(|sol| sol.op))
            .collect::<Result<_>>()?;
        l_ops.push(ls);
    }

    let k = test_points.len();
    // per-grid-point contributions, reduced in grid order so the sum is thread-count independent
    let contributions: Vec<(Vec<T>, Vec<Complex<T>>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = model.state(i).as_general();
            let l_rho: Vec<GeneralOperator<T>> = (0..k).map(|a| &l_ops[a][i] * rho).collect();
            let mut g = vec![T::zero(); k * k];
            for a in 0..k {
                for b in a..k {
                    // Re tr(L_a^H L_b rho) = Re sum conj(L_a)_{ji} (L_b rho)_{ji}
                    let v: T = l_ops[a][i]
                        .entries()
                        .iter()
                        .zip(l_rho[b].entries())
                        .map(|(x, y)| (x.conj() * y).re)
                        .sum();
                    g[a * k + b] = v;
                    g[b * k + a] = v;
                }
            }
            let means = l_rho.iter().map(|m| m.trace()).collect();
            (g, means)
        })
        .collect();

    let mut g = RealMatrix::zeros(k, k);
    let mut means = vec![Complex::<T>::zero(); k];
    for (gi, mi) in &contributions {
        for a in 0..k {
            for b in 0..k {
                g.set(a, b, g.get(a, b) + gi[a * k + b]);
            }
            means[a] = means[a] + mi[a];
        }
    }
    let mut delta = RealMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            delta.set(a, b, means[a].im * means[b].im);
        }
    }
    check_positive_definite(&g, "G")?;
    Ok(WwAssembly {
        g,
        c: c_matrix(test_points),
        delta,
        l_ops,
        test_points: test_points.to_vec(),
    })
}

/// Lower bound on the error matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundMatrix<T> {
    pub value: RealMatrix<T>,
}

impl<T: Scalar> BoundMatrix<T> {
    /// The `1 x 1` bound of a single-parameter problem.
    pub fn scalar(&self) -> T {
        self.value.get(0, 0)
    }
}

/// `C (G - Delta)^-1 C^T`.
pub fn covariance_bound<T: Scalar>(asm: &WwAssembly<T>) -> Result<BoundMatrix<T>> {
    let reduced = asm.g.sub(&asm.delta);
    check_positive_definite(&reduced, "G - Delta")?;
    let ct = asm.c.transpose();
    let x = reduced
        .cholesky_solve(&ct)
        .ok_or_else(|| BoundsError::SingularAssembly {
            test_points: (0..asm.num_test_points()).collect(),
            detail: "Cholesky factorization of G - Delta failed".into(),
        })?;
    let raw = asm.c.matmul(&x);
    let j = raw.rows();
    let mut value = RealMatrix::zeros(j, j);
    for a in 0..j {
        for b in 0..j {
            value.set(a, b, T::lit(0.5) * (raw.get(a, b) + raw.get(b, a)));
        }
    }
    Ok(BoundMatrix { value })
}

/// Single-test-point grid bound `1 / G` of a single-parameter model.
pub fn grid_bound<T: Scalar>(model: &GridHybridModel<T>, tp: &TestPoint<T>) -> Result<T> {
    let asm = assemble(model, std::slice::from_ref(tp))?;
    Ok(covariance_bound(&asm)?.scalar())
}

/// Classical Weiss-Weinstein bound of a joint table: `1 / E[L^2]` with
/// `L = N/|h| {[p(x+h,y)/p(x,y)]^s - [p(x-h,y)/p(x,y)]^(1-s)}` and
/// `N = E[(p(x+h,y)/p(x,y))^s]^-1`.
pub fn classical_ww<T: Scalar>(table: &JointTable<T>, tp: &TestPoint<T>) -> Result<T> {
    if tp.h.len() != 1 {
        return Err(BoundsError::DimensionMismatch {
            expected: 1,
            found: tp.h.len(),
        });
    }
    let ratio = tp.h[0] / table.dx;
    let steps_f = ratio.round();
    if (ratio - steps_f).abs() > T::tol(GRID_ALIGN_TOL) * T::one().max(steps_f.abs()) {
        return Err(BoundsError::InvalidParameter(
            "displacement is not a grid multiple".into(),
        ));
    }
    let steps = steps_f.to_isize().unwrap_or(0);
    let n = table.grid.len();
    let ny = table.outcomes();
    let s = tp.s;
    let at = |i: usize, shift: isize, y: usize| shifted(i, shift, n).map_or(T::zero(), |j| table.probs[j][y]);

    let mut overlap = T::zero();
    for i in 0..n {
        for y in 0..ny {
            let p = table.probs[i][y];
            if p > T::zero() {
                overlap = overlap + at(i, steps, y).powf(s) * p.powf(T::one() - s);
            }
        }
    }
    if !(overlap > T::lit(DEGENERACY_TOL)) {
        return Err(BoundsError::DegenerateTestPoint(format!(
            "shifted likelihoods do not overlap ({overlap:e})"
        )));
    }
    let scale = T::one() / (overlap * tp.norm());
    let mut second_moment = T::zero();
    for i in 0..n {
        for y in 0..ny {
            let p = table.probs[i][y];
            if p > T::zero() {
                let up = (at(i, steps, y) / p).powf(s);
                let down = (at(i, -steps, y) / p).powf(T::one() - s);
                let l = scale * (up - down);
                second_moment = second_moment + p * l * l;
            }
        }
    }
    Ok(T::one() / second_moment)
}
