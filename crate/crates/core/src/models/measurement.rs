//! POVMs, the joint distribution they induce on a grid model, sampling from
//! it, and the conditional-mean estimator.

use num_complex::Complex;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{BoundsError, Result};
use crate::operator::{GeneralOperator, HermitianOperator};
use crate::scalar::Scalar;

use super::grid::GridHybridModel;

const COMPLETENESS_TOL: f64 = 1e-9;
const ELEMENT_POSITIVITY_TOL: f64 = 1e-10;
const JOINT_NEGATIVITY_TOL: f64 = 1e-10;

/// Positive operator-valued measure.
#[derive(Clone, Debug)]
pub struct Povm<T> {
    elements: Vec<HermitianOperator<T>>,
}

impl<T: Scalar> Povm<T> {
    /// Validates positivity of each element (`>= -1e-10`) and completeness within `1e-9`.
    pub fn new(elements: Vec<HermitianOperator<T>>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(BoundsError::InvalidParameter("POVM needs at least one element".into()));
        };
        let dim = first.dim();
        let mut sum = GeneralOperator::zeros(dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(BoundsError::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            let eig = crate::operator::eig_hermitian(e);
            if let Some(&lowest) = eig.eigenvalues.first() {
                if lowest < -T::lit(ELEMENT_POSITIVITY_TOL) {
                    return Err(BoundsError::Negative {
                        eigenvalue: lowest.as_f64(),
                        largest: eig.largest().as_f64(),
                    });
                }
            }
            sum = &sum + e.as_general();
        }
        let deviation = (&sum - &GeneralOperator::identity(dim)).max_abs();
        if deviation > T::tol(COMPLETENESS_TOL) {
            return Err(BoundsError::InvalidParameter(format!(
                "POVM elements sum to identity only within {deviation:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// The uninformative single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    /// Projective measurement in the basis given by the columns of `basis`.
    pub fn projective(basis: &GeneralOperator<T>) -> Result<Self> {
        let n = basis.dim();
        let elements = (0..n)
            .map(|k| {
                let v: Vec<Complex<T>> = (0..n).map(|i| basis.get(i, k)).collect();
                HermitianOperator::projector(&v)
            })
            .collect();
        Self::new(elements)
    }

    /// Computational-basis measurement.
    pub fn computational(dim: usize) -> Self {
        Self::projective(&GeneralOperator::identity(dim)).expect("identity basis is a valid POVM")
    }

    /// Rank-one elements `w_k |phi_k><phi_k|`.
    pub fn from_weighted_vectors(items: &[(T, Vec<Complex<T>>)]) -> Result<Self> {
        Self::new(
            items
                .iter()
                .map(|(w, v)| HermitianOperator::projector(v).scale(*w))
                .collect(),
        )
    }

    /// Symmetric qubit trine `(2/3)|phi_k><phi_k|`, `phi_k = (|0> + e^{2 pi i k/3}|1>)/sqrt 2`.
    pub fn qubit_trine() -> Self {
        let r = T::FRAC_1_SQRT_2();
        let items: Vec<(T, Vec<Complex<T>>)> = (0..3)
            .map(|k| {
                let angle = T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / T::lit(3.0);
                (
                    T::lit(2.0) / T::lit(3.0),
                    vec![Complex::new(r, T::zero()), Complex::from_polar(r, angle)],
                )
            })
            .collect();
        Self::from_weighted_vectors(&items).expect("trine is a valid POVM")
    }

    pub fn elements(&self) -> &[HermitianOperator<T>] {
        &self.elements
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Joint distribution `p(x_i, y)` on a uniform grid, indexed `[i][y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable<T> {
    pub grid: Vec<T>,
    pub dx: T,
    pub probs: Vec<Vec<T>>,
}

impl<T: Scalar> JointTable<T> {
    pub fn new(grid: Vec<T>, dx: T, probs: Vec<Vec<T>>) -> Result<Self> {
        if grid.len() != probs.len() || probs.is_empty() {
            return Err(BoundsError::DimensionMismatch {
                expected: grid.len(),
                found: probs.len(),
            });
        }
        let outcomes = probs[0].len();
        if probs.iter().any(|row| row.len() != outcomes) {
            return Err(BoundsError::InvalidParameter("ragged joint table".into()));
        }
        let total: T = probs.iter().flatten().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-8) {
            return Err(BoundsError::InvalidParameter(format!("joint table sums to {total}")));
        }
        Ok(Self { grid, dx, probs })
    }

    pub fn outcomes(&self) -> usize {
        self.probs[0].len()
    }

    /// Conditional-mean estimate `E[x | y]` for each outcome (prior mean when `p(y) = 0`).
    pub fn conditional_means(&self) -> Vec<T> {
        let prior_mean: T = self
            .grid
            .iter()
            .zip(&self.probs)
            .map(|(&x, row)| x * row.iter().copied().sum::<T>())
            .sum();
        (0..self.outcomes())
            .map(|y| {
                let (num, den) = self
                    .grid
                    .iter()
                    .zip(&self.probs)
                    .fold((T::zero(), T::zero()), |(n, d), (&x, row)| (n + x * row[y], d + row[y]));
                if den > T::zero() {
                    num / den
                } else {
                    prior_mean
                }
            })
            .collect()
    }

    /// Exact mean-square error of an estimator `y -> estimates[y]`.
    pub fn mse(&self, estimates: &[T]) -> T {
        self.grid
            .iter()
            .zip(&self.probs)
            .map(|(&x, row)| {
                row.iter()
                    .zip(estimates)
                    .map(|(&p, &e)| p * (e - x) * (e - x))
                    .sum::<T>()
            })
            .sum()
    }
}

impl<T: Scalar> GridHybridModel<T> {
    /// `p(x_i, y) = tr[E_y rho(x_i)]`; small negative rounding is clamped to zero.
    pub fn joint_table(&self, povm: &Povm<T>) -> Result<JointTable<T>> {
        if povm.dim() != self.dim() {
            return Err(BoundsError::DimensionMismatch {
                expected: self.dim(),
                found: povm.dim(),
            });
        }
        let floor = -T::lit(JOINT_NEGATIVITY_TOL);
        let mut probs = Vec::with_capacity(self.len());
        for rho in self.states() {
            let mut row = Vec::with_capacity(povm.outcomes());
            for e in povm.elements() {
                let p = e.as_general().checked_mul(rho.as_general())?.trace().re;
                if p < floor {
                    return Err(BoundsError::InconsistentModel {
                        probability: p.as_f64(),
                    });
                }
                row.push(p.max(T::zero()));
            }
            probs.push(row);
        }
        JointTable::new(self.grid().to_vec(), self.dx(), probs)
    }
}

/// One draw of `(x, y)` from the joint distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample<T> {
    pub x_index: usize,
    pub x: T,
    pub outcome: usize,
}

/// `trials` i.i.d. draws from `p(x_i, y) = tr[E_y rho(x_i)]`, reproducible for a given seed.
pub fn simulate_measurement<T: Scalar>(
    model: &GridHybridModel<T>,
    povm: &Povm<T>,
    trials: usize,
    seed: u64,
) -> Result<Vec<Sample<T>>> {
    if trials == 0 {
        return Err(BoundsError::InvalidParameter("need at least one trial".into()));
    }
    let table = model.joint_table(povm)?;
    sample_table(&table, trials, seed)
}

pub fn sample_table<T: Scalar>(table: &JointTable<T>, trials: usize, seed: u64) -> Result<Vec<Sample<T>>> {
    let outcomes = table.outcomes();
    let flat: Vec<f64> = table.probs.iter().flatten().map(|p| p.as_f64()).collect();
    let dist = WeightedIndex::new(&flat)
        .map_err(|e| BoundsError::InvalidParameter(format!("joint table cannot be sampled: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials)
        .map(|_| {
            let k = dist.sample(&mut rng);
            let x_index = k / outcomes;
            Sample {
                x_index,
                x: table.grid[x_index],
                outcome: k % outcomes,
            }
        })
        .collect())
}

/// Empirical mean-square error with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalMse<T> {
    pub mse: T,
    pub std_error: T,
    pub trials: usize,
}

/// Empirical MSE of the estimator `y -> estimates[y]` over the samples.
pub fn empirical_mse<T: Scalar>(samples: &[Sample<T>], estimates: &[T]) -> EmpiricalMse<T> {
    let n = T::from_usize_lossy(samples.len());
    let sq: Vec<T> = samples
        .iter()
        .map(|s| {
            let e = estimates[s.outcome] - s.x;
            e * e
        })
        .collect();
    let mean = sq.iter().copied().sum::<T>() / n;
    let var = sq.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one()).max(T::one());
    EmpiricalMse {
        mse: mean,
        std_error: (var / n).sqrt(),
        trials: samples.len(),
    }
}
