use crate::error::{BoundsError, Result};
use crate::operator::{GeneralOperator, HermitianOperator};
use crate::scalar::Scalar;

use super::phase::PhaseModel;
use super::prior::TabulatedPrior;

const TOTAL_TRACE_TOL: f64 = 1e-8;

/// Hybrid state `rho(x_i) = rho_{x_i} p(x_i) dx` on a uniform grid of a single parameter.
///
/// Each entry is a sub-normalized operator; the traces sum to one.
#[derive(Clone, Debug)]
pub struct GridHybridModel<T> {
    prior: TabulatedPrior<T>,
    states: Vec<HermitianOperator<T>>,
    generator: Option<HermitianOperator<T>>,
}

impl<T: Scalar> GridHybridModel<T> {
    /// Builds `rho(x_i) = w_i conditional(x_i)` from any state-valued family.
    pub fn from_family(prior: TabulatedPrior<T>, conditional: impl Fn(T) -> HermitianOperator<T>) -> Result<Self> {
        let states: Vec<_> = prior
            .grid()
            .iter()
            .zip(prior.weights())
            .map(|(&x, &w)| conditional(x).scale(w))
            .collect();
        Self::from_states(prior, states, None)
    }

    /// Single-probe unitary family of a phase model. Multi-copy models are
    /// collapsed onto their pooled spectrum first.
    pub fn from_phase_model(model: &PhaseModel<T>, prior: TabulatedPrior<T>) -> Result<Self> {
        let single = model.collapsed()?;
        let mut out = Self::from_family(prior, |x| single.conditional_state(x))?;
        out.generator = Some(single.generator());
        Ok(out)
    }

    pub fn from_states(
        prior: TabulatedPrior<T>,
        states: Vec<HermitianOperator<T>>,
        generator: Option<HermitianOperator<T>>,
    ) -> Result<Self> {
        if states.len() != prior.len() {
            return Err(BoundsError::DimensionMismatch {
                expected: prior.len(),
                found: states.len(),
            });
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(BoundsError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let total: T = states.iter().map(|s| s.real_trace()).sum();
        if (total - T::one()).abs() > T::tol(TOTAL_TRACE_TOL) {
            return Err(BoundsError::InvalidState(format!(
                "hybrid state has total trace {total}, not 1"
            )));
        }
        Ok(Self {
            prior,
            states,
            generator,
        })
    }

    pub fn prior(&self) -> &TabulatedPrior<T> {
        &self.prior
    }

    pub fn grid(&self) -> &[T] {
        self.prior.grid()
    }

    pub fn dx(&self) -> T {
        self.prior.dx()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Number of estimated parameters; the grid path is single-parameter.
    pub fn param_dim(&self) -> usize {
        1
    }

    pub fn states(&self) -> &[HermitianOperator<T>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &HermitianOperator<T> {
        &self.states[i]
    }

    pub fn generator(&self) -> Option<&HermitianOperator<T>> {
        self.generator.as_ref()
    }

    /// `sum_i rho(x_i)`.
    pub fn average_state(&self) -> HermitianOperator<T> {
        let dim = self.dim();
        let sum = self
            .states
            .iter()
            .fold(GeneralOperator::zeros(dim), |acc, s| &acc + s.as_general());
        HermitianOperator::symmetrized(&sum)
    }
}
