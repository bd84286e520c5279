//! Bayesian error bounds for quantum parameter estimation.
//!
//! The crate computes quantum Weiss-Weinstein bounds (on discretized hybrid
//! models and, for unitary phase families, in closed form), the quantum
//! Ziv-Zakai bound, the Bayesian quantum Cramer-Rao bound, the exact MMSE of
//! unitary families with a Gaussian prior, and Heisenberg-limit constants.
//!
//! All numerics are generic over [`Scalar`] (`f32`/`f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod models;
pub mod numerics;
pub mod operator;
pub mod phase_bounds;
pub mod scalar;
pub mod validation;
pub mod ww;

pub use error::{BoundsError, Result};
pub use scalar::Scalar;

pub type HermitianOperator = operator::HermitianOperator<f64>;
pub type GeneralOperator = operator::GeneralOperator<f64>;
pub type EigDecomposition = operator::EigDecomposition<f64>;
pub type GaussianPrior = models::GaussianPrior<f64>;
pub type TabulatedPrior = models::TabulatedPrior<f64>;
pub type Prior = models::Prior<f64>;
pub type PhaseModel = models::PhaseModel<f64>;
pub type GridHybridModel = models::GridHybridModel<f64>;
pub type Povm = models::Povm<f64>;
pub type TestPoint = ww::TestPoint<f64>;
pub type WwAssembly = ww::WwAssembly<f64>;
pub type BoundMatrix = ww::BoundMatrix<f64>;
pub type BoundReport = phase_bounds::BoundReport<f64>;
pub type HeisenbergLimit = phase_bounds::HeisenbergLimit<f64>;
