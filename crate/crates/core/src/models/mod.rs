//! Priors, phase-estimation probes, discretized hybrid states and measurements.

pub mod file;
pub mod grid;
pub mod measurement;
pub mod phase;
pub mod prior;

pub use file::ModelFile;
pub use grid::GridHybridModel;
pub use measurement::{empirical_mse, sample_table, simulate_measurement, EmpiricalMse, JointTable, Povm, Sample};
pub use phase::{ModelKind, PhaseModel};
pub use prior::{GaussianPrior, Overlap, Prior, TabulatedPrior};
