use num_complex::Complex;
use num_traits::Zero;

use crate::error::{BoundsError, Result};
use crate::operator::HermitianOperator;
use crate::scalar::Scalar;

use super::prior::{GaussianPrior, Prior};

const NORMALIZATION_TOL: f64 = 1e-10;
const LEVEL_MERGE_TOL: f64 = 1e-12;

/// Which family a [`PhaseModel`] was built from; decides which closed forms apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `(|0> + |1>)/sqrt(2)` with `H = E |1><1|`.
    Qubit,
    /// `sqrt(1-eps)|0> + sqrt(eps/M) sum_{j=1..M} |j>` with `H = sum_j j |j><j|`.
    Bosonic,
    Generic,
}

/// Pure probe state `sum_j c_j |j>` evolving under `exp(-i x H)` with
/// `H |j> = E_j |j>`, repeated on `copies` independent probes.
///
/// The multi-copy state is never materialized: every copy-dependent quantity
/// is built from single-copy overlaps, or from [`PhaseModel::collapsed`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseModel<T> {
    kind: ModelKind,
    energies: Vec<T>,
    amplitudes: Vec<Complex<T>>,
    copies: u32,
}

impl<T: Scalar> PhaseModel<T> {
    pub fn new(energies: Vec<T>, amplitudes: Vec<Complex<T>>, copies: u32) -> Result<Self> {
        Self::with_kind(ModelKind::Generic, energies, amplitudes, copies)
    }

    fn with_kind(kind: ModelKind, energies: Vec<T>, amplitudes: Vec<Complex<T>>, copies: u32) -> Result<Self> {
        if energies.is_empty() || energies.len() != amplitudes.len() {
            return Err(BoundsError::InvalidParameter(format!(
                "phase model needs one amplitude per level ({} levels, {} amplitudes)",
                energies.len(),
                amplitudes.len()
            )));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(BoundsError::InvalidParameter(
                "generator eigenvalues must be finite".into(),
            ));
        }
        let norm: T = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::tol(NORMALIZATION_TOL) {
            return Err(BoundsError::InvalidState(format!(
                "amplitudes have norm^2 {norm}, not 1"
            )));
        }
        if copies == 0 {
            return Err(BoundsError::InvalidParameter("copy count must be positive".into()));
        }
        Ok(Self {
            kind,
            energies,
            amplitudes,
            copies,
        })
    }

    pub fn qubit(energy: T, copies: u32) -> Result<Self> {
        let a = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Self::with_kind(ModelKind::Qubit, vec![T::zero(), energy], vec![a, a], copies)
    }

    pub fn bosonic(epsilon: T, levels: u32, copies: u32) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::one()) || levels == 0 {
            return Err(BoundsError::InvalidParameter(format!(
                "bosonic probe needs 0 < epsilon < 1 and M >= 1, got epsilon {epsilon}, M {levels}"
            )));
        }
        let m = T::from_u32(levels).unwrap_or_else(T::one);
        let mut amplitudes = vec![Complex::new((T::one() - epsilon).sqrt(), T::zero())];
        amplitudes.extend((0..levels).map(|_| Complex::new((epsilon / m).sqrt(), T::zero())));
        let energies = (0..=levels).map(|j| T::from_u32(j).unwrap_or_else(T::zero)).collect();
        Self::with_kind(ModelKind::Bosonic, energies, amplitudes, copies)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn with_copies(&self, copies: u32) -> Result<Self> {
        Self::with_kind(self.kind, self.energies.clone(), self.amplitudes.clone(), copies)
    }

    fn populations(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.energies
            .iter()
            .copied()
            .zip(self.amplitudes.iter().map(|c| c.norm_sqr()))
    }

    /// Single-copy amplitudes `c_j exp(-i x E_j)`.
    pub fn evolve(&self, x: T) -> Vec<Complex<T>> {
        self.energies
            .iter()
            .zip(&self.amplitudes)
            .map(|(&e, &c)| c * Complex::from_polar(T::one(), -x * e))
            .collect()
    }

    /// Single-copy overlap `z(h) = <psi| exp(-i h H) |psi> = sum_j |c_j|^2 exp(-i h E_j)`.
    pub fn z_overlap(&self, h: T) -> Complex<T> {
        self.populations()
            .map(|(e, w)| Complex::from_polar(w, -h * e))
            .fold(Complex::zero(), |a, b| a + b)
    }

    /// Fidelity of the full `copies`-probe state with its shifted copy, `|z(h)|^(2 nu)`.
    pub fn fidelity(&self, h: T) -> T {
        self.z_overlap(h).norm_sqr().powi(self.copies as i32)
    }

    /// Single-copy mean of the generator.
    pub fn mean_energy(&self) -> T {
        self.populations().map(|(e, w)| e * w).sum()
    }

    /// Single-copy variance of the generator.
    pub fn energy_variance(&self) -> T {
        let m = self.mean_energy();
        self.populations().map(|(e, w)| (e - m) * (e - m) * w).sum()
    }

    pub fn min_energy(&self) -> T {
        self.energies.iter().copied().fold(T::infinity(), T::min)
    }

    /// Spread of the total generator across all copies.
    pub fn energy_span(&self) -> T {
        let max = self.energies.iter().copied().fold(T::neg_infinity(), T::max);
        (max - self.min_energy()) * T::from_u32(self.copies).unwrap_or_else(T::one)
    }

    /// Mean energy above the ground level of the total generator, `nu (<H> - E_0)`.
    pub fn h_plus(&self) -> T {
        (self.mean_energy() - self.min_energy()) * T::from_u32(self.copies).unwrap_or_else(T::one)
    }

    /// Single-copy generator as a diagonal operator.
    pub fn generator(&self) -> HermitianOperator<T> {
        HermitianOperator::diagonal(&self.energies)
    }

    /// Single-copy initial state `|psi><psi|`.
    pub fn initial_state(&self) -> HermitianOperator<T> {
        HermitianOperator::projector(&self.amplitudes)
    }

    /// Single-copy conditional state `exp(-i x H) rho exp(i x H)`.
    pub fn conditional_state(&self, x: T) -> HermitianOperator<T> {
        HermitianOperator::projector(&self.evolve(x))
    }

    /// Equivalent single-probe model of the `copies`-probe product state.
    ///
    /// The product state only explores the eigenspaces of the total generator,
    /// so the pooled spectrum (the `nu`-fold convolution of the level
    /// populations) with real amplitudes reproduces every unitary-family
    /// quantity exactly.
    pub fn collapsed(&self) -> Result<Self> {
        if self.copies == 1 {
            return Ok(self.clone());
        }
        let single: Vec<(T, T)> = self.populations().collect();
        let mut pooled: Vec<(T, T)> = vec![(T::zero(), T::one())];
        for _ in 0..self.copies {
            let mut next: Vec<(T, T)> = Vec::with_capacity(pooled.len() * single.len());
            for &(e0, w0) in &pooled {
                for &(e1, w1) in &single {
                    next.push((e0 + e1, w0 * w1));
                }
            }
            next.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            let mut merged: Vec<(T, T)> = Vec::with_capacity(next.len());
            for (e, w) in next {
                match merged.last_mut() {
                    Some(last) if (last.0 - e).abs() <= T::lit(LEVEL_MERGE_TOL) * (T::one() + e.abs()) => {
                        last.1 = last.1 + w;
                    }
                    _ => merged.push((e, w)),
                }
            }
            pooled = merged;
        }
        let total: T = pooled.iter().map(|p| p.1).sum();
        let energies = pooled.iter().map(|p| p.0).collect();
        let amplitudes = pooled
            .iter()
            .map(|p| Complex::new((p.1 / total).sqrt(), T::zero()))
            .collect();
        Self::with_kind(self.kind, energies, amplitudes, 1)
    }

    /// Prior-averaged single-copy state `int p(x) U_x rho U_x^H dx`.
    ///
    /// Gaussian priors use `E[exp(-i x w)] = exp(-i mu w - sigma^2 w^2 / 2)`;
    /// tabulated priors sum over the grid.
    pub fn average_state(&self, prior: &Prior<T>) -> HermitianOperator<T> {
        let n = self.dim();
        let c = &self.amplitudes;
        let e = &self.energies;
        let characteristic = |w: T| -> Complex<T> {
            match prior {
                Prior::Gaussian(g) => gaussian_characteristic(g, w),
                Prior::Tabulated(t) => t
                    .grid()
                    .iter()
                    .zip(t.weights())
                    .map(|(&x, &p)| Complex::from_polar(p, -x * w))
                    .fold(Complex::zero(), |a, b| a + b),
            }
        };
        let op = crate::operator::GeneralOperator::from_fn(n, |j, k| c[j] * c[k].conj() * characteristic(e[j] - e[k]));
        HermitianOperator::symmetrized(&op)
    }
}

fn gaussian_characteristic<T: Scalar>(g: &GaussianPrior<T>, w: T) -> Complex<T> {
    let damping = (-(g.sigma * g.sigma) * w * w / T::lit(2.0)).exp();
    Complex::from_polar(damping, -g.mean * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn evolve_identity_and_half_period() {
        let q = PhaseModel::qubit(3.0, 1).unwrap();
        assert_eq!(q.evolve(0.0), q.amplitudes().to_vec());
        let out = q.evolve(PI / 3.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(out[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].re, -r, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn energy_shift_is_a_global_phase() {
        let a = PhaseModel::new(
            vec![0.0, 1.0, 2.5],
            vec![
                Complex::new(0.6, 0.0),
                Complex::new(0.0, 0.64f64.sqrt()),
                Complex::new(0.0, 0.0),
            ],
            1,
        )
        .unwrap();
        let b = PhaseModel::new(vec![0.7, 1.7, 3.2], a.amplitudes().to_vec(), 1).unwrap();
        let x = 0.83;
        let (va, vb) = (a.evolve(x), b.evolve(x));
        let phase = vb[0] / va[0];
        assert_abs_diff_eq!(phase.norm(), 1.0, epsilon = 1e-14);
        for (p, q) in va.iter().zip(&vb) {
            assert_abs_diff_eq!((p * phase - q).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn overlap_values() {
        let e = 4.0;
        let q = PhaseModel::qubit(e, 1).unwrap();
        assert_abs_diff_eq!((q.z_overlap(0.0) - Complex::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        for h in [0.1, 0.7, -1.3] {
            let closed = (Complex::new(1.0, 0.0) + Complex::from_polar(1.0, -e * h)) / 2.0;
            assert_abs_diff_eq!((q.z_overlap(h) - closed).norm(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(q.z_overlap(PI / e).norm(), 0.0, epsilon = 1e-15);

        let b = PhaseModel::bosonic(0.1, 10, 1).unwrap();
        for h in [0.3, 1.9] {
            let closed = (1..=10).fold(Complex::new(0.9, 0.0), |acc, j| {
                acc + Complex::from_polar(0.01, -(j as f64) * h)
            });
            assert_abs_diff_eq!((b.z_overlap(h) - closed).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            (b.z_overlap(2.0 * PI) - Complex::new(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn overlap_modulus_bounded() {
        let b = PhaseModel::bosonic(0.3, 6, 1).unwrap();
        for i in 0..500 {
            let h = -10.0 + 0.04 * i as f64;
            assert!(b.z_overlap(h).norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn moments() {
        let b = PhaseModel::bosonic(0.1, 10, 1).unwrap();
        assert_abs_diff_eq!(b.h_plus(), 0.55, epsilon = 1e-14);
        assert_abs_diff_eq!(b.energy_variance(), 3.85 - 0.55 * 0.55, epsilon = 1e-13);
        let b3 = b.with_copies(3).unwrap();
        assert_abs_diff_eq!(b3.h_plus(), 1.65, epsilon = 1e-13);
        let q = PhaseModel::qubit(2.0, 1).unwrap();
        assert_abs_diff_eq!(4.0 * q.energy_variance(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn collapsed_reproduces_product_overlap() {
        let b = PhaseModel::bosonic(0.2, 4, 5).unwrap();
        let c = b.collapsed().unwrap();
        assert_eq!(c.copies(), 1);
        assert_eq!(c.dim(), 21);
        for h in [0.2, 1.1, 2.9] {
            let direct = b.z_overlap(h).powu(5);
            assert_abs_diff_eq!((c.z_overlap(h) - direct).norm(), 0.0, epsilon = 1e-13);
        }
        let q = PhaseModel::qubit(1.5, 4).unwrap().collapsed().unwrap();
        // binomial populations
        let pops: Vec<f64> = q.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        for (k, p) in pops.iter().enumerate() {
            let binom = [1.0, 4.0, 6.0, 4.0, 1.0][k] / 16.0;
            assert_abs_diff_eq!(*p, binom, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_models() {
        assert!(PhaseModel::new(vec![0.0, 1.0], vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)], 1).is_err());
        assert!(PhaseModel::new(vec![0.0], vec![Complex::new(1.0, 0.0)], 0).is_err());
        assert!(PhaseModel::new(vec![f64::NAN], vec![Complex::new(1.0, 0.0)], 1).is_err());
        assert!(PhaseModel::bosonic(1.2, 3, 1).is_err());
    }

    #[test]
    fn average_state_qubit_closed_form() {
        let sigma: f64 = 0.1;
        let e: f64 = 10.0;
        let q = PhaseModel::qubit(e, 1).unwrap();
        let prior = Prior::Gaussian(GaussianPrior::centered(sigma).unwrap());
        let avg = q.average_state(&prior);
        let gamma = (-(e * e) * sigma * sigma / 2.0).exp();
        assert_abs_diff_eq!(avg.get(0, 1).norm(), gamma / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(avg.get(0, 1).norm(), 0.303_265_329_856_316_7, epsilon = 1e-12);
        assert_abs_diff_eq!(avg.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert!(avg.validate_state(1.0).is_ok());

        // quadrature oracle: tabulated prior sum
        let tab = Prior::Tabulated(GaussianPrior::centered(sigma).unwrap().tabulate_default().unwrap());
        let avg_tab = q.average_state(&tab);
        assert!((avg.as_general() - avg_tab.as_general()).max_abs() < 1e-12);
    }

    #[test]
    fn average_state_delta_prior_and_populations() {
        let b = PhaseModel::bosonic(0.1, 10, 1).unwrap();
        let mu = 0.4;
        let narrow = Prior::Gaussian(GaussianPrior::new(mu, 1e-9).unwrap());
        let avg = b.average_state(&narrow);
        let direct = b.conditional_state(mu);
        assert!((avg.as_general() - direct.as_general()).max_abs() < 1e-12);

        let wide = Prior::Gaussian(GaussianPrior::new(mu, 0.5).unwrap());
        let avg = b.average_state(&wide);
        let rho = b.initial_state();
        for j in 0..b.dim() {
            assert_abs_diff_eq!(avg.get(j, j).re, rho.get(j, j).re, epsilon = 1e-15);
        }
    }
}
