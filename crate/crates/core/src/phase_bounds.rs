//! Closed-form bounds for single-parameter phase estimation with unitary
//! families `rho_x = exp(-i x H) |psi><psi| exp(i x H)` and `nu` independent probes.
//!
//! The single-test-point Weiss-Weinstein objective is
//!
//! ```text
//! Sigma_W(s, h) = h^2 g(s,h)^2 / [g(2s,h) + g(2-2s,-h) - 2 g~(s,2h)]
//! ```
//!
//! with `g = g_c g_q` split into a prior part `g_c` and a probe part
//! `g_q = |z(h)|^(2 nu)`, `g~_q = Re[(z(h)^2 z(2h)^*)^nu]`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{BoundsError, Result};
use crate::models::{GaussianPrior, GridHybridModel, ModelKind, PhaseModel, Prior};
use crate::numerics::{
    golden_section_max, integrate_pieces, maximize_1d, solve_root, Integral, ScanSpec, QUAD_REL_TOL,
};
use crate::operator::{eig_hermitian, HermitianOperator};
use crate::scalar::Scalar;
use crate::ww::DEGENERACY_TOL;

/// Smallest scanned displacement, in prior standard deviations.
pub const H_MIN_SIGMAS: f64 = 1e-4;
/// Default upper end of the `h` scan, in prior standard deviations.
pub const H_MAX_SIGMAS: f64 = 10.0;
const MAX_SCAN_POINTS: usize = 20_000;
const SCAN_POINTS_PER_PERIOD: f64 = 8.0;
const S_GRID_POINTS: usize = 21;
const KAPPA_S_POINTS: usize = 99;
/// QZZB integrals stop at `12 sqrt(2) sigma`, where `erfc` drops below `2e-16`.
const QZZB_CUTOFF: f64 = 12.0;
const QZZB_MAX_PIECES: usize = 4000;
const QFI_PAIR_CUTOFF: f64 = 1e-12;

/// Prior and probe overlap functions of a phase model.
#[derive(Clone, Copy, Debug)]
pub struct GFunctions<'a, T> {
    model: &'a PhaseModel<T>,
    prior: &'a Prior<T>,
}

impl<'a, T: Scalar> GFunctions<'a, T> {
    pub fn new(model: &'a PhaseModel<T>, prior: &'a Prior<T>) -> Self {
        Self { model, prior }
    }

    /// `g_c(s, h) = int p(x+h)^s p(x)^(1-s) dx`.
    pub fn g_c(&self, s: T, h: T) -> T {
        self.prior.overlap_gc(s, h)
    }

    /// `|z(h)|^(2 nu)`.
    pub fn g_q(&self, h: T) -> T {
        self.model.fidelity(h)
    }

    /// `Re[(z(h)^2 z(2h)^*)^nu]`, the probe part of `g~(s, 2h)`.
    pub fn g_tilde_q(&self, h: T) -> T {
        let z = self.model.z_overlap(h);
        let z2 = self.model.z_overlap(h + h);
        (z * z * z2.conj()).powu(self.model.copies()).re
    }

    pub fn g(&self, s: T, h: T) -> T {
        self.g_c(s, h) * self.g_q(h)
    }

    /// `g~(s, 2h)`, parametrized by `h`.
    pub fn g_tilde(&self, s: T, h: T) -> T {
        self.g_c(s, h + h) * self.g_tilde_q(h)
    }

    /// `Sigma_W(s, h)`.
    pub fn qwwb(&self, s: T, h: T) -> Result<T> {
        if !(s > T::zero() && s < T::one()) {
            return Err(BoundsError::InvalidParameter(format!(
                "exponent must lie in (0, 1), got {s}"
            )));
        }
        if h == T::zero() || !h.is_finite() {
            return Err(BoundsError::InvalidParameter(format!(
                "displacement must be finite and nonzero, got {h}"
            )));
        }
        let two = T::lit(2.0);
        let gq = self.g_q(h);
        let numerator = h * h * (self.g_c(s, h) * gq).powi(2);
        let denominator = (self.g_c(two * s, h) + self.g_c(two - two * s, -h)) * gq - two * self.g_tilde(s, h);
        if !(denominator > T::lit(DEGENERACY_TOL)) {
            return Err(BoundsError::DegenerateTestPoint(format!(
                "QWWB denominator {denominator:e} at s = {s}, h = {h}"
            )));
        }
        Ok(numerator / denominator)
    }
}

/// Single-test-point QWWB objective `Sigma_W(s, h)` of a phase model.
pub fn qwwb_phase<T: Scalar>(model: &PhaseModel<T>, prior: &Prior<T>, s: T, h: T) -> Result<T> {
    GFunctions::new(model, prior).qwwb(s, h)
}

/// Settings of the QWWB maximization over test points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QwwbOptions<T> {
    /// Upper end of the `h` scan in prior standard deviations.
    pub h_max_sigmas: T,
    /// Also scan 21 exponents in `[0.05, 0.95]` instead of fixing `s = 1/2`.
    pub optimize_s: bool,
}

impl<T: Scalar> Default for QwwbOptions<T> {
    fn default() -> Self {
        Self {
            h_max_sigmas: T::lit(H_MAX_SIGMAS),
            optimize_s: false,
        }
    }
}

/// Best single-test-point bound and where it was found.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QwwbOptimum<T> {
    pub value: T,
    pub s: T,
    pub h: T,
}

/// Coarse resolution of the `h` scan: at least 400 points and 8 per period of the fastest phase.
pub fn scan_points<T: Scalar>(model: &PhaseModel<T>, range: T) -> usize {
    let periods = (range * model.energy_span() / (T::lit(2.0) * T::PI())).as_f64();
    let wanted = (SCAN_POINTS_PER_PERIOD * periods).ceil();
    if wanted.is_finite() {
        (wanted as usize).clamp(crate::numerics::DEFAULT_COARSE_POINTS, MAX_SCAN_POINTS)
    } else {
        MAX_SCAN_POINTS
    }
}

/// Maximizes `Sigma_W(s, h)` over `h in [1e-4 sigma, h_max]` at `s = 1/2`, or also over an `s` grid.
pub fn qwwb_optimize<T: Scalar>(
    model: &PhaseModel<T>,
    prior: &Prior<T>,
    options: &QwwbOptions<T>,
) -> Result<QwwbOptimum<T>> {
    let sigma = prior.std_dev();
    let lower = T::lit(H_MIN_SIGMAS) * sigma;
    let upper = options.h_max_sigmas * sigma;
    let spec = ScanSpec::with_points(lower, upper, scan_points(model, upper - lower))?;
    let g = GFunctions::new(model, prior);
    let at_s = |s: T| -> Result<QwwbOptimum<T>> {
        let best = maximize_1d(|h| g.qwwb(s, h).unwrap_or_else(|_| T::nan()), &spec)?;
        Ok(QwwbOptimum {
            value: best.max,
            s,
            h: best.argmax,
        })
    };
    if !options.optimize_s {
        return at_s(T::lit(0.5));
    }
    let exponents: Vec<T> = (0..S_GRID_POINTS)
        .map(|i| T::lit(0.05) + T::lit(0.9) * T::from_usize_lossy(i) / T::from_usize_lossy(S_GRID_POINTS - 1))
        .collect();
    let candidates: Vec<QwwbOptimum<T>> = exponents.into_iter().map(at_s).collect::<Result<_>>()?;
    candidates
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .ok_or(BoundsError::EmptyScan)
}

/// Bayesian QCRB `1 / (1/sigma^2 + 4 nu Var_psi(H))`.
pub fn qcrb_bayes<T: Scalar>(model: &PhaseModel<T>, prior: &GaussianPrior<T>) -> T {
    let nu = T::from_u32(model.copies()).unwrap_or_else(T::one);
    T::one() / (T::one() / prior.variance() + T::lit(4.0) * nu * model.energy_variance())
}

/// `1/2 int_0^inf h erfc(h / (2 sqrt(2) sigma)) [1 - sqrt(1 - F(h))] dh` for a fidelity `F`.
///
/// `pieces` splits the domain into that many equal pieces so that
/// oscillating fidelities are resolved.
pub fn qzzb_with_fidelity<T: Scalar>(fidelity: impl Fn(T) -> T, sigma: T, pieces: usize) -> Integral<T> {
    let scale = T::lit(2.0) * T::SQRT_2() * sigma;
    let upper = T::lit(QZZB_CUTOFF) * T::SQRT_2() * sigma;
    let pieces = pieces.max(1);
    let breakpoints: Vec<T> = (0..=pieces)
        .map(|i| upper * T::from_usize_lossy(i) / T::from_usize_lossy(pieces))
        .collect();
    let integrand = |h: T| {
        let f = fidelity(h).max(T::zero()).min(T::one());
        T::lit(0.5) * h * (h / scale).erfc_c() * (T::one() - (T::one() - f).sqrt())
    };
    integrate_pieces(integrand, &breakpoints, T::lit(QUAD_REL_TOL))
}

/// QZZB of a phase model under a Gaussian prior with fidelity `|z(h)|^(2 nu)`.
pub fn qzzb_gaussian<T: Scalar>(model: &PhaseModel<T>, prior: &GaussianPrior<T>) -> T {
    let upper = T::lit(QZZB_CUTOFF) * T::SQRT_2() * prior.sigma;
    let periods = (upper * model.energy_span() / (T::lit(2.0) * T::PI())).as_f64();
    let pieces = (periods.ceil() as usize).clamp(1, QZZB_MAX_PIECES);
    let result = qzzb_with_fidelity(|h| model.fidelity(h), prior.sigma, pieces);
    if !result.converged {
        log::warn!(
            "QZZB quadrature did not reach tolerance; error estimate {:e}",
            result.abs_error.as_f64()
        );
    }
    result.value
}

/// Quantum Fisher information `sum 2 (l_j - l_k)^2 |H_jk|^2 / (l_j + l_k)` of `rho` under generator `h`.
pub fn qfi<T: Scalar>(rho: &HermitianOperator<T>, generator: &HermitianOperator<T>) -> Result<T> {
    if rho.dim() != generator.dim() {
        return Err(BoundsError::DimensionMismatch {
            expected: rho.dim(),
            found: generator.dim(),
        });
    }
    let eig = eig_hermitian(rho);
    eig.check_positive()?;
    let lambda: Vec<T> = eig.eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
    let cutoff = T::lit(QFI_PAIR_CUTOFF) * eig.largest().max(T::zero());
    let h = generator.as_general().in_basis(&eig.eigenvectors)?;
    let n = rho.dim();
    let mut total = T::zero();
    for j in 0..n {
        for k in 0..n {
            let sum = lambda[j] + lambda[k];
            if sum > cutoff {
                let diff = lambda[j] - lambda[k];
                total = total + T::lit(2.0) * diff * diff * h.get(j, k).norm_sqr() / sum;
            }
        }
    }
    Ok(total)
}

/// Exact MMSE `sigma^2 - sigma^4 F(rho_bar, H)` of a unitary family under a Gaussian prior.
///
/// Multi-probe qubit models use the pooled single-probe spectrum; other
/// multi-probe models are rejected.
pub fn mmse_gaussian<T: Scalar>(model: &PhaseModel<T>, prior: &GaussianPrior<T>) -> Result<T> {
    if model.copies() > 1 && model.kind() != ModelKind::Qubit {
        return Err(BoundsError::Unsupported(format!(
            "MMSE is only available for single-probe or qubit models, not {:?} with nu = {}",
            model.kind(),
            model.copies()
        )));
    }
    let single = model.collapsed()?;
    let rho_bar = single.average_state(&Prior::Gaussian(*prior));
    let var = prior.variance();
    Ok(var - var * var * qfi(&rho_bar, &single.generator())?)
}

/// MMSE formula evaluated on a discretized model with a Gaussian-shaped grid prior.
pub fn mmse_grid<T: Scalar>(model: &GridHybridModel<T>, prior: &GaussianPrior<T>) -> Result<T> {
    let generator = model
        .generator()
        .ok_or_else(|| BoundsError::Unsupported("grid model carries no generator".into()))?;
    let var = prior.variance();
    Ok(var - var * var * qfi(&model.average_state(), generator)?)
}

/// `lambda = sin(phi) = (1 - cos phi) / phi`, the slope with `cos t >= 1 - lambda |t|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineConstant<T> {
    pub lambda: T,
    pub phi: T,
}

pub fn sine_constant<T: Scalar>() -> SineConstant<T> {
    // the tangency root sits on (2, 3); f changes sign there
    let phi = solve_root(|p: f64| p * p.sin() - (1.0 - p.cos()), (2.0, 3.0)).expect("sign change on (2, 3)");
    SineConstant {
        lambda: T::lit(phi.sin()),
        phi: T::lit(phi),
    }
}

/// `kappa(h) = sup_s g_c(s,h)^2 / [g_c(2s,h) + g_c(2-2s,-h)]`.
pub fn kappa<T: Scalar>(prior: &Prior<T>, h: T) -> T {
    let two = T::lit(2.0);
    let ratio =
        |s: T| prior.overlap_gc(s, h).powi(2) / (prior.overlap_gc(two * s, h) + prior.overlap_gc(two - two * s, -h));
    let n = KAPPA_S_POINTS;
    let at = |i: usize| T::from_usize_lossy(i + 1) / T::from_usize_lossy(n + 1);
    let (best_i, best) = (0..n)
        .map(|i| (i, ratio(at(i))))
        .filter(|(_, v)| v.is_finite())
        .fold((0, T::neg_infinity()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let lo = if best_i == 0 { T::lit(1e-6) } else { at(best_i - 1) };
    let hi = if best_i + 1 >= n {
        T::one() - T::lit(1e-6)
    } else {
        at(best_i + 1)
    };
    golden_section_max(ratio, lo, hi, T::lit(1e-12)).max.max(best)
}

/// Heisenberg-limit constants of a phase model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergLimit<T> {
    pub lambda: T,
    /// `nu (<H> - E_0)`.
    pub h_plus: T,
    /// `1 / (4 lambda H_+)`.
    pub h_star: T,
    pub kappa: T,
    /// `kappa(h*) h*^2 |z(h*)|^(2 nu)`.
    pub bound_prime: T,
    /// `kappa(h*) / (32 lambda^2 H_+^2)`.
    pub bound: T,
}

pub fn heisenberg_limit<T: Scalar>(model: &PhaseModel<T>, prior: &Prior<T>) -> Result<HeisenbergLimit<T>> {
    let h_plus = model.h_plus();
    if !(h_plus > T::zero()) {
        return Err(BoundsError::NoDynamics);
    }
    let lambda = sine_constant::<T>().lambda;
    let h_star = T::one() / (T::lit(4.0) * lambda * h_plus);
    let k = kappa(prior, h_star);
    let bound_prime = k * h_star * h_star * model.fidelity(h_star);
    let bound = k / (T::lit(32.0) * lambda * lambda * h_plus * h_plus);
    if bound_prime < bound * (T::one() - T::lit(1e-12)) {
        return Err(BoundsError::InvalidState(format!(
            "fidelity bound violated at h* = {h_star}: {bound_prime} < {bound}"
        )));
    }
    Ok(HeisenbergLimit {
        lambda,
        h_plus,
        h_star,
        kappa: k,
        bound_prime,
        bound,
    })
}

/// All bounds at one sweep value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportPoint<T> {
    pub sweep_value: T,
    pub qwwb: QwwbOptimum<T>,
    pub qzzb: T,
    pub qcrb: T,
    pub mmse: Option<T>,
    pub heisenberg: Option<T>,
}

impl<T: Scalar> ReportPoint<T> {
    /// Evaluates every bound of a phase model under a Gaussian prior.
    ///
    /// MMSE and the Heisenberg limit are recorded only where they exist.
    pub fn evaluate(
        sweep_value: T,
        model: &PhaseModel<T>,
        prior: &GaussianPrior<T>,
        options: &QwwbOptions<T>,
    ) -> Result<Self> {
        let wrapped = Prior::Gaussian(*prior);
        let mmse = match mmse_gaussian(model, prior) {
            Ok(v) => Some(v),
            Err(BoundsError::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let heisenberg = match heisenberg_limit(model, &wrapped) {
            Ok(hl) => Some(hl.bound),
            Err(BoundsError::NoDynamics) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            sweep_value,
            qwwb: qwwb_optimize(model, &wrapped, options)?,
            qzzb: qzzb_gaussian(model, prior),
            qcrb: qcrb_bayes(model, prior),
            mmse,
            heisenberg,
        })
    }
}

/// Bounds of one model family along a sweep, in squared radians.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub model_id: String,
    /// Name of the swept quantity, e.g. `E` or `nu`.
    pub sweep_variable: String,
    pub points: Vec<ReportPoint<T>>,
}

impl<T: Scalar> BoundReport<T> {
    /// Evaluates `model_at(v)` for every sweep value concurrently; points keep sweep order.
    pub fn sweep(
        model_id: impl Into<String>,
        sweep_variable: impl Into<String>,
        values: &[T],
        prior: &GaussianPrior<T>,
        options: &QwwbOptions<T>,
        model_at: impl Fn(T) -> Result<PhaseModel<T>> + Sync,
    ) -> Result<Self> {
        let points = values
            .par_iter()
            .map(|&v| ReportPoint::evaluate(v, &model_at(v)?, prior, options))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model_id: model_id.into(),
            sweep_variable: sweep_variable.into(),
            points,
        })
    }

    /// Sweep values at which a bound exceeds the MMSE by more than `rel_tol` relative.
    pub fn ordering_violations(&self, rel_tol: T) -> Vec<T> {
        self.points
            .iter()
            .filter(|p| {
                p.mmse.is_some_and(|m| {
                    let slack = rel_tol * m.abs();
                    [p.qwwb.value, p.qzzb, p.qcrb].iter().any(|&b| b > m + slack)
                })
            })
            .map(|p| p.sweep_value)
            .collect()
    }

    pub fn check_ordering(&self) -> Result<()> {
        match self.ordering_violations(T::lit(1e-9)).first() {
            None => Ok(()),
            Some(v) => Err(BoundsError::InvalidState(format!(
                "a bound exceeds the MMSE at {} = {v}",
                self.sweep_variable
            ))),
        }
    }
}

/// `z(h)` of a pure state given as amplitudes over generator levels.
pub fn pure_overlap<T: Scalar>(energies: &[T], amplitudes: &[Complex<T>], h: T) -> Complex<T> {
    energies
        .iter()
        .zip(amplitudes)
        .map(|(&e, c)| Complex::from_polar(c.norm_sqr(), -h * e))
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
}
