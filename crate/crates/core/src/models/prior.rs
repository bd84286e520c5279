use crate::error::{BoundsError, Result};
use crate::numerics::{integrate_pieces, QUAD_REL_TOL};
use crate::scalar::Scalar;

/// Default half-width of a tabulated Gaussian, in standard deviations.
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 8.0;
/// Default number of grid points of a tabulated Gaussian.
pub const DEFAULT_GRID_POINTS: usize = 2001;

const WEIGHT_SUM_TOL: f64 = 1e-10;
const BOUNDARY_WEIGHT_TOL: f64 = 1e-12;
const GRID_UNIFORMITY_TOL: f64 = 1e-9;

/// Normal prior on the phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPrior<T> {
    pub mean: T,
    pub sigma: T,
}

impl<T: Scalar> GaussianPrior<T> {
    pub fn new(mean: T, sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() || !mean.is_finite() {
            return Err(BoundsError::InvalidParameter(format!(
                "Gaussian prior needs finite mean and sigma > 0, got mean {mean}, sigma {sigma}"
            )));
        }
        Ok(Self { mean, sigma })
    }

    pub fn centered(sigma: T) -> Result<Self> {
        Self::new(T::zero(), sigma)
    }

    pub fn variance(&self) -> T {
        self.sigma * self.sigma
    }

    pub fn pdf(&self, x: T) -> T {
        let z = (x - self.mean) / self.sigma;
        let norm = (T::lit(2.0) * T::PI()).sqrt() * self.sigma;
        (-(z * z) / T::lit(2.0)).exp() / norm
    }

    /// `g_c(s, h) = int p(x+h)^s p(x)^(1-s) dx = exp[-h^2 s (1-s) / (2 sigma^2)]`,
    /// valid for every real exponent.
    pub fn overlap_gc(&self, s: T, h: T) -> T {
        (-(h * h) * s * (T::one() - s) / (T::lit(2.0) * self.variance())).exp()
    }

    /// Uniform tabulation over `[mean - k sigma, mean + k sigma]`.
    pub fn tabulate(&self, half_width_sigmas: T, points: usize) -> Result<TabulatedPrior<T>> {
        if points < 3 || !(half_width_sigmas > T::zero()) {
            return Err(BoundsError::InvalidParameter(format!(
                "tabulation needs >= 3 points and a positive width, got {points} points over {half_width_sigmas} sigma"
            )));
        }
        let lo = self.mean - half_width_sigmas * self.sigma;
        let dx = T::lit(2.0) * half_width_sigmas * self.sigma / T::from_usize_lossy(points - 1);
        let grid: Vec<T> = (0..points).map(|i| lo + dx * T::from_usize_lossy(i)).collect();
        let raw: Vec<T> = grid.iter().map(|&x| self.pdf(x) * dx).collect();
        let total: T = raw.iter().copied().sum();
        let weights = raw.into_iter().map(|w| w / total).collect();
        TabulatedPrior::new(grid, weights)
    }

    /// Default tabulation: 2001 points over +-8 sigma.
    pub fn tabulate_default(&self) -> Result<TabulatedPrior<T>> {
        self.tabulate(T::lit(DEFAULT_HALF_WIDTH_SIGMAS), DEFAULT_GRID_POINTS)
    }
}

/// Prior given as probability masses on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedPrior<T> {
    grid: Vec<T>,
    weights: Vec<T>,
    dx: T,
}

/// Value of a prior overlap together with whether the shifted support left the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap<T> {
    pub value: T,
    pub domain_truncated: bool,
}

impl<T: Scalar> TabulatedPrior<T> {
    /// Validates an ascending uniform grid, nonnegative weights summing to one
    /// within `1e-10`, and boundary weights below `1e-12`.
    pub fn new(grid: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if grid.len() < 3 || grid.len() != weights.len() {
            return Err(BoundsError::InvalidParameter(format!(
                "tabulated prior needs >= 3 grid points and one weight per point ({} points, {} weights)",
                grid.len(),
                weights.len()
            )));
        }
        let n = grid.len();
        let dx = (grid[n - 1] - grid[0]) / T::from_usize_lossy(n - 1);
        if !(dx > T::zero()) {
            return Err(BoundsError::InvalidParameter("grid must be ascending".into()));
        }
        for (i, w) in grid.windows(2).enumerate() {
            if ((w[1] - w[0]) - dx).abs() > T::tol(GRID_UNIFORMITY_TOL) * dx.max(T::one()) {
                return Err(BoundsError::InvalidParameter(format!(
                    "grid spacing is not uniform at index {i}"
                )));
            }
        }
        if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
            return Err(BoundsError::InvalidParameter(
                "prior weights must be finite and nonnegative".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(WEIGHT_SUM_TOL) {
            return Err(BoundsError::InvalidParameter(format!(
                "prior weights sum to {total}, not 1"
            )));
        }
        let edge = T::lit(BOUNDARY_WEIGHT_TOL);
        if weights[0] >= edge || weights[n - 1] >= edge {
            return Err(BoundsError::InvalidParameter(format!(
                "prior must vanish at the grid boundary (edge weights {:e}, {:e})",
                weights[0],
                weights[n - 1]
            )));
        }
        Ok(Self { grid, weights, dx })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn mean(&self) -> T {
        self.grid.iter().zip(&self.weights).map(|(&x, &w)| x * w).sum()
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.grid
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (x - m) * (x - m) * w)
            .sum()
    }

    /// Piecewise-linear density `p(x)`, zero outside the grid.
    pub fn density(&self, x: T) -> T {
        let n = self.grid.len();
        let pos = (x - self.grid[0]) / self.dx;
        if !(pos >= T::zero()) || pos > T::from_usize_lossy(n - 1) {
            return T::zero();
        }
        let i = pos.floor().to_usize().unwrap_or(0).min(n - 2);
        let t = pos - T::from_usize_lossy(i);
        ((T::one() - t) * self.weights[i] + t * self.weights[i + 1]) / self.dx
    }

    /// `g_c(s, h)` by quadrature of the interpolated density over the region
    /// where both `p(x)` and `p(x+h)` are tabulated.
    pub fn overlap_gc(&self, s: T, h: T) -> Overlap<T> {
        if h == T::zero() {
            return Overlap {
                value: self
                    .grid
                    .iter()
                    .zip(&self.weights)
                    .filter(|(_, &w)| w > T::zero())
                    .map(|(_, &w)| w)
                    .sum(),
                domain_truncated: false,
            };
        }
        let lo = self.grid[0];
        let hi = self.grid[self.grid.len() - 1];
        let a = lo.max(lo - h);
        let b = hi.min(hi - h);
        if !(a < b) {
            return Overlap {
                value: T::zero(),
                domain_truncated: true,
            };
        }
        let mut breaks: Vec<T> = self
            .grid
            .iter()
            .flat_map(|&x| [x, x - h])
            .filter(|&x| x > a && x < b)
            .collect();
        breaks.push(a);
        breaks.push(b);
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        breaks.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * self.dx);
        let one_minus = T::one() - s;
        let integrand = |x: T| {
            let p = self.density(x);
            let q = self.density(x + h);
            if p > T::zero() && q > T::zero() {
                q.powf(s) * p.powf(one_minus)
            } else {
                T::zero()
            }
        };
        let r = integrate_pieces(integrand, &breaks, T::lit(QUAD_REL_TOL));
        Overlap {
            value: r.value,
            domain_truncated: true,
        }
    }
}

/// Prior over a single phase parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Prior<T> {
    Gaussian(GaussianPrior<T>),
    Tabulated(TabulatedPrior<T>),
}

impl<T: Scalar> Prior<T> {
    pub fn mean(&self) -> T {
        match self {
            Prior::Gaussian(g) => g.mean,
            Prior::Tabulated(t) => t.mean(),
        }
    }

    pub fn std_dev(&self) -> T {
        match self {
            Prior::Gaussian(g) => g.sigma,
            Prior::Tabulated(t) => t.variance().sqrt(),
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianPrior<T>> {
        match self {
            Prior::Gaussian(g) => Some(g),
            Prior::Tabulated(_) => None,
        }
    }

    /// Closed form for Gaussian priors; quadrature for tabulated ones.
    pub fn overlap_gc(&self, s: T, h: T) -> T {
        match self {
            Prior::Gaussian(g) => g.overlap_gc(s, h),
            Prior::Tabulated(t) => {
                let o = t.overlap_gc(s, h);
                if o.domain_truncated {
                    log::debug!("g_c({s}, {h}): shifted support leaves the grid; integrating over the overlap only");
                }
                o.value
            }
        }
    }

    /// Grid used by the discretized hybrid model.
    pub fn to_tabulated(&self) -> Result<TabulatedPrior<T>> {
        match self {
            Prior::Gaussian(g) => g.tabulate_default(),
            Prior::Tabulated(t) => Ok(t.clone()),
        }
    }
}

impl<T> From<GaussianPrior<T>> for Prior<T> {
    fn from(g: GaussianPrior<T>) -> Self {
        Prior::Gaussian(g)
    }
}

impl<T> From<TabulatedPrior<T>> for Prior<T> {
    fn from(t: TabulatedPrior<T>) -> Self {
        Prior::Tabulated(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_normalization() {
        let g = GaussianPrior::new(0.3, 0.1).unwrap();
        let r = integrate(|x| g.pdf(x), 0.3 - 1.0, 0.3 + 1.0, 1e-12);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
        assert!(GaussianPrior::new(0.0, 0.0).is_err());
        assert!(GaussianPrior::new(0.0, -1.0).is_err());
    }

    #[test]
    fn overlap_at_zero_shift_is_one() {
        let g = GaussianPrior::centered(0.1).unwrap();
        for s in [0.1, 0.5, 1.7, -0.4] {
            assert_eq!(g.overlap_gc(s, 0.0), 1.0);
        }
        let t = g.tabulate_default().unwrap();
        assert_abs_diff_eq!(t.overlap_gc(0.3, 0.0).value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bhattacharyya_value() {
        let g = GaussianPrior::centered(0.1).unwrap();
        assert_abs_diff_eq!(g.overlap_gc(0.5, 0.2), (-0.5f64).exp(), epsilon = 1e-15);
        // quadrature oracle on a tabulated copy
        let t = g.tabulate(12.0, 4001).unwrap();
        let o = t.overlap_gc(0.5, 0.2);
        assert!(o.domain_truncated);
        assert_abs_diff_eq!(o.value, 0.606_530_659_712_633_4, epsilon = 1e-4);
    }

    #[test]
    fn endpoint_exponents_give_one() {
        let g = GaussianPrior::centered(0.1).unwrap();
        assert_abs_diff_eq!(g.overlap_gc(1e-12, 0.3), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g.overlap_gc(1.0 - 1e-12, 0.3), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn reflection_symmetry() {
        let g = GaussianPrior::new(0.2, 0.4).unwrap();
        let t = g.tabulate(10.0, 801).unwrap();
        for (s, h) in [(0.3, 0.2), (0.7, -0.5), (0.5, 1.1)] {
            assert_abs_diff_eq!(g.overlap_gc(s, h), g.overlap_gc(1.0 - s, -h), epsilon = 1e-15);
            let a = t.overlap_gc(s, h).value;
            let b = t.overlap_gc(1.0 - s, -h).value;
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn shift_off_grid_gives_zero() {
        let t = GaussianPrior::centered(1.0).unwrap().tabulate(8.0, 101).unwrap();
        let o = t.overlap_gc(0.5, 20.0);
        assert!(o.domain_truncated);
        assert_eq!(o.value, 0.0);
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedPrior::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).is_ok());
        // not vanishing at the edge
        assert!(TabulatedPrior::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.5, 0.0]).is_err());
        // not normalized
        assert!(TabulatedPrior::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.9, 0.0]).is_err());
        // non-uniform
        assert!(TabulatedPrior::new(vec![0.0, 1.0, 3.0, 4.0], vec![0.0, 0.5, 0.5, 0.0]).is_err());
        // descending
        assert!(TabulatedPrior::new(vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn default_tabulation_moments() {
        let g = GaussianPrior::new(0.05, 0.1).unwrap();
        let t = g.tabulate_default().unwrap();
        assert_eq!(t.len(), 2001);
        assert_abs_diff_eq!(t.mean(), 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(t.variance(), 0.01, epsilon = 1e-12);
    }
}
