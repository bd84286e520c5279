//! One-dimensional numerical kernels: adaptive quadrature, scan-and-refine
//! maximization and bracketed root finding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{BoundsError, Result};
use crate::scalar::Scalar;

/// Absolute floor of the quadrature error target.
pub const QUAD_ABS_FLOOR: f64 = 1e-15;
/// Default relative quadrature tolerance.
pub const QUAD_REL_TOL: f64 = 1e-8;
const MAX_SUBINTERVALS: usize = 200_000;

pub const DEFAULT_COARSE_POINTS: usize = 400;
const MIN_COARSE_POINTS: usize = 16;
const ROOT_TOL: f64 = 1e-13;

/// Domain and resolution of a scan-and-refine maximization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec<T> {
    pub lower: T,
    pub upper: T,
    pub coarse_points: usize,
    pub refine_tol: T,
}

impl<T: Scalar> ScanSpec<T> {
    /// 400 coarse points and `refine_tol = 1e-10 (upper - lower)`.
    pub fn new(lower: T, upper: T) -> Result<Self> {
        Self::with_points(lower, upper, DEFAULT_COARSE_POINTS)
    }

    pub fn with_points(lower: T, upper: T, coarse_points: usize) -> Result<Self> {
        let spec = Self {
            lower,
            upper,
            coarse_points,
            refine_tol: T::lit(1e-10) * (upper - lower),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(BoundsError::InvalidParameter(format!(
                "scan domain [{}, {}] is empty",
                self.lower, self.upper
            )));
        }
        if self.coarse_points < MIN_COARSE_POINTS {
            return Err(BoundsError::InvalidParameter(format!(
                "scan needs at least {MIN_COARSE_POINTS} coarse points, got {}",
                self.coarse_points
            )));
        }
        if !(self.refine_tol > T::zero()) {
            return Err(BoundsError::InvalidParameter("refine_tol must be positive".into()));
        }
        Ok(())
    }

    fn point(&self, i: usize) -> T {
        let frac = T::from_usize_lossy(i) / T::from_usize_lossy(self.coarse_points - 1);
        self.lower + (self.upper - self.lower) * frac
    }
}

/// Location and value of a maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum<T> {
    pub argmax: T,
    pub max: T,
}

fn finite_or_floor<T: Scalar>(v: T) -> T {
    if v.is_finite() {
        v
    } else {
        T::neg_infinity()
    }
}

/// Maximizes `f` on `[lower, upper]`: uniform coarse scan, then golden-section
/// refinement on the two cells around the best scan point.
///
/// Non-finite values count as `-inf`. The result is never worse than the
/// best coarse point.
pub fn maximize_1d<T: Scalar>(f: impl Fn(T) -> T, spec: &ScanSpec<T>) -> Result<Maximum<T>> {
    spec.validate()?;
    let n = spec.coarse_points;
    let mut best_i = None;
    let mut best = T::neg_infinity();
    for i in 0..n {
        let v = finite_or_floor(f(spec.point(i)));
        if v > best {
            best = v;
            best_i = Some(i);
        }
    }
    let i = best_i.ok_or(BoundsError::EmptyScan)?;
    let coarse = Maximum {
        argmax: spec.point(i),
        max: best,
    };
    let a = spec.point(i.saturating_sub(1));
    let b = spec.point((i + 1).min(n - 1));
    let refined = golden_section_max(&f, a, b, spec.refine_tol);
    Ok(if refined.max > coarse.max { refined } else { coarse })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> Maximum<T> {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = finite_or_floor(f(x1));
    let mut f2 = finite_or_floor(f(x2));
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = finite_or_floor(f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = finite_or_floor(f(x2));
        }
        iters += 1;
    }
    if f1 >= f2 {
        Maximum { argmax: x1, max: f1 }
    } else {
        Maximum { argmax: x2, max: f2 }
    }
}

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
    /// `false` when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

// Gauss-Kronrod 7/15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn gauss_kronrod<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for k in 0..7 {
        let dx = radius * T::lit(XGK[k]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[k]);
        if k % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[k / 2]);
        }
    }
    Segment {
        a,
        b,
        value: kronrod * radius,
        error: ((kronrod - gauss) * radius).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Stops when the summed error estimate drops below
/// `max(rel_tol |I|, 1e-15)`. Running out of the subdivision budget is
/// reported through [`Integral::converged`] and a log warning.
pub fn integrate<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> Integral<T> {
    integrate_pieces(f, &[a, b], rel_tol)
}

/// Like [`integrate`], seeded with a partition at the given ascending breakpoints
/// (kinks or discontinuities of the integrand).
pub fn integrate_pieces<T: Scalar>(f: impl Fn(T) -> T, breakpoints: &[T], rel_tol: T) -> Integral<T> {
    let mut heap = BinaryHeap::new();
    let mut value = T::zero();
    let mut error = T::zero();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let seg = gauss_kronrod(&f, w[0], w[1]);
            value = value + seg.value;
            error = error + seg.error;
            heap.push(seg);
        }
    }
    let floor = T::lit(QUAD_ABS_FLOOR);
    let mut converged = true;
    loop {
        if error <= (rel_tol * value.abs()).max(floor) {
            break;
        }
        if heap.len() >= MAX_SUBINTERVALS {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval is at machine resolution
            heap.push(worst);
            converged = false;
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 4096 == 0 {
            // resum to keep the running totals free of drift
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let mut segs: Vec<_> = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let value = segs.iter().map(|s| s.value).sum();
    let abs_error = segs.iter().map(|s| s.error).sum();
    if !converged {
        log::warn!(
            "quadrature budget exhausted: estimate {:e} with error {:e}",
            value,
            abs_error
        );
    }
    Integral {
        value,
        abs_error,
        converged,
    }
}

/// Brent's method on a sign-changing bracket, to `1e-13` absolute.
pub fn solve_root<T: Scalar>(f: impl Fn(T) -> T, bracket: (T, T)) -> Result<T> {
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(BoundsError::Bracket {
            lower: a.as_f64(),
            upper: b.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * T::lit(ROOT_TOL);
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b);
    }
    Ok(b)
}
