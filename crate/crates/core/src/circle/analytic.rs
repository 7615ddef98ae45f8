use std::ops::Deref;

use num_traits::{Float, Zero};

use super::boundary::BoundaryFunction;
use super::polynomial::Polynomial;
use super::spectrum::Spectrum;
use crate::error::{HardyError, Result};
use crate::scalar::{cx, Cx, Real};

/// Default relative bound on negative-mode energy for analytic grid functions.
pub const DEFAULT_ANALYTIC_TOL: f64 = 1e-9;

/// Default distance from the circle required by [`evaluate_interior`].
pub const DEFAULT_BOUNDARY_MARGIN: f64 = 1e-6;

/// [`DEFAULT_ANALYTIC_TOL`], raised to `64·ε` for scalars too coarse to reach it.
pub fn default_analytic_tol<T: Real>() -> T {
    Float::max(T::lit(DEFAULT_ANALYTIC_TOL), T::eps() * T::lit(64.0))
}

/// `max_{k<0} |c_k| / max_k |c_k|` (zero for the zero function).
pub fn analytic_defect<T: Real>(spectrum: &Spectrum<T>) -> T {
    let top = spectrum.max_abs();
    if top == T::zero() {
        return T::zero();
    }
    let neg = spectrum
        .modes()
        .filter(|(k, _)| *k < 0)
        .map(|(_, c)| c.norm())
        .fold(T::zero(), Float::max);
    neg / top
}

/// A boundary function whose negative Fourier modes are negligible: the boundary
/// values of an analytic function in the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticBoundaryFunction<T: Real> {
    f: BoundaryFunction<T>,
    tolerance: T,
}

impl<T: Real> AnalyticBoundaryFunction<T> {
    pub fn new(f: BoundaryFunction<T>) -> Result<Self> {
        Self::with_tolerance(f, default_analytic_tol::<T>())
    }

    pub fn with_tolerance(f: BoundaryFunction<T>, tolerance: T) -> Result<Self> {
        let defect = analytic_defect(&f.to_spectrum());
        if defect > tolerance {
            return Err(HardyError::NotAnalytic { defect: defect.as_f64(), tolerance: tolerance.as_f64() });
        }
        Ok(Self { f, tolerance })
    }

    /// Wraps samples known to be boundary values of an analytic function (for
    /// example `exp` of an analytic polynomial). Aliasing of modes `≥ N/2` shows
    /// up as negative modes; the tolerance records the measured defect.
    pub fn from_holomorphic_samples(f: BoundaryFunction<T>) -> Self {
        let defect = analytic_defect(&f.to_spectrum());
        let tolerance = Float::max(default_analytic_tol::<T>(), defect);
        Self { f, tolerance }
    }

    pub fn from_fn(n: usize, f: impl FnMut(Cx<T>) -> Cx<T>) -> Result<Self> {
        Self::new(BoundaryFunction::from_fn(n, f)?)
    }

    pub fn constant(n: usize, c: Cx<T>) -> Result<Self> {
        Ok(Self { f: BoundaryFunction::constant(n, c)?, tolerance: default_analytic_tol::<T>() })
    }

    pub(crate) fn from_parts_unchecked(f: BoundaryFunction<T>, tolerance: T) -> Self {
        Self { f, tolerance }
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// Measured negative-mode ratio, at most [`Self::tolerance`].
    pub fn defect(&self) -> T {
        analytic_defect(&self.f.to_spectrum())
    }

    pub fn as_boundary(&self) -> &BoundaryFunction<T> {
        &self.f
    }

    pub fn into_boundary(self) -> BoundaryFunction<T> {
        self.f
    }

    /// Disk extension built from the non-negative modes.
    pub fn polynomial(&self) -> Polynomial<T> {
        let s = self.f.to_spectrum();
        Polynomial::new((0..(self.len() / 2) as isize).map(|k| s.coeff(k)).collect())
    }

    /// Node-wise product; analytic functions form an algebra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let f = self.f.mul(&other.f)?;
        Ok(Self::from_holomorphic_samples(f))
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        Self { f: self.f.scale(c), tolerance: self.tolerance }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.f.sub(&other.f)?;
        Ok(Self { f, tolerance: Float::max(self.tolerance, other.tolerance) })
    }
}

impl<T: Real> Deref for AnalyticBoundaryFunction<T> {
    type Target = BoundaryFunction<T>;

    fn deref(&self) -> &BoundaryFunction<T> {
        &self.f
    }
}

/// Riesz projection: keeps the modes `k ≥ 0` and zeroes the rest (the Nyquist
/// mode `-N/2` included).
pub fn riesz_project<T: Real>(f: &BoundaryFunction<T>) -> AnalyticBoundaryFunction<T> {
    let s = f.to_spectrum().map_modes(|k, c| if k >= 0 { c } else { Cx::zero() });
    let g = BoundaryFunction::from_spectrum(&s).expect("spectrum of a valid grid function");
    AnalyticBoundaryFunction::from_parts_unchecked(g, default_analytic_tol::<T>())
}

/// Conjugate function: multiplier `-i·sgn(k)` with the mean and the Nyquist mode
/// annihilated. On the midpoint grid the Nyquist harmonic is `sin(Nθ/2)`, whose
/// conjugate `-cos(Nθ/2)` vanishes at every node, so zeroing it is exact.
pub fn conjugate<T: Real>(u: &BoundaryFunction<T>) -> Result<BoundaryFunction<T>> {
    let scale = Float::max(T::one(), u.max_abs());
    let tol = Float::max(T::lit(1e-12), T::eps() * T::lit(64.0)) * scale;
    let max_im = u.max_imag();
    if max_im > tol {
        return Err(HardyError::NotReal(max_im.as_f64()));
    }
    let n = u.len() as isize;
    let minus_i = cx(T::zero(), -T::one());
    let s = u.to_spectrum().map_modes(|k, c| {
        if k == 0 || k == -n / 2 {
            Cx::zero()
        } else if k > 0 {
            c * minus_i
        } else {
            -(c * minus_i)
        }
    });
    let v = BoundaryFunction::from_spectrum(&s)?;
    BoundaryFunction::new(v.samples().iter().map(|z| cx(z.re, T::zero())).collect())
}

/// Value at the origin, `c_0 = ∫ f dm`.
pub fn mean_value<T: Real>(f: &AnalyticBoundaryFunction<T>) -> Cx<T> {
    f.integral()
}

/// Power-series value `Σ_{k≥0} c_k ζ^k` at an interior point with `|ζ| ≤ 1 - margin`.
pub fn evaluate_interior<T: Real>(f: &AnalyticBoundaryFunction<T>, zeta: Cx<T>, margin: T) -> Result<Cx<T>> {
    let limit = T::one() - margin;
    if zeta.norm() > limit {
        return Err(HardyError::OutsideDisk(format!("{zeta}"), limit.as_f64()));
    }
    Ok(f.polynomial().eval(zeta))
}
