use num_traits::Float;
use serde::Serialize;

use crate::circle::{mean_value, norm_p, AnalyticBoundaryFunction, BoundaryFunction};
use crate::error::{HardyError, Result};
use crate::factorization::{outer_from_modulus, DEFAULT_LOG_FLOOR};
use crate::scalar::{Cx, Real};

/// Node indicator of `E = {|f| ≥ λ}`.
pub fn level_set<T: Real>(f: &BoundaryFunction<T>, lambda: T) -> Vec<bool> {
    f.samples().iter().map(|z| z.norm() >= lambda).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionNorms {
    pub f0_l1: f64,
    pub f1_sup: f64,
    pub f_p: f64,
}

/// `f = f0 + f1` with `|f1| = min(|f|, λ)` and `f1 = s·f`, `s` the outer function
/// with modulus `min(1, λ/|f|)`.
#[derive(Debug, Clone)]
pub struct DecompositionResult<T: Real> {
    pub f1: AnalyticBoundaryFunction<T>,
    pub f0: AnalyticBoundaryFunction<T>,
    pub s: AnalyticBoundaryFunction<T>,
    pub lambda: T,
    pub p: f64,
    pub s0: T,
    /// Imaginary part of `s(0)`, zero up to rounding.
    pub s0_imag: T,
    pub norms: DecompositionNorms,
}

impl<T: Real> DecompositionResult<T> {
    /// Node-wise `f0 + f1`.
    pub fn recombined(&self) -> BoundaryFunction<T> {
        BoundaryFunction::from_samples_unchecked(
            self.f0.samples().iter().zip(self.f1.samples()).map(|(a, b)| a + b).collect(),
        )
    }
}

/// Truncates `f` at level `λ` inside the analytic class.
///
/// Multiplying by `s` keeps the inner part of `f` and replaces its outer part by
/// the outer function of `min(|f|, λ)`.
pub fn decompose<T: Real>(f: &AnalyticBoundaryFunction<T>, lambda: T, p: f64) -> Result<DecompositionResult<T>> {
    if !(lambda > T::zero()) || !Float::is_finite(lambda) {
        return Err(HardyError::InvalidParameter(format!("level must be positive, got {lambda}")));
    }
    if p.is_nan() || p < 1.0 {
        return Err(HardyError::InvalidExponent(p));
    }
    if f.max_abs() < T::lit(DEFAULT_LOG_FLOOR) {
        return Err(HardyError::DegenerateFunction);
    }
    let ratio: Vec<T> = f
        .samples()
        .iter()
        .map(|z| {
            let r = z.norm();
            if r <= lambda {
                T::one()
            } else {
                lambda / r
            }
        })
        .collect();
    let s = outer_from_modulus(&BoundaryFunction::from_real(&ratio)?, T::lit(DEFAULT_LOG_FLOOR))?;
    let f1_samples: Vec<Cx<T>> = f.samples().iter().zip(s.samples()).map(|(a, b)| a * b).collect();
    let f0_samples: Vec<Cx<T>> = f.samples().iter().zip(&f1_samples).map(|(a, b)| a - b).collect();
    let f1 = AnalyticBoundaryFunction::from_holomorphic_samples(BoundaryFunction::new(f1_samples)?);
    let f0 = AnalyticBoundaryFunction::from_holomorphic_samples(BoundaryFunction::new(f0_samples)?);
    let s0 = mean_value(&s);
    let norms = DecompositionNorms {
        f0_l1: norm_p(&f0, 1.0)?.as_f64(),
        f1_sup: f1.max_abs().as_f64(),
        f_p: norm_p(f, p)?.as_f64(),
    };
    Ok(DecompositionResult { f1, f0, s, lambda, p, s0: s0.re, s0_imag: s0.im, norms })
}

/// `s(0)` computed as the mean of `s` and from `exp(-∫_E ln(|f|/λ) dm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SZeroTwoWays {
    pub s0_direct: f64,
    pub s0_formula: f64,
    pub difference: f64,
}

pub fn s_zero_two_ways<T: Real>(result: &DecompositionResult<T>) -> SZeroTwoWays {
    let f = result.recombined();
    let lambda = result.lambda;
    let log_excess = f.integrate_real(|z| {
        let r = z.norm();
        if r >= lambda {
            Float::ln(r / lambda)
        } else {
            T::zero()
        }
    });
    let s0_direct = result.s0.as_f64();
    let s0_formula = (-log_excess.as_f64()).exp();
    SZeroTwoWays { s0_direct, s0_formula, difference: (s0_direct - s0_formula).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn level_set_examples() {
        let f = BoundaryFunction::<f64>::constant(16, c(0.0, 2.0)).unwrap();
        assert!(level_set(&f, 1.0).iter().all(|&b| b));
        assert!(level_set(&f, 4.0).iter().all(|&b| !b));
        let n = 512;
        let g = BoundaryFunction::<f64>::from_fn(n, |t| t + 1.0).unwrap();
        for (k, inside) in level_set(&g, 1.0).into_iter().enumerate() {
            let theta = g.angle(k);
            let theta = if theta > PI { theta - 2.0 * PI } else { theta };
            assert_eq!(inside, theta.abs() <= 2.0 * PI / 3.0, "k = {k}");
        }
    }

    #[test]
    fn constant_below_level_is_untouched() {
        let f = AnalyticBoundaryFunction::<f64>::constant(32, c(0.3, -0.4)).unwrap();
        let d = decompose(&f, 1.0, 2.0).unwrap();
        assert_eq!(d.f1.samples(), f.samples());
        assert!(d.f0.max_abs() == 0.0);
        assert!(d.s.samples().iter().all(|z| *z == c(1.0, 0.0)));
        assert_eq!(d.s0, 1.0);
    }

    #[test]
    fn constant_at_twice_level_is_halved() {
        let f = AnalyticBoundaryFunction::<f64>::constant(32, c(0.0, 2.0)).unwrap();
        let d = decompose(&f, 1.0, 2.0).unwrap();
        for (a, b) in d.f1.samples().iter().zip(d.f0.samples()) {
            assert!((a - c(0.0, 1.0)).norm() < 1e-15);
            assert!((b - c(0.0, 1.0)).norm() < 1e-15);
        }
        assert!((d.s0 - 0.5).abs() < 1e-15);
        let two = s_zero_two_ways(&d);
        assert!((two.s0_formula - 0.5).abs() < 1e-15);
        assert!(two.difference < 1e-15);
    }

    #[test]
    fn empty_level_set_gives_one_both_ways() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(64, |t| t * 0.25).unwrap();
        let d = decompose(&f, 1.0, 2.0).unwrap();
        let two = s_zero_two_ways(&d);
        assert_eq!(two.s0_direct, 1.0);
        assert_eq!(two.s0_formula, 1.0);
    }

    #[test]
    fn normalized_one_plus_t() {
        let n = 4096;
        let f = AnalyticBoundaryFunction::<f64>::from_fn(n, |t| (t + 1.0) / 2f64.sqrt()).unwrap();
        let lambda = 0.8;
        let d = decompose(&f, lambda, 2.0).unwrap();
        for (k, z) in d.f1.samples().iter().enumerate() {
            let expect = f.samples()[k].norm().min(lambda);
            assert!((z.norm() - expect).abs() < 1e-6);
        }
        assert!(d.norms.f1_sup <= lambda * (1.0 + 1e-8));
        assert!(d.s.max_abs() <= 1.0 + 1e-9);
        assert!(d.s0_imag.abs() < 1e-8);
        let back = d.recombined();
        for (a, b) in back.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm().max(1.0));
        }
        assert!(s_zero_two_ways(&d).difference < 1e-6);
    }

    #[test]
    fn f1_equals_inner_times_truncated_outer() {
        let n = 1024;
        let f = AnalyticBoundaryFunction::<f64>::from_fn(n, |t| t * (t * 0.5 + 1.0) * 1.3).unwrap();
        let lambda = 1.0;
        let d = decompose(&f, lambda, 2.0).unwrap();
        let split = crate::factorization::inner_outer_split(&f, 1e-12, 1e-4).unwrap();
        let capped: Vec<f64> = f.modulus().iter().map(|r| r.min(lambda)).collect();
        let out = outer_from_modulus(&BoundaryFunction::from_real(&capped).unwrap(), 1e-12).unwrap();
        let alt = split.inner.mul(&out).unwrap();
        assert!(alt.sub(&d.f1).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn invalid_inputs() {
        let f = AnalyticBoundaryFunction::<f64>::constant(8, c(1.0, 0.0)).unwrap();
        assert!(decompose(&f, 0.0, 2.0).is_err());
        assert!(decompose(&f, 1.0, 0.5).is_err());
        let z = AnalyticBoundaryFunction::<f64>::constant(8, c(0.0, 0.0)).unwrap();
        assert!(matches!(decompose(&z, 1.0, 2.0), Err(HardyError::DegenerateFunction)));
    }

    #[test]
    fn works_in_single_precision() {
        let f = AnalyticBoundaryFunction::<f32>::from_fn(256, |t| t + 1.0).unwrap();
        let d = decompose(&f, 1.0f32, 2.0).unwrap();
        assert!(d.norms.f1_sup <= 1.0 + 1e-5);
        assert!(s_zero_two_ways(&d).difference < 1e-4);
    }
}
