use num_complex::Complex;
use num_traits::Float;

use crate::circle::{mean_value, AnalyticBoundaryFunction};
use crate::error::{HardyError, Result};
use crate::scalar::Real;

/// Allowed excess of `max |s|` over 1 on the grid.
pub const SCHUR_MODULUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurCheck {
    pub pass: bool,
    pub analytic_defect: f64,
    pub max_modulus: f64,
    /// `1 + slack - max|s|`; negative when the modulus bound fails.
    pub margin: f64,
}

/// Membership test for the unit ball of `H^∞` on the grid.
pub fn schur_check<T: Real>(s: &AnalyticBoundaryFunction<T>, analytic_tol: T) -> SchurCheck {
    let defect = s.defect();
    let max_modulus = s.max_abs();
    let margin = T::one() + T::lit(SCHUR_MODULUS_SLACK) - max_modulus;
    SchurCheck {
        pass: defect <= analytic_tol && margin >= T::zero(),
        analytic_defect: defect.as_f64(),
        max_modulus: max_modulus.as_f64(),
        margin: margin.as_f64(),
    }
}

/// Rotates `s` by `e^{-i arg s(0)}` so that its value at the origin is real and positive.
pub fn make_schur_positive<T: Real>(s: &AnalyticBoundaryFunction<T>) -> Result<AnalyticBoundaryFunction<T>> {
    let s0 = mean_value(s);
    let r = s0.norm();
    if r <= T::eps() * T::lit(64.0) * Float::max(T::one(), s.max_abs()) {
        return Err(HardyError::SchurZeroAtOrigin);
    }
    let rot: Complex<T> = s0.conj() / r;
    Ok(s.scale(rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::BlaschkeSpec;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_passes_and_doubling_fails() {
        let t = AnalyticBoundaryFunction::<f64>::from_fn(64, |t| t).unwrap();
        assert!(schur_check(&t, 1e-9).pass);
        let t2 = t.scale(c(2.0, 0.0));
        let chk = schur_check(&t2, 1e-9);
        assert!(!chk.pass);
        assert!(chk.margin < 0.0);
    }

    #[test]
    fn random_blaschke_products_pass() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let zeros: Vec<Complex64> = (0..rng.random_range(1..12))
                .map(|_| Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..6.3)))
                .collect();
            let b = BlaschkeSpec::new(zeros).unwrap();
            let s = AnalyticBoundaryFunction::from_fn(1024, |t| b.eval(t).unwrap()).unwrap();
            let chk = schur_check(&s, 1e-9);
            assert!(chk.pass, "{chk:?}");
            assert!((chk.max_modulus - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_to_positive_mean() {
        let s = AnalyticBoundaryFunction::<f64>::constant(16, c(0.0, 0.5)).unwrap();
        let r = make_schur_positive(&s).unwrap();
        assert!(r.samples().iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));

        let s = AnalyticBoundaryFunction::<f64>::from_fn(32, |t| t * 0.5 + 0.3).unwrap();
        let r = make_schur_positive(&s).unwrap();
        assert!(r.sub(&s).unwrap().max_abs() < 1e-15);

        // Blaschke product with s(0) = -0.2
        let b = BlaschkeSpec::new(vec![c(-0.2, 0.0)]).unwrap();
        let s = AnalyticBoundaryFunction::from_fn(256, |t| b.eval(t).unwrap() * -1.0).unwrap();
        assert!((mean_value(&s) - c(-0.2, 0.0)).norm() < 1e-14);
        let r = make_schur_positive(&s).unwrap();
        assert!((mean_value(&r) - c(0.2, 0.0)).norm() < 1e-14);

        let z = AnalyticBoundaryFunction::<f64>::from_fn(16, |t| t).unwrap();
        assert!(matches!(make_schur_positive(&z), Err(HardyError::SchurZeroAtOrigin)));
    }
}
