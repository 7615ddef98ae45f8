use std::f64::consts::PI;

use num_traits::Float;
use serde::Serialize;

use crate::circle::{mean_value, default_analytic_tol, AnalyticBoundaryFunction};
use crate::error::{HardyError, Result};
use crate::factorization::schur_check;
use crate::scalar::Real;

/// Largest `|Im s(0)|` and `-Re s(0)` accepted as rounding.
pub const S0_REAL_TOL: f64 = 1e-8;

/// `C_q` in `∫|1 - s|^q dm ≤ C_q (1 - s(0))`: `2 / sin(π(q-1)/2)` for `q ≤ 2`,
/// `2^{q-1}` above.
pub fn schur_defect_constant(q: f64) -> Result<f64> {
    if q.is_nan() || q <= 1.0 || q.is_infinite() {
        return Err(HardyError::InvalidExponent(q));
    }
    if q <= 2.0 {
        Ok(2.0 / (PI * (q - 1.0) / 2.0).sin())
    } else {
        Ok(2f64.powf(q - 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma12Report {
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub s0: f64,
    /// `s(0) = 0`: the bound reduces to `C_q`.
    pub vacuous: bool,
}

impl Lemma12Report {
    pub fn holds(&self, slack: f64) -> bool {
        self.ratio <= 1.0 + slack
    }
}

/// Grid quadrature of `∫|1 - s|^q dm` against `C_q (1 - s(0))` for a Schur function
/// with `s(0) ≥ 0`.
pub fn lemma12_report<T: Real>(s: &AnalyticBoundaryFunction<T>, q: f64) -> Result<Lemma12Report> {
    let cq = schur_defect_constant(q)?;
    let tol = Float::max(default_analytic_tol::<T>(), s.tolerance());
    let check = schur_check(s, tol);
    if !check.pass {
        return Err(HardyError::InvalidParameter(format!(
            "not a Schur function: defect {:.3e}, max modulus {:.17}",
            check.analytic_defect, check.max_modulus
        )));
    }
    let s0 = mean_value(s);
    let (s0_re, s0_im) = (s0.re.as_f64(), s0.im.as_f64());
    if s0_im.abs() > S0_REAL_TOL || s0_re < -S0_REAL_TOL {
        return Err(HardyError::InvalidParameter(format!(
            "s(0) = {s0_re}{s0_im:+}i is not real and nonnegative"
        )));
    }
    let qt = T::lit(q);
    let one = crate::scalar::cx(T::one(), T::zero());
    let lhs = s.integrate_real(|z| Float::powf((one - z).norm(), qt)).as_f64();
    let rhs = cq * (1.0 - s0_re);
    let ratio = if lhs == 0.0 {
        0.0
    } else if rhs <= 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    };
    Ok(Lemma12Report { q, lhs, rhs, ratio, s0: s0_re, vacuous: s0_re.abs() <= 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{make_schur_positive, BlaschkeSpec};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constants() {
        assert!((schur_defect_constant(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((schur_defect_constant(1.5).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(schur_defect_constant(3.0).unwrap(), 4.0);
        assert!(schur_defect_constant(1.0).is_err());
    }

    #[test]
    fn identity_is_sharp() {
        let s = AnalyticBoundaryFunction::<f64>::from_fn(4096, |t| t).unwrap();
        let r = lemma12_report(&s, 2.0).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12);
        assert!((r.ratio - 1.0).abs() < 1e-10);
        assert!(r.vacuous);
    }

    #[test]
    fn constant_one_is_zero_case() {
        let s = AnalyticBoundaryFunction::<f64>::constant(64, c(1.0, 0.0)).unwrap();
        let r = lemma12_report(&s, 1.5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn scalar_case() {
        let cval = 0.5;
        let s = AnalyticBoundaryFunction::<f64>::constant(64, c(cval, 0.0)).unwrap();
        let r = lemma12_report(&s, 1.5).unwrap();
        assert!((r.lhs - 0.5f64.powf(1.5)).abs() < 1e-15);
        assert!((r.rhs - 2.0 / (PI / 4.0).sin() * 0.5).abs() < 1e-15);
        assert!(r.ratio <= 1.0);
    }

    #[test]
    fn random_blaschke_products() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let zeros: Vec<Complex64> = (0..rng.random_range(1..=20))
                .map(|_| Complex64::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..6.3)))
                .collect();
            let b = BlaschkeSpec::new(zeros).unwrap();
            let s = AnalyticBoundaryFunction::from_fn(4096, |t| b.eval(t).unwrap()).unwrap();
            let s = make_schur_positive(&s).unwrap();
            for q in [1.25, 1.5, 2.0, 3.0] {
                let r = lemma12_report(&s, q).unwrap();
                assert!(r.holds(1e-6), "{r:?}");
            }
        }
    }

    #[test]
    fn rejects_non_schur_and_rotated() {
        let s = AnalyticBoundaryFunction::<f64>::from_fn(64, |t| t * 1.5).unwrap();
        assert!(lemma12_report(&s, 2.0).is_err());
        let s = AnalyticBoundaryFunction::<f64>::constant(64, c(0.0, 0.5)).unwrap();
        assert!(lemma12_report(&s, 2.0).is_err());
        let s = AnalyticBoundaryFunction::<f64>::constant(64, c(0.5, 0.0)).unwrap();
        assert!(lemma12_report(&s, 1.0).is_err());
    }
}
