use num_traits::One;

use crate::error::{HardyError, Result};
use crate::scalar::{Cx, Real};

/// Zeros must stay this far inside the unit circle.
pub const ZERO_MARGIN: f64 = 1e-6;

/// Finite Blaschke product with zeros `ζ_j`, each factor normalized by `ζ̄_j/|ζ_j|`
/// (the factor `ζ` for a zero at the origin).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlaschkeSpec<T: Real> {
    zeros: Vec<Cx<T>>,
}

impl<T: Real> BlaschkeSpec<T> {
    pub fn new(zeros: Vec<Cx<T>>) -> Result<Self> {
        let limit = T::one() - T::lit(ZERO_MARGIN);
        if let Some(z) = zeros.iter().find(|z| z.norm() > limit) {
            return Err(HardyError::OutsideDisk(format!("{z}"), limit.as_f64()));
        }
        Ok(Self { zeros })
    }

    pub fn empty() -> Self {
        Self { zeros: Vec::new() }
    }

    pub fn zeros(&self) -> &[Cx<T>] {
        &self.zeros
    }

    /// Value at a point of the closed disk.
    pub fn eval(&self, zeta: Cx<T>) -> Result<Cx<T>> {
        let slack = T::one() + T::lit(1e-12);
        if zeta.norm() > slack {
            return Err(HardyError::OutsideDisk(format!("{zeta}"), 1.0));
        }
        Ok(self.eval_unchecked(zeta))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, zeta: Cx<T>) -> Cx<T> {
        self.zeros.iter().fold(Cx::one(), |acc, &a| {
            let r = a.norm();
            if r == T::zero() {
                acc * zeta
            } else {
                let norm: Cx<T> = a.conj() / r;
                let one: Cx<T> = Cx::one();
                acc * norm * (a - zeta) / (one - zeta * a.conj())
            }
        })
    }

    pub fn eval_many(&self, points: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        points.iter().map(|&z| self.eval(z)).collect()
    }

    /// Product value at the origin, `Π |ζ_j|` (zero if a zero sits at the origin).
    pub fn value_at_origin(&self) -> T {
        self.zeros.iter().map(|z| z.norm()).fold(T::one(), |a, b| a * b)
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.zeros.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_at_origin_is_identity_factor() {
        let b = BlaschkeSpec::new(vec![c(0.0, 0.0)]).unwrap();
        for z in [c(0.3, 0.1), c(-0.5, 0.7), c(0.0, 1.0)] {
            assert!((b.eval(z).unwrap() - z).norm() < 1e-15);
        }
    }

    #[test]
    fn single_zero() {
        let b = BlaschkeSpec::new(vec![c(0.5, 0.0)]).unwrap();
        assert!(b.eval(c(0.5, 0.0)).unwrap().norm() < 1e-15);
        let v0 = b.eval(c(0.0, 0.0)).unwrap();
        assert!((v0 - c(0.5, 0.0)).norm() < 1e-15);
        assert!((b.value_at_origin() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unimodular_on_circle_and_contractive_inside() {
        let b = BlaschkeSpec::new(vec![c(0.2, 0.3), c(-0.7, 0.1), c(0.0, -0.9)]).unwrap();
        for k in 0..64 {
            let t = Complex64::from_polar(1.0, 0.1 * k as f64);
            assert!((b.eval(t).unwrap().norm() - 1.0).abs() < 1e-12);
            assert!(b.eval(t * 0.95).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn rejects_zero_near_boundary_and_points_outside() {
        assert!(BlaschkeSpec::new(vec![c(1.0 - 1e-7, 0.0)]).is_err());
        let b = BlaschkeSpec::<f64>::empty();
        assert!(b.eval(c(1.1, 0.0)).is_err());
    }
}
