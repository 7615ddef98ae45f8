use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{HardyError, Result};
use crate::scalar::{Cx, Real};

/// Finite atomic singular measure `Σ c_j δ_{t_j}` on the circle, giving the
/// inner factor `exp(Σ c_j (ζ + t_j)/(ζ - t_j))`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularAtomSpec<T: Real> {
    atoms: Vec<(Cx<T>, T)>,
}

impl<T: Real> SingularAtomSpec<T> {
    pub fn new(atoms: Vec<(Cx<T>, T)>) -> Result<Self> {
        let tol = Float::max(T::lit(1e-12), T::eps() * T::lit(8.0));
        for (t, c) in &atoms {
            if !(*c > T::zero()) {
                return Err(HardyError::InvalidParameter(format!("atom mass {c} must be positive")));
            }
            if Float::abs(t.norm() - T::one()) > tol {
                return Err(HardyError::InvalidParameter(format!("atom location {t} is not unimodular")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    /// Atom at angle `angle` with mass `c`.
    pub fn atom_at_angle(angle: T, c: T) -> Result<Self> {
        Self::new(vec![(Complex::from_polar(T::one(), angle), c)])
    }

    pub fn atoms(&self) -> &[(Cx<T>, T)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().map(|a| a.1).fold(T::zero(), |a, b| a + b)
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Value at an interior point `|ζ| ≤ 1 - 1e-6`.
    pub fn eval(&self, zeta: Cx<T>) -> Result<Cx<T>> {
        let limit = T::one() - T::lit(1e-6);
        if zeta.norm() > limit {
            return Err(HardyError::OutsideDisk(format!("{zeta}"), limit.as_f64()));
        }
        let exponent = self
            .atoms
            .iter()
            .fold(Cx::zero(), |acc: Cx<T>, &(t, c)| acc + (zeta + t) / (zeta - t) * c);
        Ok(exponent.exp())
    }

    pub fn eval_many(&self, points: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        points.iter().map(|&z| self.eval(z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn no_atoms_is_one() {
        let s = SingularAtomSpec::<f64>::empty();
        assert_eq!(s.eval(Complex64::new(0.3, 0.2)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn value_at_origin_is_exp_minus_mass() {
        let s = SingularAtomSpec::new(vec![(Complex64::new(1.0, 0.0), 0.7)]).unwrap();
        assert!((s.eval(Complex64::new(0.0, 0.0)).unwrap() - Complex64::new((-0.7f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn real_axis_kernel() {
        let s = SingularAtomSpec::new(vec![(Complex64::new(1.0, 0.0), 1.0)]).unwrap();
        for r in [-0.9, -0.2, 0.0, 0.4, 0.8] {
            let want = ((r + 1.0) / (r - 1.0)).exp();
            assert!((s.eval(Complex64::new(r, 0.0)).unwrap() - Complex64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn bounded_by_one_and_refuses_boundary() {
        let s = SingularAtomSpec::new(vec![(Complex64::new(0.0, 1.0), 0.5), (Complex64::new(-1.0, 0.0), 2.0)]).unwrap();
        for k in 0..50 {
            let z = Complex64::from_polar(0.99, 0.13 * k as f64);
            assert!(s.eval(z).unwrap().norm() <= 1.0);
        }
        assert!(s.eval(Complex64::new(1.0, 0.0)).is_err());
        assert!(SingularAtomSpec::new(vec![(Complex64::new(1.0, 0.0), -1.0)]).is_err());
        assert!(SingularAtomSpec::new(vec![(Complex64::new(0.9, 0.0), 1.0)]).is_err());
    }
}
