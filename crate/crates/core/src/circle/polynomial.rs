use num_traits::{One, Zero};

use crate::scalar::{Cx, Real};

/// Analytic polynomial `Σ_{k ≥ 0} a_k ζ^k`, the disk extension of an analytic grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        Self { coeffs }
    }

    pub fn monomial(degree: usize, c: Cx<T>) -> Self {
        let mut coeffs = vec![Cx::zero(); degree + 1];
        coeffs[degree] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    #[inline]
    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs.iter().rev().fold(Cx::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, z: Cx<T>) -> (Cx<T>, Cx<T>) {
        let mut p = Cx::zero();
        let mut dp = Cx::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self { coeffs: vec![Cx::zero()] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_count(k))
            .collect();
        Self { coeffs }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Drops trailing coefficients with `|a_k| ≤ rel · max_j |a_j|`.
    pub fn trimmed(&self, rel: T) -> Self {
        let top = self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), num_traits::Float::max);
        let keep = self.coeffs.iter().rposition(|c| c.norm() > rel * top).map_or(1, |i| i + 1);
        Self { coeffs: self.coeffs[..keep].to_vec() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(Cx::one())
    }
}
