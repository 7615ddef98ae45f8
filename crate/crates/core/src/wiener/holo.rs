use num_traits::Zero;

use crate::circle::{conjugate, BoundaryFunction, Polynomial};
use crate::error::Result;
use crate::scalar::{cx, Cx, Real};

/// A function holomorphic on a neighbourhood of the closed disk, evaluated
/// along Brownian paths.
pub trait HolomorphicFunction<T: Real> {
    fn eval(&self, z: Cx<T>) -> Cx<T>;
    fn derivative(&self, z: Cx<T>) -> Cx<T>;
}

impl<T: Real> HolomorphicFunction<T> for Polynomial<T> {
    fn eval(&self, z: Cx<T>) -> Cx<T> {
        Polynomial::eval(self, z)
    }

    fn derivative(&self, z: Cx<T>) -> Cx<T> {
        self.eval_with_derivative(z).1
    }
}

/// Trailing coefficients below this fraction of the largest are dropped from completions.
pub const COMPLETION_TRIM: f64 = 1e-15;

/// Polynomial `h` with `Re h = u` on the circle: `a_0 = û_0`, `a_k = 2û_k` for
/// `0 < k < N/2`. On the grid `h(t_k) = u_k + i(Hu)_k` up to the Nyquist mode of `u`.
pub fn harmonic_completion<T: Real>(u: &BoundaryFunction<T>) -> Result<Polynomial<T>> {
    conjugate(u)?;
    let spec = u.to_spectrum();
    let n = u.len() as isize;
    let two = T::lit(2.0);
    let coeffs: Vec<Cx<T>> = (0..n / 2)
        .map(|k| if k == 0 { cx(spec.coeff(0).re, T::zero()) } else { spec.coeff(k) * two })
        .collect();
    Ok(Polynomial::new(coeffs).trimmed(T::lit(COMPLETION_TRIM)))
}

/// `e^{iφ} exp(h(z))` for a polynomial exponent `h`: the holomorphic function whose
/// boundary modulus is `exp(Re h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpForm<T: Real> {
    pub exponent: Polynomial<T>,
    pub phase: T,
}

impl<T: Real> ExpForm<T> {
    pub fn new(exponent: Polynomial<T>, phase: T) -> Self {
        Self { exponent, phase }
    }

    /// Exp-form with boundary log-modulus `u`.
    pub fn from_log_modulus(u: &BoundaryFunction<T>) -> Result<Self> {
        Ok(Self::new(harmonic_completion(u)?, T::zero()))
    }

    /// Grid values `e^{iφ} exp(u_k + i(Hu)_k)`; `|·| = exp(u_k)` node-wise.
    pub fn node_values(u: &BoundaryFunction<T>, phase: T) -> Result<Vec<Cx<T>>> {
        let hu = conjugate(u)?;
        let rot = Cx::from_polar(T::one(), phase);
        Ok(u.samples().iter().zip(hu.samples()).map(|(a, b)| rot * cx(a.re, b.re).exp()).collect())
    }
}

impl<T: Real> HolomorphicFunction<T> for ExpForm<T> {
    fn eval(&self, z: Cx<T>) -> Cx<T> {
        let h = self.exponent.eval(z);
        (h + cx(T::zero(), self.phase)).exp()
    }

    fn derivative(&self, z: Cx<T>) -> Cx<T> {
        let (h, dh) = self.exponent.eval_with_derivative(z);
        dh * (h + cx(T::zero(), self.phase)).exp()
    }
}

/// Constant function, convenient for degenerate checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant<T: Real>(pub Cx<T>);

impl<T: Real> HolomorphicFunction<T> for Constant<T> {
    fn eval(&self, _z: Cx<T>) -> Cx<T> {
        self.0
    }

    fn derivative(&self, _z: Cx<T>) -> Cx<T> {
        Cx::zero()
    }
}
