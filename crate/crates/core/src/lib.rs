//! Numerical laboratory for Hardy-space truncation and interpolation.
//!
//! * [`circle`]: spectral engine for boundary functions on the unit circle.
//! * [`factorization`]: Blaschke products, singular factors, outer functions, Schur class.
//! * [`marcinkiewicz`]: analytic truncation at a level, the Schur-defect inequality,
//!   the resulting `H^p` decomposition bound and K-functional estimates.
//! * [`wiener`]: complex Brownian paths stopped at the circle, holomorphic
//!   martingales, stochastic Hilbert transforms, stopping-time decompositions.
//! * [`interp`]: the strip interpolant between `H^1` and `H^∞` on Wiener space
//!   and the geometric iteration that turns half-error steps into exact interpolants.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod circle;
pub mod corpus;
pub mod error;
pub mod factorization;
pub mod interp;
pub mod marcinkiewicz;
pub mod report;
pub mod scalar;
pub mod stats;
pub mod wiener;

pub use error::{HardyError, Result};
pub use scalar::{Cx, Real};

pub type BoundaryFunction64 = circle::BoundaryFunction<f64>;
pub type AnalyticFunction64 = circle::AnalyticBoundaryFunction<f64>;
pub type Spectrum64 = circle::Spectrum<f64>;
pub type Polynomial64 = circle::Polynomial<f64>;
pub type FactoredFunction64 = factorization::FactoredFunction<f64>;
pub type Decomposition64 = marcinkiewicz::DecompositionResult<f64>;
pub type PathEnsemble64 = wiener::PathEnsemble<f64>;
pub type MartingaleMatrix64 = wiener::MartingaleMatrix<f64>;

pub type BoundaryFunction32 = circle::BoundaryFunction<f32>;
pub type AnalyticFunction32 = circle::AnalyticBoundaryFunction<f32>;
pub type Decomposition32 = marcinkiewicz::DecompositionResult<f32>;
pub type PathEnsemble32 = wiener::PathEnsemble<f32>;

/// Neumaier-compensated sum in the working scalar.
pub(crate) fn scalar_sum<T: Real, I: IntoIterator<Item = T>>(xs: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for x in xs {
        let t = sum + x;
        if num_traits::Float::abs(sum) >= num_traits::Float::abs(x) {
            carry = carry + ((sum - t) + x);
        } else {
            carry = carry + ((x - t) + sum);
        }
        sum = t;
    }
    sum + carry
}
