//! Discretized boundary functions on the unit circle.
//!
//! Samples live on the midpoint grid `t_k = exp(2πi(k + ½)/N)`; integration
//! against normalized arc length is the uniform average of the samples, exact
//! for trigonometric polynomials of degree below `N/2`.

mod analytic;
mod boundary;
mod io;
mod norms;
mod polynomial;
mod spectrum;

pub use analytic::{
    analytic_defect, default_analytic_tol, conjugate, evaluate_interior, mean_value, riesz_project, AnalyticBoundaryFunction,
    DEFAULT_ANALYTIC_TOL, DEFAULT_BOUNDARY_MARGIN,
};
pub use boundary::BoundaryFunction;
pub(crate) use boundary::check_grid_size;
pub use io::{read_csv, write_csv, BoundaryFunctionWire};
pub use norms::{lorentz_norm, norm_p, rearrangement, DecreasingRearrangement};
pub use polynomial::Polynomial;
pub use spectrum::Spectrum;
