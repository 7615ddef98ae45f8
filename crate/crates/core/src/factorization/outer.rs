use num_traits::Float;

use crate::circle::{conjugate, AnalyticBoundaryFunction, BoundaryFunction};
use crate::error::{HardyError, Result};
use crate::scalar::{cx, Real};

/// Nodes where the modulus falls below this floor are clipped before taking logs.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-12;

/// Outer function with boundary log-modulus `v`: samples `exp(v + i·Hv)`.
///
/// The boundary modulus is `exp(v)` node-wise up to rounding, and the value at
/// the origin is `exp(∫ v dm)`.
pub fn outer_from_log_modulus<T: Real>(log_modulus: &BoundaryFunction<T>) -> Result<AnalyticBoundaryFunction<T>> {
    let h = conjugate(log_modulus)?;
    let samples = log_modulus
        .samples()
        .iter()
        .zip(h.samples())
        .map(|(v, hv)| cx(v.re, hv.re).exp())
        .collect();
    Ok(AnalyticBoundaryFunction::from_holomorphic_samples(BoundaryFunction::new(samples)?))
}

/// Outer function whose boundary modulus is `max(w, floor)`.
pub fn outer_from_modulus<T: Real>(w: &BoundaryFunction<T>, floor: T) -> Result<AnalyticBoundaryFunction<T>> {
    let scale = Float::max(T::one(), w.max_abs());
    let tol = Float::max(T::lit(1e-12), T::eps() * T::lit(64.0)) * scale;
    let max_im = w.max_imag();
    if max_im > tol {
        return Err(HardyError::NotReal(max_im.as_f64()));
    }
    if let Some((index, z)) = w.samples().iter().enumerate().find(|(_, z)| z.re < T::zero()) {
        return Err(HardyError::NegativeModulus { index, value: z.re.as_f64() });
    }
    let logs: Vec<T> = w.samples().iter().map(|z| Float::ln(Float::max(z.re, floor))).collect();
    outer_from_log_modulus(&BoundaryFunction::from_real(&logs)?)
}
