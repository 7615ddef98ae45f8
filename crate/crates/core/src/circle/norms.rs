use num_traits::Float;

use super::boundary::BoundaryFunction;
use crate::error::{HardyError, Result};
use crate::scalar::Real;

/// Quadrature `L^p` norm; `p = ∞` is the maximum over nodes.
pub fn norm_p<T: Real>(f: &BoundaryFunction<T>, p: f64) -> Result<T> {
    if p.is_nan() || p < 1.0 {
        return Err(HardyError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let pt = T::lit(p);
    let mean = f.integrate_real(|z| Float::powf(z.norm(), pt));
    Ok(Float::powf(mean, T::one() / pt))
}

/// Decreasing rearrangement of `|f|` as a step function on `[0, 1)`: value
/// `values[j]` on `[j/N, (j+1)/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreasingRearrangement<T: Real> {
    values: Vec<T>,
}

impl<T: Real> DecreasingRearrangement<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f*(s)`; zero for `s ≥ 1`.
    pub fn value_at(&self, s: T) -> T {
        if s < T::zero() {
            return self.values.first().copied().unwrap_or_else(T::zero);
        }
        let j = Float::floor(s * T::from_count(self.len())).to_usize().unwrap_or(usize::MAX);
        self.values.get(j).copied().unwrap_or_else(T::zero)
    }

    /// `∫_0^t f*(s) ds`, exact for the step function.
    pub fn integral_to(&self, t: T) -> T {
        let n = T::from_count(self.len());
        let h = T::one() / n;
        let mut acc = T::zero();
        for (j, &a) in self.values.iter().enumerate() {
            let lo = T::from_count(j) * h;
            if t <= lo {
                break;
            }
            let width = Float::min(t - lo, h);
            acc = acc + a * width;
        }
        acc
    }
}

pub fn rearrangement<T: Real>(f: &BoundaryFunction<T>) -> DecreasingRearrangement<T> {
    let mut values = f.modulus();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    DecreasingRearrangement { values }
}

/// Lorentz `L^{p,q}` norm `(∫_0^1 (s^{1/p} f*(s))^q ds/s)^{1/q}`, integrated
/// exactly over each step of the rearrangement. `q = ∞` gives
/// `sup_s s^{1/p} f*(s)`.
pub fn lorentz_norm<T: Real>(f: &BoundaryFunction<T>, p: f64, q: f64) -> Result<T> {
    if p.is_nan() || !(1.0..f64::INFINITY).contains(&p) {
        return Err(HardyError::InvalidExponent(p));
    }
    if q.is_nan() || q < 1.0 {
        return Err(HardyError::InvalidExponent(q));
    }
    let r = rearrangement(f);
    let n = T::from_count(r.len());
    let inv_p = T::lit(1.0 / p);
    if q.is_infinite() {
        let sup = r
            .values
            .iter()
            .enumerate()
            .map(|(j, &a)| a * Float::powf(T::from_count(j + 1) / n, inv_p))
            .fold(T::zero(), Float::max);
        return Ok(sup);
    }
    let qt = T::lit(q);
    let e = T::lit(q / p);
    let weight = T::lit(p / q);
    let total = crate::scalar_sum(r.values.iter().enumerate().map(|(j, &a)| {
        let lo = Float::powf(T::from_count(j) / n, e);
        let hi = Float::powf(T::from_count(j + 1) / n, e);
        Float::powf(a, qt) * weight * (hi - lo)
    }));
    Ok(Float::powf(total, T::one() / qt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_norms() {
        let f = BoundaryFunction::<f64>::constant(64, Complex64::new(0.0, -3.0)).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((norm_p(&f, p).unwrap() - 3.0).abs() < 1e-13);
        }
        for (p, q) in [(2.0, 2.0), (1.5, 3.0), (4.0, f64::INFINITY)] {
            assert!((lorentz_norm(&f, p, q).unwrap() - 3.0 * lorentz_const(p, q)).abs() < 1e-12);
        }
    }

    // Lorentz norm of the constant 1: (p/q)^{1/q}, or 1 for q = ∞.
    fn lorentz_const(p: f64, q: f64) -> f64 {
        if q.is_infinite() {
            1.0
        } else {
            (p / q).powf(1.0 / q)
        }
    }

    #[test]
    fn half_indicator_has_l1_norm_half() {
        let f = BoundaryFunction::<f64>::from_fn(128, |t| Complex64::new(if t.im > 0.0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        assert!((norm_p(&f, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        let f = BoundaryFunction::<f64>::constant(8, Complex64::new(1.0, 0.0)).unwrap();
        assert!(norm_p(&f, 0.5).is_err());
        assert!(lorentz_norm(&f, 0.9, 2.0).is_err());
    }

    #[test]
    fn rearrangement_integral() {
        let f = BoundaryFunction::<f64>::from_real(&[4.0, 1.0, 3.0, 2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let r = rearrangement(&f);
        assert_eq!(r.values()[..4], [4.0, 3.0, 2.0, 1.0]);
        assert!((r.integral_to(0.25) - 7.0 / 8.0).abs() < 1e-15);
        assert!((r.integral_to(0.1875) - (4.0 + 0.5 * 3.0) / 8.0).abs() < 1e-15);
        assert!((r.integral_to(5.0) - 10.0 / 8.0).abs() < 1e-15);
        assert_eq!(r.value_at(0.3), 2.0);
        assert_eq!(r.value_at(0.4), 1.0);
        assert_eq!(r.value_at(1.0), 0.0);
    }
}
