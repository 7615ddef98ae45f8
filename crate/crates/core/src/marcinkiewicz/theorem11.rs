use num_traits::Float;
use serde::Serialize;

use super::decompose::decompose;
use super::lemma12::schur_defect_constant;
use crate::circle::{norm_p, AnalyticBoundaryFunction};
use crate::error::{HardyError, Result};
use crate::scalar::{cx, Real};
use crate::stats::ls_slope;

/// Hölder conjugate `p/(p-1)`.
pub fn hoelder_conjugate(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 || p.is_infinite() {
        return Err(HardyError::InvalidExponent(p));
    }
    Ok(p / (p - 1.0))
}

/// `C_p = C_q^{1/q} p^{-1/q}` with `q` the conjugate exponent, so that
/// `‖f0‖_1 ≤ C_p λ^{1-p}` whenever `‖f‖_p = 1`.
pub fn theorem11_constant(p: f64) -> Result<f64> {
    let q = hoelder_conjugate(p)?;
    let cq = schur_defect_constant(q)?;
    Ok(cq.powf(1.0 / q) * p.powf(-1.0 / q))
}

/// Each link of `‖f0‖_1 ≤ (∫|1-s|^q)^{1/q} ≤ (C_q(1-s(0)))^{1/q}` and
/// `1 - s(0) ≤ ∫_E ln(|f|/λ) ≤ λ^{-p}/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem11Chain {
    pub holder: f64,
    pub schur_defect: f64,
    pub log_integral: f64,
    pub chebyshev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem11Report {
    pub p: f64,
    pub lambda: f64,
    /// `‖f‖_p` of the input; the bound is applied to `f / scale`.
    pub scale: f64,
    pub f0_l1: f64,
    pub bound: f64,
    pub ratio: f64,
    pub chain: Theorem11Chain,
    pub pass: bool,
}

fn normalized<T: Real>(f: &AnalyticBoundaryFunction<T>, p: f64) -> Result<(AnalyticBoundaryFunction<T>, T)> {
    let scale = norm_p(f, p)?;
    if !(scale > T::zero()) || !Float::is_finite(scale) {
        return Err(HardyError::DegenerateFunction);
    }
    Ok((f.scale(cx(T::one() / scale, T::zero())), scale))
}

fn report_normalized<T: Real>(g: &AnalyticBoundaryFunction<T>, p: f64, lambda: f64, scale: f64) -> Result<Theorem11Report> {
    let q = hoelder_conjugate(p)?;
    let cp = theorem11_constant(p)?;
    let lam = T::lit(lambda);
    let d = decompose(g, lam, p)?;
    let one = cx(T::one(), T::zero());
    let qt = T::lit(q);
    let holder = Float::powf(d.s.integrate_real(|z| Float::powf((one - z).norm(), qt)), T::one() / qt).as_f64();
    let log_integral = g
        .integrate_real(|z| {
            let r = z.norm();
            if r >= lam {
                Float::ln(r / lam)
            } else {
                T::zero()
            }
        })
        .as_f64();
    let chain = Theorem11Chain {
        holder,
        schur_defect: 1.0 - d.s0.as_f64(),
        log_integral,
        chebyshev: lambda.powf(-p) / p,
    };
    let f0_l1 = d.norms.f0_l1;
    let bound = cp * lambda.powf(1.0 - p);
    let ratio = f0_l1 / bound;
    Ok(Theorem11Report { p, lambda, scale, f0_l1, bound, ratio, chain, pass: ratio <= 1.0 })
}

/// `‖f0‖_1` against `C_p λ^{1-p}` after rescaling `f` to unit `L^p` norm.
pub fn theorem11_report<T: Real>(f: &AnalyticBoundaryFunction<T>, p: f64, lambda: f64) -> Result<Theorem11Report> {
    hoelder_conjugate(p)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(HardyError::InvalidParameter(format!("level must be positive, got {lambda}")));
    }
    let (g, scale) = normalized(f, p)?;
    report_normalized(&g, p, lambda, scale.as_f64())
}

/// Smallest `‖f0‖_1` counted as nonzero when fitting the decay slope.
pub const SLOPE_FLOOR: f64 = 1e-12;
/// Allowed excess of the fitted slope over `1 - p`.
pub const SLOPE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem11Sweep {
    pub p: f64,
    pub scale: f64,
    pub points: Vec<Theorem11Report>,
    /// Least-squares slope of `ln ‖f0‖_1` against `ln λ` on the tail.
    pub tail_slope: Option<f64>,
    pub tail_points: usize,
    pub slope_bound: f64,
    pub pass: bool,
}

/// Runs [`theorem11_report`] over `lambdas` (increasing) and fits the decay
/// slope on the tail `λ ≥ 1`, where `‖f0‖_1` is still above [`SLOPE_FLOOR`].
/// If fewer than two such levels exist, the last two levels with nonzero `f0`
/// are used.
pub fn theorem11_sweep<T: Real>(f: &AnalyticBoundaryFunction<T>, p: f64, lambdas: &[f64]) -> Result<Theorem11Sweep> {
    if lambdas.is_empty() {
        return Err(HardyError::EmptyGrid("level grid"));
    }
    hoelder_conjugate(p)?;
    let (g, scale) = normalized(f, p)?;
    let points = lambdas
        .iter()
        .map(|&l| report_normalized(&g, p, l, scale.as_f64()))
        .collect::<Result<Vec<_>>>()?;
    let live: Vec<&Theorem11Report> = points.iter().filter(|r| r.f0_l1 > SLOPE_FLOOR).collect();
    let mut tail: Vec<&Theorem11Report> = live.iter().copied().filter(|r| r.lambda >= 1.0).collect();
    if tail.len() < 2 {
        tail = live.iter().rev().take(2).rev().copied().collect();
    }
    let xs: Vec<f64> = tail.iter().map(|r| r.lambda.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.f0_l1.ln()).collect();
    let tail_slope = ls_slope(&xs, &ys);
    let slope_bound = 1.0 - p + SLOPE_SLACK;
    let slope_ok = tail_slope.is_none_or(|s| s <= slope_bound);
    let pass = slope_ok && points.iter().all(|r| r.pass);
    let tail_points = tail.len();
    Ok(Theorem11Sweep { p, scale: scale.as_f64(), points, tail_slope, tail_points, slope_bound, pass })
}

/// `2^{j/4}` for `j = 4·lo ..= 4·hi`.
pub fn quarter_octave_grid(lo: i32, hi: i32) -> Vec<f64> {
    (4 * lo..=4 * hi).map(|j| 2f64.powf(j as f64 / 4.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_chain() {
        // p = 2: q = 2, C_q = 2, C_p = sqrt(2) * 2^{-1/2} = 1
        assert!((theorem11_constant(2.0).unwrap() - 1.0).abs() < 1e-15);
        let q: f64 = 3.0;
        let expect = 4f64.powf(1.0 / q) * 1.5f64.powf(-1.0 / q);
        assert!((theorem11_constant(1.5).unwrap() - expect).abs() < 1e-15);
        assert!(theorem11_constant(1.0).is_err());
    }

    #[test]
    fn constant_one() {
        let f = AnalyticBoundaryFunction::<f64>::constant(64, Complex64::new(1.0, 0.0)).unwrap();
        let r = theorem11_report(&f, 2.0, 1.0).unwrap();
        assert_eq!(r.f0_l1, 0.0);
        let r = theorem11_report(&f, 2.0, 0.5).unwrap();
        assert!((r.f0_l1 - 0.5).abs() < 1e-15);
        assert!(r.pass);
        assert!((r.bound - 2.0).abs() < 1e-15);
    }

    #[test]
    fn renormalizes_and_reports_scale() {
        let f = AnalyticBoundaryFunction::<f64>::constant(64, Complex64::new(0.0, 3.0)).unwrap();
        let r = theorem11_report(&f, 4.0, 0.5).unwrap();
        assert!((r.scale - 3.0).abs() < 1e-14);
        assert!((r.f0_l1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chain_is_ordered_for_one_plus_t() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(4096, |t| t + 1.0).unwrap();
        for p in [1.5, 2.0, 4.0] {
            for lambda in quarter_octave_grid(-3, 4) {
                let r = theorem11_report(&f, p, lambda).unwrap();
                let c = r.chain;
                assert!(r.f0_l1 <= c.holder * (1.0 + 1e-12) + 1e-15);
                assert!(c.schur_defect <= c.log_integral + 1e-9);
                assert!(c.log_integral <= c.chebyshev);
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn sweep_slope() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(4096, |t| t + 1.0).unwrap();
        let sweep = theorem11_sweep(&f, 2.0, &quarter_octave_grid(-3, 4)).unwrap();
        assert!(sweep.pass, "{:?}", sweep.tail_slope);
        assert!(sweep.tail_points >= 2);
        let f0: Vec<f64> = sweep.points.iter().map(|r| r.f0_l1).collect();
        assert!(f0.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
