use serde::Serialize;

use super::decompose::decompose;
use crate::circle::{lorentz_norm, rearrangement, AnalyticBoundaryFunction, DecreasingRearrangement};
use crate::error::{HardyError, Result};
use crate::scalar::Real;

/// `2^j` for `j ∈ [lo, hi]`.
pub fn dyadic_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

/// Default level grid `2^j`, `j ∈ [-20, 20]`.
pub fn default_lambda_grid() -> Vec<f64> {
    dyadic_grid(-20, 20)
}

/// Norms of the truncation split at each level of a grid, so that `K` can be
/// bounded at many `t` from one pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    pub lambdas: Vec<f64>,
    pub f0_l1: Vec<f64>,
    pub f1_sup: Vec<f64>,
}

impl LevelProfile {
    pub fn new<T: Real>(f: &AnalyticBoundaryFunction<T>, lambdas: &[f64]) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(HardyError::EmptyGrid("level grid"));
        }
        let mut f0_l1 = Vec::with_capacity(lambdas.len());
        let mut f1_sup = Vec::with_capacity(lambdas.len());
        for &l in lambdas {
            let d = decompose(f, T::lit(l), 1.0)?;
            f0_l1.push(d.norms.f0_l1);
            f1_sup.push(d.norms.f1_sup);
        }
        Ok(Self { lambdas: lambdas.to_vec(), f0_l1, f1_sup })
    }

    /// `min_λ ‖f0(λ)‖_1 + t‖f1(λ)‖_∞` and the smallest minimizing `λ`.
    pub fn k_upper(&self, t: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, f64::NAN);
        for ((&l, &a), &b) in self.lambdas.iter().zip(&self.f0_l1).zip(&self.f1_sup) {
            let v = a + t * b;
            if v < best.0 || (v == best.0 && l < best.1) {
                best = (v, l);
            }
        }
        best
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(HardyError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Upper bound for `K(f, t; H^1, H^∞)` from the truncation splits at `lambdas`.
pub fn k_upper<T: Real>(f: &AnalyticBoundaryFunction<T>, t: f64, lambdas: &[f64]) -> Result<f64> {
    check_t(t)?;
    Ok(LevelProfile::new(f, lambdas)?.k_upper(t).0)
}

/// `K(f, t; L^1, L^∞) = ∫_0^t f*(s) ds`, a lower bound for the analytic couple.
pub fn k_lower_l<T: Real>(f: &AnalyticBoundaryFunction<T>, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(rearrangement(f).integral_to(T::lit(t)).as_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KReport {
    pub t: Vec<f64>,
    pub k_upper: Vec<f64>,
    pub k_lower_l: Vec<f64>,
    pub lambda_star: Vec<f64>,
}

impl KReport {
    pub fn sandwich_holds(&self) -> bool {
        self.k_lower_l.iter().zip(&self.k_upper).all(|(lo, hi)| lo <= &(hi * (1.0 + 1e-12)))
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.k_upper.iter().zip(&self.k_lower_l).map(|(u, l)| u / l).collect()
    }
}

pub fn k_report<T: Real>(f: &AnalyticBoundaryFunction<T>, ts: &[f64], lambdas: &[f64]) -> Result<KReport> {
    if ts.is_empty() {
        return Err(HardyError::EmptyGrid("t grid"));
    }
    let profile = LevelProfile::new(f, lambdas)?;
    let r = rearrangement(f);
    let mut report = KReport { t: Vec::new(), k_upper: Vec::new(), k_lower_l: Vec::new(), lambda_star: Vec::new() };
    for &t in ts {
        check_t(t)?;
        let (k, l) = profile.k_upper(t);
        report.t.push(t);
        report.k_upper.push(k);
        report.k_lower_l.push(r.integral_to(T::lit(t)).as_f64());
        report.lambda_star.push(l);
    }
    Ok(report)
}

/// Points per octave of the `t` quadrature grid.
pub const T_POINTS_PER_OCTAVE: i32 = 8;
/// The `t` grid spans `[2^-T_OCTAVES, 2^T_OCTAVES]`.
pub const T_OCTAVES: i32 = 20;
/// Endpoint integrand values above this fraction of the peak flag divergence.
pub const DIVERGENCE_FRACTION: f64 = 1e-2;

/// `t`-grid of the real-interpolation quadrature.
pub fn interp_t_grid() -> Vec<f64> {
    let m = T_POINTS_PER_OCTAVE * T_OCTAVES;
    (-m..=m).map(|j| 2f64.powf(j as f64 / T_POINTS_PER_OCTAVE as f64)).collect()
}

fn check_theta_q(theta: f64, q: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(HardyError::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    if q.is_nan() || q < 1.0 || q.is_infinite() {
        return Err(HardyError::InvalidExponent(q));
    }
    Ok(())
}

/// Trapezoid rule in `ln t` for `(∫ [t^{-θ} K(t)]^q dt/t)^{1/q}` on [`interp_t_grid`].
fn interp_quadrature(mut k: impl FnMut(f64) -> f64, theta: f64, q: f64) -> Result<f64> {
    check_theta_q(theta, q)?;
    let ts = interp_t_grid();
    let h = std::f64::consts::LN_2 / T_POINTS_PER_OCTAVE as f64;
    let vals: Vec<f64> = ts.iter().map(|&t| (t.powf(-theta) * k(t)).powf(q)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(HardyError::Divergent("non-finite K-functional value".into()));
    }
    let peak = vals.iter().copied().fold(0.0, f64::max);
    let ends = vals[0].max(vals[vals.len() - 1]);
    if peak > 0.0 && ends > DIVERGENCE_FRACTION * peak {
        return Err(HardyError::Divergent(format!("endpoint integrand {ends:.3e} against peak {peak:.3e}")));
    }
    let last = vals.len() - 1;
    let sum = crate::stats::compensated_sum(
        vals.iter().enumerate().map(|(i, &v)| if i == 0 || i == last { 0.5 * v } else { v }),
    );
    Ok((h * sum).powf(1.0 / q))
}

/// Level grid for [`real_interp_norm`]: `2^j`, `j ∈ [-32, 32]`. It reaches well past
/// the `t` range so that the minimizing level is interior for every `t` there.
pub fn interp_lambda_grid() -> Vec<f64> {
    dyadic_grid(-32, 32)
}

/// `‖f‖_{θ,q}` computed from [`k_upper`] on [`interp_lambda_grid`].
pub fn real_interp_norm<T: Real>(f: &AnalyticBoundaryFunction<T>, theta: f64, q: f64) -> Result<f64> {
    real_interp_norm_with(f, theta, q, &interp_lambda_grid())
}

pub fn real_interp_norm_with<T: Real>(f: &AnalyticBoundaryFunction<T>, theta: f64, q: f64, lambdas: &[f64]) -> Result<f64> {
    check_theta_q(theta, q)?;
    let profile = LevelProfile::new(f, lambdas)?;
    interp_quadrature(|t| profile.k_upper(t).0, theta, q)
}

/// The same quadrature driven by the `(L^1, L^∞)` functional.
pub fn real_interp_norm_lower<T: Real>(f: &AnalyticBoundaryFunction<T>, theta: f64, q: f64) -> Result<f64> {
    let r: DecreasingRearrangement<T> = rearrangement(f);
    interp_quadrature(|t| r.integral_to(T::lit(t)).as_f64(), theta, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzComparison {
    pub theta: f64,
    pub q: f64,
    pub p: f64,
    pub interp_upper: f64,
    pub interp_lower: f64,
    pub lorentz: f64,
    pub ratio_upper: f64,
    pub ratio_lower: f64,
}

/// Compares the interpolation norms with the Lorentz `L^{p,q}` norm, `1/p = 1 - θ`.
pub fn lorentz_comparison<T: Real>(f: &AnalyticBoundaryFunction<T>, theta: f64, q: f64) -> Result<LorentzComparison> {
    let interp_upper = real_interp_norm(f, theta, q)?;
    let interp_lower = real_interp_norm_lower(f, theta, q)?;
    let p = 1.0 / (1.0 - theta);
    let lorentz = lorentz_norm(f, p, q)?.as_f64();
    Ok(LorentzComparison {
        theta,
        q,
        p,
        interp_upper,
        interp_lower,
        lorentz,
        ratio_upper: interp_upper / lorentz,
        ratio_lower: interp_lower / lorentz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn one(n: usize) -> AnalyticBoundaryFunction<f64> {
        AnalyticBoundaryFunction::constant(n, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn constant_one() {
        let f = one(64);
        let grid = default_lambda_grid();
        assert!((k_upper(&f, 1.0, &grid).unwrap() - 1.0).abs() < 1e-15);
        assert!((k_lower_l(&f, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((k_lower_l(&f, 0.25).unwrap() - 0.25).abs() < 1e-15);
        assert!((k_lower_l(&f, 7.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((k_upper(&f, 2f64.powi(-5), &grid).unwrap() - 2f64.powi(-5)).abs() < 1e-15);
    }

    #[test]
    fn small_t_bound() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(1024, |t| t + 1.0).unwrap();
        let grid = default_lambda_grid();
        let l1 = crate::circle::norm_p(&f, 1.0).unwrap();
        for t in [1e-3, 1e-6, 1e-9] {
            assert!(k_upper(&f, t, &grid).unwrap() <= l1 + t * grid[0] + 1e-12);
        }
        assert!(k_upper(&f, 1e-9, &grid).unwrap() < 1e-6);
    }

    #[test]
    fn sandwich_and_tie_break() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(1024, |t| (t + 1.0) / 2f64.sqrt()).unwrap();
        let ts: Vec<f64> = (-10..=10).map(|j| 2f64.powi(j)).collect();
        let rep = k_report(&f, &ts, &default_lambda_grid()).unwrap();
        assert!(rep.sandwich_holds());
        assert!(rep.k_upper.windows(2).all(|w| w[1] >= w[0]));
        assert!(rep.k_lower_l.windows(2).all(|w| w[1] >= w[0]));
        // small t: any λ ≥ max|f| gives f0 = 0 and cost t·max|f|; the smallest is chosen
        assert_eq!(rep.lambda_star[0], 2.0);
        assert!(rep.lambda_star.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn interpolation_norm_of_one() {
        let f = one(64);
        let up = real_interp_norm(&f, 0.5, 2.0).unwrap();
        let lo = real_interp_norm_lower(&f, 0.5, 2.0).unwrap();
        // ∫ min(t,1)^2 t^{-1} dt/t = 1 + 1 = 2 on the full half-lines
        assert!((lo - 2f64.sqrt()).abs() < 1e-2, "{lo}");
        assert!(lo <= up * (1.0 + 1e-12));
        assert!(up <= 1.5 * lo);
    }

    #[test]
    fn homogeneity_for_dyadic_scale() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(512, |t| t * t + t * 0.5 + 1.0).unwrap();
        let c = Complex64::from_polar(8.0, 0.7);
        let a = real_interp_norm(&f, 0.4, 1.5).unwrap();
        let b = real_interp_norm(&f.scale(c), 0.4, 1.5).unwrap();
        assert!((b - 8.0 * a).abs() < 1e-6 * b, "{a} {b}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = one(16);
        assert!(real_interp_norm(&f, 0.0, 2.0).is_err());
        assert!(real_interp_norm(&f, 0.5, 0.5).is_err());
        assert!(k_upper(&f, 0.0, &[1.0]).is_err());
        assert!(matches!(k_upper(&f, 1.0, &[]), Err(HardyError::EmptyGrid(_))));
    }

    #[test]
    fn lorentz_band() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(1024, |t| t + 1.0).unwrap();
        let cmp = lorentz_comparison(&f, 0.5, 2.0).unwrap();
        assert!(cmp.ratio_lower > 0.1 && cmp.ratio_upper < 10.0, "{cmp:?}");
    }
}
