//! The strip interpolant `G(ζ) = EF + Σ_i d_i w_i M^{(1-2ζ)(1+i)}` on Wiener space,
//! its three boundary estimates, and the geometric iteration built on a
//! half-error step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::report::Check;
use crate::scalar::{cx_to_f64, Real};
use crate::stats::{ls_slope, MeanEstimate};
use crate::wiener::regress::{conditional_expectation, FeatureMap, HarmonicFeatures};
use crate::wiener::{
    maximal_function, stopping_decompose, truncation_family, MartingaleMatrix, PathEnsemble, PhaseModeInputs,
    StoppingDecomposition, TruncationFamily,
};

/// Default `t` values for the lines `{it}` and `{1+it}`.
pub const DEFAULT_T_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Allowed deviation of `E|F|²` from 1, on top of 5 standard errors.
pub const NORMALIZATION_SLACK: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpMode {
    Bound,
    Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GValues {
    /// Per-path `G(·, ζ)`.
    Phase(Vec<Complex64>),
    /// Per-path upper bounds for `|G(·, ζ)|`.
    Bound(Vec<f64>),
}

impl GValues {
    pub fn moduli(&self) -> Vec<f64> {
        match self {
            GValues::Phase(v) => v.iter().map(|z| z.norm()).collect(),
            GValues::Bound(v) => v.clone(),
        }
    }
}

fn level_weight(m: f64, i: usize, zeta: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - 2.0 * zeta).scale((1 + i) as f64 * m.ln()).exp()
}

#[allow(non_snake_case)]
pub fn interpolant_G(
    dec: &StoppingDecomposition,
    fam: &TruncationFamily,
    zeta: Complex64,
    mode: InterpMode,
) -> Result<GValues> {
    match mode {
        InterpMode::Phase => interpolant_phase(dec, fam, zeta).map(GValues::Phase),
        InterpMode::Bound => Ok(GValues::Bound(interpolant_bound(dec, fam, zeta.re))),
    }
}

pub fn interpolant_phase(dec: &StoppingDecomposition, fam: &TruncationFamily, zeta: Complex64) -> Result<Vec<Complex64>> {
    if fam.phase.is_none() {
        return Err(HardyError::ModeUnavailable("phase"));
    }
    let levels = dec.level_count().min(fam.levels());
    let weights: Vec<Complex64> = (0..levels).map(|i| level_weight(dec.m, i, zeta)).collect();
    Ok((0..dec.n_paths())
        .map(|p| dec.ef + (0..levels).map(|i| dec.d(p, i) * fam.w(p, i) * weights[i]).sum::<Complex64>())
        .collect())
}

/// `|EF| + Σ_i 1_{E_i} |d_i| |w_i| M^{(1-2 Re ζ)(1+i)}`; independent of `Im ζ`.
pub fn interpolant_bound(dec: &StoppingDecomposition, fam: &TruncationFamily, re_zeta: f64) -> Vec<f64> {
    let levels = dec.level_count().min(fam.levels());
    let weights: Vec<f64> = (0..levels).map(|i| dec.m.powf((1.0 - 2.0 * re_zeta) * (1 + i) as f64)).collect();
    (0..dec.n_paths())
        .map(|p| {
            dec.ef.norm()
                + (0..levels)
                    .filter(|&i| dec.in_level(p, i))
                    .map(|i| dec.d(p, i).norm() * fam.w_abs(p, i) * weights[i])
                    .sum::<f64>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub line: String,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
    pub pass: bool,
}

impl From<Check> for Estimate {
    fn from(c: Check) -> Self {
        Estimate { line: c.name, lhs: c.lhs, rhs: c.rhs, stderr: c.stderr, pass: c.pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineValue {
    pub t: f64,
    /// `E|G(·, it)|` or `max_p |G(·, 1+it)|`.
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationCertificate {
    #[serde(rename = "M")]
    pub m: f64,
    pub mode: InterpMode,
    pub seed: u64,
    pub offset: usize,
    pub t_grid: Vec<f64>,
    /// `E|F|²` on the ensemble.
    pub norm2_squared: f64,
    pub eta_jump: f64,
    /// Per-`t` values on `{it}` and `{1+it}`.
    pub h1_line: Vec<LineValue>,
    pub hinf_line: Vec<LineValue>,
    /// `C(M)` for the `H¹` line, raw and divided by `E|F|²`.
    pub c_h1: f64,
    pub c_h1_normalized: f64,
    /// `C(M)` for the `H^∞` line.
    pub c_hinf: f64,
    pub estimates: Vec<Estimate>,
}

impl InterpolationCertificate {
    pub fn pass(&self) -> bool {
        self.estimates.iter().all(|e| e.pass)
    }
}

/// Check `E|F|² = 1` up to Monte Carlo error.
pub fn check_normalized<T: Real>(f: &MartingaleMatrix<T>) -> Result<MeanEstimate> {
    let e = MeanEstimate::from_samples((0..f.n_paths()).map(|p| cx_to_f64(f.terminal(p)).norm_sqr()));
    if (e.mean - 1.0).abs() > 5.0 * e.stderr + NORMALIZATION_SLACK {
        return Err(HardyError::NotNormalized(e.mean.sqrt()));
    }
    Ok(e)
}

/// Certificate for the three strip estimates. `family` must carry phases in
/// phase mode; `dec` and `family` must come from `f`.
pub fn strip_bounds_report<T: Real>(
    f: &MartingaleMatrix<T>,
    dec: &StoppingDecomposition,
    family: &TruncationFamily,
    mode: InterpMode,
    seed: u64,
    t_grid: &[f64],
) -> Result<InterpolationCertificate> {
    let norm2 = check_normalized(f)?;
    if t_grid.is_empty() {
        return Err(HardyError::EmptyGrid("t"));
    }
    if mode == InterpMode::Phase && family.phase.is_none() {
        return Err(HardyError::ModeUnavailable("phase"));
    }
    let m = dec.m;
    let n = dec.n_paths();
    let levels = dec.level_count().min(family.levels());
    let a: Vec<f64> = maximal_function(f).into_iter().map(|x| x.as_f64()).collect();
    let ea2 = MeanEstimate::from_samples(a.iter().map(|x| x * x));
    let mut estimates = Vec::new();

    // (1) the line Re ζ = ½
    let mut triangle = 0.0;
    for i in 0..levels {
        triangle += dec.d_bound(i) * family.defect(i).max(0.0).sqrt();
    }
    let off = family.offset as i32;
    estimates.push(Check::statistical("theta_doob_requirement", m.powi(2 - off) * ea2.mean, 0.25, m.powi(2 - off) * ea2.stderr).into());
    estimates.push(Check::exact("theta", triangle, 0.5, 0.0, 0.0).into());
    if mode == InterpMode::Phase {
        let g = interpolant_phase(dec, family, Complex64::new(0.5, 0.0))?;
        let dist = MeanEstimate::from_samples((0..n).map(|p| (g[p] - dec.terminal(p)).norm_sqr()));
        estimates.push(Check::statistical("theta_direct", dist.mean, 0.25, dist.stderr).into());
        estimates.push(Check::statistical("theta_direct_le_bound", dist.mean, triangle * triangle, dist.stderr).into());
    }

    // (2) Re ζ = 0 and (3) Re ζ = 1: bound-mode values are t-independent
    let b0 = interpolant_bound(dec, family, 0.0);
    let b1 = interpolant_bound(dec, family, 1.0);
    let b0_mean = MeanEstimate::from_samples(b0.iter().copied());
    let b1_max = b1.iter().copied().fold(0.0, f64::max);
    let rel = 1.0 + dec.eta_jump / (2.0 * m);
    // pathwise: Σ_j 1_{E_j} 2M^{2(j+1)} ≤ 2M² + 2M⁴/(M²-1)·A²
    let chain_h1: Vec<f64> = a
        .iter()
        .map(|&x| dec.ef.norm() + 2.0 * rel * (m * m + m.powi(4) / (m * m - 1.0) * x * x))
        .collect();
    let chain_h1_pathwise_fail = b0.iter().zip(&chain_h1).filter(|(b, c)| **b > **c * (1.0 + 1e-12)).count();
    let c_h1 = dec.ef.norm() + 2.0 * rel * (m * m + m.powi(4) / (m * m - 1.0) * ea2.mean);
    let c_hinf = dec.ef.norm() + 2.0 * rel * (family.offset as f64 + 1.0 + m / (m - 1.0));

    let mut h1_line = Vec::new();
    let mut hinf_line = Vec::new();
    for &t in t_grid {
        match mode {
            InterpMode::Bound => {
                h1_line.push(LineValue { t, value: b0_mean.mean, stderr: b0_mean.stderr });
                hinf_line.push(LineValue { t, value: b1_max, stderr: 0.0 });
            }
            InterpMode::Phase => {
                let g0 = interpolant_phase(dec, family, Complex64::new(0.0, t))?;
                let g1 = interpolant_phase(dec, family, Complex64::new(1.0, t))?;
                let e0 = MeanEstimate::from_samples(g0.iter().map(|z| z.norm()));
                let mx = g1.iter().map(|z| z.norm()).fold(0.0, f64::max);
                estimates.push(Check::statistical(format!("h1_phase_le_bound_t{t}"), e0.mean, b0_mean.mean, e0.stderr).into());
                estimates.push(Check::exact(format!("hinf_phase_le_bound_t{t}"), mx, b1_max, 1e-12, 0.0).into());
                h1_line.push(LineValue { t, value: e0.mean, stderr: e0.stderr });
                hinf_line.push(LineValue { t, value: mx, stderr: 0.0 });
            }
        }
    }
    let h1_sup = h1_line.iter().map(|l| l.value).fold(0.0, f64::max);
    let h1_se = h1_line.iter().map(|l| l.stderr).fold(0.0, f64::max);
    let hinf_sup = hinf_line.iter().map(|l| l.value).fold(0.0, f64::max);
    estimates.push(Check::exact("h1_pathwise_chain", chain_h1_pathwise_fail as f64, 0.0, 0.0, 0.0).into());
    estimates.push(Check::statistical("h1", h1_sup, c_h1, h1_se).into());
    estimates.push(Check::exact("hinf", hinf_sup, c_hinf, 1e-12, 0.0).into());

    Ok(InterpolationCertificate {
        m,
        mode,
        seed,
        offset: family.offset,
        t_grid: t_grid.to_vec(),
        norm2_squared: norm2.mean,
        eta_jump: dec.eta_jump,
        h1_line,
        hinf_line,
        c_h1,
        c_h1_normalized: c_h1 / norm2.mean,
        c_hinf,
        estimates,
    })
}

/// A step producing `F` with `‖F(θ) - r‖ ≤ ½‖r‖` from a residual `r`.
pub trait OneStep {
    /// Returns `F(θ)` and the `F`-norm of `F`.
    fn step(&mut self, residual: &[Complex64]) -> Result<(Vec<Complex64>, f64)>;
}

impl<F: FnMut(&[Complex64]) -> Result<(Vec<Complex64>, f64)>> OneStep for F {
    fn step(&mut self, residual: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        self(residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JonesResult {
    /// `‖G_m(θ) - f‖` for `m = 0, 1, …`.
    pub errors: Vec<f64>,
    /// `Σ_{n<m} ‖F_n‖_F`.
    pub f_norms: Vec<f64>,
    /// Iterations run; `errors[converged_at] ≤ tol‖f‖` if set.
    pub converged_at: Option<usize>,
    /// Fitted slope of `ln error` per step.
    pub decay_slope: Option<f64>,
    /// First step whose error ratio exceeded ½, with the ratio.
    pub violation: Option<(usize, f64)>,
    /// `max_n ‖F_n‖_F / ‖r_n‖`.
    pub step_constant: f64,
}

impl JonesResult {
    /// Slope at most `-(1 - slack) ln 2`.
    pub fn geometric(&self, slack: f64) -> bool {
        self.decay_slope.map_or(self.converged_at.is_some(), |s| s <= -(1.0 - slack) * std::f64::consts::LN_2)
    }
}

/// Relative residual below which the iteration stops as converged.
pub const JONES_TOL: f64 = 1e-13;

/// `G_m = Σ_{n<m} F_n` with `F_n` the step applied to `r_n = f - G_n(θ)`.
/// Stops at the first contract violation.
pub fn jones_iterate(
    one_step: &mut dyn OneStep,
    f: &[Complex64],
    n: usize,
    norm: &dyn Fn(&[Complex64]) -> f64,
) -> Result<JonesResult> {
    let f_norm = norm(f);
    let mut residual = f.to_vec();
    let mut errors = vec![f_norm];
    let mut f_norms = vec![0.0];
    let mut violation = None;
    let mut converged_at = None;
    let mut step_constant: f64 = 0.0;
    if f_norm == 0.0 {
        converged_at = Some(0);
    }
    for step in 0..n {
        if converged_at.is_some() {
            break;
        }
        let r_norm = *errors.last().expect("nonempty");
        let (at_theta, fnorm) = one_step.step(&residual)?;
        if at_theta.len() != residual.len() {
            return Err(HardyError::SizeMismatch { expected: residual.len(), found: at_theta.len() });
        }
        for (r, g) in residual.iter_mut().zip(&at_theta) {
            *r -= g;
        }
        let e = norm(&residual);
        step_constant = step_constant.max(fnorm / r_norm);
        errors.push(e);
        f_norms.push(f_norms.last().expect("nonempty") + fnorm);
        let ratio = e / r_norm;
        if ratio > 0.5 * (1.0 + 1e-12) {
            violation = Some((step, ratio));
            break;
        }
        if e <= JONES_TOL * f_norm {
            converged_at = Some(step + 1);
        }
    }
    let live: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > JONES_TOL * f_norm)
        .map(|(m, e)| (m as f64, e.ln()))
        .collect();
    let decay_slope = if live.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = live.into_iter().unzip();
        ls_slope(&xs, &ys)
    } else {
        None
    };
    Ok(JonesResult { errors, f_norms, converged_at, decay_slope, violation, step_constant })
}

/// `L²(P)` norm of terminal values.
pub fn l2_norm(v: &[Complex64]) -> f64 {
    MeanEstimate::from_samples(v.iter().map(|z| z.norm_sqr())).mean.sqrt()
}

/// One step of the strip construction at `θ = ½` in phase mode: the residual is
/// lifted to a martingale by regression, normalized, decomposed, and `G(·, ½)`
/// is returned at the original scale. The reported `F`-norm is the larger of
/// the bound-mode `H¹` and `H^∞` line values.
pub struct StripStep<'a, T: Real> {
    pub ens: &'a PathEnsemble<T>,
    pub m: f64,
    pub offset: usize,
    pub degree: usize,
    pub bucket_rows: usize,
}

impl<T: Real> StripStep<'_, T> {
    fn lift(&self, residual: &[Complex64]) -> Result<MartingaleMatrix<T>> {
        let feats = |rho: f64| -> Box<dyn FeatureMap + '_> {
            Box::new(HarmonicFeatures { degree: self.degree, rho, extra: None, n_extra: 0 })
        };
        let re: Vec<f64> = residual.iter().map(|z| z.re).collect();
        let im: Vec<f64> = residual.iter().map(|z| z.im).collect();
        let mre = conditional_expectation(&re, self.ens, &feats, self.bucket_rows)?;
        let mim = conditional_expectation(&im, self.ens, &feats, self.bucket_rows)?;
        Ok(MartingaleMatrix::from_fn(self.ens, |p, k, _| {
            num_complex::Complex::new(mre.at(p, k).re, mim.at(p, k).re)
        }))
    }
}

impl<T: Real> OneStep for StripStep<'_, T> {
    fn step(&mut self, residual: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let scale = l2_norm(residual);
        if scale == 0.0 {
            return Ok((vec![Complex64::new(0.0, 0.0); residual.len()], 0.0));
        }
        let unit: Vec<Complex64> = residual.iter().map(|z| z / scale).collect();
        let f = self.lift(&unit)?;
        let dec = stopping_decompose(&f, self.m)?;
        let inputs = PhaseModeInputs { ens: self.ens, degree: self.degree, bucket_rows: self.bucket_rows };
        let fam = truncation_family(&f, &dec, self.offset, Some(inputs))?;
        let g = interpolant_phase(&dec, &fam, Complex64::new(0.5, 0.0))?;
        let h1 = MeanEstimate::from_samples(interpolant_bound(&dec, &fam, 0.0)).mean;
        let hinf = interpolant_bound(&dec, &fam, 1.0).into_iter().fold(0.0, f64::max);
        Ok((g.into_iter().map(|z| z * scale).collect(), h1.max(hinf) * scale))
    }
}
