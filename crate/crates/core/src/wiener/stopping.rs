use num_complex::Complex64;
use serde::Serialize;

use super::martingale::{maximal_function, MartingaleMatrix};
use super::paths::PathEnsemble;
use super::regress::{conditional_expectation, FeatureMap, HarmonicFeatures};
use super::hilbert::stochastic_hilbert_mc;
use crate::error::{HardyError, Result};
use crate::report::Check;
use crate::scalar::{cx_to_f64, Real};
use crate::stats::MeanEstimate;

/// Upper limit on the number of stopping levels.
pub const MAX_LEVELS: usize = 64;

/// `τ_0 = 0`, `τ_{i+1} = min{k ≥ τ_i : |F_k| > M^{i+1}}`, stopped values
/// `F_i = F_{τ_i}` (the terminal value once `τ_i = ∞`) and `d_i = F_{i+1} - F_i`.
///
/// The decomposition telescopes from `i = 0`: `F = EF + Σ_{i≥0} d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingDecomposition {
    pub m: f64,
    /// `F_{p,0}`, the same on every path.
    pub ef: Complex64,
    /// Per path, `(τ_i, F_i)` for the finite levels `i = 0..=L_p`.
    stops: Vec<Vec<(usize, Complex64)>>,
    terminal: Vec<Complex64>,
    /// Largest single-step jump of `|F|` seen on the ensemble.
    pub eta_jump: f64,
}

impl StoppingDecomposition {
    pub fn n_paths(&self) -> usize {
        self.terminal.len()
    }

    /// Number of difference indices: `max_p L_p + 1`.
    pub fn level_count(&self) -> usize {
        self.stops.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// `τ_i` on path `p`, `None` for `τ_i = ∞`.
    pub fn tau(&self, p: usize, i: usize) -> Option<usize> {
        self.stops[p].get(i).map(|s| s.0)
    }

    /// Path `p` lies in `E_i = {τ_i < ∞}`.
    pub fn in_level(&self, p: usize, i: usize) -> bool {
        i < self.stops[p].len()
    }

    pub fn stopped_value(&self, p: usize, i: usize) -> Complex64 {
        self.stops[p].get(i).map_or(self.terminal[p], |s| s.1)
    }

    pub fn d(&self, p: usize, i: usize) -> Complex64 {
        self.stopped_value(p, i + 1) - self.stopped_value(p, i)
    }

    pub fn terminal(&self, p: usize) -> Complex64 {
        self.terminal[p]
    }

    /// `2M^{i+1} + η_jump`.
    pub fn d_bound(&self, i: usize) -> f64 {
        2.0 * self.m.powi(i as i32 + 1) + self.eta_jump
    }
}

pub fn stopping_decompose<T: Real>(f: &MartingaleMatrix<T>, m: f64) -> Result<StoppingDecomposition> {
    if !(m > 1.0) {
        return Err(HardyError::InvalidParameter(format!("M must exceed 1, got {m}")));
    }
    let n = f.n_paths();
    if n == 0 {
        return Err(HardyError::EmptyGrid("paths"));
    }
    let ef = cx_to_f64(f.path(0)[0]);
    let mut stops = Vec::with_capacity(n);
    let mut terminal = Vec::with_capacity(n);
    let mut eta_jump: f64 = 0.0;
    for p in 0..n {
        let path = f.path(p);
        let mut s = vec![(0usize, cx_to_f64(path[0]))];
        let mut level = 1usize;
        let mut bar = m;
        for (k, v) in path.iter().enumerate() {
            let v = cx_to_f64(*v);
            if k > 0 {
                eta_jump = eta_jump.max((v - cx_to_f64(path[k - 1])).norm());
            }
            while v.norm() > bar {
                s.push((k, v));
                level += 1;
                if level > MAX_LEVELS {
                    return Err(HardyError::TooManyLevels(MAX_LEVELS));
                }
                bar = m.powi(level as i32);
            }
        }
        terminal.push(cx_to_f64(*path.last().expect("nonempty path")));
        stops.push(s);
    }
    Ok(StoppingDecomposition { m, ef, stops, terminal, eta_jump })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub levels: usize,
    pub eta_jump: f64,
    /// `max_p |EF + Σ d_i - F_p|`.
    pub telescoping_error: f64,
    /// Paths with some `|d_i| > 2M^{i+1} + η_jump`.
    pub bound_violations: usize,
    /// Paths with `d_i ≠ 0` outside `E_i`.
    pub support_violations: usize,
    pub sum_d_squared: f64,
    pub variance: f64,
    pub checks: Vec<Check>,
}

pub fn decomposition_report(dec: &StoppingDecomposition) -> DecompositionReport {
    let n = dec.n_paths();
    let levels = dec.level_count();
    let mut tele: f64 = 0.0;
    let mut bound_violations = 0;
    let mut support_violations = 0;
    let mut diff = Vec::with_capacity(n);
    let mut dsq = Vec::with_capacity(n);
    let mut var = Vec::with_capacity(n);
    for p in 0..n {
        let mut sum = dec.ef;
        let mut sq = 0.0;
        let mut bad = false;
        let mut off = false;
        for i in 0..levels {
            let d = dec.d(p, i);
            sum += d;
            sq += d.norm_sqr();
            bad |= d.norm() > dec.d_bound(i);
            off |= !dec.in_level(p, i) && d.norm() != 0.0;
        }
        let f = dec.terminal(p);
        tele = tele.max((sum - f).norm() / f.norm().max(1.0));
        bound_violations += bad as usize;
        support_violations += off as usize;
        let v = (f - dec.ef).norm_sqr();
        dsq.push(sq);
        var.push(v);
        diff.push(sq - v);
    }
    let sum_d_squared = MeanEstimate::from_samples(dsq).mean;
    let variance = MeanEstimate::from_samples(var).mean;
    let se = MeanEstimate::from_samples(diff).stderr;
    let mut checks = vec![
        Check::exact("telescoping", tele, 0.0, 0.0, 1e-12),
        Check::exact("difference_bound_violations", bound_violations as f64, 0.0, 0.0, 0.0),
        Check::exact("support_violations", support_violations as f64, 0.0, 0.0, 0.0),
        Check::two_sided("parseval", sum_d_squared, variance, se, 0.0),
    ];
    for i in 0..levels {
        for j in i + 1..levels {
            let cross = MeanEstimate::from_samples((0..n).map(|p| (dec.d(p, i) * dec.d(p, j).conj()).re));
            checks.push(Check::two_sided(format!("orthogonality_{i}_{j}"), cross.mean, 0.0, cross.stderr, 0.0));
        }
    }
    DecompositionReport {
        levels,
        eta_jump: dec.eta_jump,
        telescoping_error: tele,
        bound_violations,
        support_violations,
        sum_d_squared,
        variance,
        checks,
    }
}

/// Truncation family `R_i = min(A, M^i)`, `|w_i| = R_{i+offset}/A`, with
/// `E w_i = exp E(ln R_{i+offset} - ln A)` from terminal data.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationFamily {
    pub m: f64,
    pub offset: usize,
    /// Per-path `A(F)`.
    pub a: Vec<f64>,
    /// `E w_i` for `i < levels`.
    pub ew: Vec<f64>,
    /// `E|w_i|²`.
    pub ew_abs2: Vec<f64>,
    /// Per level, per path complex `w_i` (phase mode only).
    pub phase: Option<Vec<Vec<Complex64>>>,
}

/// Data for the phase mode of [`truncation_family`].
pub struct PhaseModeInputs<'a, T: Real> {
    pub ens: &'a PathEnsemble<T>,
    pub degree: usize,
    pub bucket_rows: usize,
}

impl TruncationFamily {
    pub fn levels(&self) -> usize {
        self.ew.len()
    }

    pub fn n_paths(&self) -> usize {
        self.a.len()
    }

    /// `R_j = min(A, M^j)` on path `p`.
    pub fn r(&self, p: usize, j: usize) -> f64 {
        self.a[p].min(self.m.powi(j as i32))
    }

    /// `|w_i|` on path `p`.
    pub fn w_abs(&self, p: usize, i: usize) -> f64 {
        self.r(p, i + self.offset) / self.a[p]
    }

    /// `w_i` on path `p`: the phase-mode value, or `|w_i|` otherwise.
    pub fn w(&self, p: usize, i: usize) -> Complex64 {
        match &self.phase {
            Some(ph) => ph[i][p],
            None => Complex64::new(self.w_abs(p, i), 0.0),
        }
    }

    /// `E|1 - w_i|² = 2(1 - E w_i) - (1 - E|w_i|²)`.
    pub fn defect(&self, i: usize) -> f64 {
        2.0 * (1.0 - self.ew[i]) - (1.0 - self.ew_abs2[i])
    }

    /// Whether `w_i ≡ 1` on the ensemble.
    pub fn trivial(&self, i: usize) -> bool {
        let c = self.m.powi((i + self.offset) as i32);
        self.a.iter().all(|&a| a <= c)
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    MeanEstimate::from_samples(xs).mean
}

pub fn truncation_family<T: Real>(
    f: &MartingaleMatrix<T>,
    dec: &StoppingDecomposition,
    offset: usize,
    phase_mode: Option<PhaseModeInputs<'_, T>>,
) -> Result<TruncationFamily> {
    if dec.ef.norm() == 0.0 {
        return Err(HardyError::ZeroMean);
    }
    let a: Vec<f64> = maximal_function(f).into_iter().map(|x| x.as_f64()).collect();
    let levels = dec.level_count();
    let mut fam = TruncationFamily { m: dec.m, offset, a, ew: Vec::new(), ew_abs2: Vec::new(), phase: None };
    for i in 0..levels {
        let n = fam.n_paths();
        fam.ew.push(mean((0..n).map(|p| fam.w_abs(p, i).ln())).exp());
        fam.ew_abs2.push(mean((0..n).map(|p| fam.w_abs(p, i).powi(2))));
    }
    if let Some(inputs) = phase_mode {
        fam.phase = Some(phase_values(f, &fam, &inputs)?);
    }
    Ok(fam)
}

/// `w_i = exp(X + iHX)` with `X = ln |w_i|`: `E(X | F_k)` by regression on harmonic
/// monomials of `z_k` and the running truncation level, then the Monte Carlo transform.
fn phase_values<T: Real>(
    f: &MartingaleMatrix<T>,
    fam: &TruncationFamily,
    inputs: &PhaseModeInputs<'_, T>,
) -> Result<Vec<Vec<Complex64>>> {
    let ens = inputs.ens;
    if !f.matches(ens) {
        return Err(HardyError::InvalidParameter("martingale matrix does not match the ensemble".into()));
    }
    let n = fam.n_paths();
    // running maximum of |F|
    let running = f.map(|v| num_complex::Complex::new(v.norm(), T::zero()));
    let mut running_max = Vec::with_capacity(n);
    for p in 0..n {
        let mut acc: f64 = 0.0;
        running_max.push(
            running
                .path(p)
                .iter()
                .map(|v| {
                    acc = acc.max(v.re.as_f64());
                    acc
                })
                .collect::<Vec<f64>>(),
        );
    }
    drop(running);
    let mut out = Vec::with_capacity(fam.levels());
    for i in 0..fam.levels() {
        if fam.trivial(i) {
            out.push(vec![Complex64::new(1.0, 0.0); n]);
            continue;
        }
        let c = (fam.m.powi((i + fam.offset) as i32)).ln();
        let x: Vec<f64> = (0..n).map(|p| fam.w_abs(p, i).ln()).collect();
        let extra = |p: usize, k: usize, out: &mut [f64]| {
            let cur = -(running_max[p][k].ln() - c).max(0.0);
            let z = ens.path(p)[k].norm().as_f64();
            out[0] = cur;
            out[1] = cur * z * z;
            out[2] = cur * cur;
        };
        let feats = |rho: f64| -> Box<dyn FeatureMap + '_> {
            Box::new(HarmonicFeatures { degree: inputs.degree, rho, extra: Some(&extra), n_extra: 3 })
        };
        let xm = conditional_expectation(&x, ens, &feats, inputs.bucket_rows)?;
        let hx = stochastic_hilbert_mc(&xm, ens, inputs.degree, inputs.bucket_rows)?;
        out.push(
            (0..n)
                .map(|p| Complex64::new(x[p], hx.values.terminal(p).re.as_f64()).exp())
                .collect(),
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    /// Per level: `E|1-w|²`, `2(1-Ew)`, `2E(1_E ln(A/M^{i+offset}))`, `2M^{-i-offset}E(1_E A)`.
    pub chains: Vec<[f64; 4]>,
    pub checks: Vec<Check>,
}

pub fn family_report(fam: &TruncationFamily) -> FamilyReport {
    let n = fam.n_paths();
    let mut chains = Vec::new();
    let mut checks = Vec::new();
    let mut mono_fail = 0usize;
    let mut range_fail = 0usize;
    for p in 0..n {
        for i in 0..fam.levels() {
            let w = fam.w_abs(p, i);
            range_fail += !(w > 0.0 && w <= 1.0) as usize;
            if i + 1 < fam.levels() {
                mono_fail += (w > fam.w_abs(p, i + 1)) as usize;
            }
        }
    }
    checks.push(Check::exact("w_modulus_range", range_fail as f64, 0.0, 0.0, 0.0));
    checks.push(Check::exact("w_modulus_monotone", mono_fail as f64, 0.0, 0.0, 0.0));
    for i in 0..fam.levels() {
        let c = fam.m.powi((i + fam.offset) as i32);
        let lg = 2.0 * mean((0..n).map(|p| if fam.a[p] > c { (fam.a[p] / c).ln() } else { 0.0 }));
        let lin = 2.0 / c * mean((0..n).map(|p| if fam.a[p] > c { fam.a[p] } else { 0.0 }));
        let row = [fam.defect(i), 2.0 * (1.0 - fam.ew[i]), lg, lin];
        checks.push(Check::exact(format!("defect_le_real_part_{i}"), row[0], row[1], 1e-12, 1e-15));
        checks.push(Check::exact(format!("real_part_le_log_{i}"), row[1], row[2], 1e-12, 1e-15));
        checks.push(Check::exact(format!("log_le_linear_{i}"), row[2], row[3], 1e-12, 0.0));
        if i + 1 < fam.levels() {
            checks.push(Check::exact(format!("ew_monotone_{i}"), fam.ew[i], fam.ew[i + 1], 1e-15, 0.0));
        }
        chains.push(row);
    }
    FamilyReport { chains, checks }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicEstimates {
    /// Lemma on `Σ_i 1_{E_i} R_i ≤ 2M A`: largest per-path ratio and failures.
    pub pointwise_max_ratio: f64,
    pub pointwise_failures: usize,
    /// `Σ_i M^i E(1_{E_{i+offset}} A)` with both candidate constants.
    pub layer_lhs: f64,
    pub layer_rhs_weak: f64,
    pub layer_rhs_strong: f64,
    /// `(Σ_i ‖d_i(1-w_i)‖_2)²` from the per-level bounds.
    pub l2_triangle_bound: f64,
    /// `Σ_i 8M^{i+2-offset}(1+η_i)² E(1_{E_{i+offset}} A)`.
    pub l2_diagonal_chain: f64,
    /// `E|Σ_i d_i(1-w_i)|²` estimated directly (phase mode).
    pub l2_direct: Option<MeanEstimate>,
    pub checks: Vec<Check>,
}

pub fn basic_estimates_report(dec: &StoppingDecomposition, fam: &TruncationFamily) -> BasicEstimates {
    let n = dec.n_paths();
    let m = dec.m;
    let levels = dec.level_count();
    let off = fam.offset;
    let mut pointwise_max_ratio: f64 = 0.0;
    let mut pointwise_failures = 0;
    let mut layer = Vec::with_capacity(n);
    for p in 0..n {
        let a = fam.a[p];
        let s: f64 = (0..levels).filter(|&i| dec.in_level(p, i)).map(|i| fam.r(p, i)).sum();
        let ratio = if a > 0.0 { s / (2.0 * m * a) } else { 0.0 };
        pointwise_max_ratio = pointwise_max_ratio.max(ratio);
        pointwise_failures += (ratio > 1.0 + 1e-12) as usize;
        let l: f64 = (0..levels.max(1))
            .chain(levels.max(1)..MAX_LEVELS)
            .take_while(|&i| m.powi((i + off) as i32) < a)
            .map(|i| m.powi(i as i32) * a)
            .sum();
        layer.push(l);
    }
    let a2: Vec<f64> = fam.a.iter().map(|a| a * a).collect();
    let layer_lhs = mean(layer.iter().copied());
    let ea2 = mean(a2.iter().copied());
    let weak = m.powi(-(off as i32 - 2)) * ea2;
    let strong = m.powi(-(off as i32 - 1)) * ea2;
    let se_weak = MeanEstimate::from_samples(layer.iter().zip(&a2).map(|(l, x)| l - m.powi(-(off as i32 - 2)) * x)).stderr;
    let mut triangle = 0.0;
    let mut diagonal = 0.0;
    for i in 0..levels.min(fam.levels()) {
        let b = dec.d_bound(i);
        triangle += b * fam.defect(i).max(0.0).sqrt();
        let c = m.powi((i + off) as i32);
        let tail = mean((0..n).map(|p| if fam.a[p] > c { fam.a[p] } else { 0.0 }));
        diagonal += b * b * 2.0 / c * tail;
    }
    let l2_triangle_bound = triangle * triangle;
    let l2_direct = fam.phase.as_ref().map(|_| {
        MeanEstimate::from_samples((0..n).map(|p| {
            (0..levels.min(fam.levels()))
                .map(|i| dec.d(p, i) * (1.0 - fam.w(p, i)))
                .sum::<Complex64>()
                .norm_sqr()
        }))
    });
    let mut checks = vec![
        Check::exact("pointwise_level_sum", pointwise_max_ratio, 1.0, 1e-12, 0.0),
        Check::statistical("layer_sum_weak_constant", layer_lhs, weak, se_weak),
        // Cauchy-Schwarz over the levels
        Check::exact("triangle_le_diagonal_chain", l2_triangle_bound, levels.max(1) as f64 * diagonal, 1e-12, 1e-300),
    ];
    if let Some(d) = l2_direct {
        checks.push(Check::statistical("direct_le_triangle", d.mean, l2_triangle_bound, d.stderr));
    }
    BasicEstimates {
        pointwise_max_ratio,
        pointwise_failures,
        layer_lhs,
        layer_rhs_weak: weak,
        layer_rhs_strong: strong,
        l2_triangle_bound,
        l2_diagonal_chain: diagonal,
        l2_direct,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Polynomial;
    use crate::wiener::{embed, holo::Constant, sample_paths, SimConfig};

    fn ens(p: usize, seed: u64) -> PathEnsemble<f64> {
        sample_paths(&SimConfig::new(p, 1e-3, seed)).unwrap()
    }

    fn corpus_poly() -> Polynomial<f64> {
        // (1+z)²/√6
        let s = 6f64.sqrt();
        Polynomial::new(vec![Complex64::new(1.0 / s, 0.0), Complex64::new(2.0 / s, 0.0), Complex64::new(1.0 / s, 0.0)])
    }

    #[test]
    fn bounded_martingale_has_single_difference() {
        let e = ens(500, 1);
        let f = embed(&Polynomial::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)]), &e);
        let dec = stopping_decompose(&f, 2.0).unwrap();
        assert_eq!(dec.level_count(), 1);
        for p in 0..e.n_paths() {
            assert_eq!(dec.tau(p, 1), None);
            assert_eq!(dec.d(p, 0), dec.terminal(p) - dec.ef);
        }
    }

    #[test]
    fn constant_martingale() {
        let e = ens(200, 2);
        let f = embed(&Constant(Complex64::new(1.5, 0.5)), &e);
        let dec = stopping_decompose(&f, 2.0).unwrap();
        assert!((0..e.n_paths()).all(|p| dec.d(p, 0) == Complex64::new(0.0, 0.0)));
        let fam = truncation_family(&f, &dec, 8, None).unwrap();
        assert!(fam.trivial(0));
        assert_eq!(fam.ew[0], 1.0);
        assert_eq!(fam.defect(0), 0.0);
        let z = embed(&Constant(Complex64::new(0.0, 0.0)), &e);
        let dz = stopping_decompose(&z, 2.0).unwrap();
        assert!(matches!(truncation_family(&z, &dz, 8, None), Err(HardyError::ZeroMean)));
    }

    #[test]
    fn corpus_decomposition() {
        let e = ens(4000, 3);
        let f = embed(&corpus_poly(), &e);
        let dec = stopping_decompose(&f, 2.0).unwrap();
        assert_eq!(dec.level_count(), 1);
        let rep = decomposition_report(&dec);
        assert_eq!(rep.bound_violations, 0);
        assert_eq!(rep.support_violations, 0);
        assert!(rep.telescoping_error < 1e-12);
        assert!(rep.checks.iter().take(4).all(|c| c.pass), "{rep:?}");
        let fam = truncation_family(&f, &dec, 8, None).unwrap();
        let frep = family_report(&fam);
        assert!(frep.checks.iter().all(|c| c.pass));
        let basic = basic_estimates_report(&dec, &fam);
        assert_eq!(basic.pointwise_failures, 0);
        assert!(basic.checks.iter().all(|c| c.pass), "{basic:?}");
    }

    #[test]
    fn small_offset_family_is_nontrivial() {
        let e = ens(4000, 4);
        let f = embed(&corpus_poly().scale(Complex64::new(3.0, 0.0)), &e);
        let dec = stopping_decompose(&f, 2.0).unwrap();
        let fam = truncation_family(&f, &dec, 1, None).unwrap();
        assert!(!fam.trivial(0));
        assert!(fam.ew[0] < 1.0 && fam.ew[0] > 0.0);
        let frep = family_report(&fam);
        assert!(frep.checks.iter().all(|c| c.pass), "{frep:?}");
        let basic = basic_estimates_report(&dec, &fam);
        assert_eq!(basic.pointwise_failures, 0);
    }

    #[test]
    fn phase_mode_moduli_agree() {
        let e = ens(3000, 5);
        let f = embed(&corpus_poly().scale(Complex64::new(3.0, 0.0)), &e);
        let dec = stopping_decompose(&f, 2.0).unwrap();
        let inputs = PhaseModeInputs { ens: &e, degree: 3, bucket_rows: 1 << 13 };
        let fam = truncation_family(&f, &dec, 1, Some(inputs)).unwrap();
        for p in 0..e.n_paths() {
            for i in 0..fam.levels() {
                assert!((fam.w(p, i).norm() - fam.w_abs(p, i)).abs() < 1e-12);
            }
        }
        let basic = basic_estimates_report(&dec, &fam);
        assert!(basic.l2_direct.is_some());
    }
}
