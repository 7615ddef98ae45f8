use num_complex::Complex64;
use num_traits::Float;
use serde::Serialize;

use super::holo::{harmonic_completion, ExpForm};
use super::martingale::{snap, MartingaleMatrix};
use super::paths::PathEnsemble;
use super::regress::{representation_regress, RepresentationFit};
use crate::circle::BoundaryFunction;
use crate::error::{HardyError, Result};
use crate::report::Check;
use crate::scalar::{cx, cx_to_f64, Cx, Real};
use crate::stats::{ComplexMeanEstimate, MeanEstimate};

/// Harmonic-class pair for a real boundary function `u`: `R_{p,k} = Re h(z_{p,k})`
/// and `(HR)_{p,k} = Im h(z_{p,k}) - Im h(0)`, with `h` the harmonic completion of
/// `u`. Terminal values are the trigonometric interpolants of `u` and `Hu` at `ẑ_p`.
pub struct HarmonicPair<T: Real> {
    pub r: MartingaleMatrix<T>,
    pub hr: MartingaleMatrix<T>,
}

pub fn harmonic_pair<T: Real>(u: &BoundaryFunction<T>, ens: &PathEnsemble<T>) -> Result<HarmonicPair<T>> {
    let h = harmonic_completion(u)?;
    let h0 = h.eval(cx(T::zero(), T::zero())).im;
    let vals = MartingaleMatrix::from_fn(ens, |_, _, z| h.eval(z));
    let r = vals.map(|v| cx(v.re, T::zero()));
    let hr = vals.map(|v| cx(v.im - h0, T::zero()));
    Ok(HarmonicPair { r, hr })
}

/// Closed-form stochastic Hilbert transform of `R = u(ẑ)`: the conjugate harmonic
/// function along the paths, ending at `(Hu)(ẑ_p)`.
pub fn stochastic_hilbert_closed<T: Real>(u: &BoundaryFunction<T>, ens: &PathEnsemble<T>) -> Result<MartingaleMatrix<T>> {
    Ok(harmonic_pair(u, ens)?.hr)
}

/// Output of [`stochastic_hilbert_mc`].
pub struct HilbertMc<T: Real> {
    /// Running values `Σ_{j<k} i(conj(Y_j Δz_j) - Y_j Δz_j)`.
    pub values: MartingaleMatrix<T>,
    pub fit: RepresentationFit,
    /// Largest imaginary part of the complex formula over all paths.
    pub max_imag: f64,
}

/// Monte Carlo stochastic Hilbert transform `HR = i∫(Ȳ dz̄ - Y dz)` of a real
/// adapted process, with `Y` from [`representation_regress`].
pub fn stochastic_hilbert_mc<T: Real>(
    r: &MartingaleMatrix<T>,
    ens: &PathEnsemble<T>,
    degree: usize,
    bucket_rows: usize,
) -> Result<HilbertMc<T>> {
    let scale = (0..r.n_paths()).map(|p| r.terminal(p).norm()).fold(T::zero(), Float::max);
    let tol = T::lit(1e-12) * Float::max(T::one(), scale);
    if r.max_imag() > tol {
        return Err(HardyError::NotReal(r.max_imag().as_f64()));
    }
    let fit = representation_regress(r, ens, degree, bucket_rows)?;
    let mut values = Vec::with_capacity(ens.total_steps() + ens.n_paths());
    let mut max_imag: f64 = 0.0;
    let i = Complex64::new(0.0, 1.0);
    for p in 0..ens.n_paths() {
        let path = ens.path(p);
        let mut acc = Complex64::new(0.0, 0.0);
        values.push(cx(T::zero(), T::zero()));
        for k in 0..path.len() - 1 {
            let z = cx_to_f64(path[k]);
            let dz = cx_to_f64(path[k + 1]) - z;
            let ydz = fit.eval(k, z) * dz;
            acc += i * (ydz.conj() - ydz);
            values.push(cx(T::lit(acc.re), T::zero()));
        }
        max_imag = max_imag.max(acc.im.abs());
    }
    Ok(HilbertMc { values: MartingaleMatrix::from_paths(ens, values)?, fit, max_imag })
}

/// `‖a - b‖_2 / ‖b‖_2` over terminal values.
pub fn relative_l2<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (cx_to_f64(*x) - cx_to_f64(*y)).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| cx_to_f64(*y).norm_sqr()).sum();
    (num / den).sqrt()
}

/// `E R² = E (HR)²` for a mean-zero real `R`, as a two-sided Monte Carlo comparison.
pub fn isometry_check<T: Real>(r: &MartingaleMatrix<T>, hr: &MartingaleMatrix<T>) -> Check {
    let d = MeanEstimate::from_samples(
        (0..r.n_paths()).map(|p| r.terminal(p).re.as_f64().powi(2) - hr.terminal(p).re.as_f64().powi(2)),
    );
    let lhs = MeanEstimate::from_samples((0..r.n_paths()).map(|p| r.terminal(p).re.as_f64().powi(2))).mean;
    Check::two_sided("hilbert_isometry", lhs, lhs - d.mean, d.stderr, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Th32Report {
    /// `max_p ||F_p| - exp(R_p)|`.
    pub modulus_defect: f64,
    pub mean_f: [f64; 2],
    pub exp_mean_r: f64,
    pub check: Check,
}

/// `F = exp(R + iHR)` with `R = u(ẑ)` read at the nearest node: `|F| = exp(R)` per
/// path, and `E F = exp(E R)` to Monte Carlo accuracy.
pub fn verify_th32<T: Real>(u: &BoundaryFunction<T>, ens: &PathEnsemble<T>) -> Result<Th32Report> {
    let nodes = ExpForm::node_values(u, T::zero())?;
    let n = u.len();
    let mut modulus_defect: f64 = 0.0;
    let mut f = Vec::with_capacity(ens.n_paths());
    let mut r = Vec::with_capacity(ens.n_paths());
    for p in 0..ens.n_paths() {
        let k = snap(n, ens.exit_point(p));
        let fp = cx_to_f64(nodes[k]);
        let rp = u.samples()[k].re.as_f64();
        modulus_defect = modulus_defect.max((fp.norm() - rp.exp()).abs() / rp.exp().max(1.0));
        f.push(fp);
        r.push(rp);
    }
    let mf = ComplexMeanEstimate::from_samples(f.iter().copied());
    let mr = MeanEstimate::from_samples(r.iter().copied()).mean;
    let e = mr.exp();
    // linearize exp(E R) around the sample mean so the two estimates share noise
    let se = ComplexMeanEstimate::from_samples(f.iter().zip(&r).map(|(a, b)| a - e * (b - mr))).stderr;
    let gap = (mf.mean - e).norm();
    let check = Check::statistical("th32_mean_identity", gap, 0.0, se);
    Ok(Th32Report { modulus_defect, mean_f: [mf.mean.re, mf.mean.im], exp_mean_r: e, check })
}

/// Terminal data of a level-`λ` truncation in the exp-form class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Th34Report {
    pub lambda: f64,
    /// `max_p |G_p| / λ`, at most 1.
    pub max_g_over_lambda: f64,
    /// `max_p (|G_p| - |F_p|)`, at most 0.
    pub max_g_minus_f: f64,
    /// `E|1 - S|²`, `2(1 - Re E S)`, `2E(1_A ln(|F|/λ))`, `(2/λ)E(1_A |F|)`.
    pub chain: [f64; 4],
    pub checks: Vec<Check>,
}

impl Th34Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Terminal values `F_p = e^{iφ} exp(u + iHu)` and `G_p = e^{iφ} exp(Z + iHZ)` with
/// `Z = min(u, ln λ)`, both at the node nearest `ẑ_p`.
pub fn holomorphic_truncate<T: Real>(
    u: &BoundaryFunction<T>,
    phase: T,
    lambda: f64,
    ens: &PathEnsemble<T>,
) -> Result<(Vec<Complex64>, Vec<Complex64>, Th34Report)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(HardyError::InvalidParameter(format!("level must be positive, got {lambda}")));
    }
    let ln_l = T::lit(lambda.ln());
    let z_vals: Vec<T> = u.samples().iter().map(|v| Float::min(v.re, ln_l)).collect();
    let zb = BoundaryFunction::from_real(&z_vals)?;
    let f_nodes = ExpForm::node_values(u, phase)?;
    let g_nodes = ExpForm::node_values(&zb, phase)?;
    let n = u.len();
    let mut f = Vec::with_capacity(ens.n_paths());
    let mut g = Vec::with_capacity(ens.n_paths());
    for p in 0..ens.n_paths() {
        let k = snap(n, ens.exit_point(p));
        f.push(cx_to_f64(f_nodes[k]));
        g.push(cx_to_f64(g_nodes[k]));
    }
    let report = th34_report(&f, &g, lambda);
    Ok((f, g, report))
}

/// Checks of the truncation inequalities on paired terminal samples.
pub fn th34_report(f: &[Complex64], g: &[Complex64], lambda: f64) -> Th34Report {
    let mut max_g: f64 = 0.0;
    let mut max_gf = f64::NEG_INFINITY;
    let mut a = Vec::with_capacity(f.len());
    let mut b = Vec::with_capacity(f.len());
    let mut c = Vec::with_capacity(f.len());
    let mut d = Vec::with_capacity(f.len());
    let mut dist = Vec::with_capacity(f.len());
    let mut sq = Vec::with_capacity(f.len());
    for (&fp, &gp) in f.iter().zip(g) {
        max_g = max_g.max(gp.norm() / lambda);
        max_gf = max_gf.max(gp.norm() - fp.norm());
        let s = if fp.norm() > 0.0 { gp / fp } else { Complex64::new(1.0, 0.0) };
        let on_a = fp.norm() > lambda;
        a.push((1.0 - s).norm_sqr());
        b.push(2.0 * (1.0 - s.re));
        c.push(if on_a { 2.0 * (fp.norm() / lambda).ln() } else { 0.0 });
        d.push(if on_a { 2.0 * fp.norm() / lambda } else { 0.0 });
        dist.push((fp - gp).norm());
        sq.push(fp.norm_sqr() / lambda);
    }
    let m = |v: &[f64]| MeanEstimate::from_samples(v.iter().copied());
    let (ma, mb, mc, md) = (m(&a), m(&b), m(&c), m(&d));
    let paired = |x: &[f64], y: &[f64]| MeanEstimate::from_samples(x.iter().zip(y).map(|(p, q)| p - q)).stderr;
    let checks = vec![
        Check::exact("g_below_lambda", max_g, 1.0, 1e-12, 0.0),
        Check::exact("g_below_f", max_gf, 0.0, 0.0, 1e-12 * lambda.max(1.0)),
        Check::exact("defect_vs_real_part", ma.mean, mb.mean, 1e-12, 1e-15),
        Check::statistical("real_part_vs_log", mb.mean, mc.mean, paired(&b, &c)),
        Check::exact("log_vs_linear", mc.mean, md.mean, 1e-12, 0.0),
        Check::statistical("distance_vs_second_moment", m(&dist).mean, m(&sq).mean, paired(&dist, &sq)),
    ];
    Th34Report {
        lambda,
        max_g_over_lambda: max_g,
        max_g_minus_f: max_gf,
        chain: [ma.mean, mb.mean, mc.mean, md.mean],
        checks,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener::{sample_paths, SimConfig};

    fn ens(p: usize, seed: u64) -> PathEnsemble<f64> {
        sample_paths(&SimConfig::new(p, 1e-3, seed)).unwrap()
    }

    #[test]
    fn closed_form_of_cosine_and_constant() {
        let e = ens(500, 1);
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |t| t.cos()).unwrap();
        let hr = stochastic_hilbert_closed(&u, &e).unwrap();
        for p in 0..e.n_paths() {
            let z = e.exit_point(p);
            assert!((hr.terminal(p).re - z.im).abs() < 1e-12);
            assert_eq!(hr.path(p)[0].re, 0.0);
        }
        let c = BoundaryFunction::<f64>::from_angle_fn(64, |_| 2.5).unwrap();
        assert!(stochastic_hilbert_closed(&c, &e).unwrap().is_zero());
    }

    #[test]
    fn monte_carlo_matches_closed_form() {
        let e = ens(6000, 2);
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |t| t.cos()).unwrap();
        let pair = harmonic_pair(&u, &e).unwrap();
        let mc = stochastic_hilbert_mc(&pair.r, &e, 4, 1 << 14).unwrap();
        let err = relative_l2(&mc.values.terminals(), &pair.hr.terminals());
        assert!(err < 0.1, "relative error {err}");
        assert!(mc.max_imag < 1e-12);
        assert!(isometry_check(&pair.r, &pair.hr).pass);
    }

    #[test]
    fn monte_carlo_of_constant_is_zero() {
        let e = ens(2000, 3);
        let r = MartingaleMatrix::constant(&e, Cx::new(1.5, 0.0));
        let mc = stochastic_hilbert_mc(&r, &e, 3, 1 << 13).unwrap();
        assert!(mc.values.is_zero());
        let bad = MartingaleMatrix::constant(&e, Cx::new(1.0, 1.0));
        assert!(matches!(stochastic_hilbert_mc(&bad, &e, 3, 1 << 13), Err(HardyError::NotReal(_))));
    }

    #[test]
    fn th32_examples() {
        let e = ens(4000, 4);
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |_| 2f64.ln()).unwrap();
        let r = verify_th32(&u, &e).unwrap();
        assert!((r.mean_f[0] - 2.0).abs() < 1e-14 && (r.exp_mean_r - 2.0).abs() < 1e-14);
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |t| t.cos()).unwrap();
        let r = verify_th32(&u, &e).unwrap();
        assert!(r.modulus_defect < 1e-14);
        assert!(r.check.pass, "{r:?}");
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |t| (-8.0 + 3.0 * t.sin()).max(-9.0)).unwrap();
        let r = verify_th32(&u, &e).unwrap();
        assert!(r.mean_f[0] > 0.0 && r.check.pass);
    }

    #[test]
    fn th34_constant_and_high_level() {
        let e = ens(1000, 5);
        let lambda = 0.75;
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |_| (2.0 * lambda as f64).ln()).unwrap();
        let (f, g, rep) = holomorphic_truncate(&u, 0.4, lambda, &e).unwrap();
        for (a, b) in f.iter().zip(&g) {
            assert!((b - Complex64::from_polar(lambda, 0.4)).norm() < 1e-14);
            assert!((a - b).norm() - lambda < 1e-14);
        }
        assert!(rep.pass(), "{rep:?}");
        let u = BoundaryFunction::<f64>::from_angle_fn(64, |t| 0.5 * t.cos()).unwrap();
        let (f, g, rep) = holomorphic_truncate(&u, 0.0, 10.0, &e).unwrap();
        assert_eq!(f, g);
        assert_eq!(rep.chain, [0.0; 4]);
        assert!(holomorphic_truncate(&u, 0.0, 0.0, &e).is_err());
    }

    #[test]
    fn th34_sweep() {
        let e = ens(4000, 6);
        let u = BoundaryFunction::<f64>::from_angle_fn(256, |t| 1.5 * t.cos()).unwrap();
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let (_, _, rep) = holomorphic_truncate(&u, 0.0, lambda, &e).unwrap();
            assert!(rep.pass(), "{rep:?}");
        }
    }
}
