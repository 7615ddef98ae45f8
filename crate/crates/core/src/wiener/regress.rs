use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::martingale::MartingaleMatrix;
use super::paths::PathEnsemble;
use crate::error::{HardyError, Result};
use crate::scalar::{cx_to_f64, Real};

/// Minimum regression rows per basis function inside one time bucket.
pub const ROWS_PER_BASIS: usize = 50;
/// Default target rows per time bucket.
pub const DEFAULT_BUCKET_ROWS: usize = 1 << 15;

/// Consecutive steps `k_start..k_end` that share one set of regression coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub k_start: usize,
    pub k_end: usize,
    pub rows: usize,
    /// Basis scale: the RMS of `|z|` over the bucket's rows.
    pub rho: f64,
}

/// Splits the steps into buckets of at least `min_rows` live (path, step) pairs.
/// A short final bucket is merged into its predecessor.
pub fn time_buckets<T: Real>(ens: &PathEnsemble<T>, min_rows: usize) -> Vec<Bucket> {
    let mut out: Vec<Bucket> = Vec::new();
    let mut start = 0;
    let mut rows = 0;
    let last = ens.max_exit_index();
    for k in 0..last {
        rows += ens.alive(k).len();
        if rows >= min_rows {
            out.push(Bucket { k_start: start, k_end: k + 1, rows, rho: 0.0 });
            start = k + 1;
            rows = 0;
        }
    }
    if rows > 0 {
        match out.last_mut() {
            Some(b) if rows < min_rows => {
                b.k_end = last;
                b.rows += rows;
            }
            _ => out.push(Bucket { k_start: start, k_end: last, rows, rho: 0.0 }),
        }
    }
    for b in &mut out {
        let mut s = 0.0;
        for k in b.k_start..b.k_end {
            for &p in ens.alive(k) {
                s += ens.path(p)[k].norm_sqr().as_f64();
            }
        }
        b.rho = (s / b.rows as f64).sqrt();
    }
    out
}

/// Below this RMS radius a bucket is fitted by a constant only.
const RHO_FLOOR: f64 = 1e-9;

fn holomorphic_basis(z: Complex64, rho: f64, len: usize, out: &mut [Complex64]) {
    let w = z / rho;
    let mut acc = Complex64::new(1.0, 0.0);
    for slot in out.iter_mut().take(len) {
        *slot = acc;
        acc *= w;
    }
}

/// Least-squares estimate of the integrand `Y` in `dR = Y dz + Ȳ' dz̄`, one
/// coefficient vector per time bucket in the holomorphic monomials `(z/ρ)^j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationFit {
    pub degree: usize,
    pub buckets: Vec<Bucket>,
    /// Coefficients per bucket, `(re, im)` pairs.
    #[serde(skip)]
    coeffs: Vec<Vec<Complex64>>,
    /// Step → bucket index.
    #[serde(skip)]
    bucket_of: Vec<usize>,
}

impl RepresentationFit {
    pub fn coefficients(&self, bucket: usize) -> &[Complex64] {
        &self.coeffs[bucket]
    }

    /// `Y` at step `k` and position `z`.
    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        let Some(&b) = self.bucket_of.get(k) else {
            return Complex64::new(0.0, 0.0);
        };
        let c = &self.coeffs[b];
        let rho = self.buckets[b].rho;
        if c.len() == 1 {
            return c[0];
        }
        let w = z / rho;
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * w + a)
    }
}

/// Regresses `ΔR_k·conj(Δz_k)/(2dt)` on holomorphic monomials of `z_k`, pooling
/// steps into buckets of at least `max(bucket_rows, 50·(degree+1))` rows.
pub fn representation_regress<T: Real>(
    r: &MartingaleMatrix<T>,
    ens: &PathEnsemble<T>,
    degree: usize,
    bucket_rows: usize,
) -> Result<RepresentationFit> {
    if !r.matches(ens) {
        return Err(HardyError::InvalidParameter("martingale matrix does not match the ensemble".into()));
    }
    let nb = degree + 1;
    let min_rows = bucket_rows.max(ROWS_PER_BASIS * nb);
    let buckets = time_buckets(ens, min_rows);
    let two_dt = 2.0 * ens.dt();
    let mut coeffs = Vec::with_capacity(buckets.len());
    let mut bucket_of = Vec::with_capacity(ens.max_exit_index());
    let mut phi = vec![Complex64::new(0.0, 0.0); nb];
    for (bi, b) in buckets.iter().enumerate() {
        let len = if b.rho > RHO_FLOOR { nb } else { 1 };
        if b.rows < ROWS_PER_BASIS * len {
            return Err(HardyError::RankDeficient { step: b.k_start, rows: b.rows, basis: len });
        }
        let mut gram = DMatrix::<Complex64>::zeros(len, len);
        let mut rhs = DVector::<Complex64>::zeros(len);
        for k in b.k_start..b.k_end {
            for &p in ens.alive(k) {
                let path = ens.path(p);
                let z = cx_to_f64(path[k]);
                let dz = cx_to_f64(path[k + 1]) - z;
                let rv = r.path(p);
                let dr = cx_to_f64(rv[k + 1]) - cx_to_f64(rv[k]);
                let y = dr * dz.conj() / two_dt;
                holomorphic_basis(z, b.rho, len, &mut phi);
                for i in 0..len {
                    let ci = phi[i].conj();
                    rhs[i] += ci * y;
                    for j in i..len {
                        gram[(i, j)] += ci * phi[j];
                    }
                }
            }
            bucket_of.push(bi);
        }
        for i in 0..len {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)].conj();
            }
        }
        let chol = gram
            .cholesky()
            .ok_or(HardyError::RankDeficient { step: b.k_start, rows: b.rows, basis: len })?;
        coeffs.push(chol.solve(&rhs).iter().copied().collect());
    }
    Ok(RepresentationFit { degree, buckets, coeffs, bucket_of })
}

/// Real features for [`conditional_expectation`] at `(p, k, z_{p,k})`.
pub trait FeatureMap {
    fn len(&self) -> usize;
    fn fill(&self, p: usize, k: usize, z: Complex64, out: &mut [f64]);
}

/// `1, Re (z/ρ)^j, Im (z/ρ)^j` for `1 ≤ j ≤ degree`, plus extra per-(p, k) features.
pub struct HarmonicFeatures<'a> {
    pub degree: usize,
    pub rho: f64,
    pub extra: Option<&'a dyn Fn(usize, usize, &mut [f64])>,
    pub n_extra: usize,
}

impl FeatureMap for HarmonicFeatures<'_> {
    fn len(&self) -> usize {
        1 + 2 * self.degree + self.n_extra
    }

    fn fill(&self, p: usize, k: usize, z: Complex64, out: &mut [f64]) {
        out[0] = 1.0;
        let w = z / self.rho.max(RHO_FLOOR);
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..self.degree {
            acc *= w;
            out[1 + 2 * j] = acc.re;
            out[2 + 2 * j] = acc.im;
        }
        if let Some(f) = self.extra {
            f(p, k, &mut out[1 + 2 * self.degree..]);
        }
    }
}

/// Regression estimate of `E(X | F_k)` for a real terminal variable `X`, bucketed
/// in time like [`representation_regress`]. At step 0 every path sits at the
/// origin and the value is the sample mean; the terminal column is `X` itself.
pub fn conditional_expectation<'f, T: Real>(
    x: &[f64],
    ens: &PathEnsemble<T>,
    features: &dyn Fn(f64) -> Box<dyn FeatureMap + 'f>,
    bucket_rows: usize,
) -> Result<MartingaleMatrix<T>> {
    if x.len() != ens.n_paths() {
        return Err(HardyError::SizeMismatch { expected: ens.n_paths(), found: x.len() });
    }
    let probe = features(1.0);
    let nb = probe.len();
    let buckets = time_buckets(ens, bucket_rows.max(ROWS_PER_BASIS * nb));
    let mut values: Vec<Vec<f64>> = (0..ens.n_paths()).map(|p| vec![0.0; ens.exit_index(p) + 1]).collect();
    for (p, v) in values.iter_mut().enumerate() {
        *v.last_mut().expect("nonempty") = x[p];
    }
    let mut phi = vec![0.0; nb];
    for b in &buckets {
        let fm = features(b.rho);
        let len = if b.rho > RHO_FLOOR { nb } else { 1 };
        let mut gram = DMatrix::<f64>::zeros(len, len);
        let mut rhs = DVector::<f64>::zeros(len);
        let visit = |k: usize, p: usize, phi: &mut [f64]| {
            let z = cx_to_f64(ens.path(p)[k]);
            if len == 1 {
                phi[0] = 1.0;
            } else {
                fm.fill(p, k, z, phi);
            }
        };
        for k in b.k_start..b.k_end {
            for &p in ens.alive(k) {
                visit(k, p, &mut phi);
                for i in 0..len {
                    rhs[i] += phi[i] * x[p];
                    for j in i..len {
                        gram[(i, j)] += phi[i] * phi[j];
                    }
                }
            }
        }
        for i in 0..len {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        let ridge = 1e-12 * (0..len).map(|i| gram[(i, i)]).fold(0.0, f64::max);
        for i in 0..len {
            gram[(i, i)] += ridge;
        }
        let beta = gram
            .cholesky()
            .ok_or(HardyError::RankDeficient { step: b.k_start, rows: b.rows, basis: len })?
            .solve(&rhs);
        for k in b.k_start..b.k_end {
            for &p in ens.alive(k) {
                visit(k, p, &mut phi);
                values[p][k] = (0..len).map(|i| beta[i] * phi[i]).sum();
            }
        }
    }
    let flat = values
        .into_iter()
        .flatten()
        .map(|v| num_complex::Complex::new(T::lit(v), T::zero()))
        .collect();
    MartingaleMatrix::from_paths(ens, flat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Polynomial;
    use crate::wiener::{embed, sample_paths, SimConfig};

    fn ens() -> PathEnsemble<f64> {
        sample_paths(&SimConfig::new(3000, 2e-3, 21)).unwrap()
    }

    #[test]
    fn buckets_cover_all_steps() {
        let e = ens();
        let b = time_buckets(&e, 20000);
        assert_eq!(b[0].k_start, 0);
        assert_eq!(b.last().unwrap().k_end, e.max_exit_index());
        assert!(b.windows(2).all(|w| w[0].k_end == w[1].k_start));
        assert_eq!(b.iter().map(|x| x.rows).sum::<usize>(), e.total_steps());
        assert!(b.iter().all(|x| x.rows >= 20000));
    }

    #[test]
    fn identity_has_unit_integrand() {
        let e = ens();
        let r = embed(&Polynomial::monomial(1, Complex64::new(1.0, 0.0)), &e);
        let fit = representation_regress(&r, &e, 3, 1 << 14).unwrap();
        let mut err = 0.0;
        let mut n = 0.0;
        for p in 0..e.n_paths() {
            for k in 0..e.exit_index(p) {
                err += (fit.eval(k, e.path(p)[k]) - 1.0).norm_sqr();
                n += 1.0;
            }
        }
        assert!((err / n).sqrt() < 0.05, "{}", (err / n).sqrt());
    }

    #[test]
    fn constant_has_zero_integrand() {
        let e = ens();
        let r = MartingaleMatrix::constant(&e, Complex64::new(2.0, 1.0));
        let fit = representation_regress(&r, &e, 4, 1 << 14).unwrap();
        for b in 0..fit.buckets.len() {
            assert!(fit.coefficients(b).iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn too_few_rows_is_rank_deficient() {
        let e = sample_paths::<f64>(&SimConfig::new(3, 0.1, 1)).unwrap();
        let r = embed(&Polynomial::monomial(1, Complex64::new(1.0, 0.0)), &e);
        assert!(matches!(representation_regress(&r, &e, 6, 10), Err(HardyError::RankDeficient { .. })));
    }

    #[test]
    fn conditional_expectation_of_harmonic_terminal() {
        let e = ens();
        // X = Re ẑ, whose conditional expectation is Re z_k
        let x: Vec<f64> = (0..e.n_paths()).map(|p| e.exit_point(p).re).collect();
        let feats = |rho: f64| -> Box<dyn FeatureMap> {
            Box::new(HarmonicFeatures { degree: 2, rho, extra: None, n_extra: 0 })
        };
        let m = conditional_expectation(&x, &e, &feats, 1 << 13).unwrap();
        let mut err = 0.0;
        let mut n = 0.0;
        for p in 0..e.n_paths() {
            let path = m.path(p);
            assert_eq!(path.last().unwrap().re, x[p]);
            for k in 0..e.exit_index(p) {
                err += (path[k].re - e.path(p)[k].re).powi(2);
                n += 1.0;
            }
        }
        assert!((err / n).sqrt() < 0.06, "{}", (err / n).sqrt());
    }
}
