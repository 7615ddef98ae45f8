//! Order-insensitive reductions and Monte Carlo summaries.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples<I: IntoIterator<Item = f64>>(xs: I) -> Self {
        let mut s = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        let mut n = 0usize;
        for x in xs {
            s.add(x);
            s2.add(x * x);
            n += 1;
        }
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, stderr: f64::NAN, n };
        }
        let nf = n as f64;
        let mean = s.value() / nf;
        let var = if n > 1 {
            ((s2.value() - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        MeanEstimate { mean, stderr: (var / nf).sqrt(), n }
    }

    /// Upper edge `mean + k * stderr`.
    pub fn upper(&self, k: f64) -> f64 {
        self.mean + k * self.stderr
    }

    pub fn lower(&self, k: f64) -> f64 {
        self.mean - k * self.stderr
    }
}

/// Mean of complex samples; the standard error is that of the modulus of the error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMeanEstimate {
    pub mean: Complex<f64>,
    pub stderr: f64,
    pub n: usize,
}

impl ComplexMeanEstimate {
    pub fn from_samples<I: IntoIterator<Item = Complex<f64>>>(xs: I) -> Self {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        let mut sq = CompensatedSum::new();
        let mut n = 0usize;
        for z in xs {
            re.add(z.re);
            im.add(z.im);
            sq.add(z.norm_sqr());
            n += 1;
        }
        if n == 0 {
            return ComplexMeanEstimate {
                mean: Complex::new(f64::NAN, f64::NAN),
                stderr: f64::NAN,
                n,
            };
        }
        let nf = n as f64;
        let mean = Complex::new(re.value() / nf, im.value() / nf);
        let var = if n > 1 {
            ((sq.value() - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        ComplexMeanEstimate { mean, stderr: (var / nf).sqrt(), n }
    }
}

/// One-sample Kolmogorov-Smirnov test of `angles` (radians, any branch) against
/// the uniform law on the circle. Returns `(D, p_value)`.
pub fn ks_uniform_circle(angles: &[f64]) -> (f64, f64) {
    let two_pi = std::f64::consts::TAU;
    let mut u: Vec<f64> = angles.iter().map(|a| a.rem_euclid(two_pi) / two_pi).collect();
    u.sort_by(|a, b| a.total_cmp(b));
    let n = u.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in u.iter().enumerate() {
        let lo = x - i as f64 / nf;
        let hi = (i + 1) as f64 / nf - x;
        d = d.max(lo).max(hi);
    }
    (d, kolmogorov_p_value(d, n))
}

/// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = std::iter::once(1e16).chain(std::iter::repeat(1.0).take(1000)).chain(std::iter::once(-1e16));
        assert_eq!(compensated_sum(xs), 1000.0);
    }

    #[test]
    fn mean_estimate_of_constant_has_zero_stderr() {
        let m = MeanEstimate::from_samples(std::iter::repeat(3.5).take(10));
        assert_eq!(m.mean, 3.5);
        assert_eq!(m.stderr, 0.0);
    }

    #[test]
    fn ks_accepts_equispaced_and_rejects_clustered() {
        let n = 2000;
        let even: Vec<f64> = (0..n).map(|i| std::f64::consts::TAU * (i as f64 + 0.5) / n as f64).collect();
        let (_, p) = ks_uniform_circle(&even);
        assert!(p > 0.99);
        let clustered: Vec<f64> = (0..n).map(|i| 0.5 * i as f64 / n as f64).collect();
        let (_, p) = ks_uniform_circle(&clustered);
        assert!(p < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_matches_tabulated_critical_value() {
        // 1% critical value of the limiting law: lambda = 1.6276
        let n = 1_000_000;
        let d = 1.6276 / (n as f64).sqrt();
        let p = kolmogorov_p_value(d, n);
        assert!((p - 0.01).abs() < 2e-4, "p = {p}");
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, -1.0, -3.0, -5.0];
        assert!((ls_slope(&xs, &ys).unwrap() + 2.0).abs() < 1e-14);
    }
}
