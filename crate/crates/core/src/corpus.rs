//! Seeded test-function families shared by the tests, the acceptance runner and
//! the command-line front end.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{AnalyticBoundaryFunction, BoundaryFunction, Polynomial};
use crate::error::Result;
use crate::factorization::{synthesize, BlaschkeSpec, FactoredFunction, SingularAtomSpec, SynthesisOptions};
use crate::scalar::{cx_from_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurKind {
    Blaschke,
    Outer,
    Singular,
    Product,
}

#[derive(Debug, Clone)]
pub struct SchurSample<T: Real> {
    pub kind: SchurKind,
    pub index: usize,
    pub s: AnalyticBoundaryFunction<T>,
}

/// Radius of the disk the random Blaschke zeros are drawn from.
pub const ZERO_RADIUS: f64 = 0.9;
/// Singular atoms are evaluated at radius `1 - SINGULAR_DELTA` so their spectrum resolves on the grid.
pub const SINGULAR_DELTA: f64 = 0.05;

fn random_zero(rng: &mut ChaCha8Rng) -> Complex64 {
    // uniform in the disk of radius ZERO_RADIUS
    let r = ZERO_RADIUS * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

/// Trigonometric polynomial of degree ≤ 6 with maximum 0 on the grid, scaled so
/// its minimum lies in `[-4, 0)`.
fn random_log_modulus<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Result<BoundaryFunction<T>> {
    let deg = rng.random_range(1..=6);
    let terms: Vec<(f64, f64)> = (0..deg).map(|_| (rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>())).collect();
    let depth = 4.0 * rng.random::<f64>() + 1e-3;
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            let th = BoundaryFunction::<f64>::angle_of(n, k);
            terms.iter().enumerate().map(|(j, (a, ph))| a * ((j + 1) as f64 * th + ph).cos()).sum()
        })
        .collect();
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let span = (hi - lo).max(1e-12);
    let vals: Vec<T> = raw.iter().map(|v| T::lit((v - hi) / span * depth)).collect();
    BoundaryFunction::from_real(&vals)
}

fn random_blaschke<T: Real>(rng: &mut ChaCha8Rng) -> Result<BlaschkeSpec<T>> {
    let count = rng.random_range(1..=4);
    BlaschkeSpec::new((0..count).map(|_| cx_from_f64(random_zero(rng))).collect())
}

fn random_singular<T: Real>(rng: &mut ChaCha8Rng) -> Result<SingularAtomSpec<T>> {
    let count = rng.random_range(1..=2);
    SingularAtomSpec::new(
        (0..count)
            .map(|_| {
                let t = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
                (cx_from_f64(t), T::lit(0.05 + 0.45 * rng.random::<f64>()))
            })
            .collect(),
    )
}

/// `count` Schur functions on an `n`-point grid, cycling through Blaschke
/// products, outer functions with modulus ≤ 1, singular inner factors and their
/// products. Every sample has `s(0) ≥ 0`.
pub fn schur_corpus<T: Real>(count: usize, n: usize, seed: u64) -> Result<Vec<SchurSample<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_log = BoundaryFunction::<T>::from_real(&vec![T::zero(); n])?;
    let opts = SynthesisOptions { delta_sing: T::lit(SINGULAR_DELTA) };
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let kind = [SchurKind::Blaschke, SchurKind::Outer, SchurKind::Singular, SchurKind::Product][index % 4];
        let f = match kind {
            SchurKind::Blaschke => {
                FactoredFunction::new(random_blaschke(&mut rng)?, SingularAtomSpec::empty(), zero_log.clone(), T::zero())?
            }
            SchurKind::Outer => FactoredFunction::outer(random_log_modulus(&mut rng, n)?)?,
            SchurKind::Singular => {
                FactoredFunction::new(BlaschkeSpec::empty(), random_singular(&mut rng)?, zero_log.clone(), T::zero())?
            }
            SchurKind::Product => FactoredFunction::new(
                random_blaschke(&mut rng)?,
                if rng.random::<bool>() { random_singular(&mut rng)? } else { SingularAtomSpec::empty() },
                random_log_modulus(&mut rng, n)?,
                T::zero(),
            )?,
        };
        out.push(SchurSample { kind, index, s: synthesize(&f, opts)? });
    }
    Ok(out)
}

/// `s ≡ 1`, `s ≡ ½`, `s(t) = t`.
pub fn trivial_schur_corpus<T: Real>(n: usize) -> Result<Vec<(&'static str, AnalyticBoundaryFunction<T>)>> {
    Ok(vec![
        ("one", AnalyticBoundaryFunction::constant(n, cx_from_f64(Complex64::new(1.0, 0.0)))?),
        ("half", AnalyticBoundaryFunction::constant(n, cx_from_f64(Complex64::new(0.5, 0.0)))?),
        ("identity", AnalyticBoundaryFunction::from_fn(n, |t| t)?),
    ])
}

/// Named `H^p` test functions on an `n`-point grid. The last one,
/// `(1+t)^{-1/(2p)}`, is unbounded and lies in `H^p` only barely.
pub fn hp_corpus<T: Real>(p: f64, n: usize) -> Result<Vec<(String, AnalyticBoundaryFunction<T>)>> {
    let one = Complex64::new(1.0, 0.0);
    let holo = |g: &dyn Fn(Complex64) -> Complex64| -> Result<AnalyticBoundaryFunction<T>> {
        let f = BoundaryFunction::<T>::from_fn(n, |t| {
            let z = Complex64::new(t.re.as_f64(), t.im.as_f64());
            cx_from_f64(g(z))
        })?;
        Ok(AnalyticBoundaryFunction::from_holomorphic_samples(f))
    };
    let b = BlaschkeSpec::<f64>::new(vec![Complex64::new(0.5, 0.2)])?;
    Ok(vec![
        ("one_plus_t".to_string(), holo(&|t| one + t)?),
        ("one_plus_t_squared".to_string(), holo(&|t| (one + t) * (one + t))?),
        ("exp_two_t".to_string(), holo(&|t| (2.0 * t).exp())?),
        ("blaschke_times_affine".to_string(), holo(&|t| b.eval(t).unwrap_or(one) * (2.0 + t))?),
        ("root_singularity".to_string(), holo(&|t| (one + t).powf(-1.0 / (2.0 * p)))?),
    ])
}

/// Holomorphic polynomials with `‖f‖_2 = 1` and `f(0) ≠ 0` for the Wiener experiments.
pub fn wiener_corpus() -> Vec<(&'static str, Polynomial<f64>)> {
    let c = |v: &[f64]| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Polynomial::new(v.iter().map(|x| Complex64::new(x / norm, 0.0)).collect())
    };
    vec![
        ("one_plus_t_squared", c(&[1.0, 2.0, 1.0])),
        ("one_plus_t", c(&[1.0, 1.0])),
        ("mixed_cubic", Polynomial::new(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, -0.3),
            Complex64::new(0.4, 0.0),
        ]).scale(Complex64::new(1.0 / (0.25f64 + 0.5 + 0.09 + 0.16).sqrt(), 0.0))),
    ]
}

/// Amplitudes `a` for the exp-form functions `exp(a cos θ + i a sin θ) = exp(a t)`.
pub const EXP_FORM_AMPLITUDES: [f64; 3] = [0.5, 1.0, 2.0];
