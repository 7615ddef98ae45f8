use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::blaschke::BlaschkeSpec;
use super::outer::{outer_from_log_modulus, outer_from_modulus};
use super::singular::SingularAtomSpec;
use crate::circle::{AnalyticBoundaryFunction, BoundaryFunction, BoundaryFunctionWire};
use crate::error::{HardyError, Result};
use crate::scalar::{Cx, Real};

/// A Hardy function given by its factors: `B · S · exp(log_modulus + i·H log_modulus) · e^{ic}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredFunction<T: Real> {
    pub blaschke: BlaschkeSpec<T>,
    pub singular: SingularAtomSpec<T>,
    /// Real boundary function `log|f_out|`.
    pub log_modulus: BoundaryFunction<T>,
    pub phase: T,
}

impl<T: Real> FactoredFunction<T> {
    pub fn new(
        blaschke: BlaschkeSpec<T>,
        singular: SingularAtomSpec<T>,
        log_modulus: BoundaryFunction<T>,
        phase: T,
    ) -> Result<Self> {
        let tol = Float::max(T::lit(1e-12), T::eps() * T::lit(64.0)) * Float::max(T::one(), log_modulus.max_abs());
        if log_modulus.max_imag() > tol {
            return Err(HardyError::NotReal(log_modulus.max_imag().as_f64()));
        }
        Ok(Self { blaschke, singular, log_modulus, phase })
    }

    /// Pure outer function with the given log-modulus.
    pub fn outer(log_modulus: BoundaryFunction<T>) -> Result<Self> {
        Self::new(BlaschkeSpec::empty(), SingularAtomSpec::empty(), log_modulus, T::zero())
    }

    pub fn grid_size(&self) -> usize {
        self.log_modulus.len()
    }
}

/// Knobs for [`synthesize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions<T: Real> {
    /// Singular factors are evaluated on the circle of radius `1 - delta_sing`.
    pub delta_sing: T,
}

impl<T: Real> Default for SynthesisOptions<T> {
    fn default() -> Self {
        Self { delta_sing: T::lit(1e-4) }
    }
}

/// Boundary values of the factored function on its grid.
///
/// The Blaschke and outer factors are exact node values. Singular atoms enter
/// through `S((1 - δ) t_k)`, whose modulus `exp(-Σ c_j P_r(t_k, t_j))` is the
/// Poisson-kernel deficit at radius `r = 1 - δ`.
pub fn synthesize<T: Real>(f: &FactoredFunction<T>, opts: SynthesisOptions<T>) -> Result<AnalyticBoundaryFunction<T>> {
    let outer = outer_from_log_modulus(&f.log_modulus)?;
    let n = f.grid_size();
    let rot = Complex::from_polar(T::one(), f.phase);
    let radius = T::one() - opts.delta_sing;
    let mut samples = Vec::with_capacity(n);
    for (k, o) in outer.samples().iter().enumerate() {
        let t = BoundaryFunction::<T>::node_of(n, k);
        let mut v = *o * rot;
        if !f.blaschke.is_trivial() {
            v = v * f.blaschke.eval_unchecked(t);
        }
        if !f.singular.is_trivial() {
            v = v * f.singular.eval(t * radius)?;
        }
        samples.push(v);
    }
    Ok(AnalyticBoundaryFunction::from_holomorphic_samples(BoundaryFunction::new(samples)?))
}

/// Output of [`inner_outer_split`].
#[derive(Debug, Clone)]
pub struct InnerOuter<T: Real> {
    pub inner: AnalyticBoundaryFunction<T>,
    pub outer: AnalyticBoundaryFunction<T>,
    /// `max_k ||inner(t_k)| - 1|`.
    pub deviation: T,
}

/// Splits `f` into `outer_from_modulus(|f|)` and the node-wise quotient `f / outer`.
///
/// A zero on or near the grid makes the clipped outer part too large there;
/// that shows up as `deviation > eta_inner` and is reported as an error.
pub fn inner_outer_split<T: Real>(f: &AnalyticBoundaryFunction<T>, floor: T, eta_inner: T) -> Result<InnerOuter<T>> {
    let modulus = BoundaryFunction::from_real(&f.modulus())?;
    let outer = outer_from_modulus(&modulus, floor)?;
    let inner_samples: Vec<Cx<T>> = f.samples().iter().zip(outer.samples()).map(|(a, b)| a / b).collect();
    let deviation = inner_samples
        .iter()
        .map(|z| Float::abs(z.norm() - T::one()))
        .fold(T::zero(), Float::max);
    if deviation > eta_inner {
        return Err(HardyError::InnerNotUnimodular { deviation: deviation.as_f64(), tolerance: eta_inner.as_f64() });
    }
    let inner = AnalyticBoundaryFunction::from_holomorphic_samples(BoundaryFunction::new(inner_samples)?);
    Ok(InnerOuter { inner, outer, deviation })
}

/// JSON layout `{"zeros": [[re, im], ...], "atoms": [[re, im, c], ...], "log_modulus": {...}, "phase": c}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactoredFunctionWire {
    pub zeros: Vec<[f64; 2]>,
    pub atoms: Vec<[f64; 3]>,
    pub log_modulus: BoundaryFunctionWire,
    pub phase: f64,
}

impl<T: Real> From<&FactoredFunction<T>> for FactoredFunctionWire {
    fn from(f: &FactoredFunction<T>) -> Self {
        FactoredFunctionWire {
            zeros: f.blaschke.zeros().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
            atoms: f
                .singular
                .atoms()
                .iter()
                .map(|(t, c)| [t.re.as_f64(), t.im.as_f64(), c.as_f64()])
                .collect(),
            log_modulus: BoundaryFunctionWire::from(&f.log_modulus),
            phase: f.phase.as_f64(),
        }
    }
}

impl<T: Real> TryFrom<FactoredFunctionWire> for FactoredFunction<T> {
    type Error = HardyError;

    fn try_from(w: FactoredFunctionWire) -> Result<Self> {
        let zeros = w.zeros.iter().map(|[a, b]| Complex::new(T::lit(*a), T::lit(*b))).collect();
        let atoms = w
            .atoms
            .iter()
            .map(|[a, b, c]| (Complex::new(T::lit(*a), T::lit(*b)), T::lit(*c)))
            .collect();
        FactoredFunction::new(
            BlaschkeSpec::new(zeros)?,
            SingularAtomSpec::new(atoms)?,
            BoundaryFunction::try_from(w.log_modulus)?,
            T::lit(w.phase),
        )
    }
}

impl<T: Real> Serialize for FactoredFunction<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FactoredFunctionWire::from(self).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for FactoredFunction<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FactoredFunctionWire::deserialize(d)?;
        FactoredFunction::try_from(w).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_log(n: usize) -> BoundaryFunction<f64> {
        BoundaryFunction::constant(n, c(0.0, 0.0)).unwrap()
    }

    #[test]
    fn trivial_factors_give_one() {
        let f = FactoredFunction::outer(zero_log(32)).unwrap();
        let s = synthesize(&f, SynthesisOptions::default()).unwrap();
        assert!(s.samples().iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn zero_at_origin_gives_identity() {
        let f = FactoredFunction::new(BlaschkeSpec::new(vec![c(0.0, 0.0)]).unwrap(), SingularAtomSpec::empty(), zero_log(32), 0.0)
            .unwrap();
        let s = synthesize(&f, SynthesisOptions::default()).unwrap();
        for (k, z) in s.samples().iter().enumerate() {
            assert!((z - s.node(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn blaschke_times_outer_has_outer_modulus() {
        let n = 1024;
        let logm = BoundaryFunction::from_fn(n, |t| c((t + 1.0).norm().ln(), 0.0)).unwrap();
        let f = FactoredFunction::new(BlaschkeSpec::new(vec![c(0.5, 0.0)]).unwrap(), SingularAtomSpec::empty(), logm, 0.3).unwrap();
        let s = synthesize(&f, SynthesisOptions::default()).unwrap();
        for (k, z) in s.samples().iter().enumerate() {
            assert!((z.norm() - (s.node(k) + 1.0).norm()).abs() < 1e-6);
        }
    }

    #[test]
    fn singular_atom_modulus_is_poisson_deficit() {
        let n = 256;
        let atoms = SingularAtomSpec::new(vec![(c(1.0, 0.0), 0.5)]).unwrap();
        let f = FactoredFunction::new(BlaschkeSpec::empty(), atoms, zero_log(n), 0.0).unwrap();
        let delta = 0.05;
        let s = synthesize(&f, SynthesisOptions { delta_sing: delta }).unwrap();
        let r: f64 = 1.0 - delta;
        for (k, z) in s.samples().iter().enumerate() {
            let t = s.node(k);
            let poisson = (1.0 - r * r) / (t * r - c(1.0, 0.0)).norm_sqr();
            assert!((z.norm() - (-0.5 * poisson).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn split_of_outer_input_has_constant_inner() {
        let f = AnalyticBoundaryFunction::<f64>::from_fn(512, |t| (t * 0.6 + 1.0) * c(0.0, 2.0)).unwrap();
        let split = inner_outer_split(&f, 1e-12, 1e-4).unwrap();
        let u0 = split.inner.samples()[0];
        assert!(split.inner.samples().iter().all(|z| (z - u0).norm() < 1e-10));
        let back = split.inner.mul(&split.outer).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn split_of_constant() {
        let f = AnalyticBoundaryFunction::<f64>::constant(16, c(-3.0, 4.0)).unwrap();
        let split = inner_outer_split(&f, 1e-12, 1e-4).unwrap();
        for (i, o) in split.inner.samples().iter().zip(split.outer.samples()) {
            assert!((i - c(-0.6, 0.8)).norm() < 1e-14);
            assert!((o - c(5.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn split_recovers_blaschke_factor() {
        // smooth outer part: inner = t up to a unimodular constant, to rounding
        let n = 512;
        let f = AnalyticBoundaryFunction::<f64>::from_fn(n, |t| t * (t * 0.5 + 1.0)).unwrap();
        let split = inner_outer_split(&f, 1e-12, 1e-4).unwrap();
        let b = BlaschkeSpec::new(vec![c(0.0, 0.0)]).unwrap();
        let ratio: Vec<Complex64> = split
            .inner
            .samples()
            .iter()
            .enumerate()
            .map(|(k, z)| z / b.eval(split.inner.node(k)).unwrap())
            .collect();
        assert!(ratio.iter().all(|z| (z - ratio[0]).norm() < 1e-10));
        assert!((ratio[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_of_t_times_one_plus_t() {
        // the outer part |1+t| vanishes at t = -1, between two nodes; the discrete
        // conjugate of log|1+t| rings there, so agreement is checked away from -1
        let n = 4096;
        let f = AnalyticBoundaryFunction::<f64>::from_fn(n, |t| t * (t + 1.0)).unwrap();
        let split = inner_outer_split(&f, 1e-12, 1e-4).unwrap();
        for (k, o) in split.outer.samples().iter().enumerate() {
            assert!((o.norm() - (f.node(k) + 1.0).norm()).abs() < 1e-12);
        }
        let unit = split.inner.samples()[0] / f.node(0);
        let mut worst: f64 = 0.0;
        for (k, z) in split.inner.samples().iter().enumerate() {
            let theta = f.angle(k);
            if (theta - std::f64::consts::PI).abs() > 0.1 {
                worst = worst.max((z - f.node(k) * unit).norm());
            }
        }
        assert!(worst < 1e-2, "worst = {worst}");
    }

    #[test]
    fn split_flags_grid_zero() {
        // f vanishes at a node: clipping makes |inner| < 1 there
        let n = 64;
        let t0 = BoundaryFunction::<f64>::node_of(n, 3);
        let f = AnalyticBoundaryFunction::<f64>::from_fn(n, |t| t - t0).unwrap();
        assert!(matches!(inner_outer_split(&f, 1e-12, 1e-4), Err(HardyError::InnerNotUnimodular { .. })));
    }

    #[test]
    fn json_schema() {
        let logm = BoundaryFunction::from_fn(8, |t| c(0.1 * t.re, 0.0)).unwrap();
        let f = FactoredFunction::new(
            BlaschkeSpec::new(vec![c(0.2, -0.1)]).unwrap(),
            SingularAtomSpec::new(vec![(c(0.0, 1.0), 0.25)]).unwrap(),
            logm,
            0.5,
        )
        .unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["zeros"][0][0], 0.2);
        assert_eq!(v["atoms"][0][2], 0.25);
        assert_eq!(v["log_modulus"]["n"], 8);
        assert_eq!(v["phase"], 0.5);
        let back: FactoredFunction<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
