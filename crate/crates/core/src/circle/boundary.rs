use num_complex::Complex;
use num_traits::{Float, Zero};
use rustfft::FftPlanner;

use super::spectrum::Spectrum;
use crate::error::{HardyError, Result};
use crate::scalar::{cx, Cx, Real};

/// `N` complex samples of a function on the unit circle, taken at the midpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction<T: Real> {
    samples: Vec<Cx<T>>,
}

pub(crate) fn check_grid_size(n: usize) -> Result<()> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(HardyError::InvalidGridSize(n))
    }
}

impl<T: Real> BoundaryFunction<T> {
    pub fn new(samples: Vec<Cx<T>>) -> Result<Self> {
        check_grid_size(samples.len())?;
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(HardyError::NonFinite(i));
        }
        Ok(Self { samples })
    }

    /// Real-valued function from its node values.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| cx(v, T::zero())).collect())
    }

    /// Samples `f` at every node `t_k`.
    pub fn from_fn(n: usize, mut f: impl FnMut(Cx<T>) -> Cx<T>) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|k| f(Self::node_of(n, k))).collect())
    }

    /// Samples a real function of the angle `θ_k = 2π(k + ½)/N`.
    pub fn from_angle_fn(n: usize, mut f: impl FnMut(T) -> T) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|k| cx(f(Self::angle_of(n, k)), T::zero())).collect())
    }

    pub fn constant(n: usize, c: Cx<T>) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub(crate) fn from_samples_unchecked(samples: Vec<Cx<T>>) -> Self {
        debug_assert!(samples.len().is_power_of_two() && samples.len() >= 8);
        Self { samples }
    }

    /// Angle of node `k` on an `n`-point grid.
    pub fn angle_of(n: usize, k: usize) -> T {
        T::TAU() * (T::from_count(k) + T::lit(0.5)) / T::from_count(n)
    }

    pub fn node_of(n: usize, k: usize) -> Cx<T> {
        Complex::from_polar(T::one(), Self::angle_of(n, k))
    }

    /// Index of the node nearest to the point with argument `angle`.
    pub fn nearest_node(n: usize, angle: T) -> usize {
        let turns = angle / T::TAU();
        let frac = turns - Float::floor(turns);
        let pos = frac * T::from_count(n) - T::lit(0.5);
        let k = Float::round(pos).to_isize().unwrap_or(0);
        k.rem_euclid(n as isize) as usize
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Cx<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Cx<T>> {
        self.samples
    }

    pub fn node(&self, k: usize) -> Cx<T> {
        Self::node_of(self.len(), k)
    }

    pub fn angle(&self, k: usize) -> T {
        Self::angle_of(self.len(), k)
    }

    pub fn map(&self, f: impl FnMut(&Cx<T>) -> Cx<T>) -> Result<Self> {
        Self::new(self.samples.iter().map(f).collect())
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(Cx<T>, Cx<T>) -> Cx<T>) -> Result<Self> {
        if other.len() != self.len() {
            return Err(HardyError::SizeMismatch { expected: self.len(), found: other.len() });
        }
        Self::new(self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        Self { samples: self.samples.iter().map(|&z| z * c).collect() }
    }

    pub fn modulus(&self) -> Vec<T> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().map(|z| z.norm()).fold(T::zero(), Float::max)
    }

    pub fn max_imag(&self) -> T {
        self.samples.iter().map(|z| Float::abs(z.im)).fold(T::zero(), Float::max)
    }

    /// `∫ f dm`, the uniform average of the samples.
    pub fn integral(&self) -> Cx<T> {
        let re = crate::scalar_sum(self.samples.iter().map(|z| z.re));
        let im = crate::scalar_sum(self.samples.iter().map(|z| z.im));
        cx(re, im) / T::from_count(self.len())
    }

    /// `∫ g(f) dm` for a real-valued integrand.
    pub fn integrate_real(&self, mut g: impl FnMut(Cx<T>) -> T) -> T {
        crate::scalar_sum(self.samples.iter().map(|&z| g(z))) / T::from_count(self.len())
    }

    pub fn to_spectrum(&self) -> Spectrum<T> {
        let n = self.len();
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let inv_n = T::one() / T::from_count(n);
        let half = n / 2;
        let coeffs = (0..n)
            .map(|i| {
                let k = i as isize - half as isize;
                let j = k.rem_euclid(n as isize) as usize;
                buf[j] * Spectrum::<T>::half_shift(n, k).conj() * inv_n
            })
            .collect();
        Spectrum::from_raw(coeffs)
    }

    pub fn from_spectrum(spectrum: &Spectrum<T>) -> Result<Self> {
        let n = spectrum.len();
        check_grid_size(n)?;
        let mut buf = vec![Cx::<T>::zero(); n];
        for (k, c) in spectrum.modes() {
            let j = k.rem_euclid(n as isize) as usize;
            buf[j] = c * Spectrum::<T>::half_shift(n, k);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        Self::new(buf)
    }
}
