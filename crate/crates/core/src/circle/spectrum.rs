use num_complex::Complex;
use num_traits::Zero;

use crate::error::{HardyError, Result};
use crate::scalar::{Cx, Real};

/// Fourier coefficients `c_k`, `k ∈ [-N/2, N/2)`, of a [`BoundaryFunction`](super::BoundaryFunction),
/// normalized so that `f(t_j) = Σ_k c_k t_j^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    // index i holds mode k = i - N/2
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Spectrum<T> {
    pub(crate) fn from_raw(coeffs: Vec<Cx<T>>) -> Self {
        Self { coeffs }
    }

    /// Builds a spectrum of size `n` from a mode function.
    pub fn from_modes(n: usize, mut c: impl FnMut(isize) -> Cx<T>) -> Result<Self> {
        super::boundary::check_grid_size(n)?;
        let half = (n / 2) as isize;
        Ok(Self { coeffs: (-half..half).map(&mut c).collect() })
    }

    /// Zero spectrum with the listed modes set.
    pub fn sparse(n: usize, modes: &[(isize, Cx<T>)]) -> Result<Self> {
        let mut s = Self::from_modes(n, |_| Cx::zero())?;
        for &(k, c) in modes {
            let slot = s.coeff_mut(k).ok_or_else(|| HardyError::InvalidParameter(format!("mode {k} out of range")))?;
            *slot = *slot + c;
        }
        Ok(s)
    }

    /// `e^{iπk/N}`: the phase relating grid-DFT bins to midpoint-grid modes.
    pub(crate) fn half_shift(n: usize, k: isize) -> Cx<T> {
        let phase = T::PI() * T::from_isize(k).expect("mode index") / T::from_count(n);
        Complex::from_polar(T::one(), phase)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_mode(&self) -> isize {
        -((self.len() / 2) as isize)
    }

    pub fn coeff(&self, k: isize) -> Cx<T> {
        self.index(k).map(|i| self.coeffs[i]).unwrap_or_else(Cx::zero)
    }

    pub fn coeff_mut(&mut self, k: isize) -> Option<&mut Cx<T>> {
        self.index(k).map(move |i| &mut self.coeffs[i])
    }

    fn index(&self, k: isize) -> Option<usize> {
        let i = k - self.min_mode();
        (i >= 0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// `(k, c_k)` pairs in increasing mode order.
    pub fn modes(&self) -> impl Iterator<Item = (isize, Cx<T>)> + '_ {
        let lo = self.min_mode();
        self.coeffs.iter().enumerate().map(move |(i, &c)| (lo + i as isize, c))
    }

    pub fn map_modes(&self, mut f: impl FnMut(isize, Cx<T>) -> Cx<T>) -> Self {
        Self { coeffs: self.modes().map(|(k, c)| f(k, c)).collect() }
    }

    /// `Σ |c_k|²`.
    pub fn energy(&self) -> T {
        crate::scalar_sum(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), num_traits::Float::max)
    }
}
