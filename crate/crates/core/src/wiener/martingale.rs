use nalgebra::{Matrix3, Vector3};
use num_traits::{Float, Zero};

use super::holo::HolomorphicFunction;
use super::paths::PathEnsemble;
use crate::circle::BoundaryFunction;
use crate::error::{HardyError, Result};
use crate::report::Check;
use crate::scalar::{cx, Cx, Real};
use crate::stats::MeanEstimate;

/// Adapted process on the path grid: `values(p)[k] = R_{p,k}` for `k ≤ K_p`, the
/// last entry being the terminal value `R_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleMatrix<T: Real> {
    offsets: Vec<usize>,
    values: Vec<Cx<T>>,
}

impl<T: Real> MartingaleMatrix<T> {
    /// Fills the matrix in path order, `f(p, k, z_{p,k})`. The closure sees one
    /// position at a time, so every value depends only on the path up to step `k`.
    pub fn from_fn(ens: &PathEnsemble<T>, mut f: impl FnMut(usize, usize, Cx<T>) -> Cx<T>) -> Self {
        let mut values = Vec::with_capacity(ens.offsets().last().copied().unwrap_or(0));
        for p in 0..ens.n_paths() {
            for (k, &z) in ens.path(p).iter().enumerate() {
                values.push(f(p, k, z));
            }
        }
        MartingaleMatrix { offsets: ens.offsets().to_vec(), values }
    }

    /// Same layout as `ens`, values supplied path by path.
    pub(crate) fn from_paths(ens: &PathEnsemble<T>, values: Vec<Cx<T>>) -> Result<Self> {
        let expected = ens.offsets().last().copied().unwrap_or(0);
        if values.len() != expected {
            return Err(HardyError::SizeMismatch { expected, found: values.len() });
        }
        Ok(MartingaleMatrix { offsets: ens.offsets().to_vec(), values })
    }

    pub fn n_paths(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn path(&self, p: usize) -> &[Cx<T>] {
        &self.values[self.offsets[p]..self.offsets[p + 1]]
    }

    pub fn terminal(&self, p: usize) -> Cx<T> {
        self.values[self.offsets[p + 1] - 1]
    }

    pub fn terminals(&self) -> Vec<Cx<T>> {
        (0..self.n_paths()).map(|p| self.terminal(p)).collect()
    }

    /// `R_{p,k}`, frozen at the terminal value after exit.
    pub fn at(&self, p: usize, k: usize) -> Cx<T> {
        let path = self.path(p);
        path[k.min(path.len() - 1)]
    }

    pub fn matches(&self, ens: &PathEnsemble<T>) -> bool {
        self.offsets == ens.offsets()
    }

    pub fn max_imag(&self) -> T {
        self.values.iter().map(|z| Float::abs(z.im)).fold(T::zero(), Float::max)
    }

    /// Largest single-step jump `max |R_{p,k+1} - R_{p,k}|`.
    pub fn max_jump(&self) -> T {
        let mut m = T::zero();
        for p in 0..self.n_paths() {
            for w in self.path(p).windows(2) {
                m = Float::max(m, (w[1] - w[0]).norm());
            }
        }
        m
    }

    pub fn map(&self, mut f: impl FnMut(Cx<T>) -> Cx<T>) -> Self {
        MartingaleMatrix { offsets: self.offsets.clone(), values: self.values.iter().map(|&z| f(z)).collect() }
    }
}

/// Doob embedding `F_{p,k} = f(z_{p,k})`, terminal value `f(ẑ_p)`.
pub fn embed<T: Real, F: HolomorphicFunction<T> + ?Sized>(f: &F, ens: &PathEnsemble<T>) -> MartingaleMatrix<T> {
    MartingaleMatrix::from_fn(ens, |_, _, z| f.eval(z))
}

/// Like [`embed`], but the terminal value is the grid sample at the node nearest
/// to `ẑ_p` rather than the extension evaluated at `ẑ_p`.
pub fn embed_snapped<T: Real, F: HolomorphicFunction<T> + ?Sized>(
    f: &F,
    nodes: &BoundaryFunction<T>,
    ens: &PathEnsemble<T>,
) -> MartingaleMatrix<T> {
    let n = nodes.len();
    MartingaleMatrix::from_fn(ens, |p, k, z| {
        if k == ens.exit_index(p) {
            nodes.samples()[snap(n, z)]
        } else {
            f.eval(z)
        }
    })
}

/// Grid node nearest to the boundary point `z`.
pub fn snap<T: Real>(n: usize, z: Cx<T>) -> usize {
    BoundaryFunction::<T>::nearest_node(n, Float::atan2(z.im, z.re))
}

/// Per-path `A(F) = max_k |F_{p,k}|`.
pub fn maximal_function<T: Real>(f: &MartingaleMatrix<T>) -> Vec<T> {
    (0..f.n_paths())
        .map(|p| f.path(p).iter().map(|z| z.norm()).fold(T::zero(), Float::max))
        .collect()
}

/// `‖AF‖_2 / ‖F‖_2` against Doob's constant 2.
pub fn doob_check<T: Real>(f: &MartingaleMatrix<T>) -> Check {
    let a = maximal_function(f);
    let a2: Vec<f64> = a.iter().map(|x| x.as_f64().powi(2)).collect();
    let f2: Vec<f64> = (0..f.n_paths()).map(|p| f.terminal(p).norm_sqr().as_f64()).collect();
    let ma = MeanEstimate::from_samples(a2.iter().copied()).mean;
    let mf = MeanEstimate::from_samples(f2.iter().copied()).mean;
    let ratio = (ma / mf).sqrt();
    // delta method for sqrt(E a / E f)
    let g = a2.iter().zip(&f2).map(|(x, y)| x / (2.0 * ratio * mf) - ratio * y / (2.0 * mf));
    let se = MeanEstimate::from_samples(g).stderr;
    Check::statistical("doob_maximal", ratio, 2.0, se)
}

/// Minimum samples per angular bin for [`project`].
pub const MIN_BIN_COUNT: usize = 8;

/// Varopoulos projection: per grid node, a local quadratic fit of the terminal
/// values against the angular offset of `ẑ_p` from the node, over the samples
/// whose nearest node it is. The fitted intercept is the node value.
pub fn project<T: Real>(terminal: &[Cx<T>], ens: &PathEnsemble<T>, n: usize) -> Result<BoundaryFunction<T>> {
    crate::circle::check_grid_size(n)?;
    if terminal.len() != ens.n_paths() {
        return Err(HardyError::SizeMismatch { expected: ens.n_paths(), found: terminal.len() });
    }
    let mut gram = vec![Matrix3::<f64>::zeros(); n];
    let mut rhs_re = vec![Vector3::<f64>::zeros(); n];
    let mut rhs_im = vec![Vector3::<f64>::zeros(); n];
    let mut counts = vec![0usize; n];
    let h = std::f64::consts::TAU / n as f64;
    for (p, v) in terminal.iter().enumerate() {
        let z = ens.exit_point(p);
        let theta = Float::atan2(z.im, z.re).as_f64();
        let k = snap(n, z);
        let center = BoundaryFunction::<f64>::angle_of(n, k);
        let mut d = (theta - center).rem_euclid(std::f64::consts::TAU);
        if d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        let x = d / h;
        let phi = Vector3::new(1.0, x, x * x);
        gram[k] += phi * phi.transpose();
        rhs_re[k] += phi * v.re.as_f64();
        rhs_im[k] += phi * v.im.as_f64();
        counts[k] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if counts[k] < MIN_BIN_COUNT {
            return Err(HardyError::SparseBin { bin: k, count: counts[k] });
        }
        let chol = gram[k].cholesky().ok_or(HardyError::SparseBin { bin: k, count: counts[k] })?;
        let a = chol.solve(&rhs_re[k])[0];
        let b = chol.solve(&rhs_im[k])[0];
        out.push(cx(T::lit(a), T::lit(b)));
    }
    BoundaryFunction::new(out)
}

/// Sample mean and standard error of the terminal values.
pub fn terminal_mean<T: Real>(f: &MartingaleMatrix<T>) -> crate::stats::ComplexMeanEstimate {
    crate::stats::ComplexMeanEstimate::from_samples((0..f.n_paths()).map(|p| crate::scalar::cx_to_f64(f.terminal(p))))
}

impl<T: Real> MartingaleMatrix<T> {
    /// Constant process.
    pub fn constant(ens: &PathEnsemble<T>, c: Cx<T>) -> Self {
        Self::from_fn(ens, |_, _, _| c)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.is_zero())
    }
}
