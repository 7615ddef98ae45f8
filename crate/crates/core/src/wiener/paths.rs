use std::io::{Read, Write};

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::SimConfig;
use crate::error::{HardyError, Result};
use crate::scalar::{cx, Cx, Real};
use crate::stats::{ks_uniform_circle, MeanEstimate};

/// Complex Brownian paths started at 0 and stopped on leaving the unit disk.
///
/// Path `p` is stored as positions `z_{p,0} = 0, …, z_{p,K_p}`, where `K_p` is
/// the first step with `|z| > 1` and `z_{p,K_p} = ẑ_p` is that exterior point
/// projected radially onto the circle. Increments are read off as differences
/// of consecutive positions, so the last one lands on `ẑ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble<T: Real> {
    config: SimConfig,
    offsets: Vec<usize>,
    z: Vec<Cx<T>>,
    /// Paths sorted by exit index, longest first.
    order: Vec<usize>,
    /// `K_p` in the order of `order`, nonincreasing.
    sorted_exit: Vec<usize>,
    unexited: usize,
}

/// Per-path substream: `ChaCha8` seeded with the ensemble seed, stream = path index.
fn path_rng(seed: u64, p: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p as u64);
    rng
}

/// Draws the raw increments of one path until exit or the step cap.
fn draw_increments<T: Real>(seed: u64, p: usize, dt: f64, max_steps: usize) -> Vec<Cx<T>> {
    let mut rng = path_rng(seed, p);
    let sd = dt.sqrt();
    let mut z = Cx::<T>::new(T::zero(), T::zero());
    let mut out = Vec::new();
    for _ in 0..max_steps {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let dz = cx(T::lit(a * sd), T::lit(b * sd));
        out.push(dz);
        z = z + dz;
        if z.norm() > T::one() {
            break;
        }
    }
    out
}

/// Positions from raw increments; returns whether the path left the disk.
fn walk<T: Real>(increments: &[Cx<T>], out: &mut Vec<Cx<T>>) -> bool {
    let mut z = Cx::<T>::new(T::zero(), T::zero());
    out.push(z);
    for (k, &dz) in increments.iter().enumerate() {
        z = z + dz;
        let r = z.norm();
        if r > T::one() {
            out.push(z / r);
            return true;
        }
        if k + 1 == increments.len() {
            // step cap reached inside the disk
            let hat = if r > T::zero() { z / r } else { cx(T::one(), T::zero()) };
            out.push(hat);
            return false;
        }
        out.push(z);
    }
    if increments.is_empty() {
        out.push(cx(T::one(), T::zero()));
    }
    false
}

impl<T: Real> PathEnsemble<T> {
    fn assemble(config: SimConfig, mut next: impl FnMut(usize) -> Result<Vec<Cx<T>>>) -> Result<Self> {
        config.validate()?;
        let mut offsets = Vec::with_capacity(config.paths + 1);
        let mut z = Vec::new();
        let mut unexited = 0;
        offsets.push(0);
        for p in 0..config.paths {
            let inc = next(p)?;
            if !walk(&inc, &mut z) {
                unexited += 1;
            }
            offsets.push(z.len());
        }
        let exits: Vec<usize> = offsets.windows(2).map(|w| w[1] - w[0] - 1).collect();
        let mut order: Vec<usize> = (0..config.paths).collect();
        order.sort_by(|&a, &b| exits[b].cmp(&exits[a]).then(a.cmp(&b)));
        let sorted_exit = order.iter().map(|&p| exits[p]).collect();
        Ok(PathEnsemble { config, offsets, z, order, sorted_exit, unexited })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn n_paths(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    /// Positions `z_{p,0..=K_p}`.
    pub fn path(&self, p: usize) -> &[Cx<T>] {
        &self.z[self.offsets[p]..self.offsets[p + 1]]
    }

    pub fn exit_index(&self, p: usize) -> usize {
        self.offsets[p + 1] - self.offsets[p] - 1
    }

    pub fn exit_time(&self, p: usize) -> f64 {
        self.exit_index(p) as f64 * self.config.dt
    }

    /// `ẑ_p`.
    pub fn exit_point(&self, p: usize) -> Cx<T> {
        self.z[self.offsets[p + 1] - 1]
    }

    /// Position of path `p` at step `k`, frozen at `ẑ_p` after exit.
    pub fn position(&self, p: usize, k: usize) -> Cx<T> {
        let path = self.path(p);
        path[k.min(path.len() - 1)]
    }

    /// `z_{p,k+1} - z_{p,k}` for `k < K_p`, zero afterwards.
    pub fn increment(&self, p: usize, k: usize) -> Cx<T> {
        let path = self.path(p);
        if k + 1 < path.len() {
            path[k + 1] - path[k]
        } else {
            cx(T::zero(), T::zero())
        }
    }

    /// Paths still moving during step `k → k+1` (those with `K_p > k`), longest first.
    pub fn alive(&self, k: usize) -> &[usize] {
        let n = self.sorted_exit.partition_point(|&e| e > k);
        &self.order[..n]
    }

    pub fn max_exit_index(&self) -> usize {
        self.sorted_exit.first().copied().unwrap_or(0)
    }

    /// Total number of stored increments `Σ K_p`.
    pub fn total_steps(&self) -> usize {
        self.z.len() - self.n_paths()
    }

    /// Paths that reached the step cap without leaving the disk.
    pub fn unexited(&self) -> usize {
        self.unexited
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn exit_points(&self) -> Vec<Cx<T>> {
        (0..self.n_paths()).map(|p| self.exit_point(p)).collect()
    }

    /// Raw simulated increments of path `p` (the last one before projection).
    pub fn raw_increments(&self, p: usize) -> Vec<Cx<T>> {
        draw_increments(self.config.seed, p, self.config.dt, self.config.max_steps())
    }

    /// Binary checkpoint: magic `HLPE`, `u32` version, `u32` length and bytes of
    /// the JSON config, then per path a `u64` count followed by that many raw
    /// increments as little-endian `f64` pairs `(re, im)`. Path-major, step-minor.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        let cfg = serde_json::to_vec(&self.config)?;
        w.write_all(&(cfg.len() as u32).to_le_bytes())?;
        w.write_all(&cfg)?;
        for p in 0..self.n_paths() {
            let inc = self.raw_increments(p);
            w.write_all(&(inc.len() as u64).to_le_bytes())?;
            for dz in inc {
                w.write_all(&dz.re.as_f64().to_le_bytes())?;
                w.write_all(&dz.im.as_f64().to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(HardyError::Format("not a path checkpoint".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CHECKPOINT_VERSION {
            return Err(HardyError::Format(format!("unsupported checkpoint version {version}")));
        }
        let len = read_u32(&mut r)? as usize;
        let mut cfg = vec![0u8; len];
        r.read_exact(&mut cfg)?;
        let config: SimConfig = serde_json::from_slice(&cfg)?;
        let cap = config.max_steps();
        Self::assemble(config, |_| {
            let n = read_u64(&mut r)? as usize;
            if n > cap {
                return Err(HardyError::Format(format!("path with {n} steps exceeds the cap {cap}")));
            }
            let mut inc = Vec::with_capacity(n);
            for _ in 0..n {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                inc.push(cx(T::lit(re), T::lit(im)));
            }
            Ok(inc)
        })
    }
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"HLPE";
const CHECKPOINT_VERSION: u32 = 1;

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Simulates the ensemble described by `config`. Bit-reproducible given the seed.
pub fn sample_paths<T: Real>(config: &SimConfig) -> Result<PathEnsemble<T>> {
    let cap = config.max_steps();
    let (seed, dt) = (config.seed, config.dt);
    PathEnsemble::assemble(config.clone(), |p| Ok(draw_increments(seed, p, dt, cap)))
}

/// Exit-time and exit-angle diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExitStatistics {
    pub mean_exit_time: MeanEstimate,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub unexited: usize,
}

pub fn exit_statistics<T: Real>(ens: &PathEnsemble<T>) -> ExitStatistics {
    let mean_exit_time = MeanEstimate::from_samples((0..ens.n_paths()).map(|p| ens.exit_time(p)));
    let angles: Vec<f64> = (0..ens.n_paths())
        .map(|p| {
            let z = ens.exit_point(p);
            Float::atan2(z.im, z.re).as_f64()
        })
        .collect();
    let (ks_statistic, ks_p_value) = ks_uniform_circle(&angles);
    ExitStatistics { mean_exit_time, ks_statistic, ks_p_value, unexited: ens.unexited() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> PathEnsemble<f64> {
        sample_paths(&SimConfig::new(400, 1e-2, seed)).unwrap()
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = small(5);
        assert_eq!(a, small(5));
        assert_ne!(a, small(6));
    }

    #[test]
    fn structure() {
        let e = small(1);
        for p in 0..e.n_paths() {
            let path = e.path(p);
            assert_eq!(path[0], Cx::new(0.0, 0.0));
            assert!((e.exit_point(p).norm() - 1.0).abs() < 1e-15);
            assert!(path[..path.len() - 1].iter().all(|z| z.norm() <= 1.0));
            assert_eq!(e.position(p, e.exit_index(p) + 10), e.exit_point(p));
            assert_eq!(e.increment(p, e.exit_index(p)), Cx::new(0.0, 0.0));
        }
        assert_eq!(e.unexited(), 0);
        let k = 20;
        let alive = e.alive(k);
        assert_eq!(alive.len(), (0..e.n_paths()).filter(|&p| e.exit_index(p) > k).count());
        assert_eq!(e.alive(0).len(), e.n_paths());
        assert!(e.alive(e.max_exit_index()).is_empty());
    }

    #[test]
    fn increment_variance() {
        let e = sample_paths::<f64>(&SimConfig::new(4000, 1e-2, 9)).unwrap();
        // first step is never altered by the projection unless it exits immediately
        let re: Vec<f64> = (0..e.n_paths()).map(|p| e.raw_increments(p)[0].re).collect();
        let var = MeanEstimate::from_samples(re.iter().map(|x| x * x));
        assert!((var.mean - 1e-2).abs() < 4.0 * var.stderr);
        let k = 5;
        let x = MeanEstimate::from_samples((0..e.n_paths()).filter(|&p| e.exit_index(p) > k).map(|p| e.path(p)[k].re.powi(2)));
        // conditioning on survival shrinks the variance slightly
        assert!(x.mean < k as f64 * 1e-2 + 4.0 * x.stderr);
    }

    #[test]
    fn step_cap() {
        let mut c = SimConfig::new(50, 1e-2, 2);
        c.t_max = 0.05;
        let e = sample_paths::<f64>(&c).unwrap();
        assert!(e.unexited() > 0);
        assert!(e.max_exit_index() <= 5);
        for p in 0..e.n_paths() {
            assert!((e.exit_point(p).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let e = small(3);
        let mut buf = Vec::new();
        e.write_checkpoint(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HLPE");
        let back = PathEnsemble::<f64>::read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back, e);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(PathEnsemble::<f64>::read_checkpoint(bad.as_slice()).is_err());
        assert!(PathEnsemble::<f64>::read_checkpoint(&buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn exit_diagnostics() {
        let e = sample_paths::<f64>(&SimConfig::new(3000, 1e-3, 4)).unwrap();
        let s = exit_statistics(&e);
        let budget = 1e-3f64.sqrt();
        assert!((s.mean_exit_time.mean - 0.5).abs() <= 3.0 * s.mean_exit_time.stderr + budget, "{s:?}");
        assert!(s.ks_p_value > 0.01);
    }

    #[test]
    fn single_precision_ensemble() {
        let e = sample_paths::<f32>(&SimConfig::new(100, 1e-2, 8)).unwrap();
        assert_eq!(e.n_paths(), 100);
        assert!((e.exit_point(0).norm() - 1.0).abs() < 1e-6);
    }
}
