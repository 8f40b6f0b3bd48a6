//! Path simulation for Bessel-type price processes.
//!
//! Paths are not stored. Path `i` is regenerated on demand from its own
//! ChaCha8 stream (`seed`, stream `i`), so every reduction sees the same
//! numbers regardless of thread count or evaluation order. Reductions run
//! over fixed blocks of paths and combine the block results in block order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Paths per reduction block.
pub const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    /// `dS = dt / S + dW`.
    Bessel3,
    /// `dS = 4 dt + 2 sqrt(S) dW`.
    SquaredBessel4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Norm (or squared norm) of a multidimensional Brownian motion; exact in
    /// distribution at the grid points.
    ExactNorm,
    /// Euler–Maruyama with reflection `S <- |S|`.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Uniform,
    /// `t_k = T (1 - (1 - k/n)^power)`, denser near `T` for `power > 1`.
    Graded { power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub s0: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub grid: Grid,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 100_000,
            n_steps: 1024,
            horizon: 1.0,
            s0: 1.0,
            seed: 1,
            scheme: Scheme::ExactNorm,
            grid: Grid::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("n_paths must be at least 1")]
    NoPaths,
    #[error("n_steps must be at least 1")]
    NoSteps,
    #[error("horizon must be positive and finite, got {0}")]
    Horizon(f64),
    #[error("initial price must be positive and finite, got {0}")]
    InitialPrice(f64),
    #[error("graded grid needs a power >= 1, got {0}")]
    GridPower(f64),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_paths == 0 {
            return Err(ConfigError::NoPaths);
        }
        if self.n_steps == 0 {
            return Err(ConfigError::NoSteps);
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(ConfigError::Horizon(self.horizon));
        }
        if !(self.s0.is_finite() && self.s0 > 0.0) {
            return Err(ConfigError::InitialPrice(self.s0));
        }
        if let Grid::Graded { power } = self.grid {
            if !(power.is_finite() && power >= 1.0) {
                return Err(ConfigError::GridPower(power));
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.n_steps;
        (0..=n)
            .map(|k| {
                if k == n {
                    return self.horizon;
                }
                let u = k as f64 / n as f64;
                match self.grid {
                    Grid::Uniform => self.horizon * u,
                    Grid::Graded { power } => self.horizon * (1.0 - (1.0 - u).powf(power)),
                }
            })
            .collect()
    }
}

/// A seeded family of simulated paths on a common grid.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    process: Process,
    config: SimConfig,
    times: Vec<f64>,
}

pub fn simulate_bessel3(config: SimConfig) -> Result<PathEnsemble, ConfigError> {
    PathEnsemble::new(Process::Bessel3, config)
}

pub fn simulate_squared_bessel4(config: SimConfig) -> Result<PathEnsemble, ConfigError> {
    PathEnsemble::new(Process::SquaredBessel4, config)
}

impl PathEnsemble {
    pub fn new(process: Process, config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(PathEnsemble {
            process,
            config,
            times: config.times(),
        })
    }

    pub fn process(&self) -> Process {
        self.process
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_paths(&self) -> usize {
        self.config.n_paths
    }

    fn rng(&self, path: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(path as u64);
        rng
    }

    /// Prices of path `path` at every grid point.
    pub fn path(&self, path: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.times.len());
        self.fill_path(path, &mut out);
        out
    }

    fn fill_path(&self, path: usize, out: &mut Vec<f64>) {
        out.clear();
        let mut rng = self.rng(path);
        let s0 = self.config.s0;
        out.push(s0);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        match (self.process, self.config.scheme) {
            (Process::Bessel3, Scheme::ExactNorm) => {
                let mut x = [s0, 0.0, 0.0];
                for w in self.times.windows(2) {
                    let sd = (w[1] - w[0]).sqrt();
                    x.iter_mut().for_each(|c| *c += sd * normal());
                    out.push(x.iter().map(|c| c * c).sum::<f64>().sqrt());
                }
            }
            (Process::SquaredBessel4, Scheme::ExactNorm) => {
                let mut x = [s0.sqrt(), 0.0, 0.0, 0.0];
                for w in self.times.windows(2) {
                    let sd = (w[1] - w[0]).sqrt();
                    x.iter_mut().for_each(|c| *c += sd * normal());
                    out.push(x.iter().map(|c| c * c).sum::<f64>());
                }
            }
            (Process::Bessel3, Scheme::Euler) => {
                let mut s = s0;
                for w in self.times.windows(2) {
                    let dt = w[1] - w[0];
                    s = (s + dt / s + dt.sqrt() * normal()).abs();
                    out.push(s);
                }
            }
            (Process::SquaredBessel4, Scheme::Euler) => {
                let mut s = s0;
                for w in self.times.windows(2) {
                    let dt = w[1] - w[0];
                    s = (s + 4.0 * dt + 2.0 * s.sqrt() * dt.sqrt() * normal()).abs();
                    out.push(s);
                }
            }
        }
    }

    /// Folds every path into a per-block accumulator and combines the blocks
    /// in order. `init` creates an empty accumulator, `visit` consumes one
    /// path (its index and prices), `merge` appends a later block.
    pub fn reduce<A, I, V, M>(&self, init: I, visit: V, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        V: Fn(&mut A, usize, &[f64]) + Sync,
        M: Fn(&mut A, A),
    {
        let n = self.config.n_paths;
        let blocks: Vec<A> = (0..n.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| {
                let mut acc = init();
                let mut buf = Vec::with_capacity(self.times.len());
                for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                    self.fill_path(i, &mut buf);
                    visit(&mut acc, i, &buf);
                }
                acc
            })
            .collect();
        let mut blocks = blocks.into_iter();
        let mut total = blocks.next().unwrap_or_else(&init);
        for b in blocks {
            merge(&mut total, b);
        }
        total
    }

    /// Smallest simulated price over all paths and grid points.
    pub fn min_price(&self) -> f64 {
        self.reduce(
            || f64::INFINITY,
            |m, _, s| *m = s.iter().copied().fold(*m, f64::min),
            |m, other| *m = m.min(other),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n_paths: usize, n_steps: usize) -> SimConfig {
        SimConfig {
            n_paths,
            n_steps,
            seed: 42,
            ..SimConfig::default()
        }
    }

    #[test]
    fn single_step_unrolls_the_definition() {
        let e = simulate_bessel3(config(3, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        rng.set_stream(2);
        let g: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
        let expected = ((1.0 + g[0]).powi(2) + g[1] * g[1] + g[2] * g[2]).sqrt();
        assert_eq!(e.path(2), vec![1.0, expected]);
    }

    #[test]
    fn paths_are_reproducible_and_positive() {
        for process in [Process::Bessel3, Process::SquaredBessel4] {
            for scheme in [Scheme::ExactNorm, Scheme::Euler] {
                let cfg = SimConfig {
                    scheme,
                    ..config(64, 50)
                };
                let a = PathEnsemble::new(process, cfg).unwrap();
                let b = PathEnsemble::new(process, cfg).unwrap();
                assert_eq!(a.path(17), b.path(17));
                assert_ne!(a.path(17), a.path(18));
                assert!(a.min_price() > 0.0);
            }
        }
    }

    #[test]
    fn reduction_is_order_independent() {
        let e = simulate_bessel3(config(3000, 8)).unwrap();
        let sum = |e: &PathEnsemble| e.reduce(|| 0.0, |a, _, s| *a += s[8], |a, b| *a += b);
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = serial.install(|| sum(&e));
        assert_eq!(one.to_bits(), sum(&e).to_bits());
    }

    #[test]
    fn graded_grid_ends_at_horizon() {
        let cfg = SimConfig {
            grid: Grid::Graded { power: 2.0 },
            ..config(1, 4)
        };
        let t = cfg.times();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[4], 1.0);
        assert!(t[4] - t[3] < t[1] - t[0]);
    }

    #[test]
    fn invalid_configs() {
        assert_eq!(config(0, 1).validate(), Err(ConfigError::NoPaths));
        assert_eq!(config(1, 0).validate(), Err(ConfigError::NoSteps));
        let bad = SimConfig { s0: -1.0, ..config(1, 1) };
        assert_eq!(bad.validate(), Err(ConfigError::InitialPrice(-1.0)));
    }
}
