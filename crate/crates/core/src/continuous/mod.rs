//! Monte Carlo checks in continuous time.
//!
//! The Bessel(3) process `S` (the norm of a three-dimensional Brownian
//! motion) and the squared Bessel(4) process are simulated exactly at grid
//! points. Their inverses are strict local martingales: `E[1/S_t]` decays in
//! `t` even though `1/S` has no drift. In the market `{S, 1}` with
//! `S_0 = 1`, `T = 1` an explicit strategy turns zero initial capital into
//! `1/Φ(1) - 1` on every path while holding a short position in the savings
//! account near `t = 0`.

mod normal;
mod sim;
mod stats;
mod strategy;

pub use normal::{cdf as normal_cdf, pdf as normal_pdf};
pub use sim::{simulate_bessel3, simulate_squared_bessel4, ConfigError, Grid, PathEnsemble, Process, Scheme, SimConfig, BLOCK};
pub use stats::{median, McStatistic, Running};
pub use strategy::{ConstantStrategy, ExplicitBesselArbitrage, PathStrategy, StrategyError, StrategyPath};

use serde::Serialize;

fn merge_curves(a: &mut [Running], b: Vec<Running>) {
    a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y));
}

/// Per-grid-point estimates of `E[f(S_t)]`.
pub fn moment_curve<F>(ensemble: &PathEnsemble, f: F) -> Vec<McStatistic>
where
    F: Fn(f64) -> f64 + Sync,
{
    let points = ensemble.times().len();
    ensemble
        .reduce(
            || vec![Running::default(); points],
            |acc, _, s| acc.iter_mut().zip(s).for_each(|(r, &x)| r.push(f(x))),
            |a, b| merge_curves(a, b),
        )
        .iter()
        .map(Running::statistic)
        .collect()
}

/// Per-grid-point estimates of `E[S_t^power]`; `power = -1` gives the
/// inverse processes.
pub fn inverse_deflator_decay(ensemble: &PathEnsemble, power: f64) -> Vec<McStatistic> {
    if power == -1.0 {
        moment_curve(ensemble, |x| 1.0 / x)
    } else {
        moment_curve(ensemble, |x| x.powf(power))
    }
}

/// Discretization error of the self-financing identity
/// `v_k = v_0 + Σ_{j<k} θ_j (S_{j+1} - S_j)` (the savings account has no
/// increments), maximized over the grid of each path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub mean: McStatistic,
    pub median: f64,
    pub max: f64,
    #[serde(skip)]
    pub per_path: Vec<f64>,
}

pub fn path_residual(s: &[f64], strat: &StrategyPath) -> f64 {
    let mut gains = 0.0;
    let mut worst: f64 = 0.0;
    for k in 1..s.len() {
        gains += strat.theta[k - 1] * (s[k] - s[k - 1]);
        worst = worst.max((strat.v[k] - strat.v[0] - gains).abs());
    }
    worst
}

pub fn self_financing_residual<P: PathStrategy>(ensemble: &PathEnsemble, strategy: &P) -> ResidualSummary {
    let times = ensemble.times();
    let per_path = ensemble.reduce(
        Vec::new,
        |acc: &mut Vec<f64>, _, s| acc.push(path_residual(s, &strategy.evaluate(times, s))),
        |a, mut b| a.append(&mut b),
    );
    let mut running = Running::default();
    per_path.iter().for_each(|&r| running.push(r));
    ResidualSummary {
        mean: running.statistic(),
        median: median(&per_path),
        max: per_path.iter().copied().fold(0.0, f64::max),
        per_path,
    }
}

/// Path-wise summary of a strategy's value and positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArbitrageReport {
    pub n_paths: usize,
    /// Largest `|v_0|` over paths.
    pub initial_abs_max: f64,
    pub terminal: McStatistic,
    pub terminal_min: f64,
    pub terminal_max: f64,
    /// Smallest value over all paths and grid points.
    pub min_value: f64,
    pub times: Vec<f64>,
    /// Fraction of paths with `η < 0` at each grid point.
    pub eta_negative: Vec<f64>,
    /// Fraction of paths with `θ > 0` at each grid point.
    pub theta_positive: Vec<f64>,
}

impl ArbitrageReport {
    /// First grid point after `0`.
    pub fn eta_negative_at_first_step(&self) -> f64 {
        self.eta_negative[1]
    }

    /// Largest `t` such that `η < 0` on at least `level` of the paths at every
    /// grid point in `[0, t]`.
    pub fn short_interval(&self, level: f64) -> f64 {
        let k = self.eta_negative.iter().take_while(|&&f| f >= level).count();
        if k == 0 {
            0.0
        } else {
            self.times[k - 1]
        }
    }
}

#[derive(Clone)]
struct ReportAcc {
    initial_abs_max: f64,
    terminal: Running,
    terminal_min: f64,
    terminal_max: f64,
    min_value: f64,
    eta_negative: Vec<u64>,
    theta_positive: Vec<u64>,
}

pub fn arbitrage_report<P: PathStrategy>(ensemble: &PathEnsemble, strategy: &P) -> ArbitrageReport {
    let times = ensemble.times();
    let points = times.len();
    let acc = ensemble.reduce(
        || ReportAcc {
            initial_abs_max: 0.0,
            terminal: Running::default(),
            terminal_min: f64::INFINITY,
            terminal_max: f64::NEG_INFINITY,
            min_value: f64::INFINITY,
            eta_negative: vec![0; points],
            theta_positive: vec![0; points],
        },
        |a, _, s| {
            let p = strategy.evaluate(times, s);
            let vt = p.v[points - 1];
            a.initial_abs_max = a.initial_abs_max.max(p.v[0].abs());
            a.terminal.push(vt);
            a.terminal_min = a.terminal_min.min(vt);
            a.terminal_max = a.terminal_max.max(vt);
            a.min_value = p.v.iter().copied().fold(a.min_value, f64::min);
            for k in 0..points {
                a.eta_negative[k] += u64::from(p.eta[k] < 0.0);
                a.theta_positive[k] += u64::from(p.theta[k] > 0.0);
            }
        },
        |a, b| {
            a.initial_abs_max = a.initial_abs_max.max(b.initial_abs_max);
            a.terminal.merge(&b.terminal);
            a.terminal_min = a.terminal_min.min(b.terminal_min);
            a.terminal_max = a.terminal_max.max(b.terminal_max);
            a.min_value = a.min_value.min(b.min_value);
            for k in 0..points {
                a.eta_negative[k] += b.eta_negative[k];
                a.theta_positive[k] += b.theta_positive[k];
            }
        },
    );
    let n = ensemble.n_paths() as f64;
    ArbitrageReport {
        n_paths: ensemble.n_paths(),
        initial_abs_max: acc.initial_abs_max,
        terminal: acc.terminal.statistic(),
        terminal_min: acc.terminal_min,
        terminal_max: acc.terminal_max,
        min_value: acc.min_value,
        times: times.to_vec(),
        eta_negative: acc.eta_negative.iter().map(|&c| c as f64 / n).collect(),
        theta_positive: acc.theta_positive.iter().map(|&c| c as f64 / n).collect(),
    }
}
