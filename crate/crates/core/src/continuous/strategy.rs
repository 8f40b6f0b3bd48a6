//! Path-wise trading strategies in the market `{S, 1}`.

use serde::Serialize;

use super::normal;
use super::sim::{PathEnsemble, Process};

/// Holdings and value of one path at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyPath {
    /// Units of the risky asset.
    pub theta: Vec<f64>,
    /// Units of the savings account (price ≡ 1).
    pub eta: Vec<f64>,
    pub v: Vec<f64>,
}

pub trait PathStrategy: Sync {
    fn evaluate(&self, times: &[f64], s: &[f64]) -> StrategyPath;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error("the explicit strategy needs a Bessel(3) ensemble, got {0:?}")]
    WrongProcess(Process),
    #[error("the explicit strategy needs S_0 = 1 and T = 1, got S_0 = {s0} and T = {horizon}")]
    WrongNormalization { s0: f64, horizon: f64 },
}

/// The explicit arbitrage in the Bessel(3) market with `S_0 = 1`, `T = 1`:
/// value `F(t, S_t) - 1` with `F(t, x) = Φ(x / sqrt(1 - t)) / Φ(1)`, risky
/// holding `θ = ∂F/∂x`, and the savings position `η` that makes the
/// strategy self-financing along the grid.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitBesselArbitrage {
    phi_one: f64,
}

impl ExplicitBesselArbitrage {
    pub fn for_ensemble(ensemble: &PathEnsemble) -> Result<Self, StrategyError> {
        if ensemble.process() != Process::Bessel3 {
            return Err(StrategyError::WrongProcess(ensemble.process()));
        }
        let cfg = ensemble.config();
        if cfg.s0 != 1.0 || cfg.horizon != 1.0 {
            return Err(StrategyError::WrongNormalization {
                s0: cfg.s0,
                horizon: cfg.horizon,
            });
        }
        Ok(Self::new())
    }

    pub fn new() -> Self {
        ExplicitBesselArbitrage {
            phi_one: normal::cdf(1.0),
        }
    }

    /// `F(t, x)`; at `t = 1` the limit `1 / Φ(1)` for `x > 0`.
    pub fn value_function(&self, t: f64, x: f64, terminal: bool) -> f64 {
        if terminal {
            return if x > 0.0 { 1.0 / self.phi_one } else { 0.0 };
        }
        normal::cdf(x / (1.0 - t).sqrt()) / self.phi_one
    }

    /// `∂F/∂x (t, x)`; zero at `t = 1`.
    pub fn holding(&self, t: f64, x: f64, terminal: bool) -> f64 {
        if terminal {
            return 0.0;
        }
        let root = (1.0 - t).sqrt();
        normal::pdf(x / root) / (root * self.phi_one)
    }

    /// Terminal portfolio value on every path: `1 / Φ(1) - 1`.
    pub fn terminal_value(&self) -> f64 {
        1.0 / self.phi_one - 1.0
    }
}

impl Default for ExplicitBesselArbitrage {
    fn default() -> Self {
        Self::new()
    }
}

impl PathStrategy for ExplicitBesselArbitrage {
    fn evaluate(&self, times: &[f64], s: &[f64]) -> StrategyPath {
        let last = times.len() - 1;
        let mut theta = Vec::with_capacity(times.len());
        let mut eta = Vec::with_capacity(times.len());
        let mut v = Vec::with_capacity(times.len());
        let mut gains = 0.0;
        for k in 0..=last {
            if k > 0 {
                gains += theta[k - 1] * (s[k] - s[k - 1]);
            }
            let terminal = k == last;
            let th = self.holding(times[k], s[k], terminal);
            theta.push(th);
            eta.push(gains - th * s[k]);
            v.push(self.value_function(times[k], s[k], terminal) - 1.0);
        }
        StrategyPath { theta, eta, v }
    }
}

/// Constant holdings `θ` in the risky asset and `η` in the savings account.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantStrategy {
    pub theta: f64,
    pub eta: f64,
}

impl PathStrategy for ConstantStrategy {
    fn evaluate(&self, _times: &[f64], s: &[f64]) -> StrategyPath {
        StrategyPath {
            theta: vec![self.theta; s.len()],
            eta: vec![self.eta; s.len()],
            v: s.iter().map(|x| self.theta * x + self.eta).collect(),
        }
    }
}
