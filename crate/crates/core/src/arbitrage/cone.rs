//! Extreme-ray description of all one-period arbitrage strategies.
//!
//! The zero-cost, nonnegative-payoff strategies form the polyhedral cone
//! `C = {δ : δ·S_0 = 0, P δ >= 0}` where `P` stacks the leaf price vectors.
//! Its lineality space `L = {δ : δ·S_0 = 0, P δ = 0}` holds the strategies
//! with identically zero payoff. On `L^⊥` the cone is pointed, and its
//! extreme rays are the feasible generators of one-dimensional solution sets
//! of `δ·S_0 = 0`, `δ ⊥ L`, `P_J δ = 0` over row subsets `J`. A strategy is
//! an arbitrage iff it lies in `cone(rays) + L` with nonzero payoff.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::linalg::null_space;
use crate::lp::{LinearProgram, Relation};
use crate::market::Market;
use crate::rational::{dot, primitive_integer_vector, Rational};

pub const MAX_CONE_ASSETS: usize = 6;
pub const MAX_CONE_STATES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("cone enumeration needs a one-period market, horizon is {0}")]
    NotOnePeriod(usize),
    #[error("{0} assets exceeds the enumeration bound of {MAX_CONE_ASSETS}")]
    TooManyAssets(usize),
    #[error("{0} states exceeds the enumeration bound of {MAX_CONE_STATES}")]
    TooManyStates(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArbitrageCone {
    /// Extreme rays, as coprime integer vectors, sorted.
    #[serde(serialize_with = "crate::io::serialize_rational_rows")]
    pub rays: Vec<Vec<Rational>>,
    /// Basis of the zero-payoff, zero-cost strategies.
    #[serde(serialize_with = "crate::io::serialize_rational_rows")]
    pub lineality: Vec<Vec<Rational>>,
}

impl ArbitrageCone {
    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// True if `delta` is a nonnegative combination of the rays plus a
    /// lineality component.
    pub fn contains(&self, delta: &[Rational]) -> bool {
        let d = delta.len();
        let k = self.rays.len();
        let l = self.lineality.len();
        let mut lp = LinearProgram::new(k + l);
        for j in k..k + l {
            lp.set_free(j);
        }
        for i in 0..d {
            let row: Vec<Rational> = self
                .rays
                .iter()
                .chain(&self.lineality)
                .map(|g| g[i].clone())
                .collect();
            lp.constrain(row, Relation::Eq, delta[i].clone());
        }
        lp.solve().optimal().is_some()
    }
}

pub fn arbitrage_cone(market: &Market) -> Result<ArbitrageCone, ConeError> {
    let tree = market.tree();
    if tree.horizon() != 1 {
        return Err(ConeError::NotOnePeriod(tree.horizon()));
    }
    let d = market.assets();
    if d > MAX_CONE_ASSETS {
        return Err(ConeError::TooManyAssets(d));
    }
    let leaves: Vec<Vec<Rational>> = tree.leaves().iter().map(|n| market.price(*n).to_vec()).collect();
    if leaves.len() > MAX_CONE_STATES {
        return Err(ConeError::TooManyStates(leaves.len()));
    }
    let root = market.price(tree.root()).to_vec();

    let mut all = vec![root.clone()];
    all.extend(leaves.iter().cloned());
    let lineality = null_space(&all, d);

    let mut base = vec![root];
    base.extend(lineality.iter().cloned());

    let mut rays: Vec<Vec<Rational>> = Vec::new();
    for mask in 0u32..(1 << leaves.len()) {
        let mut rows = base.clone();
        rows.extend(
            leaves
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, p)| p.clone()),
        );
        let ns = null_space(&rows, d);
        if ns.len() != 1 {
            continue;
        }
        for sign in [1i64, -1] {
            let r: Vec<Rational> = ns[0].iter().map(|x| x * Rational::from_integer(sign.into())).collect();
            let payoffs: Vec<Rational> = leaves.iter().map(|p| dot(p, &r)).collect();
            if payoffs.iter().all(|v| !v.is_negative()) && payoffs.iter().any(|v| !v.is_zero()) {
                let r = primitive_integer_vector(&r);
                if !rays.contains(&r) {
                    rays.push(r);
                }
            }
        }
    }
    rays.sort();
    Ok(ArbitrageCone { rays, lineality })
}
