//! Finite-sequence classifiers for arbitrage of the first kind and free
//! lunch with vanishing risk.
//!
//! Both notions are asymptotic, so a finite sequence can only be checked
//! against a caller-declared tolerance `ε`:
//!
//! * first kind: initial values nonnegative, nonincreasing, the last one at
//!   most `ε`, and every terminal value dominating a fixed payoff
//!   `ξ >= 0, ξ != 0`;
//! * FLVR: zero initial values, and the sup-distance from the terminal
//!   values down to `ξ`, `r_n = max_leaf (ξ - S_T^{δ_n})^+`, nonincreasing
//!   with the last one at most `ε`. (`ξ_n = min(S_T^{δ_n}, ξ)` is the best
//!   dominated approximation, and its distance to `ξ` is `r_n`.)
//!
//! For an accepted sequence the classifier also replays why the tail must
//! short: with a supermartingale deflator `Z`, a long-only member of a
//! first-kind sequence has initial value at least `E[ξ Z_T] / Z_0`, and a
//! long-only FLVR member with `r_n < max ξ` would be an arbitrage. Members
//! below those thresholds are checked to hold a short position.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::deflator::{find_esmd, DeflatorError};
use crate::market::{is_self_financing, portfolio_values, short_positions, Market, MarketError, SelfFinancing, ShortReport, Strategy};
use crate::rational::{self, Rational};
use crate::scenario_tree::{NodeId, NodeValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    ArbitrageFirstKind,
    Flvr,
    Neither,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SequenceError {
    #[error("empty strategy sequence")]
    Empty,
    #[error("member {index}: {source}")]
    Member { index: usize, source: MarketError },
    #[error("member {index} is not self-financing at {node}")]
    NotSelfFinancing { index: usize, node: NodeId },
    #[error("payoff must be given on exactly the leaves; problem at {0}")]
    PayoffDomain(NodeId),
    #[error("tolerance {epsilon} does not resolve the limit: the last member is long-only (shorting is only forced below {bound})")]
    ToleranceTooCoarse { epsilon: String, bound: String },
    #[error(transparent)]
    Deflator(#[from] DeflatorError),
    /// Would contradict the short-selling theorems; never expected.
    #[error("member {index} is long-only below the forcing threshold")]
    LongOnlyBelowThreshold { index: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceVerdict {
    pub kind: SequenceKind,
    /// 1-based index from which every member holds a short position; set
    /// whenever `kind` is not `Neither`.
    pub cutoff_index: Option<usize>,
    pub short_reports: Vec<ShortReport>,
    #[serde(serialize_with = "crate::io::serialize_rationals")]
    pub initial_values: Vec<Rational>,
    /// `max_leaf (ξ - S_T^{δ_n})^+` per member.
    #[serde(serialize_with = "crate::io::serialize_rationals")]
    pub shortfall: Vec<Rational>,
    /// Smallest `a >= 0` with `S^{δ_n} >= -a` for all members and nodes.
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub admissibility_bound: Rational,
    /// Threshold below which members are forced to short (initial value for
    /// the first kind, shortfall for FLVR).
    #[serde(serialize_with = "crate::io::serialize_opt_rational")]
    pub forcing_threshold: Option<Rational>,
}

pub fn classify_sequence(
    market: &Market,
    strategies: &[Strategy],
    xi: &NodeValues,
    epsilon: &Rational,
) -> Result<SequenceVerdict, SequenceError> {
    if strategies.is_empty() {
        return Err(SequenceError::Empty);
    }
    let tree = market.tree();
    for &n in xi.keys() {
        if !tree.contains(n) || !tree.is_leaf(n) {
            return Err(SequenceError::PayoffDomain(n));
        }
    }
    if let Some(&n) = tree.leaves().iter().find(|n| !xi.contains_key(n)) {
        return Err(SequenceError::PayoffDomain(n));
    }

    let mut values = Vec::with_capacity(strategies.len());
    for (index, s) in strategies.iter().enumerate() {
        match is_self_financing(market, s).map_err(|source| SequenceError::Member { index, source })? {
            SelfFinancing::Yes => {}
            SelfFinancing::Violated { node, .. } => return Err(SequenceError::NotSelfFinancing { index, node }),
        }
        values.push(portfolio_values(market, s).map_err(|source| SequenceError::Member { index, source })?);
    }
    let short_reports: Vec<ShortReport> = strategies.iter().map(|s| short_positions(tree, s)).collect();
    let initial_values: Vec<Rational> = values.iter().map(|v| v.initial().clone()).collect();
    let shortfall: Vec<Rational> = values
        .iter()
        .map(|v| {
            v.terminal(tree)
                .map(|(n, x)| &xi[&n] - x)
                .fold(Rational::zero(), |acc, gap| if gap > acc { gap } else { acc })
        })
        .collect();
    let admissibility_bound = values
        .iter()
        .map(|v| -v.min().clone())
        .fold(Rational::zero(), |acc, a| if a > acc { a } else { acc });

    let payoff_ok = xi.values().all(|x| !x.is_negative()) && xi.values().any(|x| x.is_positive());
    let nonincreasing = |xs: &[Rational]| xs.windows(2).all(|w| w[1] <= w[0]);
    let last = |xs: &[Rational]| xs.last().expect("nonempty").clone();

    let first_kind = payoff_ok
        && initial_values.iter().all(|x| !x.is_negative())
        && nonincreasing(&initial_values)
        && last(&initial_values) <= *epsilon
        && shortfall.iter().all(Zero::is_zero);
    let flvr = payoff_ok
        && initial_values.iter().all(Zero::is_zero)
        && nonincreasing(&shortfall)
        && last(&shortfall) <= *epsilon;
    let kind = if first_kind {
        SequenceKind::ArbitrageFirstKind
    } else if flvr {
        SequenceKind::Flvr
    } else {
        SequenceKind::Neither
    };

    let mut verdict = SequenceVerdict {
        kind,
        cutoff_index: None,
        short_reports,
        initial_values,
        shortfall,
        admissibility_bound,
        forcing_threshold: None,
    };
    if kind == SequenceKind::Neither {
        return Ok(verdict);
    }

    let threshold = match kind {
        SequenceKind::ArbitrageFirstKind => {
            let z = find_esmd(market)?;
            let deflated: Rational = tree
                .leaves()
                .iter()
                .map(|n| tree.path_prob(*n) * &xi[n] * z.value(*n))
                .sum();
            deflated / z.value(tree.root())
        }
        _ => xi.values().max().expect("nonempty").clone(),
    };
    let measured = match kind {
        SequenceKind::ArbitrageFirstKind => &verdict.initial_values,
        _ => &verdict.shortfall,
    };
    for (index, (m, report)) in measured.iter().zip(&verdict.short_reports).enumerate() {
        if *m < threshold && report.is_long_only() {
            return Err(SequenceError::LongOnlyBelowThreshold { index: index + 1 });
        }
    }
    let tail = verdict
        .short_reports
        .iter()
        .rposition(ShortReport::is_long_only)
        .map_or(0, |k| k + 1);
    if tail == verdict.short_reports.len() {
        return Err(SequenceError::ToleranceTooCoarse {
            epsilon: rational::to_string(epsilon),
            bound: rational::to_string(&threshold),
        });
    }
    verdict.cutoff_index = Some(tail + 1);
    verdict.forcing_threshold = Some(threshold);
    Ok(verdict)
}
