//! Bubbles: assets strictly costlier than a nonnegative self-financing
//! portfolio that dominates them at the horizon.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Deflator, DeflatorError};
use crate::arbitrage::{ArbitrageCertificate, CertificateError};
use crate::linalg::{solve, Solution};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::{portfolio_values, Market, MarketError, PortfolioValues, Strategy};
use crate::rational::Rational;
use crate::scenario_tree::NodeId;
use crate::tree_lp::StrategyLayout;

#[derive(Debug, Clone, Serialize)]
pub struct BubbleWitness {
    pub asset: usize,
    #[serde(serialize_with = "crate::io::serialize_strategy")]
    pub strategy: Strategy,
    pub values: PortfolioValues,
    /// `S^i(root) - S^ϑ(root) > 0`.
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub gap: Rational,
}

impl BubbleWitness {
    /// Validates the defining inequalities.
    pub fn new(market: &Market, asset: usize, strategy: Strategy) -> Result<Self, BubbleError> {
        market.check_asset(asset)?;
        let values = portfolio_values(market, &strategy)?;
        let tree = market.tree();
        if let Some(n) = tree.node_ids().find(|&n| values.at(n).is_negative()) {
            return Err(BubbleError::NegativeValue(n));
        }
        if let Some((n, _)) = values.terminal(tree).find(|(n, v)| *v < &market.price(*n)[asset]) {
            return Err(BubbleError::NotDominating(n));
        }
        let gap = &market.price(tree.root())[asset] - values.initial();
        if !gap.is_positive() {
            return Err(BubbleError::NoGap);
        }
        Ok(BubbleWitness {
            asset,
            strategy,
            values,
            gap,
        })
    }

    pub fn cost(&self) -> &Rational {
        self.values.initial()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BubbleError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("dominating portfolio is negative at {0}")]
    NegativeValue(NodeId),
    #[error("portfolio falls short of the asset at leaf {0}")]
    NotDominating(NodeId),
    #[error("portfolio is not strictly cheaper than the asset")]
    NoGap,
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// Cheapest nonnegative self-financing superreplication of each asset; the
/// first asset priced strictly above it is a bubble.
pub fn detect_bubble(market: &Market) -> Option<BubbleWitness> {
    (0..market.assets()).find_map(|i| {
        let (strategy, cost) = cheapest_superreplication(market, i);
        if cost < market.price(market.tree().root())[i] {
            Some(BubbleWitness::new(market, i, strategy).expect("LP optimum satisfies the witness constraints"))
        } else {
            None
        }
    })
}

/// Optimal strategy and root value of
/// `min S^ϑ(root)` s.t. self-financing, `S^ϑ >= 0`, `S^ϑ_T >= S^i_T`.
pub fn cheapest_superreplication(market: &Market, asset: usize) -> (Strategy, Rational) {
    let tree = market.tree();
    let layout = StrategyLayout::new(market);
    let mut lp = LinearProgram::new(layout.n_vars());
    lp.set_all_free();
    lp.minimize(layout.value_row(tree.root()));
    layout.constrain_self_financing(&mut lp);
    for n in tree.node_ids() {
        let floor = if tree.is_leaf(n) {
            market.price(n)[asset].clone()
        } else {
            Rational::zero()
        };
        lp.constrain(layout.value_row(n), Relation::Ge, floor);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => (layout.strategy(&x), value),
        other => unreachable!("holding the asset is feasible and values are bounded below, got {other:?}"),
    }
}

/// `δ = ϑ` for a free dominating portfolio, else `δ = α ϑ - e_i` with
/// `α = S^i(root) / S^ϑ(root) > 1`.
pub fn bubble_to_arbitrage(market: &Market, witness: &BubbleWitness) -> Result<ArbitrageCertificate, BubbleError> {
    let checked = BubbleWitness::new(market, witness.asset, witness.strategy.clone())?;
    let cost = checked.cost();
    let delta = if cost.is_zero() {
        checked.strategy
    } else {
        let alpha = &market.price(market.tree().root())[checked.asset] / cost;
        let unit = Strategy::unit(market.tree(), market.assets(), checked.asset);
        checked.strategy.combine(&alpha, &unit, &-Rational::one())
    };
    Ok(ArbitrageCertificate::new(market, delta)?)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SufficientOutcome {
    Witness(BubbleWitness),
    /// The deflated conditional value replicates but costs the asset price.
    NoGap {
        #[serde(serialize_with = "crate::io::serialize_rational")]
        replicated_price: Rational,
    },
    /// The one-step replication system at `node` is inconsistent.
    NotReplicable {
        node: NodeId,
        rank: usize,
        augmented_rank: usize,
    },
}

/// Replicates `M(n) = E[S^i_T Z_T | n] / Z(n)` by backward induction and
/// reports a bubble when `M(root) < S^i(root)`.
pub fn bubble_sufficient_construction(market: &Market, z: &Deflator, asset: usize) -> Result<SufficientOutcome, DeflatorError> {
    market.check_asset(asset)?;
    z.check_positive(market)?;
    let tree = market.tree();
    let horizon = tree.horizon();
    if horizon == 0 {
        return Err(MarketError::DegenerateHorizon.into());
    }
    let mut terminal: Vec<Option<Rational>> = vec![None; tree.len()];
    for &n in tree.leaves() {
        terminal[n.0] = Some(&market.price(n)[asset] * z.value(n));
    }
    let m: Vec<Rational> = tree
        .backward_expectation(horizon, 0, terminal)
        .into_iter()
        .zip(z.values())
        .map(|(v, zn)| v.expect("filled by induction") / zn)
        .collect();

    let d = market.assets();
    let mut holdings = vec![None; tree.len()];
    for n in tree.internal_nodes() {
        let mut rows = vec![market.price(n).to_vec()];
        let mut rhs = vec![m[n.0].clone()];
        for &c in tree.children(n) {
            rows.push(market.price(c).to_vec());
            rhs.push(m[c.0].clone());
        }
        match solve(&rows, &rhs, d) {
            Solution::Solved(x) => holdings[n.0] = Some(x),
            Solution::Inconsistent { rank, augmented_rank } => {
                return Ok(SufficientOutcome::NotReplicable {
                    node: n,
                    rank,
                    augmented_rank,
                })
            }
        }
    }
    let strategy = Strategy::from_fn(tree, d, |n| holdings[n.0].take().expect("solved"));
    let price = &market.price(tree.root())[asset];
    if m[0] < *price {
        let witness = BubbleWitness::new(market, asset, strategy).expect("replicating portfolio is a witness");
        Ok(SufficientOutcome::Witness(witness))
    } else {
        Ok(SufficientOutcome::NoGap {
            replicated_price: m[0].clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deflator::DeflatorKind;
    use crate::market::short_positions;
    use crate::rational::{int, ratio};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn half() -> Vec<Rational> {
        vec![ratio(1, 2), ratio(1, 2)]
    }

    #[test]
    fn single_asset_has_no_bubble() {
        let m = Market::one_period(half(), ints(&[2]), vec![ints(&[1]), ints(&[3])]).unwrap();
        assert!(detect_bubble(&m).is_none());
    }

    #[test]
    fn dominated_asset_is_a_bubble() {
        // Asset 0 starts at 1 and ends at (1, 2); asset 1 starts at 2 and ends at 1.
        let m = Market::one_period(half(), ints(&[1, 2]), vec![ints(&[1, 1]), ints(&[2, 1])]).unwrap();
        // Holding two of asset 0 against one short of asset 1 costs nothing
        // and dominates asset 1.
        let (strategy, cost) = cheapest_superreplication(&m, 1);
        assert!(cost.is_zero());
        assert_eq!(strategy.holding(NodeId::ROOT).unwrap(), &[int(2), int(-1)]);
        let w = BubbleWitness::new(&m, 1, strategy).unwrap();
        assert_eq!(w.gap, int(2));
        let cert = bubble_to_arbitrage(&m, &w).unwrap();
        assert_eq!(cert.strategy, w.strategy);
        // The same free portfolio also dominates asset 0, which is found first.
        let first = detect_bubble(&m).expect("bubble");
        assert_eq!(first.asset, 0);
        assert_eq!(first.gap, int(1));
    }

    #[test]
    fn buying_the_cheap_dominator() {
        let m = Market::one_period(half(), ints(&[1, 2]), vec![ints(&[1, 1]), ints(&[2, 1])]).unwrap();
        let w = BubbleWitness::new(&m, 1, Strategy::unit(m.tree(), 2, 0)).unwrap();
        assert_eq!(w.gap, int(1));
        let cert = bubble_to_arbitrage(&m, &w).unwrap();
        assert_eq!(cert.strategy.holding(NodeId::ROOT).unwrap(), &[int(2), int(-1)]);
        assert_eq!(short_positions(m.tree(), &cert.strategy).shorted_assets(), vec![1]);
    }

    #[test]
    fn invalid_witnesses_rejected() {
        let m = Market::one_period(half(), ints(&[1, 2]), vec![ints(&[1, 1]), ints(&[2, 1])]).unwrap();
        assert!(matches!(
            BubbleWitness::new(&m, 0, Strategy::unit(m.tree(), 2, 0)),
            Err(BubbleError::NoGap)
        ));
        assert!(matches!(
            BubbleWitness::new(&m, 0, Strategy::unit(m.tree(), 2, 1)),
            Err(BubbleError::NotDominating(_))
        ));
    }

    #[test]
    fn martingale_deflator_gives_no_gap() {
        let m = Market::one_period(half(), ints(&[1, 2]), vec![ints(&[1, 1]), ints(&[1, 3])]).unwrap();
        let z = Deflator::unit(&m, DeflatorKind::Martingale);
        match bubble_sufficient_construction(&m, &z, 1).unwrap() {
            SufficientOutcome::NoGap { replicated_price } => assert_eq!(replicated_price, int(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strict_supermartingale_on_binomial_tree() {
        // The second asset ends at 2 in both states but costs 3.
        let m = Market::one_period(half(), ints(&[1, 3]), vec![ints(&[1, 2]), ints(&[1, 2])]).unwrap();
        let z = Deflator::unit(&m, DeflatorKind::Supermartingale);
        assert!(z.is_supermartingale_for(&m));
        match bubble_sufficient_construction(&m, &z, 1).unwrap() {
            SufficientOutcome::Witness(w) => {
                assert_eq!(w.gap, int(1));
                assert_eq!(w.strategy.holding(NodeId::ROOT).unwrap(), &[int(2), int(0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trinomial_two_assets_not_replicable() {
        let third = ratio(1, 3);
        let m = Market::one_period(
            vec![third.clone(), third.clone(), third],
            ints(&[1, 3]),
            vec![ints(&[1, 1]), ints(&[1, 2]), ints(&[1, 3])],
        )
        .unwrap();
        let z = Deflator::unit(&m, DeflatorKind::Supermartingale);
        match bubble_sufficient_construction(&m, &z, 1).unwrap() {
            SufficientOutcome::NotReplicable {
                node,
                rank,
                augmented_rank,
            } => {
                assert_eq!(node, NodeId::ROOT);
                assert_eq!((rank, augmented_rank), (2, 3));
            }
            other => panic!("{other:?}"),
        }
    }
}
