//! Prices in units of a chosen asset, and the wealth parametrization of
//! self-financing strategies in those units.
//!
//! With numéraire `k`, `X̄^i = S^i / S^k` (so `X̄^k ≡ 1`) and the risky part
//! `X` drops column `k`. A self-financing `δ` corresponds one-to-one to an
//! initial wealth `x` and risky holdings `θ`:
//!
//! ```text
//! x = X̄^δ(root),  θ = δ without column k
//! δ^k(n) = X^{x,θ}(n) - θ(n)·X(n)
//! X^{x,θ}(root) = x,  X^{x,θ}(c) = X^{x,θ}(n) + θ(n)·(X(c) - X(n))
//! ```
//!
//! and then `X̄^δ = X^{x,θ}` node-wise and `S^δ = S^k X̄^δ`.

use num_traits::Zero;

use crate::market::{is_self_financing, raw_values, Market, MarketError, SelfFinancing, Strategy};
use crate::rational::{dot, Rational};
use crate::scenario_tree::NodeId;

#[derive(Debug, Clone)]
pub struct DiscountedMarket {
    market: Market,
    numeraire: usize,
}

impl DiscountedMarket {
    /// The discounted prices as a market in their own right.
    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn numeraire(&self) -> usize {
        self.numeraire
    }

    /// Prices with the numéraire column removed.
    pub fn risky(&self, node: NodeId) -> Vec<Rational> {
        drop_column(self.market.price(node), self.numeraire)
    }
}

fn drop_column(v: &[Rational], k: usize) -> Vec<Rational> {
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, x)| x.clone())
        .collect()
}

pub fn to_discounted(market: &Market, numeraire: usize) -> Result<DiscountedMarket, MarketError> {
    market.check_asset(numeraire)?;
    let prices = market
        .prices()
        .iter()
        .map(|s| s.iter().map(|x| x / &s[numeraire]).collect())
        .collect();
    Ok(DiscountedMarket {
        market: Market::new(market.shared_tree(), prices)?,
        numeraire,
    })
}

/// Checks that a strategy self-financing in `market` is self-financing in
/// the discounted market and that `S^δ = S^k X̄^δ` at every node. Returns
/// `false` for strategies that are not self-financing to begin with.
pub fn numeraire_identity_check(market: &Market, numeraire: usize, strategy: &Strategy) -> Result<bool, MarketError> {
    if !is_self_financing(market, strategy)?.holds() {
        return Ok(false);
    }
    let disc = to_discounted(market, numeraire)?;
    if !is_self_financing(disc.market(), strategy)?.holds() {
        return Ok(false);
    }
    let base = raw_values(market, strategy);
    let scaled = raw_values(disc.market(), strategy);
    Ok(market
        .tree()
        .node_ids()
        .all(|n| base[n.0] == &market.price(n)[numeraire] * &scaled[n.0]))
}

/// Initial wealth and risky holdings, all in numéraire units.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthPlan {
    pub x: Rational,
    /// Holdings in every asset except the numéraire.
    pub theta: Strategy,
}

pub fn to_wealth_plan(disc: &DiscountedMarket, strategy: &Strategy) -> Result<WealthPlan, MarketError> {
    let market = disc.market();
    if let SelfFinancing::Violated { node, .. } = is_self_financing(market, strategy)? {
        return Err(MarketError::NotSelfFinancing { node });
    }
    let tree = market.tree();
    let x = dot(strategy.holding(tree.root()).expect("root decides"), market.price(tree.root()));
    let theta = Strategy::from_fn(tree, market.assets() - 1, |n| {
        drop_column(strategy.holding(n).expect("decision node"), disc.numeraire)
    });
    Ok(WealthPlan { x, theta })
}

fn check_plan(disc: &DiscountedMarket, plan: &WealthPlan) -> Result<(), MarketError> {
    let tree = disc.market().tree();
    if tree.horizon() == 0 {
        return Err(MarketError::DegenerateHorizon);
    }
    if plan.theta.node_count() != tree.len() {
        return Err(MarketError::TreeMismatch {
            expected: tree.len(),
            found: plan.theta.node_count(),
        });
    }
    let expected = disc.market().assets() - 1;
    if plan.theta.assets() != expected {
        return Err(MarketError::StrategyAssets {
            expected,
            found: plan.theta.assets(),
        });
    }
    Ok(())
}

/// `X^{x,θ}` at every node.
pub fn wealth_process(disc: &DiscountedMarket, plan: &WealthPlan) -> Result<Vec<Rational>, MarketError> {
    check_plan(disc, plan)?;
    let tree = disc.market().tree();
    let mut wealth = vec![Rational::zero(); tree.len()];
    for n in tree.nodes_by_depth() {
        wealth[n.0] = match tree.parent(n) {
            None => plan.x.clone(),
            Some(p) => {
                let theta = plan.theta.holding(p).expect("decision node");
                let step: Vec<Rational> = disc
                    .risky(n)
                    .iter()
                    .zip(disc.risky(p))
                    .map(|(a, b)| a - b)
                    .collect();
                &wealth[p.0] + dot(theta, &step)
            }
        };
    }
    Ok(wealth)
}

pub fn from_wealth_plan(disc: &DiscountedMarket, plan: &WealthPlan) -> Result<Strategy, MarketError> {
    let wealth = wealth_process(disc, plan)?;
    let k = disc.numeraire;
    let d = disc.market().assets();
    Ok(Strategy::from_fn(disc.market().tree(), d, |n| {
        let theta = plan.theta.holding(n).expect("decision node");
        let cash = &wealth[n.0] - dot(theta, &disc.risky(n));
        let mut delta = Vec::with_capacity(d);
        delta.extend_from_slice(&theta[..k]);
        delta.push(cash);
        delta.extend_from_slice(&theta[k..]);
        delta
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::portfolio_values;
    use crate::rational::{int, ratio};
    use crate::scenario_tree::ScenarioTree;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn example_two() -> Market {
        let third = ratio(1, 3);
        Market::one_period(
            vec![third.clone(), third.clone(), third],
            ints(&[1, 2, 7]),
            vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
        )
        .unwrap()
    }

    #[test]
    fn unit_numeraire_leaves_prices_alone() {
        let m = example_two();
        let disc = to_discounted(&m, 0).unwrap();
        assert_eq!(disc.market().prices(), m.prices());
    }

    #[test]
    fn ratios_against_second_asset() {
        let m = Market::one_period(vec![int(1)], ints(&[2, 4]), vec![ints(&[3, 6])]).unwrap();
        let disc = to_discounted(&m, 1).unwrap();
        assert_eq!(disc.market().price(NodeId::ROOT), &[ratio(1, 2), int(1)]);
        assert_eq!(disc.risky(NodeId::ROOT), vec![ratio(1, 2)]);
        assert!(matches!(to_discounted(&m, 2), Err(MarketError::AssetOutOfRange { .. })));
    }

    #[test]
    fn identity_on_example_two() {
        let m = example_two();
        let arb = Strategy::buy_and_hold(m.tree(), &ints(&[3, 2, -1]));
        for k in 0..3 {
            assert!(numeraire_identity_check(&m, k, &arb).unwrap());
        }
        assert!(numeraire_identity_check(&m, 2, &Strategy::zero(m.tree(), 3)).unwrap());
    }

    #[test]
    fn holding_the_numeraire_is_unit_wealth() {
        let tree = ScenarioTree::uniform(&[2, 2]).unwrap();
        let prices = (0..tree.len()).map(|n| ints(&[1 + n as i64, 2])).collect();
        let m = Market::new(tree, prices).unwrap();
        let disc = to_discounted(&m, 1).unwrap();
        let hold = Strategy::unit(m.tree(), 2, 1);
        let plan = to_wealth_plan(&disc, &hold).unwrap();
        assert_eq!(plan.x, int(1));
        assert!(plan.theta.is_zero());
        assert!(wealth_process(&disc, &plan).unwrap().iter().all(|w| *w == int(1)));
        assert_eq!(from_wealth_plan(&disc, &plan).unwrap(), hold);
    }

    #[test]
    fn round_trip_and_wealth_identity() {
        let tree = ScenarioTree::uniform(&[2, 2]).unwrap();
        let prices = vec![
            ints(&[1, 4, 2]),
            ints(&[1, 6, 3]),
            ints(&[2, 3, 1]),
            ints(&[1, 7, 2]),
            ints(&[2, 5, 5]),
            ints(&[3, 2, 1]),
            ints(&[2, 4, 3]),
        ];
        let m = Market::new(tree, prices).unwrap();
        let disc = to_discounted(&m, 2).unwrap();
        let plan = WealthPlan {
            x: ratio(5, 2),
            theta: Strategy::from_fn(m.tree(), 2, |n| vec![int(n.0 as i64 - 1), ratio(1, 1 + n.0 as i64)]),
        };
        let delta = from_wealth_plan(&disc, &plan).unwrap();
        assert!(is_self_financing(&m, &delta).unwrap().holds());
        let values = portfolio_values(disc.market(), &delta).unwrap();
        assert_eq!(values.as_slice(), wealth_process(&disc, &plan).unwrap().as_slice());
        assert_eq!(to_wealth_plan(&disc, &delta).unwrap(), plan);
        assert!(numeraire_identity_check(&m, 2, &delta).unwrap());
    }
}
