//! Discrete-time markets on scenario trees.
//!
//! A [`Market`] attaches a strictly positive price vector to every node. A
//! [`Strategy`] stores the holding `δ_t` chosen at each depth-`(t-1)` node,
//! so predictability is structural: the vector at a decision node is the
//! position carried into all of its children. `δ_0` is not stored; trading
//! starts with `δ_1` at the root.
//!
//! Portfolio values follow the discrete conventions
//!
//! ```text
//! S^δ(root) = δ_1 · S(root)
//! S^δ(n)    = δ_t(parent(n)) · S(n)      for n at depth t >= 1
//! ```
//!
//! and a strategy is self-financing when the position carried into every
//! non-root decision node costs exactly what the position chosen there costs:
//! `δ_t(parent(n)) · S(n) = δ_{t+1}(n) · S(n)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{self, dot, Rational};
use crate::scenario_tree::{NodeId, ScenarioTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarketError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("a market needs at least one asset")]
    NoAssets,
    #[error("expected a price vector for every node; got {found} for {expected} nodes")]
    PriceCount { expected: usize, found: usize },
    #[error("price vector at {node} has {found} entries, expected {expected}")]
    PriceDimension { node: NodeId, expected: usize, found: usize },
    #[error("price of asset {asset} at {node} must be strictly positive, got {price}")]
    NonPositivePrice { node: NodeId, asset: usize, price: String },
    #[error("strategy has {found} assets, market has {expected}")]
    StrategyAssets { expected: usize, found: usize },
    #[error("strategy is defined on a tree with {found} nodes, market tree has {expected}")]
    TreeMismatch { expected: usize, found: usize },
    #[error("holding at {node} has {found} entries, expected {expected}")]
    HoldingDimension { node: NodeId, expected: usize, found: usize },
    #[error("no holding given for decision node {0}")]
    MissingHolding(NodeId),
    #[error("holding given for leaf {0}; leaves carry no decision")]
    HoldingAtLeaf(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("the tree has horizon 0, so no strategy can trade")]
    DegenerateHorizon,
    #[error("strategy is not self-financing at {node}")]
    NotSelfFinancing { node: NodeId },
    #[error("asset index {asset} out of range for {assets} assets")]
    AssetOutOfRange { asset: usize, assets: usize },
}

#[derive(Debug, Clone)]
pub struct Market {
    tree: Arc<ScenarioTree>,
    assets: usize,
    prices: Vec<Vec<Rational>>,
}

impl Market {
    /// `prices[n]` is the price vector at node `n`.
    pub fn new(tree: impl Into<Arc<ScenarioTree>>, prices: Vec<Vec<Rational>>) -> Result<Self, MarketError> {
        let tree = tree.into();
        if prices.len() != tree.len() {
            return Err(MarketError::PriceCount {
                expected: tree.len(),
                found: prices.len(),
            });
        }
        let assets = prices[0].len();
        if assets == 0 {
            return Err(MarketError::NoAssets);
        }
        for (i, p) in prices.iter().enumerate() {
            if p.len() != assets {
                return Err(MarketError::PriceDimension {
                    node: NodeId(i),
                    expected: assets,
                    found: p.len(),
                });
            }
            if let Some(asset) = p.iter().position(|x| !x.is_positive()) {
                return Err(MarketError::NonPositivePrice {
                    node: NodeId(i),
                    asset,
                    price: rational::to_string(&p[asset]),
                });
            }
        }
        Ok(Market { tree, assets, prices })
    }

    /// One-period market: `root` prices, one price vector per leaf.
    pub fn one_period(
        probs: Vec<Rational>,
        root: Vec<Rational>,
        leaves: Vec<Vec<Rational>>,
    ) -> Result<Self, MarketError> {
        let tree = ScenarioTree::one_period(probs)?;
        let mut prices = vec![root];
        prices.extend(leaves);
        Market::new(tree, prices)
    }

    pub fn tree(&self) -> &ScenarioTree {
        &self.tree
    }

    pub fn shared_tree(&self) -> Arc<ScenarioTree> {
        Arc::clone(&self.tree)
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    pub fn price(&self, node: NodeId) -> &[Rational] {
        &self.prices[node.0]
    }

    pub fn prices(&self) -> &[Vec<Rational>] {
        &self.prices
    }

    /// Price of one asset at every node, indexed by node id.
    pub fn asset_prices(&self, asset: usize) -> Vec<Rational> {
        self.prices.iter().map(|p| p[asset].clone()).collect()
    }

    /// True if the asset's price depends on the time index only; the tree
    /// analogue of a predictable savings account.
    pub fn is_depth_measurable(&self, asset: usize) -> bool {
        (0..=self.tree.horizon()).all(|t| {
            let level = self.tree.nodes_at_depth(t);
            level.iter().all(|n| self.prices[n.0][asset] == self.prices[level[0].0][asset])
        })
    }

    /// Restriction to one decision node and its children.
    pub fn one_step(&self, node: NodeId) -> Market {
        let probs = self
            .tree
            .children(node)
            .iter()
            .map(|c| self.tree.transition_prob(*c).clone())
            .collect();
        let leaves = self.tree.children(node).iter().map(|c| self.prices[c.0].clone()).collect();
        Market::one_period(probs, self.prices[node.0].clone(), leaves).expect("restriction of a valid market")
    }

    pub fn check_asset(&self, asset: usize) -> Result<(), MarketError> {
        if asset < self.assets {
            Ok(())
        } else {
            Err(MarketError::AssetOutOfRange {
                asset,
                assets: self.assets,
            })
        }
    }
}

/// Price vector of a savings account: one value per time index.
pub fn savings_account_prices(tree: &ScenarioTree, by_depth: &[Rational]) -> Vec<Rational> {
    assert_eq!(by_depth.len(), tree.horizon() + 1, "one value per time index");
    tree.node_ids().map(|n| by_depth[tree.depth(n)].clone()).collect()
}

/// Predictable holdings: one vector per decision node.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    assets: usize,
    holdings: Vec<Option<Vec<Rational>>>,
}

impl Strategy {
    pub fn new(tree: &ScenarioTree, assets: usize, holdings: BTreeMap<NodeId, Vec<Rational>>) -> Result<Self, MarketError> {
        let mut dense = vec![None; tree.len()];
        for (node, h) in holdings {
            if !tree.contains(node) {
                return Err(MarketError::UnknownNode(node));
            }
            if tree.is_leaf(node) {
                return Err(MarketError::HoldingAtLeaf(node));
            }
            if h.len() != assets {
                return Err(MarketError::HoldingDimension {
                    node,
                    expected: assets,
                    found: h.len(),
                });
            }
            dense[node.0] = Some(h);
        }
        if let Some(n) = tree.internal_nodes().find(|n| dense[n.0].is_none()) {
            return Err(MarketError::MissingHolding(n));
        }
        Ok(Strategy { assets, holdings: dense })
    }

    pub fn from_fn<F>(tree: &ScenarioTree, assets: usize, mut f: F) -> Self
    where
        F: FnMut(NodeId) -> Vec<Rational>,
    {
        let mut holdings = vec![None; tree.len()];
        for n in tree.internal_nodes() {
            let h = f(n);
            assert_eq!(h.len(), assets, "holding dimension");
            holdings[n.0] = Some(h);
        }
        Strategy { assets, holdings }
    }

    pub fn zero(tree: &ScenarioTree, assets: usize) -> Self {
        Self::from_fn(tree, assets, |_| vec![Rational::zero(); assets])
    }

    /// Holds the same vector at every decision node.
    pub fn buy_and_hold(tree: &ScenarioTree, holding: &[Rational]) -> Self {
        Self::from_fn(tree, holding.len(), |_| holding.to_vec())
    }

    /// Buy-and-hold one unit of `asset`.
    pub fn unit(tree: &ScenarioTree, assets: usize, asset: usize) -> Self {
        let mut e = vec![Rational::zero(); assets];
        e[asset] = Rational::from_integer(1.into());
        Self::buy_and_hold(tree, &e)
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    /// Holding chosen at a decision node; `None` at leaves.
    pub fn holding(&self, node: NodeId) -> Option<&[Rational]> {
        self.holdings[node.0].as_deref()
    }

    /// Decision nodes with their holdings, in id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &[Rational])> {
        self.holdings
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.as_deref().map(|h| (NodeId(i), h)))
    }

    pub fn node_count(&self) -> usize {
        self.holdings.len()
    }

    /// Position held over the period ending at `node`: `δ_t(parent)` for
    /// depth `t >= 1`, and `δ_1` at the root.
    pub fn incoming(&self, tree: &ScenarioTree, node: NodeId) -> &[Rational] {
        match tree.parent(node) {
            Some(p) => self.holding(p).expect("parent is a decision node"),
            None => self.holding(node).expect("root is a decision node"),
        }
    }

    /// `a·self + b·other`, node by node.
    pub fn combine(&self, a: &Rational, other: &Strategy, b: &Rational) -> Strategy {
        assert_eq!(self.assets, other.assets);
        assert_eq!(self.holdings.len(), other.holdings.len());
        let holdings = self
            .holdings
            .iter()
            .zip(&other.holdings)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()),
                (None, None) => None,
                _ => panic!("strategies on different trees"),
            })
            .collect();
        Strategy {
            assets: self.assets,
            holdings,
        }
    }

    pub fn scaled(&self, a: &Rational) -> Strategy {
        let holdings = self
            .holdings
            .iter()
            .map(|h| h.as_ref().map(|h| h.iter().map(|x| a * x).collect()))
            .collect();
        Strategy {
            assets: self.assets,
            holdings,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|(_, h)| h.iter().all(Zero::is_zero))
    }

    pub(crate) fn check_against(&self, market: &Market) -> Result<(), MarketError> {
        if market.tree().horizon() == 0 {
            return Err(MarketError::DegenerateHorizon);
        }
        if self.holdings.len() != market.tree().len() {
            return Err(MarketError::TreeMismatch {
                expected: market.tree().len(),
                found: self.holdings.len(),
            });
        }
        if self.assets != market.assets() {
            return Err(MarketError::StrategyAssets {
                expected: market.assets(),
                found: self.assets,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfFinancing {
    Yes,
    /// First node (breadth-first) where the rebalancing identity fails.
    Violated {
        node: NodeId,
        incoming: Rational,
        outgoing: Rational,
    },
}

impl SelfFinancing {
    pub fn holds(&self) -> bool {
        matches!(self, SelfFinancing::Yes)
    }
}

pub fn is_self_financing(market: &Market, strategy: &Strategy) -> Result<SelfFinancing, MarketError> {
    strategy.check_against(market)?;
    let tree = market.tree();
    for t in 1..tree.horizon() {
        for &n in tree.nodes_at_depth(t) {
            let incoming = dot(strategy.incoming(tree, n), market.price(n));
            let outgoing = dot(strategy.holding(n).expect("decision node"), market.price(n));
            if incoming != outgoing {
                return Ok(SelfFinancing::Violated { node: n, incoming, outgoing });
            }
        }
    }
    Ok(SelfFinancing::Yes)
}

/// Node-indexed values of a self-financing portfolio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioValues {
    #[serde(serialize_with = "crate::io::serialize_rationals")]
    values: Vec<Rational>,
}

impl PortfolioValues {
    pub fn at(&self, node: NodeId) -> &Rational {
        &self.values[node.0]
    }

    pub fn initial(&self) -> &Rational {
        &self.values[0]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.values
    }

    pub fn terminal<'a>(&'a self, tree: &'a ScenarioTree) -> impl Iterator<Item = (NodeId, &'a Rational)> + 'a {
        tree.leaves().iter().map(move |&n| (n, &self.values[n.0]))
    }

    pub fn min(&self) -> &Rational {
        self.values.iter().min().expect("nonempty")
    }
}

/// `δ · S` at every node, without the self-financing check.
pub(crate) fn raw_values(market: &Market, strategy: &Strategy) -> Vec<Rational> {
    let tree = market.tree();
    tree.node_ids()
        .map(|n| dot(strategy.incoming(tree, n), market.price(n)))
        .collect()
}

pub fn portfolio_values(market: &Market, strategy: &Strategy) -> Result<PortfolioValues, MarketError> {
    if let SelfFinancing::Violated { node, .. } = is_self_financing(market, strategy)? {
        return Err(MarketError::NotSelfFinancing { node });
    }
    Ok(PortfolioValues {
        values: raw_values(market, strategy),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortPosition {
    /// Trading period `t` of the holding `δ_t`.
    pub time: usize,
    /// Decision node at depth `t - 1` where the position is opened.
    pub node: NodeId,
    pub asset: usize,
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub quantity: Rational,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ShortReport {
    pub shorts: Vec<ShortPosition>,
}

impl ShortReport {
    pub fn is_long_only(&self) -> bool {
        self.shorts.is_empty()
    }

    pub fn shorted_assets(&self) -> Vec<usize> {
        let mut assets: Vec<usize> = self.shorts.iter().map(|s| s.asset).collect();
        assets.sort_unstable();
        assets.dedup();
        assets
    }
}

/// Every negative holding, in (node, asset) order.
pub fn short_positions(tree: &ScenarioTree, strategy: &Strategy) -> ShortReport {
    let mut shorts = Vec::new();
    for n in tree.nodes_by_depth() {
        if let Some(h) = strategy.holding(n) {
            for (asset, q) in h.iter().enumerate() {
                if q.is_negative() {
                    shorts.push(ShortPosition {
                        time: tree.depth(n) + 1,
                        node: n,
                        asset,
                        quantity: q.clone(),
                    });
                }
            }
        }
    }
    ShortReport { shorts }
}

pub fn is_long_only(strategy: &Strategy) -> bool {
    strategy.iter().all(|(_, h)| !h.iter().any(Signed::is_negative))
}

/// Zero initial value, nonnegative terminal value, positive somewhere.
pub fn is_arbitrage(market: &Market, strategy: &Strategy) -> Result<bool, MarketError> {
    let values = portfolio_values(market, strategy)?;
    Ok(values_are_arbitrage(market.tree(), &values))
}

pub(crate) fn values_are_arbitrage(tree: &ScenarioTree, values: &PortfolioValues) -> bool {
    values.initial().is_zero()
        && values.terminal(tree).all(|(_, v)| !v.is_negative())
        && values.terminal(tree).any(|(_, v)| v.is_positive())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InductionStep {
    /// Trading period `t`; the step shows `δ_t = 0` on every depth-`(t-1)` node.
    pub time: usize,
    pub nodes: usize,
    /// How the zero value of the position was obtained: from the initial
    /// value (`t = 1`) or from the self-financing identity (`t >= 2`).
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct InductionTrace {
    pub steps: Vec<InductionStep>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InductionError {
    #[error(transparent)]
    Invalid(#[from] MarketError),
    #[error("precondition violated: strategy is not self-financing at {node}")]
    NotSelfFinancing { node: NodeId },
    #[error("precondition violated: strategy is short {quantity} of asset {asset} at {node}")]
    NotLongOnly { node: NodeId, asset: usize, quantity: String },
    #[error("precondition violated: initial value is {0}, not 0")]
    NonZeroInitialValue(String),
    #[error("induction failed at period {time}, {node}: a long-only zero-value position is nonzero")]
    Counterexample { time: usize, node: NodeId },
}

/// Replays the induction showing that a long-only self-financing strategy
/// with zero initial value is identically zero. Period 1: `δ_1 · S_0 = 0`
/// with `δ_1 >= 0` and `S_0 > 0` forces `δ_1 = 0`. Period `t+1`: the carried
/// position is zero, so the self-financing identity gives `δ_{t+1} · S_t = 0`
/// and positivity again forces `δ_{t+1} = 0`.
pub fn long_only_zero_start_is_zero(market: &Market, strategy: &Strategy) -> Result<InductionTrace, InductionError> {
    if let SelfFinancing::Violated { node, .. } = is_self_financing(market, strategy)? {
        return Err(InductionError::NotSelfFinancing { node });
    }
    let tree = market.tree();
    if let Some(s) = short_positions(tree, strategy).shorts.first() {
        return Err(InductionError::NotLongOnly {
            node: s.node,
            asset: s.asset,
            quantity: rational::to_string(&s.quantity),
        });
    }
    let initial = dot(strategy.holding(tree.root()).expect("root decides"), market.price(tree.root()));
    if !initial.is_zero() {
        return Err(InductionError::NonZeroInitialValue(rational::to_string(&initial)));
    }

    let mut trace = InductionTrace::default();
    for t in 1..=tree.horizon() {
        let level = tree.nodes_at_depth(t - 1);
        for &n in level {
            // Value this position must have, from the previous step.
            let required = if t == 1 {
                initial.clone()
            } else {
                dot(strategy.incoming(tree, n), market.price(n))
            };
            let h = strategy.holding(n).expect("decision node");
            if !required.is_zero() || h.iter().any(|x| !x.is_zero()) {
                return Err(InductionError::Counterexample { time: t, node: n });
            }
        }
        trace.steps.push(InductionStep {
            time: t,
            nodes: level.len(),
            reason: if t == 1 {
                "zero initial value with positive prices"
            } else {
                "self-financing identity with zero carried position"
            },
        });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    pub(crate) fn example_two() -> Market {
        let third = ratio(1, 3);
        Market::one_period(
            vec![third.clone(), third.clone(), third],
            ints(&[1, 2, 7]),
            vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
        )
        .unwrap()
    }

    fn two_period() -> Market {
        let tree = ScenarioTree::uniform(&[2, 2]).unwrap();
        let prices = vec![
            ints(&[1, 4]),
            ints(&[1, 6]),
            ints(&[1, 3]),
            ints(&[1, 8]),
            ints(&[1, 5]),
            ints(&[1, 4]),
            ints(&[1, 2]),
        ];
        Market::new(tree, prices).unwrap()
    }

    #[test]
    fn buy_and_hold_is_self_financing() {
        let m = two_period();
        let s = Strategy::buy_and_hold(m.tree(), &ints(&[2, -1]));
        assert!(is_self_financing(&m, &s).unwrap().holds());
    }

    #[test]
    fn one_period_strategies_are_self_financing() {
        let m = example_two();
        let s = Strategy::buy_and_hold(m.tree(), &ints(&[3, 2, -1]));
        assert!(is_self_financing(&m, &s).unwrap().holds());
    }

    #[test]
    fn perturbed_rebalancing_is_reported() {
        let m = two_period();
        let tree = m.tree();
        // Valid: at node 1 switch everything into cash; then bump one coordinate.
        let s = Strategy::from_fn(tree, 2, |n| match n.0 {
            0 => ints(&[0, 1]),
            1 => vec![int(6) + int(1), int(0)],
            2 => ints(&[0, 1]),
            _ => unreachable!(),
        });
        match is_self_financing(&m, &s).unwrap() {
            SelfFinancing::Violated { node, incoming, outgoing } => {
                assert_eq!(node, NodeId(1));
                assert_eq!(incoming, int(6));
                assert_eq!(outgoing, int(7));
            }
            SelfFinancing::Yes => panic!("violation expected"),
        }
        assert!(matches!(
            portfolio_values(&m, &s),
            Err(MarketError::NotSelfFinancing { node: NodeId(1) })
        ));
    }

    #[test]
    fn example_two_values() {
        let m = example_two();
        let s = Strategy::buy_and_hold(m.tree(), &ints(&[3, 2, -1]));
        let v = portfolio_values(&m, &s).unwrap();
        assert_eq!(v.as_slice(), ints(&[0, 0, 0, 3]).as_slice());
        assert!(is_arbitrage(&m, &s).unwrap());
        let report = short_positions(m.tree(), &s);
        assert!(!report.is_long_only());
        assert_eq!(report.shorted_assets(), vec![2]);
        assert_eq!(report.shorts[0].quantity, int(-1));
        assert_eq!(report.shorts[0].time, 1);
    }

    #[test]
    fn zero_and_numeraire_strategies() {
        let m = example_two();
        let zero = Strategy::zero(m.tree(), 3);
        assert!(portfolio_values(&m, &zero).unwrap().as_slice().iter().all(Zero::is_zero));
        assert!(!is_arbitrage(&m, &zero).unwrap());
        assert!(short_positions(m.tree(), &zero).is_long_only());

        let cash = Market::new(ScenarioTree::uniform(&[2]).unwrap(), vec![ints(&[1]); 3]).unwrap();
        let hold = Strategy::buy_and_hold(cash.tree(), &ints(&[1]));
        assert!(portfolio_values(&cash, &hold).unwrap().as_slice().iter().all(|v| *v == int(1)));
    }

    #[test]
    fn example_one_short_leg() {
        let e = ratio(2718, 1000);
        let m = Market::one_period(
            vec![ratio(1, 2), ratio(1, 2)],
            ints(&[1, 1]),
            vec![vec![e.clone(), int(1)], vec![e, int(1)]],
        )
        .unwrap();
        let s = Strategy::buy_and_hold(m.tree(), &ints(&[1, -1]));
        assert!(is_arbitrage(&m, &s).unwrap());
        assert_eq!(short_positions(m.tree(), &s).shorted_assets(), vec![1]);
    }

    #[test]
    fn induction_trace_and_preconditions() {
        let m = two_period();
        let zero = Strategy::zero(m.tree(), 2);
        let trace = long_only_zero_start_is_zero(&m, &zero).unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[1].nodes, 2);

        let ex2 = example_two();
        let arb = Strategy::buy_and_hold(ex2.tree(), &ints(&[3, 2, -1]));
        assert!(matches!(
            long_only_zero_start_is_zero(&ex2, &arb),
            Err(InductionError::NotLongOnly { asset: 2, .. })
        ));
        let positive = Strategy::buy_and_hold(ex2.tree(), &ints(&[1, 0, 0]));
        assert!(matches!(
            long_only_zero_start_is_zero(&ex2, &positive),
            Err(InductionError::NonZeroInitialValue(_))
        ));
    }

    #[test]
    fn market_validation() {
        let tree = ScenarioTree::uniform(&[2]).unwrap();
        assert!(matches!(
            Market::new(tree.clone(), vec![ints(&[1]), ints(&[0]), ints(&[1])]),
            Err(MarketError::NonPositivePrice { asset: 0, .. })
        ));
        assert!(matches!(
            Market::new(tree.clone(), vec![ints(&[1]), ints(&[1, 2]), ints(&[1])]),
            Err(MarketError::PriceDimension { .. })
        ));
        assert!(matches!(Market::new(tree, vec![ints(&[1])]), Err(MarketError::PriceCount { .. })));
    }

    #[test]
    fn strategy_validation() {
        let m = example_two();
        let wrong_dim = Strategy::buy_and_hold(m.tree(), &ints(&[1, 1]));
        assert!(matches!(
            is_self_financing(&m, &wrong_dim),
            Err(MarketError::StrategyAssets { expected: 3, found: 2 })
        ));
        let leaf = BTreeMap::from([(NodeId(0), ints(&[1, 1, 1])), (NodeId(1), ints(&[1, 1, 1]))]);
        assert!(matches!(Strategy::new(m.tree(), 3, leaf), Err(MarketError::HoldingAtLeaf(_))));
        assert!(matches!(
            Strategy::new(m.tree(), 3, BTreeMap::new()),
            Err(MarketError::MissingHolding(NodeId(0)))
        ));
    }

    #[test]
    fn savings_account_is_depth_measurable() {
        let tree = ScenarioTree::uniform(&[2, 3]).unwrap();
        let b = savings_account_prices(&tree, &[int(1), ratio(11, 10), ratio(121, 100)]);
        let stock: Vec<Rational> = tree.node_ids().map(|n| int(n.0 as i64 + 1)).collect();
        let prices = b.into_iter().zip(stock).map(|(b, s)| vec![b, s]).collect();
        let m = Market::new(tree, prices).unwrap();
        assert!(m.is_depth_measurable(0));
        assert!(!m.is_depth_measurable(1));
    }
}
