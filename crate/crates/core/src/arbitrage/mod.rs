//! Exact arbitrage detection and certification.
//!
//! [`detect_arbitrage`] decides the no-arbitrage property of a finite market
//! exactly and returns one of two independently checkable certificates:
//!
//! * an [`ArbitrageCertificate`]: a self-financing strategy with zero initial
//!   value and nonnegative, nonzero terminal value, together with its short
//!   positions (never empty: a long-only arbitrage cannot exist when prices
//!   are positive);
//! * a [`NoArbitrageCertificate`]: strictly positive one-step state prices at
//!   every decision node, assembled into a martingale deflator.
//!
//! Each decision node is examined as a one-period market with the LP
//!
//! ```text
//! maximize   Σ_c δ·S(c)
//! subject to δ·S(n) = 0,  δ·S(c) >= 0 for every child c,  Σ_c δ·S(c) <= 1
//! ```
//!
//! whose optimum is 1 exactly when the node admits an arbitrage. With
//! strictly positive prices a multi-period market admits an arbitrage iff some
//! node does; the one-step strategy is lifted to the whole tree by holding
//! nothing elsewhere and parking the proceeds in asset 0 after the window.

mod cone;
mod sequence;

pub use cone::{arbitrage_cone, ArbitrageCone, ConeError, MAX_CONE_ASSETS, MAX_CONE_STATES};
pub use sequence::{classify_sequence, SequenceError, SequenceKind, SequenceVerdict};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::deflator::{Deflator, DeflatorKind};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::{
    self, portfolio_values, short_positions, Market, MarketError, PortfolioValues, ShortReport, Strategy,
};
use crate::rational::{self, dot, Rational};
use crate::scenario_tree::NodeId;
use crate::tree_lp::StrategyLayout;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertificateError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("strategy is not an arbitrage")]
    NotArbitrage,
    /// Would contradict the short-selling theorem; never expected.
    #[error("long-only arbitrage encountered; this contradicts positivity of prices")]
    LongOnlyArbitrage,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArbitrageCertificate {
    #[serde(serialize_with = "crate::io::serialize_strategy")]
    pub strategy: Strategy,
    pub values: PortfolioValues,
    pub short_report: ShortReport,
    /// A leaf where the terminal value is strictly positive.
    pub witness_leaf: NodeId,
    /// Decision node whose one-step market carries the arbitrage, when the
    /// certificate came from the node-wise search.
    pub window: Option<NodeId>,
    /// The one-step position at `window`, scaled to coprime integers.
    #[serde(serialize_with = "crate::io::serialize_opt_rationals")]
    pub ray: Option<Vec<Rational>>,
}

impl ArbitrageCertificate {
    /// Validates `strategy` as an arbitrage and records its short positions.
    pub fn new(market: &Market, strategy: Strategy) -> Result<Self, CertificateError> {
        let values = portfolio_values(market, &strategy)?;
        if !market::values_are_arbitrage(market.tree(), &values) {
            return Err(CertificateError::NotArbitrage);
        }
        let short_report = short_positions(market.tree(), &strategy);
        if short_report.is_long_only() {
            return Err(CertificateError::LongOnlyArbitrage);
        }
        let witness_leaf = values
            .terminal(market.tree())
            .find(|(_, v)| v.is_positive())
            .map(|(n, _)| n)
            .expect("arbitrage has a positive leaf");
        Ok(ArbitrageCertificate {
            strategy,
            values,
            short_report,
            witness_leaf,
            window: None,
            ray: None,
        })
    }

    /// Re-checks the certificate from scratch against `market`.
    pub fn verify(&self, market: &Market) -> bool {
        match portfolio_values(market, &self.strategy) {
            Ok(values) => {
                values == self.values
                    && market::values_are_arbitrage(market.tree(), &values)
                    && values.at(self.witness_leaf).is_positive()
                    && short_positions(market.tree(), &self.strategy) == self.short_report
                    && !self.short_report.is_long_only()
            }
            Err(_) => false,
        }
    }
}

/// Strictly positive state prices for one decision node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneStepDensity {
    pub node: NodeId,
    pub children: Vec<NodeId>,
    /// Density with respect to the transition probabilities.
    #[serde(serialize_with = "crate::io::serialize_rationals")]
    pub density: Vec<Rational>,
    /// `q(c) = p(c) * density(c)`; `Σ_c q(c) S(c) = S(node)`.
    #[serde(serialize_with = "crate::io::serialize_rationals")]
    pub state_prices: Vec<Rational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoArbitrageCertificate {
    pub one_step: Vec<OneStepDensity>,
    /// Martingale deflator built from the one-step densities, `Z(root) = 1`.
    pub deflator: Deflator,
}

impl NoArbitrageCertificate {
    /// State prices at the root of a one-period market.
    pub fn root_state_prices(&self) -> Option<&[Rational]> {
        self.one_step.first().map(|d| d.state_prices.as_slice())
    }

    pub fn verify(&self, market: &Market) -> bool {
        let tree = market.tree();
        let decision: Vec<NodeId> = tree.internal_nodes().collect();
        if self.one_step.len() != decision.len() {
            return false;
        }
        let pricing_ok = self.one_step.iter().zip(&decision).all(|(d, &n)| {
            d.node == n
                && d.children == tree.children(n)
                && d.state_prices.iter().all(Signed::is_positive)
                && (0..market.assets()).all(|i| {
                    let priced: Rational = d
                        .children
                        .iter()
                        .zip(&d.state_prices)
                        .map(|(c, q)| q * &market.price(*c)[i])
                        .sum();
                    priced == market.price(n)[i]
                })
        });
        pricing_ok && self.deflator.is_martingale_for(market)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Arbitrage(ArbitrageCertificate),
    NoArbitrage(NoArbitrageCertificate),
}

impl Verdict {
    pub fn is_arbitrage(&self) -> bool {
        matches!(self, Verdict::Arbitrage(_))
    }

    pub fn arbitrage(&self) -> Option<&ArbitrageCertificate> {
        match self {
            Verdict::Arbitrage(c) => Some(c),
            Verdict::NoArbitrage(_) => None,
        }
    }

    pub fn no_arbitrage(&self) -> Option<&NoArbitrageCertificate> {
        match self {
            Verdict::NoArbitrage(c) => Some(c),
            Verdict::Arbitrage(_) => None,
        }
    }

    pub fn verify(&self, market: &Market) -> bool {
        match self {
            Verdict::Arbitrage(c) => c.verify(market),
            Verdict::NoArbitrage(c) => c.verify(market),
        }
    }
}

/// Normalized one-step arbitrage at a decision node: zero cost, payoffs
/// nonnegative and summing to exactly 1. `None` when the node is free of
/// arbitrage.
pub fn one_step_arbitrage(market: &Market, node: NodeId) -> Option<Vec<Rational>> {
    let tree = market.tree();
    let d = market.assets();
    let children = tree.children(node);
    let mut lp = LinearProgram::new(d);
    lp.set_all_free();
    let total: Vec<Rational> = (0..d)
        .map(|i| children.iter().map(|c| market.price(*c)[i].clone()).sum())
        .collect();
    lp.maximize(total.clone())
        .constrain(market.price(node).to_vec(), Relation::Eq, Rational::zero())
        .constrain(total, Relation::Le, Rational::one());
    for c in children {
        lp.constrain(market.price(*c).to_vec(), Relation::Ge, Rational::zero());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            debug_assert!(value.is_one());
            Some(x)
        }
        LpOutcome::Optimal { .. } => None,
        other => unreachable!("arbitrage LP is feasible (δ = 0) and bounded, got {other:?}"),
    }
}

/// Max-min state density at a decision node: maximizes the smallest density
/// value subject to `Σ_c p(c) h(c) S(c) = S(node)`, `h >= 0`. Returns the
/// density when its minimum is strictly positive.
pub fn one_step_density(market: &Market, node: NodeId) -> Option<OneStepDensity> {
    let tree = market.tree();
    let children = tree.children(node).to_vec();
    let k = children.len();
    // Variables: h_0..h_{k-1}, then the floor τ.
    let mut lp = LinearProgram::new(k + 1);
    lp.set_free(k);
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    lp.maximize(objective);
    for i in 0..market.assets() {
        let mut row: Vec<Rational> = children
            .iter()
            .map(|c| tree.transition_prob(*c) * &market.price(*c)[i])
            .collect();
        row.push(Rational::zero());
        lp.constrain(row, Relation::Eq, market.price(node)[i].clone());
    }
    for j in 0..k {
        let mut row = vec![Rational::zero(); k + 1];
        row[j] = Rational::one();
        row[k] = -Rational::one();
        lp.constrain(row, Relation::Ge, Rational::zero());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let density = x[..k].to_vec();
            let state_prices = children
                .iter()
                .zip(&density)
                .map(|(c, h)| tree.transition_prob(*c) * h)
                .collect();
            Some(OneStepDensity {
                node,
                children,
                density,
                state_prices,
            })
        }
        _ => None,
    }
}

/// Embeds a one-step arbitrage at `node` into a strategy on the full tree:
/// zero before and beside the window, and the child values parked in asset 0
/// (buy-and-hold) after it.
pub fn lift_one_step(market: &Market, node: NodeId, position: &[Rational]) -> Strategy {
    let tree = market.tree();
    let d = market.assets();
    let window_depth = tree.depth(node);
    Strategy::from_fn(tree, d, |m| {
        let depth = tree.depth(m);
        if m == node {
            return position.to_vec();
        }
        if depth > window_depth && tree.ancestor_at_depth(m, window_depth) == node {
            let child = tree.ancestor_at_depth(m, window_depth + 1);
            let value = dot(position, market.price(child));
            let mut h = vec![Rational::zero(); d];
            h[0] = value / &market.price(child)[0];
            return h;
        }
        vec![Rational::zero(); d]
    })
}

/// Exact decision of the no-arbitrage property with a certificate either way.
pub fn detect_arbitrage(market: &Market) -> Verdict {
    let tree = market.tree();
    let mut one_step = Vec::new();
    for node in tree.internal_nodes() {
        if let Some(position) = one_step_arbitrage(market, node) {
            let strategy = lift_one_step(market, node, &position);
            let mut cert = match ArbitrageCertificate::new(market, strategy) {
                Ok(c) => c,
                Err(e) => panic!("lifted one-step arbitrage at {node} failed validation: {e}"),
            };
            cert.window = Some(node);
            cert.ray = Some(rational::primitive_integer_vector(&position));
            return Verdict::Arbitrage(cert);
        }
        match one_step_density(market, node) {
            Some(d) => one_step.push(d),
            None => panic!("{node}: neither an arbitrage nor a positive state density; LP duality violated"),
        }
    }
    let deflator = martingale_deflator(market, &one_step);
    Verdict::NoArbitrage(NoArbitrageCertificate { one_step, deflator })
}

fn martingale_deflator(market: &Market, one_step: &[OneStepDensity]) -> Deflator {
    let tree = market.tree();
    let mut z = vec![Rational::one(); tree.len()];
    for d in one_step {
        let parent = z[d.node.0].clone();
        for (c, h) in d.children.iter().zip(&d.density) {
            z[c.0] = &parent * h;
        }
    }
    Deflator::new(z, DeflatorKind::Martingale)
}

/// Largest `Σ δ` over long-only self-financing strategies with zero initial
/// value, capped at 1. Zero means the only such strategy is `δ = 0`.
pub fn long_only_zero_cost_mass(market: &Market) -> Rational {
    let lp = long_only_program(market, None);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("δ = 0 is feasible and the cap bounds the program, got {other:?}"),
    }
}

/// Whole-tree LP over long-only holdings with the self-financing identities
/// and zero initial value, maximizing `weights · δ` (all ones by default)
/// under the cap `weights · δ <= 1`.
pub(crate) fn long_only_program(market: &Market, weights: Option<&[Rational]>) -> LinearProgram {
    let layout = StrategyLayout::new(market);
    let nv = layout.n_vars();
    let mut lp = LinearProgram::new(nv);
    let objective = match weights {
        Some(w) => w.to_vec(),
        None => vec![Rational::one(); nv],
    };
    lp.maximize(objective.clone());
    lp.constrain(objective, Relation::Le, Rational::one());
    lp.constrain(layout.value_row(market.tree().root()), Relation::Eq, Rational::zero());
    layout.constrain_self_financing(&mut lp);
    lp
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn example_two_certificate() {
        let m = example_two();
        let verdict = detect_arbitrage(&m);
        let cert = verdict.arbitrage().expect("arbitrage");
        assert_eq!(cert.ray.as_deref(), Some(ints(&[3, 2, -1]).as_slice()));
        assert_eq!(cert.strategy.holding(NodeId::ROOT).unwrap(), &[int(1), ratio(2, 3), ratio(-1, 3)]);
        assert_eq!(cert.short_report.shorted_assets(), vec![2]);
        assert_eq!(cert.witness_leaf, NodeId(3));
        assert!(cert.verify(&m));
    }

    #[test]
    fn unit_numeraire_has_physical_density() {
        let tree = ScenarioTree::one_period(vec![ratio(1, 6), ratio(1, 2), ratio(1, 3)]).unwrap();
        let m = Market::new(tree, vec![ints(&[1]); 4]).unwrap();
        let verdict = detect_arbitrage(&m);
        let cert = verdict.no_arbitrage().expect("no arbitrage");
        assert_eq!(cert.root_state_prices().unwrap(), &[ratio(1, 6), ratio(1, 2), ratio(1, 3)]);
        assert!(cert.one_step[0].density.iter().all(|h| h.is_one()));
        assert!(cert.verify(&m));
    }

    #[test]
    fn multi_period_lift_at_inner_node() {
        // Node 1 carries the three-state one-step market; the root step is arbitrage-free.
        let mut b = crate::scenario_tree::TreeBuilder::new();
        let up = b.add_child(NodeId::ROOT, ratio(1, 2));
        let down = b.add_child(NodeId::ROOT, ratio(1, 2));
        for _ in 0..3 {
            b.add_child(up, ratio(1, 3));
        }
        for _ in 0..3 {
            b.add_child(down, ratio(1, 3));
        }
        let tree = b.build().unwrap();
        let prices = vec![
            ints(&[1, 2, 7]),
            ints(&[1, 2, 7]),
            ints(&[1, 2, 7]),
            ints(&[1, 3, 9]),
            ints(&[1, 1, 5]),
            ints(&[1, 5, 10]),
            ints(&[1, 2, 7]),
            ints(&[1, 2, 7]),
            ints(&[1, 2, 7]),
        ];
        let m = Market::new(tree, prices).unwrap();
        let cert = detect_arbitrage(&m).arbitrage().cloned().expect("arbitrage");
        assert_eq!(cert.window, Some(up));
        assert!(cert.strategy.holding(NodeId::ROOT).unwrap().iter().all(Zero::is_zero));
        assert!(cert.verify(&m));
    }

    #[test]
    fn two_period_lift_parks_proceeds() {
        // Root step is dominated (asset 1 beats asset 0 in both states).
        let tree = ScenarioTree::uniform(&[2, 2]).unwrap();
        let prices = vec![
            ints(&[1, 1]),
            ints(&[1, 2]),
            ints(&[1, 3]),
            ints(&[1, 2]),
            ints(&[1, 2]),
            ints(&[1, 3]),
            ints(&[1, 3]),
        ];
        let m = Market::new(tree, prices).unwrap();
        let cert = detect_arbitrage(&m).arbitrage().cloned().expect("arbitrage");
        assert_eq!(cert.window, Some(NodeId::ROOT));
        assert_eq!(cert.ray.as_deref(), Some(ints(&[-1, 1]).as_slice()));
        // After the window everything is held in asset 0, long.
        for n in [NodeId(1), NodeId(2)] {
            let h = cert.strategy.holding(n).unwrap();
            assert!(h[0].is_positive() && h[1].is_zero());
        }
        assert!(cert.verify(&m));
    }

    #[test]
    fn long_only_mass_is_zero() {
        assert!(long_only_zero_cost_mass(&example_two()).is_zero());
    }

    #[test]
    fn certificate_rejects_non_arbitrage() {
        let m = example_two();
        let s = Strategy::buy_and_hold(m.tree(), &ints(&[1, 0, 0]));
        assert_eq!(ArbitrageCertificate::new(&m, s).unwrap_err(), CertificateError::NotArbitrage);
    }
}
