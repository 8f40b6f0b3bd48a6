//! Variable layout shared by the whole-tree strategy programs.

use num_traits::Zero;

use crate::lp::{LinearProgram, Relation};
use crate::market::{Market, Strategy};
use crate::rational::Rational;
use crate::scenario_tree::NodeId;

/// One block of `d` holding variables per decision node, breadth-first.
pub(crate) struct StrategyLayout<'a> {
    market: &'a Market,
    decision: Vec<NodeId>,
    block: Vec<usize>,
}

impl<'a> StrategyLayout<'a> {
    pub fn new(market: &'a Market) -> Self {
        let tree = market.tree();
        let decision: Vec<NodeId> = tree.internal_nodes().collect();
        let mut block = vec![usize::MAX; tree.len()];
        for (k, n) in decision.iter().enumerate() {
            block[n.0] = k;
        }
        StrategyLayout {
            market,
            decision,
            block,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.decision.len() * self.market.assets()
    }

    fn zeros(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.n_vars()]
    }

    /// Coefficients of the portfolio value `S^ϑ(node)`.
    pub fn value_row(&self, node: NodeId) -> Vec<Rational> {
        let tree = self.market.tree();
        let d = self.market.assets();
        let holder = tree.parent(node).unwrap_or(node);
        let k = self.block[holder.0];
        let mut row = self.zeros();
        row[k * d..(k + 1) * d].clone_from_slice(self.market.price(node));
        row
    }

    /// Adds `δ_t(parent(n))·S(n) = δ_{t+1}(n)·S(n)` for every non-root decision node.
    pub fn constrain_self_financing(&self, lp: &mut LinearProgram) {
        let d = self.market.assets();
        for &n in self.decision.iter().skip(1) {
            let mut row = self.value_row(n);
            let k = self.block[n.0];
            for i in 0..d {
                row[k * d + i] -= &self.market.price(n)[i];
            }
            lp.constrain(row, Relation::Eq, Rational::zero());
        }
    }

    pub fn strategy(&self, x: &[Rational]) -> Strategy {
        let d = self.market.assets();
        Strategy::from_fn(self.market.tree(), d, |n| {
            let k = self.block[n.0];
            x[k * d..(k + 1) * d].to_vec()
        })
    }
}
