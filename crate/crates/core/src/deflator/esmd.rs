use num_traits::{One, Zero};

use super::{Deflator, DeflatorError, DeflatorKind};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::Market;
use crate::rational::Rational;
use crate::scenario_tree::NodeId;

/// Supermartingale deflator with `Z(root) = 1`, built from one-step
/// densities `h` with `Σ_c p(c) h(c) S^i(c) <= S^i(n)` for every asset.
///
/// The density at each node is chosen lexicographically: first the smallest
/// entry is made as large as possible, then the total. The result is
/// deterministic and every entry is strictly positive. The kind is
/// `Martingale` when every asset condition holds with equality.
pub fn find_esmd(market: &Market) -> Result<Deflator, DeflatorError> {
    let tree = market.tree();
    let mut z = vec![Rational::one(); tree.len()];
    let mut tight = true;
    for node in tree.internal_nodes() {
        let h = one_step_super_density(market, node).ok_or(DeflatorError::Infeasible(node))?;
        let children = tree.children(node);
        let parent = z[node.0].clone();
        for (c, hc) in children.iter().zip(&h) {
            z[c.0] = &parent * hc;
        }
        tight &= (0..market.assets()).all(|i| {
            let priced: Rational = children
                .iter()
                .zip(&h)
                .map(|(c, hc)| tree.transition_prob(*c) * hc * &market.price(*c)[i])
                .sum();
            priced == market.price(node)[i]
        });
    }
    let kind = if tight {
        DeflatorKind::Martingale
    } else {
        DeflatorKind::Supermartingale
    };
    Ok(Deflator::new(z, kind))
}

fn one_step_super_density(market: &Market, node: NodeId) -> Option<Vec<Rational>> {
    let tree = market.tree();
    let children = tree.children(node);
    let k = children.len();
    let build = |floor: Option<&Rational>| {
        // Variables h_0..h_{k-1} and the floor τ.
        let mut lp = LinearProgram::new(k + 1);
        for i in 0..market.assets() {
            let mut row: Vec<Rational> = children
                .iter()
                .map(|c| tree.transition_prob(*c) * &market.price(*c)[i])
                .collect();
            row.push(Rational::zero());
            lp.constrain(row, Relation::Le, market.price(node)[i].clone());
        }
        for j in 0..k {
            let mut row = vec![Rational::zero(); k + 1];
            row[j] = Rational::one();
            row[k] = -Rational::one();
            lp.constrain(row, Relation::Ge, Rational::zero());
        }
        match floor {
            None => {
                let mut obj = vec![Rational::zero(); k + 1];
                obj[k] = Rational::one();
                lp.maximize(obj);
            }
            Some(tau) => {
                let mut fix = vec![Rational::zero(); k + 1];
                fix[k] = Rational::one();
                lp.constrain(fix, Relation::Eq, tau.clone());
                let mut obj = vec![Rational::one(); k + 1];
                obj[k] = Rational::zero();
                lp.maximize(obj);
            }
        }
        lp
    };
    let tau = match build(None).solve() {
        LpOutcome::Optimal { value, .. } if value > Rational::zero() => value,
        _ => return None,
    };
    match build(Some(&tau)).solve() {
        LpOutcome::Optimal { x, .. } => Some(x[..k].to_vec()),
        _ => None,
    }
}
