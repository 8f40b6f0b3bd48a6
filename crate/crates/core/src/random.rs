//! Seeded generators of trees, markets and strategies for property checks
//! and batch experiments.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::market::{Market, Strategy};
use crate::rational::{int, ratio, Rational};
use crate::scenario_tree::{NodeId, ScenarioTree, TreeBuilder};

/// Shape limits for [`random_tree`].
#[derive(Debug, Clone, Copy)]
pub struct TreeShape {
    pub max_periods: usize,
    pub max_branching: usize,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            max_periods: 3,
            max_branching: 4,
        }
    }
}

fn weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..k).map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| ratio(x, total)).collect()
}

/// A tree with 1..=`max_periods` periods and 1..=`max_branching` children per
/// internal node, with random positive transition probabilities.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, shape: TreeShape) -> ScenarioTree {
    let horizon = rng.random_range(1..=shape.max_periods);
    let mut b = TreeBuilder::new();
    let mut frontier = vec![NodeId::ROOT];
    for _ in 0..horizon {
        let mut next = Vec::new();
        for parent in frontier {
            let k = rng.random_range(1..=shape.max_branching);
            for p in weights(rng, k) {
                next.push(b.add_child(parent, p));
            }
        }
        frontier = next;
    }
    b.build().expect("generated tree is valid")
}

fn positive_price<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    ratio(rng.random_range(1..=20), rng.random_range(1..=4))
}

/// Independent random positive prices; arbitrage is common.
pub fn random_prices<R: Rng + ?Sized>(rng: &mut R, tree: ScenarioTree, assets: usize) -> Market {
    let prices = (0..tree.len())
        .map(|_| (0..assets).map(|_| positive_price(rng)).collect())
        .collect();
    Market::new(tree, prices).expect("positive prices")
}

/// Prices built backwards from random terminal values with random positive
/// state prices, so a martingale deflator exists. Asset 0 is a savings
/// account with a random per-period discount.
pub fn arbitrage_free_market<R: Rng + ?Sized>(rng: &mut R, tree: ScenarioTree, assets: usize) -> Market {
    let mut prices: Vec<Vec<Rational>> = vec![Vec::new(); tree.len()];
    for &leaf in tree.leaves() {
        prices[leaf.0] = (0..assets).map(|_| positive_price(rng)).collect();
    }
    let horizon = tree.horizon();
    let discount: Vec<Rational> = (0..horizon).map(|_| ratio(rng.random_range(8..=10), 10)).collect();
    let mut savings = vec![int(1); horizon + 1];
    for t in (0..horizon).rev() {
        savings[t] = &savings[t + 1] * &discount[t];
    }
    for &leaf in tree.leaves() {
        if assets > 0 {
            prices[leaf.0][0] = savings[horizon].clone();
        }
    }
    for t in (0..horizon).rev() {
        for &n in tree.nodes_at_depth(t) {
            let children = tree.children(n);
            let q = weights(rng, children.len());
            prices[n.0] = (0..assets)
                .map(|i| {
                    let expected: Rational = children.iter().zip(&q).map(|(c, qc)| qc * &prices[c.0][i]).sum();
                    expected * &discount[t]
                })
                .collect();
        }
    }
    Market::new(tree, prices).expect("positive prices")
}

/// Half of the draws use [`random_prices`], half [`arbitrage_free_market`].
pub fn random_market<R: Rng + ?Sized>(rng: &mut R, shape: TreeShape, max_assets: usize) -> Market {
    let tree = random_tree(rng, shape);
    let assets = rng.random_range(1..=max_assets);
    if rng.random_bool(0.5) {
        random_prices(rng, tree, assets)
    } else {
        arbitrage_free_market(rng, tree, assets)
    }
}

fn small<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    ratio(rng.random_range(-6..=6), rng.random_range(1..=3))
}

/// Random self-financing strategy: free coordinates at every node, with the
/// last asset absorbing the difference from the incoming value.
pub fn random_self_financing<R: Rng + ?Sized>(rng: &mut R, market: &Market) -> Strategy {
    let tree = market.tree();
    let d = market.assets();
    let mut holdings: Vec<Option<Vec<Rational>>> = vec![None; tree.len()];
    for n in tree.nodes_by_depth() {
        if tree.is_leaf(n) {
            continue;
        }
        let mut h: Vec<Rational> = (0..d).map(|_| small(rng)).collect();
        if let Some(p) = tree.parent(n) {
            let price = market.price(n);
            let incoming = crate::rational::dot(holdings[p.0].as_ref().expect("parent first"), price);
            let partial = crate::rational::dot(&h[..d - 1], &price[..d - 1]);
            h[d - 1] = (incoming - partial) / &price[d - 1];
        }
        holdings[n.0] = Some(h);
    }
    Strategy::from_fn(tree, d, |n| holdings[n.0].take().expect("decision node"))
}

/// Long-only self-financing strategy with the given nonnegative initial
/// value: every node spreads its wealth over the assets with random
/// nonnegative weights.
pub fn random_long_only<R: Rng + ?Sized>(rng: &mut R, market: &Market, initial_value: &Rational) -> Strategy {
    assert!(!initial_value.is_negative(), "long-only wealth is nonnegative");
    let tree = market.tree();
    let d = market.assets();
    let mut holdings: Vec<Option<Vec<Rational>>> = vec![None; tree.len()];
    for n in tree.nodes_by_depth() {
        if tree.is_leaf(n) {
            continue;
        }
        let wealth = match tree.parent(n) {
            None => initial_value.clone(),
            Some(p) => crate::rational::dot(holdings[p.0].as_ref().expect("parent first"), market.price(n)),
        };
        let mut w: Vec<Rational> = (0..d).map(|_| int(rng.random_range(0..=4))).collect();
        if w.iter().all(Zero::is_zero) {
            w[rng.random_range(0..d)] = int(1);
        }
        let cost = crate::rational::dot(&w, market.price(n));
        let scale = wealth / cost;
        holdings[n.0] = Some(w.iter().map(|x| x * &scale).collect());
    }
    Strategy::from_fn(tree, d, |n| holdings[n.0].take().expect("decision node"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arbitrage::detect_arbitrage;
    use crate::market::{is_long_only, is_self_financing, portfolio_values};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_market(&mut rng, TreeShape::default(), 4);
            assert!(m.tree().horizon() <= 3);
            let s = random_self_financing(&mut rng, &m);
            assert!(is_self_financing(&m, &s).unwrap().holds());
            let l = random_long_only(&mut rng, &m, &int(3));
            assert!(is_long_only(&l));
            assert_eq!(portfolio_values(&m, &l).unwrap().initial(), &int(3));
        }
    }

    #[test]
    fn constructed_markets_are_arbitrage_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let tree = random_tree(&mut rng, TreeShape::default());
            let m = arbitrage_free_market(&mut rng, tree, 3);
            assert!(!detect_arbitrage(&m).is_arbitrage());
            assert!(m.is_depth_measurable(0));
        }
    }
}
