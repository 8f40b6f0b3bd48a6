//! Classifying strategy sequences: arbitrage of the first kind and free lunch
//! with vanishing risk. Positive classifications short from a cutoff on.

use arbitrage_lab::arbitrage::classify_sequence;
use arbitrage_lab::market::Strategy;
use arbitrage_lab::rational::{int, ratio, Rational};
use arbitrage_lab::scenario_tree::NodeValues;
use arbitrage_lab::{Market, NodeId};

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn main() {
    let third = ratio(1, 3);
    let m = Market::one_period(
        vec![third.clone(), third.clone(), third],
        ints(&[1, 2, 7]),
        vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
    )
    .unwrap();
    let xi: NodeValues = [(NodeId(1), int(0)), (NodeId(2), int(0)), (NodeId(3), int(1))].into();

    // Cost 1/n, payoff at least (0, 0, 1).
    let first: Vec<Strategy> = (1..=30)
        .map(|n| Strategy::buy_and_hold(m.tree(), &[int(1) + ratio(1, n), ratio(2, 3), ratio(-1, 3)]))
        .collect();
    let v = classify_sequence(&m, &first, &xi, &ratio(1, 30)).unwrap();
    println!("{:?}, short from member {:?}, threshold {:?}", v.kind, v.cutoff_index, v.forcing_threshold.map(|r| r.to_string()));

    // Zero cost, shortfall (ξ - payoff)^+ shrinking like 1/n.
    let xi3: NodeValues = [(NodeId(1), int(0)), (NodeId(2), int(0)), (NodeId(3), int(3))].into();
    let flvr: Vec<Strategy> = (2..=20)
        .map(|n| Strategy::buy_and_hold(m.tree(), &[ratio(3 * (n - 1), n), ratio(2 * (n - 1), n), ratio(1 - n, n)]))
        .collect();
    let v = classify_sequence(&m, &flvr, &xi3, &ratio(1, 5)).unwrap();
    println!("{:?}, short from member {:?}, admissibility bound {}", v.kind, v.cutoff_index, v.admissibility_bound);
}
