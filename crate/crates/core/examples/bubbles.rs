//! Bubbles on a tree: detection by superreplication, conversion into an
//! arbitrage, and the construction from a deflator.

use arbitrage_lab::deflator::{
    bubble_sufficient_construction, bubble_to_arbitrage, cheapest_superreplication, detect_bubble, BubbleWitness,
    Deflator, DeflatorKind,
};
use arbitrage_lab::rational::{int, ratio, Rational};
use arbitrage_lab::Market;

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn main() {
    // Asset 1 costs 2 today and pays 1 in both states; two units of asset 0 always pay at least 2.
    let m = Market::one_period(vec![ratio(1, 2), ratio(1, 2)], ints(&[1, 2]), vec![ints(&[1, 1]), ints(&[2, 1])]).unwrap();
    let first = detect_bubble(&m).expect("bubble");
    println!("first bubble found: asset {}, gap {}", first.asset, first.gap);

    let (dominating, cost) = cheapest_superreplication(&m, 1);
    println!("asset 1 costs 2, superreplicated for {cost}");
    let w = BubbleWitness::new(&m, 1, dominating).unwrap();
    let cert = bubble_to_arbitrage(&m, &w).unwrap();
    println!("exploit holds {:?}, shorting assets {:?}", cert.strategy.holding(m.tree().root()).unwrap().iter().map(|q| q.to_string()).collect::<Vec<_>>(), cert.short_report.shorted_assets());

    // With the unit deflator, E[S^1_T] = 1 < 2 and the conditional value is replicable.
    let binomial = Market::one_period(vec![ratio(1, 2), ratio(1, 2)], ints(&[1, 3]), vec![ints(&[1, 2]), ints(&[1, 2])]).unwrap();
    let z = Deflator::unit(&binomial, DeflatorKind::Supermartingale);
    let outcome = bubble_sufficient_construction(&binomial, &z, 1).unwrap();
    println!("{}", serde_json::to_string(&outcome).unwrap());
}
