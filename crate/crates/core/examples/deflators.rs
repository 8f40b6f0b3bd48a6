//! Supermartingale deflators, their verification on portfolios, and the
//! change of numeraire.

use arbitrage_lab::deflator::{find_esmd, numeraire_identity_check, to_discounted, to_wealth_plan, verify_deflator, wealth_process};
use arbitrage_lab::random::{arbitrage_free_market, random_long_only, random_self_financing, random_tree, TreeShape};
use arbitrage_lab::rational::{int, ratio, Rational, Vector};
use arbitrage_lab::Market;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

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
    let z = find_esmd(&m).unwrap();
    println!("{:?} deflator {}", z.kind, Vector(z.values()));
    for v in z.asset_violations(&m) {
        println!("  asset {} is a strict supermartingale at node {}", v.asset, v.node);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let portfolios: Vec<_> = (0..50).map(|k| random_long_only(&mut rng, &m, &int(k % 3))).collect();
    let report = verify_deflator(&m, &z, &portfolios);
    println!("50 long-only portfolios deflate to supermartingales: {}", report.passed());

    // A two-period market priced by construction; change numeraire to asset 1.
    let tree = random_tree(&mut rng, TreeShape { max_periods: 2, max_branching: 3 });
    let market: Market = arbitrage_free_market(&mut rng, tree, 3);
    let delta = random_self_financing(&mut rng, &market);
    let disc = to_discounted(&market, 1).unwrap();
    let plan = to_wealth_plan(&disc, &delta).unwrap();
    println!("identity under numeraire 1: {}", numeraire_identity_check(&market, 1, &delta).unwrap());
    println!("initial discounted wealth {}, wealth at leaves:", plan.x);
    let wealth = wealth_process(&disc, &plan).unwrap();
    for leaf in market.tree().leaves() {
        println!("  node {leaf}: {}", wealth[leaf.0]);
    }
}
