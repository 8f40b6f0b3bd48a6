//! Why every arbitrage sells short: the long-only zero-cost LP has optimum 0,
//! and a long-only strategy started at zero stays zero.

use arbitrage_lab::arbitrage::long_only_zero_cost_mass;
use arbitrage_lab::market::{is_arbitrage, long_only_zero_start_is_zero, short_positions, Strategy};
use arbitrage_lab::random::{random_long_only, random_market, TreeShape};
use arbitrage_lab::rational::{int, ratio, Rational};
use arbitrage_lab::{detect_arbitrage, Market};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // An asset that grows for sure against one that stays flat.
    let grow = ratio(2718, 1000);
    let m = Market::one_period(
        vec![ratio(1, 2), ratio(1, 2)],
        vec![int(1), int(1)],
        vec![vec![grow.clone(), int(1)], vec![grow, int(1)]],
    )
    .unwrap();
    let delta = Strategy::buy_and_hold(m.tree(), &[int(1), int(-1)]);
    println!("(1, -1) is an arbitrage: {}", is_arbitrage(&m, &delta).unwrap());
    println!("shorted assets: {:?}", short_positions(m.tree(), &delta).shorted_assets());
    println!("best long-only zero-cost payoff mass: {}", long_only_zero_cost_mass(&m));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut with_arbitrage = 0;
    for _ in 0..200 {
        let m = random_market(&mut rng, TreeShape::default(), 4);
        if let Some(c) = detect_arbitrage(&m).arbitrage() {
            with_arbitrage += 1;
            assert!(!c.short_report.is_long_only());
        }
        let s = random_long_only(&mut rng, &m, &Rational::zero());
        let trace = long_only_zero_start_is_zero(&m, &s).unwrap();
        assert_eq!(trace.steps.len(), m.tree().horizon());
    }
    println!("200 random markets, {with_arbitrage} with arbitrage; every certificate shorts");
}
