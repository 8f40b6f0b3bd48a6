//! Exact arbitrage detection on a three-state market, with both certificates
//! and the full cone of one-period arbitrages.

use arbitrage_lab::rational::{int, ratio, Rational, Vector};
use arbitrage_lab::{arbitrage_cone, detect_arbitrage, Market, Verdict};

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn main() {
    let third = ratio(1, 3);
    let market = Market::one_period(
        vec![third.clone(), third.clone(), third],
        ints(&[1, 2, 7]),
        vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
    )
    .unwrap();

    match detect_arbitrage(&market) {
        Verdict::Arbitrage(cert) => {
            println!("arbitrage, verified: {}", cert.verify(&market));
            println!("ray: {}", Vector(cert.ray.as_ref().unwrap()));
            for s in &cert.short_report.shorts {
                println!("short {} of asset {} at node {}", s.quantity, s.asset, s.node);
            }
        }
        Verdict::NoArbitrage(cert) => println!("state prices: {}", Vector(cert.root_state_prices().unwrap())),
    }

    let cone = arbitrage_cone(&market).unwrap();
    for r in &cone.rays {
        println!("extreme ray {}", Vector(r));
    }

    // Raise the third asset's price by one: now fairly priced.
    let fair = Market::one_period(
        vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        ints(&[1, 2, 8]),
        vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
    )
    .unwrap();
    if let Verdict::NoArbitrage(cert) = detect_arbitrage(&fair) {
        println!("repriced market: state prices {}", Vector(cert.root_state_prices().unwrap()));
    }
}
