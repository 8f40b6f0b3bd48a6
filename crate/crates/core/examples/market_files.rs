//! Reading markets, strategies and deflators from JSON and writing them back.

use arbitrage_lab::deflator::find_esmd;
use arbitrage_lab::io::{deflator_to_json, market_to_json, parse_market, parse_strategy, strategy_to_json};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/three_state.json");
    let text = std::fs::read_to_string(path).unwrap();
    let m = parse_market(&text).unwrap();
    println!("{} nodes, {} assets", m.tree().len(), m.assets());

    let s = parse_strategy(r#"{"assets": 3, "holdings": {"0": ["3", "2", "-1"]}}"#, &m).unwrap();
    println!("{}", strategy_to_json(&s));
    println!("{}", deflator_to_json(&find_esmd(&m).unwrap()));

    let again = parse_market(&market_to_json(&m).to_string()).unwrap();
    assert_eq!(again.prices(), m.prices());

    match parse_market(&text[..text.len() / 2]) {
        Err(e) => println!("truncated input: {e}"),
        Ok(_) => unreachable!(),
    }
}
