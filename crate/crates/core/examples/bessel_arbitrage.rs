//! The explicit short-selling arbitrage in the Bessel(3) market, and the
//! decay of E[1/S_t]. Usage: `bessel_arbitrage [paths] [steps]`.

use arbitrage_lab::continuous::{arbitrage_report, inverse_deflator_decay, simulate_bessel3, ExplicitBesselArbitrage, SimConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let cfg = SimConfig {
        n_paths: args.next().unwrap_or(20_000),
        n_steps: args.next().unwrap_or(512),
        ..SimConfig::default()
    };
    let e = simulate_bessel3(cfg).unwrap();
    let k = ExplicitBesselArbitrage::for_ensemble(&e).unwrap();
    let r = arbitrage_report(&e, &k);
    println!("v_0 = {}, v_T in [{}, {}]", r.initial_abs_max, r.terminal_min, r.terminal_max);
    println!("lowest value {:.4}; short in the savings account on [0, {}] for 99% of paths", r.min_value, r.short_interval(0.99));

    let decay = inverse_deflator_decay(&e, -1.0);
    for (t, s) in e.times().iter().zip(&decay).step_by(cfg.n_steps / 4) {
        println!("E[1/S_{t:.2}] = {:.4} ± {:.4}", s.estimate, s.std_error);
    }
}
