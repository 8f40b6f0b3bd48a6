//! Acceptance gate. Every criterion prints one `PASS`/`FAIL` line (written to
//! the raw stderr handle so it shows up without `--nocapture`) and then
//! asserts. Tolerances and budgets are pinned below.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use arbitrage_lab::arbitrage::{arbitrage_cone, long_only_zero_cost_mass};
use arbitrage_lab::continuous::{arbitrage_report, simulate_bessel3, simulate_squared_bessel4, ExplicitBesselArbitrage, McStatistic, PathEnsemble, Running, SimConfig};
use arbitrage_lab::deflator::{
    bubble_to_arbitrage, detect_bubble, find_esmd, from_wealth_plan, numeraire_identity_check, to_discounted,
    to_wealth_plan, verify_deflator, wealth_process,
};
use arbitrage_lab::market::{is_arbitrage, is_long_only, portfolio_values, Strategy};
use arbitrage_lab::random::{random_long_only, random_market, random_self_financing, TreeShape};
use arbitrage_lab::rational::{int, ratio, Rational};
use arbitrage_lab::{detect_arbitrage, Market};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;
const RANDOM_MARKETS: usize = 10_000;
const NUMERAIRE_PAIRS: usize = 1_000;
const DEFLATOR_TREES: usize = 200;
const PORTFOLIOS_PER_TREE: usize = 100;
const BUBBLE_MARKETS: usize = 2_000;
const PATHS: usize = 100_000;
const STEPS: usize = 1024;
const TERMINAL_TOL: f64 = 1e-10;
const STD_ERRORS: f64 = 4.0;
const DECREASE_BAND: f64 = 3.0;
const SHORT_FREQUENCY: f64 = 0.99;

fn report(criterion: u32, title: &str, ok: bool, detail: &str) {
    let line = format!(
        "acceptance {criterion}: {} {title} ({detail})\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn gate(criterion: u32, title: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => report(criterion, title, true, &detail),
        Err(detail) => {
            report(criterion, title, false, &detail);
            panic!("criterion {criterion} failed: {detail}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:?}, budget {budget:?}"))?;
    Ok(t)
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn markets(seed: u64) -> impl Iterator<Item = (Market, ChaCha8Rng)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::from_fn(move || {
        let m = random_market(&mut rng, TreeShape::default(), 4);
        let child = ChaCha8Rng::seed_from_u64(rng.random());
        Some((m, child))
    })
}

#[test]
fn criterion_1_three_state_market() {
    gate(1, "three-state market: arbitrage and single ray (3,2,-1)", (|| {
        let start = Instant::now();
        let third = ratio(1, 3);
        let m = Market::one_period(
            vec![third.clone(), third.clone(), third],
            ints(&[1, 2, 7]),
            vec![ints(&[1, 3, 9]), ints(&[1, 1, 5]), ints(&[1, 5, 10])],
        )
        .unwrap();
        let verdict = detect_arbitrage(&m);
        let cert = verdict.arbitrage().ok_or("no arbitrage certificate")?;
        ensure(verdict.verify(&m), || "certificate does not verify".into())?;
        let cone = arbitrage_cone(&m).map_err(|e| e.to_string())?;
        ensure(cone.rays == [ints(&[3, 2, -1])], || format!("rays {:?}", cone.rays))?;
        ensure(cone.lineality.is_empty(), || "unexpected zero-payoff directions".into())?;
        ensure(cert.short_report.shorted_assets() == [2], || "short is not in the third asset".into())?;
        let t = within_budget(start, Duration::from_secs(1))?;
        Ok(format!("exact, {t:?}"))
    })());
}

#[test]
fn criterion_2_arbitrage_requires_shorting() {
    gate(2, "every arbitrage certificate shorts; long-only zero-cost LP gives 0", (|| {
        let start = Instant::now();
        let mut arbitrages = 0;
        for (k, (m, _)) in markets(SEED).take(RANDOM_MARKETS).enumerate() {
            ensure(m.assets() <= 4 && m.tree().horizon() <= 3, || format!("market {k} outside the shape"))?;
            let verdict = detect_arbitrage(&m);
            if let Some(c) = verdict.arbitrage() {
                arbitrages += 1;
                ensure(!c.short_report.is_long_only(), || format!("market {k}: long-only certificate"))?;
                ensure(is_arbitrage(&m, &c.strategy).unwrap(), || format!("market {k}: not an arbitrage"))?;
            }
            let mass = long_only_zero_cost_mass(&m);
            ensure(mass.is_zero(), || format!("market {k}: long-only mass {mass}"))?;
        }
        let t = within_budget(start, Duration::from_secs(300))?;
        Ok(format!("{RANDOM_MARKETS} markets, {arbitrages} with arbitrage, 0 failures, {t:?}"))
    })());
}

#[test]
fn criterion_3_long_only_zero_start() {
    gate(3, "long-only self-financing strategies with zero start are zero", (|| {
        for (k, (m, mut rng)) in markets(SEED + 3).take(RANDOM_MARKETS).enumerate() {
            let s = random_long_only(&mut rng, &m, &Rational::zero());
            let v = portfolio_values(&m, &s).map_err(|e| e.to_string())?;
            ensure(v.as_slice().iter().all(Zero::is_zero), || format!("strategy {k} has a nonzero value"))?;
        }
        Ok(format!("{RANDOM_MARKETS} strategies, 0 failures"))
    })());
}

#[test]
fn criterion_4_numeraire_identities() {
    gate(4, "change-of-numeraire identity and wealth round trip", (|| {
        let mut checks = 0;
        for (k, (m, mut rng)) in markets(SEED + 4).take(NUMERAIRE_PAIRS).enumerate() {
            let s = random_self_financing(&mut rng, &m);
            let values = portfolio_values(&m, &s).map_err(|e| e.to_string())?;
            for num in 0..m.assets() {
                ensure(numeraire_identity_check(&m, num, &s).unwrap(), || format!("pair {k}, numeraire {num}"))?;
                let disc = to_discounted(&m, num).map_err(|e| e.to_string())?;
                let plan = to_wealth_plan(&disc, &s).map_err(|e| e.to_string())?;
                let wealth = wealth_process(&disc, &plan).map_err(|e| e.to_string())?;
                for n in m.tree().node_ids() {
                    ensure(wealth[n.0] == values.at(n) / &m.price(n)[num], || format!("pair {k}: wealth at {n}"))?;
                }
                ensure(from_wealth_plan(&disc, &plan).unwrap() == s, || format!("pair {k}: round trip"))?;
                checks += 1;
            }
        }
        Ok(format!("{NUMERAIRE_PAIRS} pairs, {checks} numeraire choices, exact"))
    })());
}

#[test]
fn criterion_5_supermartingale_deflator() {
    gate(5, "supermartingale deflator exists and covers long-only portfolios", (|| {
        for (k, (m, mut rng)) in markets(SEED + 5).take(DEFLATOR_TREES).enumerate() {
            let z = find_esmd(&m).map_err(|e| format!("tree {k}: {e}"))?;
            let portfolios: Vec<Strategy> = (0..PORTFOLIOS_PER_TREE)
                .map(|_| {
                    let x0 = ratio(rng.random_range(0..=12), 3);
                    random_long_only(&mut rng, &m, &x0)
                })
                .collect();
            let r = verify_deflator(&m, &z, &portfolios);
            ensure(r.positive && r.asset_violations.is_empty(), || format!("tree {k}: asset-wise check failed"))?;
            ensure(r.passed() && r.checked_portfolios() == PORTFOLIOS_PER_TREE, || format!("tree {k}: portfolio check failed"))?;
        }
        Ok(format!("{DEFLATOR_TREES} trees, {PORTFOLIOS_PER_TREE} portfolios each, exact"))
    })());
}

#[test]
fn criterion_6_bubble_pipeline() {
    gate(6, "every bubble converts into a shorting arbitrage", (|| {
        let mut witnesses = 0;
        for (k, (m, _)) in markets(SEED + 6).take(BUBBLE_MARKETS).enumerate() {
            if let Some(w) = detect_bubble(&m) {
                witnesses += 1;
                let cert = bubble_to_arbitrage(&m, &w).map_err(|e| format!("market {k}: {e}"))?;
                ensure(is_arbitrage(&m, &cert.strategy).unwrap(), || format!("market {k}: not an arbitrage"))?;
                ensure(!is_long_only(&cert.strategy), || format!("market {k}: long-only"))?;
            }
        }
        ensure(witnesses > 0, || "no bubble among the random markets".into())?;
        Ok(format!("{BUBBLE_MARKETS} markets, {witnesses} witnesses, exact"))
    })());
}

fn bessel_config() -> SimConfig {
    SimConfig {
        n_paths: PATHS,
        n_steps: STEPS,
        seed: SEED,
        ..SimConfig::default()
    }
}

#[test]
fn criterion_7_bessel_arbitrage() {
    gate(7, "Bessel(3) explicit arbitrage", (|| {
        let start = Instant::now();
        let target = 1.0 / common::phi_quadrature(1.0) - 1.0;
        ensure((target - common::INV_PHI1_MINUS_1).abs() < 1e-13, || format!("oracle disagrees with reference: {target}"))?;
        let e = simulate_bessel3(bessel_config()).unwrap();
        let k = ExplicitBesselArbitrage::for_ensemble(&e).map_err(|e| e.to_string())?;
        let r = arbitrage_report(&e, &k);
        ensure(r.initial_abs_max == 0.0, || format!("max |v_0| = {}", r.initial_abs_max))?;
        let err = (r.terminal_min - target).abs().max((r.terminal_max - target).abs());
        ensure(err <= TERMINAL_TOL, || format!("terminal value off by {err:e}"))?;
        ensure(r.min_value > -1.0, || format!("min value {}", r.min_value))?;
        let freq = r.eta_negative_at_first_step();
        ensure(freq >= SHORT_FREQUENCY, || format!("short frequency {freq}"))?;
        let t = within_budget(start, Duration::from_secs(120))?;
        Ok(format!(
            "v_0 = 0, |v_T - {target:.12}| <= {err:e}, min v = {:.4}, P(eta < 0) = {freq}, {t:?}",
            r.min_value
        ))
    })());
}

fn curve_at(e: &PathEnsemble, f: impl Fn(f64) -> f64 + Sync, ts: &[f64]) -> Vec<(f64, McStatistic)> {
    let times = e.times();
    let idx: Vec<usize> = ts
        .iter()
        .map(|&t| (0..times.len()).min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs())).unwrap())
        .collect();
    let acc = e.reduce(
        || vec![Running::default(); idx.len()],
        |acc, _, s| {
            for (r, &k) in acc.iter_mut().zip(&idx) {
                r.push(f(s[k]));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    idx.iter().zip(&acc).map(|(&k, r)| (times[k], r.statistic())).collect()
}

#[test]
fn criterion_8_inverse_bessel_decay() {
    gate(8, "E[1/S_t] matches quadrature and strictly decreases", (|| {
        let start = Instant::now();
        let e = simulate_bessel3(bessel_config()).unwrap();
        let ts = [0.25, 0.5, 1.0];
        let stats = curve_at(&e, |s| 1.0 / s, &ts);
        let mut detail = Vec::new();
        for (t, s) in &stats {
            let oracle = common::inverse_bessel3_mean(1.0, *t);
            ensure(s.within(oracle, STD_ERRORS), || format!("t = {t}: {} vs {oracle}, z = {:.2}", s.estimate, s.z_score(oracle)))?;
            detail.push(format!("t={t}: {:.4} (z={:+.2})", s.estimate, s.z_score(oracle)));
        }
        for w in stats.windows(2) {
            let band = DECREASE_BAND * (w[0].1.std_error.powi(2) + w[1].1.std_error.powi(2)).sqrt();
            ensure(w[0].1.estimate - w[1].1.estimate > band, || format!("no decrease beyond the band after t = {}", w[0].0))?;
        }
        let t = within_budget(start, Duration::from_secs(60))?;
        Ok(format!("{}, {t:?}", detail.join(", ")))
    })());
}

#[test]
fn criterion_9_moments() {
    gate(9, "E[S_1^2] = 4 (Bessel 3) and E[S_1] = 5 (squared Bessel 4)", (|| {
        let bes = simulate_bessel3(bessel_config()).unwrap();
        let sq = simulate_squared_bessel4(bessel_config()).unwrap();
        let ts = [0.25, 0.5, 1.0];
        let mut detail = Vec::new();
        for (t, s) in curve_at(&bes, |x| x * x, &ts) {
            let target = 1.0 + 3.0 * t;
            ensure(s.within(target, STD_ERRORS), || format!("Bessel(3) E[S^2] at t = {t}: z = {:.2}", s.z_score(target)))?;
            if t == 1.0 {
                detail.push(format!("E[S_1^2] = {:.4} (z={:+.2})", s.estimate, s.z_score(target)));
            }
        }
        for (t, s) in curve_at(&sq, |x| x, &ts) {
            let target = 1.0 + 4.0 * t;
            ensure(s.within(target, STD_ERRORS), || format!("squared Bessel(4) E[S] at t = {t}: z = {:.2}", s.z_score(target)))?;
            if t == 1.0 {
                detail.push(format!("E[S_1] = {:.4} (z={:+.2})", s.estimate, s.z_score(target)));
            }
        }
        Ok(detail.join(", "))
    })());
}
