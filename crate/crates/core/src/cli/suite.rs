//! End-to-end check run: each claim is checked and reported by name.

use std::borrow::Cow;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arbitrage::{arbitrage_cone, classify_sequence, detect_arbitrage, long_only_zero_cost_mass, SequenceKind};
use crate::continuous::{arbitrage_report, simulate_bessel3, simulate_squared_bessel4, ExplicitBesselArbitrage, McStatistic, PathEnsemble, Running, SimConfig};
use crate::deflator::{bubble_to_arbitrage, detect_bubble, find_esmd, from_wealth_plan, numeraire_identity_check, to_discounted, to_wealth_plan, verify_deflator, wealth_process};
use crate::io::{self, parse_market, parse_sequence};
use crate::market::{is_arbitrage, is_long_only, long_only_zero_start_is_zero, portfolio_values, Market};
use crate::random::{random_long_only, random_market, random_self_financing, TreeShape};
use crate::rational::{int, ratio, Rational};

pub const THREE_STATE: &str = "three_state.json";
pub const DOMINANCE: &str = "dominance.json";
pub const SINGLE_ASSET: &str = "single_asset.json";
pub const SHORT_SEQUENCE: &str = "short_sequence.json";

const BUNDLED: [(&str, &str); 4] = [
    (THREE_STATE, include_str!("../../examples/data/three_state.json")),
    (DOMINANCE, include_str!("../../examples/data/dominance.json")),
    (SINGLE_ASSET, include_str!("../../examples/data/single_asset.json")),
    (SHORT_SEQUENCE, include_str!("../../examples/data/short_sequence.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    /// Directory holding replacements for the bundled data files.
    pub markets_dir: Option<PathBuf>,
    pub paths: usize,
    pub steps: usize,
    /// Random markets per property check.
    pub random_markets: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            markets_dir: None,
            paths: 100_000,
            steps: 1024,
            random_markets: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub paths: usize,
    pub steps: usize,
    pub random_markets: usize,
    pub claims: Vec<Claim>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.claims.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "# Check report\n\nseed {}, {} paths, {} steps, {} random markets per property\n\n| claim | result | detail |\n|---|---|---|\n",
            self.seed, self.paths, self.steps, self.random_markets
        );
        for c in &self.claims {
            out.push_str(&format!(
                "| {} | {} | {} |\n",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.detail.replace('|', "/")
            ));
        }
        out
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

struct Data<'a> {
    dir: Option<&'a Path>,
    record: &'a mut dyn FnMut(&Path, &[u8]),
}

impl Data<'_> {
    fn text(&mut self, name: &str) -> Result<Cow<'static, str>, String> {
        match self.dir {
            Some(dir) => {
                let path = dir.join(name);
                let text = io::read_file(&path).map_err(|e| e.to_string())?;
                (self.record)(&path, text.as_bytes());
                Ok(Cow::Owned(text))
            }
            None => Ok(Cow::Borrowed(bundled(name).expect("bundled file"))),
        }
    }

    fn market(&mut self, name: &str) -> Result<Market, String> {
        parse_market(&self.text(name)?).map_err(|e| format!("{name}: {e}"))
    }
}

fn one_period_claims(market: &Market, ray: &[i64], shorted: usize) -> (Check, Check) {
    let expected = ints(ray);
    let verdict = detect_arbitrage(market);
    let detect = (|| {
        let cert = verdict.arbitrage().ok_or("no arbitrage found")?;
        ensure(verdict.verify(market), || "certificate does not verify".into())?;
        ensure(cert.ray.as_deref() == Some(expected.as_slice()), || format!("ray {:?}", cert.ray))?;
        let assets = cert.short_report.shorted_assets();
        ensure(assets == [shorted], || format!("shorted assets {assets:?}"))?;
        Ok(format!("ray {ray:?}, short in asset {}", shorted + 1))
    })();
    let cone = (|| {
        let cone = arbitrage_cone(market).map_err(|e| e.to_string())?;
        ensure(cone.rays == [expected.clone()], || format!("rays {:?}", cone.rays))?;
        ensure(cone.lineality.is_empty(), || "nontrivial lineality".into())?;
        Ok(format!("exactly one ray {ray:?}"))
    })();
    (detect, cone)
}

fn shorting_property(rng: &mut ChaCha8Rng, n: usize) -> Check {
    let mut arbitrages = 0;
    for k in 0..n {
        let m = random_market(rng, TreeShape::default(), 4);
        let verdict = detect_arbitrage(&m);
        ensure(verdict.verify(&m), || format!("market {k}: certificate fails verification"))?;
        if let Some(c) = verdict.arbitrage() {
            arbitrages += 1;
            ensure(!c.short_report.is_long_only(), || format!("market {k}: long-only arbitrage"))?;
        }
        let mass = long_only_zero_cost_mass(&m);
        ensure(mass.is_zero(), || format!("market {k}: long-only zero-cost mass {mass}"))?;
    }
    Ok(format!("{n} markets, {arbitrages} with arbitrage, every certificate shorts"))
}

fn long_only_property(rng: &mut ChaCha8Rng, n: usize) -> Check {
    for k in 0..n {
        let m = random_market(rng, TreeShape::default(), 4);
        let s = random_long_only(rng, &m, &Rational::zero());
        let v = portfolio_values(&m, &s).map_err(|e| e.to_string())?;
        ensure(v.as_slice().iter().all(Zero::is_zero), || format!("strategy {k}: nonzero value"))?;
        long_only_zero_start_is_zero(&m, &s).map_err(|e| format!("strategy {k}: {e}"))?;
    }
    Ok(format!("{n} strategies, all identically zero"))
}

fn numeraire_property(rng: &mut ChaCha8Rng, n: usize) -> Check {
    for k in 0..n {
        let m = random_market(rng, TreeShape::default(), 4);
        let s = random_self_financing(rng, &m);
        let values = portfolio_values(&m, &s).map_err(|e| e.to_string())?;
        for num in 0..m.assets() {
            let ok = numeraire_identity_check(&m, num, &s).map_err(|e| e.to_string())?;
            ensure(ok, || format!("pair {k}, numeraire {num}: discounted values differ"))?;
            let disc = to_discounted(&m, num).map_err(|e| e.to_string())?;
            let plan = to_wealth_plan(&disc, &s).map_err(|e| e.to_string())?;
            let wealth = wealth_process(&disc, &plan).map_err(|e| e.to_string())?;
            let expected: Vec<Rational> = m
                .tree()
                .node_ids()
                .map(|node| values.at(node) / &m.price(node)[num])
                .collect();
            ensure(wealth == expected, || format!("pair {k}, numeraire {num}: wealth process differs"))?;
            let back = from_wealth_plan(&disc, &plan).map_err(|e| e.to_string())?;
            ensure(back == s, || format!("pair {k}, numeraire {num}: round trip differs"))?;
        }
    }
    Ok(format!("{n} pairs, every numeraire"))
}

fn esmd_property(rng: &mut ChaCha8Rng, n: usize, portfolios: usize) -> Check {
    for k in 0..n {
        let m = random_market(rng, TreeShape::default(), 4);
        let z = find_esmd(&m).map_err(|e| format!("market {k}: {e}"))?;
        let strategies: Vec<_> = (0..portfolios)
            .map(|_| {
                let x0 = ratio(rand::Rng::random_range(rng, 0..=8), 2);
                random_long_only(rng, &m, &x0)
            })
            .collect();
        let report = verify_deflator(&m, &z, &strategies);
        ensure(report.passed(), || format!("market {k}: deflator check failed"))?;
        ensure(report.checked_portfolios() == portfolios, || format!("market {k}: portfolios skipped"))?;
    }
    Ok(format!("{n} markets, {portfolios} long-only portfolios each"))
}

fn bubble_property(rng: &mut ChaCha8Rng, n: usize) -> Check {
    let mut witnesses = 0;
    for k in 0..n {
        let m = random_market(rng, TreeShape::default(), 4);
        if let Some(w) = detect_bubble(&m) {
            witnesses += 1;
            let cert = bubble_to_arbitrage(&m, &w).map_err(|e| format!("market {k}: {e}"))?;
            let arb = is_arbitrage(&m, &cert.strategy).map_err(|e| e.to_string())?;
            ensure(arb && !is_long_only(&cert.strategy), || format!("market {k}: exploit is not a shorting arbitrage"))?;
        }
    }
    ensure(witnesses > 0, || "no bubble found among the random markets".into())?;
    Ok(format!("{n} markets, {witnesses} bubbles, every exploit shorts"))
}

fn sequence_claim(data: &mut Data) -> Check {
    let m = data.market(THREE_STATE)?;
    let input = parse_sequence(&data.text(SHORT_SEQUENCE)?, &m).map_err(|e| format!("{SHORT_SEQUENCE}: {e}"))?;
    let v = classify_sequence(&m, &input.strategies, &input.xi, &input.epsilon).map_err(|e| e.to_string())?;
    ensure(v.kind == SequenceKind::ArbitrageFirstKind, || format!("classified as {:?}", v.kind))?;
    ensure(v.short_reports.iter().all(|r| !r.is_long_only()), || "a member is long-only".into())?;
    Ok(format!("first kind, shorts from member {}", v.cutoff_index.unwrap_or(0)))
}

/// Standard normal distribution function by its Taylor series; independent of
/// the erfc-based one used by the simulation.
pub fn normal_cdf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        n += 1.0;
        term *= -x * x / (2.0 * n);
        sum += term / (2.0 * n + 1.0);
    }
    0.5 + sum / (2.0 * std::f64::consts::PI).sqrt()
}

fn nearest_index(times: &[f64], t: f64) -> usize {
    (0..times.len())
        .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()))
        .expect("nonempty grid")
}

fn bessel_claims(cfg: &SuiteConfig) -> [(&'static str, &'static str, Check); 3] {
    let sim = SimConfig {
        n_paths: cfg.paths,
        n_steps: cfg.steps,
        seed: cfg.seed,
        ..SimConfig::default()
    };
    let ensemble = match simulate_bessel3(sim) {
        Ok(e) => e,
        Err(e) => {
            let msg = e.to_string();
            return [
                (BESSEL_ARBITRAGE.0, BESSEL_ARBITRAGE.1, Err(msg.clone())),
                (DECAY.0, DECAY.1, Err(msg.clone())),
                (SECOND_MOMENT.0, SECOND_MOMENT.1, Err(msg)),
            ];
        }
    };
    let strategy = ExplicitBesselArbitrage::new();
    let target = 1.0 / normal_cdf_series(1.0) - 1.0;
    let report = arbitrage_report(&ensemble, &strategy);
    let arbitrage = (|| {
        ensure(report.initial_abs_max == 0.0, || format!("max |v_0| = {}", report.initial_abs_max))?;
        let err = (report.terminal_min - target).abs().max((report.terminal_max - target).abs());
        ensure(err <= 1e-10, || format!("terminal values off the target {target} by {err:e}"))?;
        ensure(report.min_value > -1.0, || format!("min value {}", report.min_value))?;
        let freq = report.eta_negative_at_first_step();
        ensure(freq >= 0.99, || format!("short frequency {freq} at the first step"))?;
        Ok(format!(
            "v_0 = 0, v_T = {target:.12} on every path, min value {:.4}, short frequency {freq} at t = {}",
            report.min_value,
            ensemble.times()[1]
        ))
    })();

    let curves = two_moments(&ensemble, |s| 1.0 / s, |s| s * s);
    let times = ensemble.times();
    let decay = (|| {
        let mut stats: Vec<(f64, McStatistic)> = Vec::new();
        for t in [0.25, 0.5, 1.0] {
            let k = nearest_index(times, t);
            let stat = curves.0[k];
            let oracle = 2.0 * normal_cdf_series(1.0 / times[k].sqrt()) - 1.0;
            ensure(stat.within(oracle, 4.0), || {
                format!("E[1/S] at t = {}: {} vs {oracle} ({:.2} std errors)", times[k], stat.estimate, stat.z_score(oracle))
            })?;
            stats.push((times[k], stat));
        }
        for w in stats.windows(2) {
            let band = 3.0 * (w[0].1.std_error.powi(2) + w[1].1.std_error.powi(2)).sqrt();
            ensure(w[0].1.estimate - w[1].1.estimate > band, || format!("no significant decrease from t = {} to t = {}", w[0].0, w[1].0))?;
        }
        Ok(stats
            .iter()
            .map(|(t, s)| format!("t = {t}: {:.4} ± {:.4}", s.estimate, s.std_error))
            .collect::<Vec<_>>()
            .join(", "))
    })();
    let second = curves.1[times.len() - 1];
    let moment = if second.within(4.0, 4.0) {
        Ok(format!("E[S_1^2] = {:.4} ± {:.4}", second.estimate, second.std_error))
    } else {
        Err(format!("E[S_1^2] = {} is {:.2} std errors from 4", second.estimate, second.z_score(4.0)))
    };
    [
        (BESSEL_ARBITRAGE.0, BESSEL_ARBITRAGE.1, arbitrage),
        (DECAY.0, DECAY.1, decay),
        (SECOND_MOMENT.0, SECOND_MOMENT.1, moment),
    ]
}

/// Two per-grid-point moment curves from one pass over the paths.
pub fn two_moments<F, G>(ensemble: &PathEnsemble, f: F, g: G) -> (Vec<McStatistic>, Vec<McStatistic>)
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    let points = ensemble.times().len();
    let acc = ensemble.reduce(
        || vec![(Running::default(), Running::default()); points],
        |acc, _, s| {
            for (r, &x) in acc.iter_mut().zip(s) {
                r.0.push(f(x));
                r.1.push(g(x));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.0.merge(&y.0);
                x.1.merge(&y.1);
            }
        },
    );
    acc.iter().map(|(a, b)| (a.statistic(), b.statistic())).unzip()
}

fn squared_bessel_claim(cfg: &SuiteConfig) -> Check {
    let sim = SimConfig {
        n_paths: cfg.paths,
        n_steps: cfg.steps,
        seed: cfg.seed,
        ..SimConfig::default()
    };
    let e = simulate_squared_bessel4(sim).map_err(|e| e.to_string())?;
    let last = e.times().len() - 1;
    let stat = e.reduce(
        Running::default,
        |r, _, s| r.push(s[last]),
        |a, b| a.merge(&b),
    );
    let stat = stat.statistic();
    ensure(stat.within(5.0, 4.0), || format!("E[S_1] = {} is {:.2} std errors from 5", stat.estimate, stat.z_score(5.0)))?;
    Ok(format!("E[S_1] = {:.4} ± {:.4}", stat.estimate, stat.std_error))
}

const BESSEL_ARBITRAGE: (&str, &str) = (
    "bessel3_explicit_arbitrage",
    "In the Bessel(3) market the explicit strategy starts at 0, ends at 1/Phi(1) - 1 on every path, stays above -1 and is short the savings account near t = 0",
);
const DECAY: (&str, &str) = (
    "inverse_bessel3_decay",
    "E[1/S_t] for Bessel(3) equals 2 Phi(1/sqrt t) - 1 and strictly decreases: 1/S is a strict local martingale",
);
const SECOND_MOMENT: (&str, &str) = ("bessel3_second_moment", "E[S_1^2] = 4 for Bessel(3) started at 1");

pub fn run_suite(cfg: &SuiteConfig, record: &mut dyn FnMut(&Path, &[u8])) -> SuiteReport {
    let mut claims = Vec::new();
    let mut push = |name: &'static str, statement: &'static str, check: Check| {
        let (passed, detail) = match check {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        claims.push(Claim {
            name,
            statement,
            passed,
            detail,
        });
    };
    let mut data = Data {
        dir: cfg.markets_dir.as_deref(),
        record,
    };

    let (detect, cone) = match data.market(DOMINANCE) {
        Ok(m) => one_period_claims(&m, &[1, -1], 1),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    push("dominance_arbitrage", "An asset dominating another from an equal start gives an arbitrage that shorts the dominated asset", detect);
    push("dominance_cone", "The dominance market's arbitrage cone is the single ray (1, -1)", cone);

    let (detect, cone) = match data.market(THREE_STATE) {
        Ok(m) => one_period_claims(&m, &[3, 2, -1], 2),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    push("three_state_arbitrage", "The three-state market admits an arbitrage, and every arbitrage shorts asset 3", detect);
    push("three_state_cone", "The three-state arbitrage cone is the single ray (3, 2, -1)", cone);

    let single = data.market(SINGLE_ASSET).and_then(|m| {
        let v = detect_arbitrage(&m);
        ensure(!v.is_arbitrage() && v.verify(&m), || "expected a verified no-arbitrage certificate".into())?;
        Ok("no-arbitrage certificate verifies".to_string())
    });
    push("single_asset_no_arbitrage", "A single positive asset admits no arbitrage", single);

    let n = cfg.random_markets;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    push("arbitrage_requires_shorting", "Every arbitrage shorts some asset; long-only zero-cost strategies are zero", shorting_property(&mut rng, n));
    push("long_only_zero_start", "A long-only self-financing strategy with zero initial value is identically zero", long_only_property(&mut rng, n));
    push("numeraire_identities", "Portfolio values transform exactly under a change of numeraire, and wealth plans round-trip", numeraire_property(&mut rng, n.div_ceil(10)));
    push("supermartingale_deflator_exists", "A supermartingale deflator exists for every positive-price tree and deflates long-only portfolios to supermartingales", esmd_property(&mut rng, n.div_ceil(100).max(10), 100));
    push("bubble_gives_arbitrage", "Every bubble converts into an arbitrage that shorts", bubble_property(&mut rng, n.div_ceil(10)));
    push("first_kind_sequence_shorts", "Members of an arbitrage of the first kind hold short positions", sequence_claim(&mut data));

    for (name, statement, check) in bessel_claims(cfg) {
        push(name, statement, check);
    }
    push("squared_bessel4_mean", "E[S_1] = 5 for squared Bessel(4) started at 1", squared_bessel_claim(cfg));

    SuiteReport {
        seed: cfg.seed,
        paths: cfg.paths,
        steps: cfg.steps,
        random_markets: n,
        claims,
    }
}
