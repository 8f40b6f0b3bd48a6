use arbitrage_lab::continuous::{
    inverse_deflator_decay, moment_curve, self_financing_residual, simulate_bessel3, simulate_squared_bessel4,
    ExplicitBesselArbitrage, McStatistic, Process, Scheme, SimConfig, PathEnsemble,
};

fn cfg(n_paths: usize, n_steps: usize, seed: u64) -> SimConfig {
    SimConfig {
        n_paths,
        n_steps,
        seed,
        ..SimConfig::default()
    }
}

fn agree(a: McStatistic, b: McStatistic, k: f64) -> bool {
    (a.estimate - b.estimate).abs() <= k * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

#[test]
fn euler_agrees_with_exact_scheme() {
    for process in [Process::Bessel3, Process::SquaredBessel4] {
        let exact = PathEnsemble::new(process, cfg(20_000, 512, 3)).unwrap();
        let euler = PathEnsemble::new(process, SimConfig { scheme: Scheme::Euler, ..cfg(20_000, 512, 4) }).unwrap();
        let a = *moment_curve(&exact, |x| x).last().unwrap();
        let b = *moment_curve(&euler, |x| x).last().unwrap();
        assert!(agree(a, b, 4.0), "{process:?}: {a:?} vs {b:?}");
    }
}

#[test]
fn squared_bessel_mean_grows_linearly() {
    let e = simulate_squared_bessel4(cfg(20_000, 8, 5)).unwrap();
    let curve = moment_curve(&e, |x| x);
    for (t, s) in e.times().iter().zip(&curve).skip(1) {
        assert!(s.within(1.0 + 4.0 * t, 4.0), "t = {t}: {s:?}");
    }
    assert!(e.min_price() > 0.0);
}

#[test]
fn inverse_squared_bessel_decays() {
    let e = simulate_squared_bessel4(cfg(20_000, 4, 6)).unwrap();
    let curve = inverse_deflator_decay(&e, -1.0);
    for w in curve.windows(2).skip(1) {
        assert!(w[0].estimate - w[1].estimate > 3.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt());
    }
    // E[1/S_t] = (1 - exp(-1/(2t))) for squared Bessel(4) from 1.
    let oracle = 1.0 - (-0.5f64).exp();
    assert!(curve[4].within(oracle, 4.0), "{:?} vs {oracle}", curve[4]);
}

// Median residual of the Itô-sum identity shrinks as the grid is refined.
#[test]
fn residual_shrinks_with_the_grid() {
    let mut medians = Vec::new();
    for steps in [256, 512, 1024] {
        let e = simulate_bessel3(cfg(2_000, steps, 7)).unwrap();
        let k = ExplicitBesselArbitrage::for_ensemble(&e).unwrap();
        let r = self_financing_residual(&e, &k);
        let again = self_financing_residual(&e, &k);
        assert_eq!(r.per_path, again.per_path);
        medians.push(r.median);
    }
    assert!(medians[0] > medians[1] && medians[1] > medians[2], "{medians:?}");
}
