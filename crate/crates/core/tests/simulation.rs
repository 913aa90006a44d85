use impatience::exact::solve_auto;
use impatience::model::{ModelParams, State};
use impatience::sim::{coupled_dominance_run, estimate_stationary, SimConfig};
use statrs::distribution::{DiscreteCDF, Poisson};

#[test]
fn infinite_server_mean_within_three_standard_errors() {
    let p = ModelParams::new(0.0, 10.0, 1.0, 0.0, 1.0).unwrap();
    let c = SimConfig::new(314, 5_000.0, 50.0, 8).unwrap();
    let e = estimate_stationary(&p, &c).unwrap();
    let (_, se_m) = e.standard_errors().unwrap();
    let mean_m = e.pmf.moments().mean_m;
    assert!((mean_m - 10.0).abs() < 3.0 * se_m, "{mean_m} +- {se_m}");
    assert_eq!(e.pmf.moments().mean_n, 0.0);
}

#[test]
fn small_scale_matches_exact_solve() {
    let p = ModelParams::new(0.5, 3.0, 1.0, 1.0, 1.0).unwrap();
    let c = SimConfig::new(2718, 20_000.0, 100.0, 4).unwrap();
    let e = estimate_stationary(&p, &c).unwrap();
    let exact = solve_auto(&p).unwrap();
    // one effective sample per relaxation time 1/(mu (1 - rho)^2) of N
    let effective = e.total_time * 0.25;
    let tv = exact.total_variation(&e.pmf);
    assert!(
        tv < 3.0 / effective.sqrt(),
        "tv = {tv}, bound = {}",
        3.0 / effective.sqrt()
    );
}

#[test]
fn patient_mean_tracks_fluid_scale() {
    let gap = |a: f64| {
        let p = ModelParams::new(0.5, a, 1.0, 1.0, 1.0).unwrap();
        let e = estimate_stationary(&p, &SimConfig::new(9, 20_000.0, 100.0, 2).unwrap()).unwrap();
        (e.pmf.moments().mean_n / a - 1.0).abs()
    };
    assert!(gap(20.0) < gap(4.0));
}

#[test]
fn identical_seeds_identical_estimates() {
    let p = ModelParams::new(0.4, 5.0, 1.0, 2.0, 1.0).unwrap();
    let c = SimConfig::new(77, 500.0, 10.0, 3).unwrap();
    let a = estimate_stationary(&p, &c).unwrap();
    let b = estimate_stationary(&p, &c).unwrap();
    assert_eq!(a, b);
    let other = estimate_stationary(&p, &SimConfig { seed: 78, ..c }).unwrap();
    assert_ne!(a.pmf, other.pmf);
}

#[test]
fn coupled_run_dominance_and_tail_bound() {
    let p = ModelParams::new(0.5, 15.0, 1.0, 3.0, 1.0).unwrap();
    let c = SimConfig::new(4242, 1e9, 200.0, 1)
        .unwrap()
        .with_max_events(1_000_000);
    let r = coupled_dominance_run(&p, &c, State::new(15, 15)).unwrap();
    assert_eq!(r.events, 1_000_000);
    assert_eq!(r.violations, 0);
    assert!(r.max_gap > 0);
    let poisson = Poisson::new(15.0).unwrap();
    for (m, &t) in r.tail_m.iter().enumerate().skip(1) {
        let bound = poisson.sf(m as u64 - 1);
        assert!(t <= bound + 0.02, "m={m}: {t} vs {bound}");
    }
}
