use impatience::asymptotics::{decay_h, decay_k, gen_fun_asymptotic, phi, psi};
use impatience::exact::{
    balance_residual, permanent_ps_distribution, solve_stationary_with, SolverOptions,
    TruncatedGrid,
};
use impatience::model::{ModelParams, State};
use num_complex::Complex64;
use proptest::prelude::*;

fn rates() -> impl Strategy<Value = ModelParams> {
    (
        0.0..5.0f64,
        0.0..20.0f64,
        0.1..5.0f64,
        0.0..5.0f64,
        0.1..5.0f64,
    )
        .prop_map(|(a, b, mu, nu, th)| ModelParams::new(a, b, mu, nu, th).unwrap())
}

fn stable_rates() -> impl Strategy<Value = ModelParams> {
    (
        0.05..0.9f64,
        0.5..8.0f64,
        0.2..3.0f64,
        0.0..3.0f64,
        0.3..3.0f64,
    )
        .prop_map(|(rho, b, mu, nu, th)| ModelParams::new(rho * mu, b, mu, nu, th).unwrap())
}

proptest! {
    #[test]
    fn outflow_is_sum_of_listed_rates(p in rates(), n in 0u64..200, m in 0u64..200) {
        let listed = p.transition_rates(State::new(n, m));
        let total: f64 = listed.iter().map(|(_, r)| r).sum();
        prop_assert!(listed.iter().all(|(_, r)| *r > 0.0));
        prop_assert!((total - p.out_rates(n, m).total()).abs() <= 1e-12 * total.max(1.0));
        let service = p.mu() * n as f64 + p.nu() * m as f64;
        let capacity = if n + m == 0 { 0.0 } else { service / (n + m) as f64 };
        prop_assert!(capacity <= p.mu().max(p.nu()) * (1.0 + 1e-15));
    }

    #[test]
    fn decay_rate_is_nonnegative(x in 0.0..20.0f64, y in 0.0..20.0f64, rho in 0.01..0.99f64) {
        let h = decay_h(x, y, rho).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!((h - phi(x, rho).unwrap() - psi(y).unwrap()).abs() < 1e-12);
        let xs = rho / (1.0 - rho);
        if (x - xs).abs() > 1e-3 || (y - 1.0).abs() > 1e-3 {
            prop_assert!(h > 0.0);
        }
    }

    #[test]
    fn k_identities(x in 0.0..30.0f64, y in 0.01..30.0f64, rho in 0.01..0.99f64) {
        prop_assert!((decay_k(x, 1.0, rho).unwrap() - phi(x, rho).unwrap()).abs() < 1e-12);
        let zero = decay_k(rho * y / (1.0 - rho), y, rho).unwrap();
        prop_assert!(zero.abs() < 1e-12 * (1.0 + y));
        prop_assert!(decay_k(x, y, rho).unwrap() >= -1e-12 * (1.0 + x + y));
    }

    #[test]
    fn permanent_law_sums_to_one(m in 0u64..60, rho in 0.05..0.9f64) {
        let n_max = impatience::exact::required_n_max(m, rho, 1e-13).unwrap();
        let d = permanent_ps_distribution(m, rho, n_max).unwrap();
        prop_assert!((d.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.tail_mass < 1e-12);
    }

    #[test]
    fn gen_fun_asymptotic_has_modulus_at_most_one_on_the_torus(
        sigma in -3.0..3.0f64, tau in -3.0..3.0f64, p in stable_rates()
    ) {
        let u = Complex64::from_polar(1.0, sigma);
        let v = Complex64::from_polar(1.0, tau);
        let f = gen_fun_asymptotic(u, v, 50.0, &p).unwrap();
        prop_assert!(f.norm() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solved_pmf_is_a_balanced_distribution(p in stable_rates(), n_max in 4usize..30, m_max in 4usize..30) {
        let grid = TruncatedGrid::new(n_max, m_max).unwrap();
        let d = solve_stationary_with(&p, grid, &SolverOptions::default()).unwrap();
        prop_assert!(d.values().iter().all(|x| *x >= 0.0));
        prop_assert!((d.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.residual <= 1e-10);
        prop_assert!((balance_residual(&p, d.pmf()) - d.residual).abs() < 1e-12);
        let one = Complex64::new(1.0, 0.0);
        prop_assert!((d.generating_function(one, one) - one).norm() < 1e-12);
    }
}
