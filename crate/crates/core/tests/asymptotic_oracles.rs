use std::f64::consts::PI;

use impatience::asymptotics::{
    gen_fun_asymptotic, laplace_expand, marginal_asymptotics, sharp_permanent, Interval, Marginal,
};
use impatience::exact::{permanent_ps_distribution, solve_auto};
use impatience::model::ModelParams;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

#[test]
fn permanent_sharp_form_converges_to_exact() {
    let rho = 0.5;
    let mut last = f64::INFINITY;
    for a in [20.0, 80.0, 320.0] {
        // (x, y) = (1.5, 1) at integer lattice points
        let m = a as u64;
        let n = (1.5 * a) as usize;
        let exact = permanent_ps_distribution(m, rho, n).unwrap().pmf[n];
        let gap = (exact / sharp_permanent(1.5, 1.0, a, rho).unwrap() - 1.0).abs();
        assert!(gap < last, "A={a}: {gap}");
        last = gap;
    }
    assert!(last < 5e-3);
}

#[test]
fn marginals_approach_exact() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for a in [20.0, 60.0] {
        let p = ModelParams::new(0.5, a, 1.0, 1.0, 1.0).unwrap();
        let (pn, pm) = solve_auto(&p).unwrap().marginals();
        let k = a as usize;
        let gn = (pn[k] / marginal_asymptotics(Marginal::N, 1.0, a, &p).unwrap() - 1.0).abs();
        let gm = (pm[k] / marginal_asymptotics(Marginal::M, 1.0, a, &p).unwrap() - 1.0).abs();
        assert!(gn < last.0 && gm < last.1);
        last = (gn, gm);
    }
}

#[test]
fn generating_function_closes_in_on_one_one() {
    let p = ModelParams::new(0.5, 100.0, 1.0, 1.0, 1.0).unwrap();
    let exact_dist = solve_auto(&p).unwrap();
    let gaps: Vec<f64> = [0.04, 0.02, 0.01, 0.0]
        .iter()
        .map(|d| {
            let (u, v) = (Complex64::new(1.0 + d, 0.0), Complex64::new(1.0 - d, 0.0));
            let exact = exact_dist.generating_function(u, v);
            let approx = gen_fun_asymptotic(u, v, 100.0, &p).unwrap();
            assert_eq!(approx.im, 0.0);
            (exact.re / approx.re - 1.0).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.02 && gaps[3] < 1e-12);
}

#[test]
fn laplace_matches_stirling() {
    // int_0^inf r^A e^{-A r} dr = Gamma(A + 1) / A^(A + 1)
    let mut errors = Vec::new();
    for a in [10.0, 100.0, 1000.0] {
        let e = laplace_expand(
            |r| r - r.ln(),
            |_| 1.0,
            Interval::new(0.0, f64::INFINITY).unwrap(),
            a,
            0.0,
        )
        .unwrap();
        let ln_exact = ln_gamma(a + 1.0) - (a + 1.0) * a.ln();
        let err = (e.ln_modulus - ln_exact).exp_m1().abs();
        assert!(
            err < 1.0 / (10.0 * a),
            "A={a}: {err:e} r*={} h2={}",
            e.minimizer,
            e.curvature
        );
        errors.push((err, err * a));
    }
    assert!(errors.windows(2).all(|w| w[1].0 < w[0].0));
    // C = A * error settles near 1/12
    assert!(errors.iter().all(|(_, c)| *c < 0.1));
    assert!((errors[2].1 - 1.0 / 12.0).abs() < 1e-3);
}

#[test]
fn laplace_oscillatory_gaussian() {
    // int e^{-A (r - c)^2 k / 2 + i A zeta r} dr = e^{i A zeta c} e^{-A zeta^2 / (2k)} sqrt(2 pi / (A k))
    let (c, k) = (0.7, 2.5);
    for a in [10.0, 100.0, 1000.0] {
        for zeta in [-0.3, 0.2, 1.1] {
            let e = laplace_expand(
                |r| k * (r - c).powi(2) / 2.0,
                |_| 1.0,
                Interval::real_line(),
                a,
                zeta,
            )
            .unwrap();
            let exact = Complex64::from_polar(
                (-a * zeta * zeta / (2.0 * k)).exp() * (2.0 * PI / (a * k)).sqrt(),
                a * zeta * c,
            );
            assert!(
                (e.value - exact).norm() / exact.norm() < 1e-8,
                "A={a} zeta={zeta}"
            );
        }
    }
}

#[test]
fn laplace_prefactor_is_evaluated_at_the_minimiser() {
    let e = laplace_expand(
        |r| (r - 2.0).powi(2) / 2.0,
        |r| r * r,
        Interval::real_line(),
        50.0,
        0.0,
    )
    .unwrap();
    assert!((e.value.re / (4.0 * (2.0 * PI / 50.0).sqrt()) - 1.0).abs() < 1e-8);
}
