use std::f64::consts::{PI, TAU};

use chui_lab_core::asymptotics::limit_constant;
use chui_lab_core::moments::{
    fejer_kernel, fejer_kernel_cosine, fejer_weighted_bound, moment_lower_bound_check, power_sums,
};
use chui_lab_core::norms::{norm_sq_gram, norm_sq_taylor_fraction, psi_norm_sq};
use chui_lab_core::thompson::{construct_poles, rho, weight_function_w, weight_function_w_prime};
use chui_lab_core::{BoundedAnalyticFunction, PoleConfiguration, UnimodularFamily, Weight};
use num_complex::Complex64;
use proptest::prelude::*;

fn angles(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..TAU, 1..=max_n)
}

fn power_weight() -> impl Strategy<Value = Weight> {
    prop::sample::select(vec![0.25, 0.5, 1.0, 2.0]).prop_map(|a| Weight::power(a).unwrap())
}

/// Polynomials of degree ≤ 2 with coefficients in the unit square.
fn polynomial() -> impl Strategy<Value = BoundedAnalyticFunction> {
    prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 1..=3).prop_map(|c| {
        BoundedAnalyticFunction::new(c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_even_and_periodic(t in 0.01..6.2f64, alpha in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let g = Weight::power(alpha).unwrap();
        let v = g.phi(t).unwrap();
        prop_assert!((v - g.phi(-t).unwrap()).abs() <= 1e-10 * v.abs().max(1.0));
        prop_assert!((v - g.phi(t + TAU).unwrap()).abs() <= 1e-10 * v.abs().max(1.0));
    }

    #[test]
    fn moment_coefficients_decrease(g in power_weight(), k in 0usize..200) {
        let a = g.moment_coefficient(k).unwrap();
        let b = g.moment_coefficient(k + 1).unwrap();
        prop_assert!(a > b && b > 0.0);
    }

    #[test]
    fn norm_is_invariant_under_rotation_and_reflection(x in angles(8), theta in 0.0..TAU, g in power_weight()) {
        let c = PoleConfiguration::new(x).unwrap();
        let base = norm_sq_gram(&c, &g).unwrap().value_sq;
        let rotated = norm_sq_gram(&c.rotate(theta), &g).unwrap().value_sq;
        let reflected = norm_sq_gram(&c.conjugate(), &g).unwrap().value_sq;
        prop_assert!((base - rotated).abs() <= 1e-9 * base);
        prop_assert!((base - reflected).abs() <= 1e-9 * base);
    }

    #[test]
    fn gauge_distance_ignores_rotation_and_order(x in angles(8), theta in 0.0..TAU) {
        let c = PoleConfiguration::new(x.clone()).unwrap();
        let mut shuffled: Vec<f64> = x.iter().rev().map(|a| a + theta).collect();
        shuffled.rotate_left(x.len() / 2);
        let d = c.gauge_distance(&PoleConfiguration::new(shuffled).unwrap());
        prop_assert!(d < 1e-9, "{}", d);
    }

    #[test]
    fn equispaced_is_the_minimum_for_concave_weights(x in angles(8), alpha in prop::sample::select(vec![0.25, 0.5, 1.0])) {
        let g = Weight::power(alpha).unwrap();
        let c = PoleConfiguration::new(x).unwrap();
        let v = norm_sq_gram(&c, &g).unwrap().value_sq;
        let psi = psi_norm_sq(c.len(), &g).unwrap().value_sq;
        prop_assert!(v >= psi * (1.0 - 1e-10));
    }

    #[test]
    fn gram_and_taylor_agree(x in angles(5)) {
        let g = Weight::power(2.0).unwrap();
        let c = PoleConfiguration::new(x).unwrap();
        let gram = norm_sq_gram(&c, &g).unwrap();
        let taylor = norm_sq_taylor_fraction(&c, &g, 20_000).unwrap();
        prop_assert!((gram.value_sq - taylor.value_sq).abs() <= taylor.error_estimate + 1e-9 * gram.value_sq);
    }

    #[test]
    fn scaled_psi_norms_increase(n in 1usize..400, alpha in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let g = Weight::power(alpha).unwrap();
        let s = |n: usize| (n as f64).powf(alpha - 1.0) * psi_norm_sq(n, &g).unwrap().value_sq;
        let (a, b) = (s(n), s(n + 1));
        prop_assert!(a < b && b < limit_constant(alpha).unwrap());
    }

    #[test]
    fn w_runs_from_zero_to_n_and_increases(f in polynomial(), extra in 1usize..64, t in 0.0..1.0f64) {
        let n = (2.0 * f.sup_bound_m).floor() as usize + extra;
        prop_assert_eq!(weight_function_w(&f, n, 0.0).unwrap(), 0.0);
        prop_assert!((weight_function_w(&f, n, 1.0).unwrap() - n as f64).abs() < 1e-9 * n as f64);
        prop_assert!(weight_function_w_prime(&f, n, t).unwrap() > 0.0);
    }

    #[test]
    fn constructed_poles_are_distinct(f in polynomial(), extra in 1usize..64) {
        let n = (2.0 * f.sup_bound_m).floor() as usize + extra;
        let c = construct_poles(&f, n).unwrap();
        prop_assert_eq!(c.len(), n);
        prop_assert!(c.min_separation() > 0.0);
    }

    #[test]
    fn rho_inequality(x in 0.0..100.0f64, y in 0.0..100.0f64, beta in 0.01..100.0f64, p in 1.0..4.0f64) {
        let r = rho(beta, p).unwrap();
        let rhs = (1.0 + beta) * x.powf(p) + r * y.powf(p);
        prop_assert!((x + y).powf(p) <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn power_sums_are_bounded(x in angles(16), j in 1usize..300) {
        let b = UnimodularFamily::new(x).unwrap();
        let n = b.len() as f64;
        prop_assert!(power_sums(&b, j).iter().all(|s| s.norm() <= n + 1e-9));
    }

    #[test]
    fn fejer_kernel_is_nonnegative(j in 1usize..120, x in -10.0..10.0f64) {
        let v = fejer_kernel(j, x);
        prop_assert!(v >= 0.0);
        prop_assert!((v - fejer_kernel_cosine(j, x)).abs() < 1e-10);
    }

    #[test]
    fn moment_floors_hold(x in angles(64), extra in 0usize..32) {
        let b = UnimodularFamily::new(x).unwrap();
        prop_assert!(moment_lower_bound_check(&b).pass);
        let r = fejer_weighted_bound(&b, b.len() + extra);
        prop_assert_eq!(r.holds, Some(true));
    }
}

#[test]
fn phi_at_pi_for_alpha_one() {
    let g = Weight::power(1.0).unwrap();
    // 1 - 2·1·ln 2 at t = π from the closed form
    assert!((g.phi(PI).unwrap() - (1.0 - 2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
}
