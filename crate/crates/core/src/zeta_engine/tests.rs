use super::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn chi_at_one_half_is_one() {
    let v = chi(c(0.5, 0.0)).unwrap();
    assert!((v - 1.0).norm() < 1e-14);
}

#[test]
fn chi_poles_and_trivial_zeros() {
    assert!(matches!(chi(c(1.0, 0.0)), Err(Error::Domain(_))));
    assert!(matches!(chi(c(3.0, 0.0)), Err(Error::Domain(_))));
    assert_eq!(chi(c(-2.0, 0.0)).unwrap(), c(0.0, 0.0));
}

#[test]
fn chi_has_unit_modulus_on_the_critical_line() {
    let v = chi(c(0.5, 50.0)).unwrap();
    assert!((v.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn functional_equation_at_a_fixed_point() {
    let s = c(0.3, 40.0);
    let lhs = zeta_reference(s, 1e-12).unwrap();
    let rhs = chi(s).unwrap() * zeta_reference(c(1.0, 0.0) - s, 1e-12).unwrap();
    assert!((lhs - rhs).norm() < 1e-9);
}

#[test]
fn theta_modes_agree_at_one_hundred() {
    let e = theta(100.0, ThetaMode::Exact).unwrap();
    let a = theta(100.0, ThetaMode::Asymptotic).unwrap();
    assert!((e.theta - a.theta).abs() < 1e-10);
    assert!((e.theta_prime - a.theta_prime).abs() < 1e-10);
}

#[test]
fn theta_against_series_oracle() {
    // ϑ(t) from the Stirling series for Im ln Γ(1/4 + it/2) carried to 12
    // Bernoulli terms, independent of the ln_gamma shift-and-recur path
    fn oracle(t: f64) -> f64 {
        let z = c(0.25, 0.5 * t);
        let mut lg = (z - 0.5) * z.ln() - z + 0.5 * TAU.ln();
        let mut zp = z;
        let z2 = z * z;
        for k in 1..=12 {
            let b = crate::special::bernoulli(k);
            lg += b / ((2 * k) as f64 * (2 * k - 1) as f64) / zp;
            zp *= z2;
        }
        lg.im - 0.5 * t * PI.ln()
    }
    for &t in &[60.0, 100.0, 500.0, 5000.0] {
        let e = theta(t, ThetaMode::Exact).unwrap().theta;
        assert!((e - oracle(t)).abs() < 1e-11 * (1.0 + e.abs()), "t = {t}");
    }
}

#[test]
fn theta_domain_and_precision_errors() {
    assert!(matches!(theta(0.0, ThetaMode::Exact), Err(Error::Domain(_))));
    assert!(matches!(theta(-1.0, ThetaMode::Exact), Err(Error::Domain(_))));
    assert!(matches!(theta(5.0, ThetaMode::Asymptotic), Err(Error::Precision(_))));
}

#[test]
fn theta_prime_approaches_leading_term() {
    let v = theta(1e4, ThetaMode::Exact).unwrap();
    assert!((v.theta_prime - 0.5 * (1e4 / TAU).ln()).abs() < 1e-6);
}

#[test]
fn theta_prime_has_single_zero_in_six_to_eight() {
    // ϑ is decreasing then increasing here; its stationary point is near 6.29
    let f = |t: f64| theta(t, ThetaMode::Exact).unwrap().theta_prime;
    let n = 200;
    let mut changes = 0;
    let mut root = 0.0;
    for i in 0..n {
        let a = 6.0 + 2.0 * i as f64 / n as f64;
        let b = a + 2.0 / n as f64;
        if f(a).signum() != f(b).signum() {
            changes += 1;
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            root = 0.5 * (lo + hi);
        }
    }
    assert_eq!(changes, 1);
    assert!((root - 6.29).abs() < 0.01, "root = {root}");
}

#[test]
fn theta_prime_matches_difference_of_theta() {
    for &t in &[3.0, 20.0, 700.0] {
        let h = 1e-4;
        let fd = (theta_exact(t + h) - theta_exact(t - h)) / (2.0 * h);
        assert!((fd - theta_prime_exact(t)).abs() < 1e-7, "t = {t}");
    }
}

#[test]
fn theta_remainder_is_small() {
    let r = theta_remainder(1000.0).unwrap();
    assert!((r - 1.0 / 48_000.0).abs() < 1e-9);
}

#[test]
fn z_changes_sign_near_first_zero() {
    let o = EvalOptions::default();
    let a = hardy_z(14.0, &o).unwrap();
    let b = hardy_z(14.2, &o).unwrap();
    assert!(a * b < 0.0);
}

#[test]
fn fast_path_agrees_with_oracle() {
    let fast = EvalOptions::fast(1e-10).unwrap();
    let oracle = EvalOptions::oracle(1e-12).unwrap();
    for &t in &[50.0, 100.0, 1e3, 1e4, 1e5] {
        let a = hardy_z(t, &fast).unwrap();
        let b = hardy_z(t, &oracle).unwrap();
        assert!((a - b).abs() < 1e-7, "t = {t}: {a} vs {b}");
    }
}

#[test]
fn fast_path_request_validation() {
    assert!(matches!(
        EvalRequest::new(c(0.4, 100.0), 1e-10, Method::FastCriticalLine),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        EvalRequest::new(c(0.5, 100.0), 1e-13, Method::Auto),
        Err(Error::Precision(_))
    ));
    let fast = EvalOptions::fast(1e-10).unwrap();
    assert!(matches!(hardy_z(3.0, &fast), Err(Error::Domain(_))));
}

#[test]
fn zeta_dispatch_matches_zeta_half() {
    let req = EvalRequest::new(c(0.5, 300.0), 1e-10, Method::Auto).unwrap();
    let a = zeta(&req).unwrap();
    let b = zeta_reference(c(0.5, 300.0), 1e-11).unwrap();
    assert!((a - b).norm() < 1e-9);
}

#[test]
fn z_is_real_by_construction() {
    let o = EvalOptions::oracle(1e-10).unwrap();
    for &t in &[10.0, 123.4, 9_876.5, 99_999.0] {
        let th = theta_exact(t);
        let z = zeta_reference(c(0.5, t), 1e-11).unwrap();
        let im = (Complex64::from_polar(1.0, th) * z).im;
        assert!(im.abs() < 1e-9, "t = {t}: {im}");
        assert!(hardy_z(t, &o).is_ok());
    }
}

#[test]
fn zeta_derivative_against_finite_differences() {
    let t = 50.0;
    let d = zeta_deriv_halfline(t, 1e-10).unwrap();
    let h = 1e-4;
    let f = |x: f64| zeta_reference(c(0.5, x), 1e-12).unwrap();
    // d/dt ζ(1/2+it) = i ζ'
    let fd = (f(t + h) - f(t - h)) / (2.0 * h);
    assert!((fd - Complex64::i() * d).norm() < 1e-6);
}

#[test]
fn zeta_derivative_conjugate_symmetry() {
    let a = zeta_deriv_halfline(77.7, 1e-10).unwrap();
    let b = zeta_deriv_halfline(-77.7, 1e-10).unwrap();
    assert_eq!(a, b.conj());
    assert!(matches!(zeta_deriv_halfline(2.0, 1e-10), Err(Error::Domain(_))));
}

#[test]
fn zeta_derivative_at_a_zero_matches_z_prime() {
    // first zero, bisected on the oracle
    let o = EvalOptions::oracle(1e-12).unwrap();
    let (mut lo, mut hi) = (14.0, 14.2);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hardy_z(mid, &o).unwrap() * hardy_z(lo, &o).unwrap() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = 0.5 * (lo + hi);
    assert!((g - 14.134_725_141_734_693).abs() < 1e-9);
    let dz = zeta_deriv_halfline(g, 1e-10).unwrap().norm();
    let zp = hardy_z_deriv(g, &o).unwrap().abs();
    assert!((dz - zp).abs() < 1e-5);
}

#[test]
fn abs_square_derivative_matches_difference() {
    let t = 321.0;
    let h = 1e-4;
    let f = |x: f64| zeta_reference(c(0.5, x), 1e-12).unwrap().norm_sqr();
    let fd = (f(t + h) - f(t - h)) / (2.0 * h);
    let d = abs_zeta_sq_deriv(t, 1e-10).unwrap();
    assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chi_reflection_product_is_one(re in 0.01f64..0.99, im in -100.0f64..100.0) {
        let s = c(re, im);
        let p = chi(s).unwrap() * chi(c(1.0, 0.0) - s).unwrap();
        prop_assert!((p - 1.0).norm() < 1e-10);
    }

    #[test]
    fn functional_equation_in_the_strip(re in 0.01f64..0.99, im in 10.0f64..2_000.0) {
        let target = 1e-11;
        let s = c(re, im);
        let lhs = zeta_reference(s, target).unwrap();
        let rhs = chi(s).unwrap() * zeta_reference(c(1.0, 0.0) - s, target).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn hardy_z_is_even(t in 1.0f64..5_000.0) {
        let o = EvalOptions::default();
        prop_assert_eq!(hardy_z(t, &o).unwrap(), hardy_z(-t, &o).unwrap());
    }

    #[test]
    fn zeta_derivative_matches_differences(t in 10.0f64..10_000.0) {
        let d = zeta_deriv_halfline(t, 1e-10).unwrap();
        let h = 1e-4;
        let f = |x: f64| zeta_reference(c(0.5, x), 1e-12).unwrap();
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        prop_assert!((fd - Complex64::i() * d).norm() < 1e-6 * (1.0 + d.norm()));
    }
}
