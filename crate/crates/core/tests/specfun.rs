use proptest::prelude::*;
use radiance_core::specfun::{
    bessel_j, bessel_j_prime, bessel_table, generalized_bessel, sinc_kernel, truncation_order, window_kernel_sinc,
    window_kernel_t,
};
use std::f64::consts::PI;

/// Direct double sum over |n'| ≤ 200.
fn brute_a0(n: i64, rho: f64, zeta: f64) -> f64 {
    (-200i64..=200)
        .map(|k| bessel_j(k, rho).unwrap() * bessel_j(n - 2 * k, zeta).unwrap())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squares_sum_to_one(x in 0.0f64..50.0) {
        let n = truncation_order(x, 1e-17).unwrap() + 10;
        let t = bessel_table(n, x).unwrap();
        let s = t[0] * t[0] + 2.0 * t[1..].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_order_parity(n in 0i64..60, x in -80.0f64..80.0) {
        let a = bessel_j(-n, x).unwrap();
        let b = bessel_j(n, x).unwrap();
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(a, s * b);
    }

    #[test]
    fn derivative_is_finite_difference(n in -30i64..30, x in 0.5f64..60.0) {
        let h = 1e-5;
        let fd = (bessel_j(n, x + h).unwrap() - bessel_j(n, x - h).unwrap()) / (2.0 * h);
        prop_assert!((bessel_j_prime(n, x).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn recurrence_holds(n in -40i64..40, x in 0.1f64..100.0) {
        let l = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
        let r = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
        prop_assert!((l - r).abs() < 1e-12 * (1.0 + r.abs()));
    }

    #[test]
    fn generalized_matches_double_sum(n in -40i64..40, rho in -30.0f64..30.0, zeta in -30.0f64..30.0) {
        let g = generalized_bessel(n, rho, zeta, 1e-15).unwrap();
        prop_assert!((g.a0 - brute_a0(n, rho, zeta)).abs() < 1e-10);
    }

    #[test]
    fn generalized_parity_and_averages(n in -30i64..30, rho in -20.0f64..20.0, zeta in -20.0f64..20.0) {
        let a = |m: i64, z: f64| generalized_bessel(m, rho, z, 1e-15).unwrap();
        let g = a(n, zeta);
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a(n, -zeta).a0 - s * g.a0).abs() < 1e-13);
        prop_assert!((g.a1 - 0.5 * (a(n + 1, zeta).a0 + a(n - 1, zeta).a0)).abs() < 1e-13);
        let a2 = 0.25 * (a(n + 2, zeta).a0 + 2.0 * g.a0 + a(n - 2, zeta).a0);
        prop_assert!((g.a2 - a2).abs() < 1e-13);
        if n % 2 != 0 {
            prop_assert_eq!(a(n, 0.0).a0, 0.0);
        }
    }

    /// The linear-polarization bracket is even in ζ.
    #[test]
    fn bracket_is_even_in_zeta(n in -30i64..30, rho in -20.0f64..0.0, zeta in -20.0f64..20.0, xi in 0.0f64..3.0) {
        let b = |z: f64| {
            let g = generalized_bessel(n, rho, z, 1e-15).unwrap();
            -g.a0 * g.a0 + xi * xi * (g.a1 * g.a1 - g.a0 * g.a2)
        };
        prop_assert!((b(zeta) - b(-zeta)).abs() < 1e-12);
    }

    #[test]
    fn window_kernel_is_bounded(eta in -50.0f64..50.0, n in -50i64..50, dphi in 0.1f64..1000.0) {
        let t = window_kernel_t(eta, n, dphi);
        prop_assert!(t >= 0.0 && t <= 0.5 * dphi * dphi * (1.0 + 1e-12));
    }
}

#[test]
fn kernel_examples() {
    assert_eq!(window_kernel_t(3.0, 3, 7.0), 24.5);
    assert!(window_kernel_t(1.0 + 1.0 / 4.0, 1, 8.0 * PI).abs() < 1e-12);
    assert!((window_kernel_t(0.5, 0, 2.0 * PI) - 8.0).abs() < 1e-12);
    assert_eq!(window_kernel_sinc(2.0, 2, 5.0), 5.0);
    assert!(window_kernel_sinc(2.5, 2, 2.0 * PI).abs() < 1e-12);
}

/// `∫ sin(xΔφ)/x f(x) dx → π f(0)` for large `Δφ`.
#[test]
fn sinc_kernel_tends_to_delta() {
    let dphi = 1e3;
    let f = |x: f64| (-x * x).exp() * (1.0 + 0.3 * x);
    let (a, b) = (-8.0, 8.0);
    let m = 400_000;
    let h = (b - a) / m as f64;
    let s: f64 = (0..=m)
        .map(|i| {
            let x = a + i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            w * sinc_kernel(x, dphi) * f(x)
        })
        .sum::<f64>()
        * h;
    assert!((s - PI).abs() < 1e-6, "{s}");
}
