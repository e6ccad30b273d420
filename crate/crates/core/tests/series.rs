use num::{BigRational, Zero};
use proptest::prelude::*;
use tdo_core::series::bessel::{
    bessel_j, bessel_j_with_derivatives, bessel_ode_residual, bessel_reduction_check, power_law_check,
    power_law_exponents,
};
use tdo_core::series::exact::{
    product_coefficients, ratio_coefficients, rational_from_ratio, reciprocal, reciprocal_by_determinant,
    residual_at_power, triangular_coefficients,
};
use tdo_core::series::{
    alpha_numeric_check, build_series, large_k0_approx, residual_coefficients, theta_series, ConvolutionTriple,
    LargeK0Approx,
};
use tdo_core::TdoError;

/// Dense polynomial product.
fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn deriv(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().skip(1).map(|(i, x)| i as f64 * x).collect()
}

/// Coefficients of t² (2αα'' − α'² − 4ω0² + μ²α²) + λ²α², indexed by power.
fn residual_times_t2(a: &[f64], w0: f64, l: f64, mu: f64) -> Vec<f64> {
    let d1 = deriv(a);
    let d2 = deriv(&d1);
    let aa = mul(a, a);
    let add = |out: &mut Vec<f64>, p: &[f64], scale: f64, shift: usize| {
        for (i, x) in p.iter().enumerate() {
            if out.len() <= i + shift {
                out.resize(i + shift + 1, 0.0);
            }
            out[i + shift] += scale * x;
        }
    };
    let mut out = Vec::new();
    add(&mut out, &mul(a, &d2), 2.0, 2);
    add(&mut out, &mul(&d1, &d1), -1.0, 2);
    add(&mut out, &[-4.0 * w0 * w0], 1.0, 2);
    add(&mut out, &aa, mu * mu, 2);
    add(&mut out, &aa, l * l, 0);
    out
}

/// Fixed-step RK4 for α from α(ε) = a1 ε, α'(ε) = a1.
fn shoot(w0: f64, l: f64, mu: f64, eps: f64, grid: &[f64], h: f64) -> Vec<f64> {
    let a1 = 2.0 * w0 / (l * l - 1.0).sqrt();
    let f = |t: f64, y: [f64; 2]| {
        [y[1], (y[1] * y[1] + 4.0 * w0 * w0 - y[0] * y[0] * (mu * mu + l * l / (t * t))) / (2.0 * y[0])]
    };
    let mut t = eps;
    let mut y = [a1 * eps, a1];
    let mut out = Vec::new();
    for &target in grid {
        while t < target - 1e-15 {
            let h = h.min(target - t);
            let k1 = f(t, y);
            let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            t += h;
        }
        out.push(y[0]);
    }
    out
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn leading_coefficients() {
    let s = build_series(1.0, 2.0, 1.0, 5).unwrap();
    let a1 = 2.0 / 3f64.sqrt();
    assert!((s.a[0] - a1).abs() < 1e-15);
    assert!((s.a[1] + a1 / 14.0).abs() < 1e-15);
    assert!((s.a[1] + 0.0824786).abs() < 1e-7);
    assert!((s.a[2] - s.a[1] * (-3.0 / 76.0)).abs() < 1e-16);
    assert!((s.a[2] - 0.0032557).abs() < 1e-7);
}

#[test]
fn truncation_solves_the_alpha_equation_in_retained_powers() {
    let s = build_series(1.0, 2.0, 1.0, 5).unwrap();
    let full = s.full_coefficients();
    let r = residual_times_t2(&full, 1.0, 2.0, 1.0);
    // r has powers t^{p+2}; retained powers of the residual are p ≤ 2N − 1 = 9
    for (p2, c) in r.iter().enumerate().take(12) {
        assert!(c.abs() < 1e-12, "power {} coefficient {c}", p2 as i64 - 2);
    }
    assert!(r[12].abs() > 1e-8);
}

#[test]
fn convolution_triple_matches_polynomial_products() {
    let a = [0.0, 1.2, 0.0, -0.3, 0.0, 0.05, 0.0];
    let tri = ConvolutionTriple::from_coefficients(&a);
    let d1 = deriv(&a);
    let b = mul(&d1, &d1);
    let c = mul(&a, &a);
    let d = mul(&a, &deriv(&d1));
    for k in 0..b.len() {
        assert!((tri.b[k] - b[k]).abs() < 1e-15, "b_{k}");
    }
    for k in 0..c.len() {
        assert!((tri.c[k] - c[k]).abs() < 1e-15, "c_{k}");
    }
    for k in 0..d.len() {
        assert!((tri.d[k] - d[k]).abs() < 1e-15, "d_{k}");
    }
}

#[test]
fn special_and_degenerate_series() {
    let s = build_series(1.5, 3.0, 0.0, 6).unwrap();
    assert!(s.a.iter().skip(1).all(|a| *a == 0.0));
    assert!(alpha_numeric_check(&s, 0.1, 10.0).unwrap() < 1e-12);
    assert!(s.symbolic_residual().coeffs.iter().all(|c| c.abs() < 1e-12));

    let one = build_series(1.0, 2.0, 1.0, 1).unwrap();
    assert_eq!(one.a.len(), 1);
    assert_eq!(one.a_tilde[0], 1.0);

    for (l, order) in [(1.0, 3), (0.5, 3), (2.0, 0)] {
        assert!(matches!(build_series(1.0, l, 1.0, order), Err(TdoError::Parameter(_))));
    }
}

#[test]
fn forced_constant_term_leaves_lambda2_a0_squared() {
    let (a0, l2) = (0.3, 4.0);
    let a = [a0, 2.0 / 3f64.sqrt(), 0.0];
    let r = residual_coefficients(&4.0, &l2, &1.0, &a);
    assert!((r.at_power(-2) - l2 * a0 * a0).abs() < 1e-15);
}

#[test]
fn exact_forms_agree_through_order_ten() {
    let l2 = rational_from_ratio(4, 1);
    let m2 = rational_from_ratio(1, 1);
    let ratio: Vec<BigRational> = ratio_coefficients(&l2, &m2, 10);
    assert_eq!(product_coefficients(&l2, &m2, 10), ratio);
    let tri = triangular_coefficients(&l2, &m2, 10);
    assert_eq!(tri.len(), 20);
    for (k, r) in ratio.iter().enumerate() {
        assert_eq!(&tri[2 * k + 1], r);
        assert!(tri[2 * k].is_zero());
    }
    // the ratio identity, with a_1 normalized to 1
    for k in 1..10i64 {
        let want = &ratio[(k - 1) as usize] * rational_from_ratio(-(2 * k - 1), 2 * k * (4 * k * k - 1 + 4));
        assert_eq!(ratio[k as usize], want);
    }
    // residual vanishes exactly through t^{2N−1}; 4ω0² = λ² − 1 when a_1 = 1
    let mut full = vec![BigRational::zero(); 21];
    for (k, a) in ratio.iter().enumerate() {
        full[2 * k + 1] = a.clone();
    }
    let four_w02 = &l2 - rational_from_ratio(1, 1);
    for p in -2..=19 {
        assert!(residual_at_power(&full, &l2, &m2, &four_w02, p).is_zero(), "power {p}");
    }
}

#[test]
fn reciprocal_series() {
    let s = build_series(1.0, 2.0, 1.0, 8).unwrap();
    let hat: Vec<f64> = s.a.iter().map(|a| a / s.a1()).collect();
    let prod = mul(&hat, &s.a_tilde);
    assert!((prod[0] - 1.0).abs() < 1e-15);
    for (k, c) in prod.iter().enumerate().take(hat.len()).skip(1) {
        assert!(c.abs() < 1e-12, "t^{} coefficient {c}", 2 * k);
    }
    let mut full = vec![0.0; 2 * hat.len()];
    for (k, a) in hat.iter().enumerate() {
        full[2 * k + 1] = *a;
    }
    for k in 0..=3 {
        assert!((reciprocal_by_determinant(&full, 2 * k) - s.a_tilde[k]).abs() < 1e-14);
        assert_eq!(reciprocal_by_determinant(&full, 2 * k + 1), 0.0);
    }
    assert_eq!(reciprocal(&[1.0, 0.5], 3), vec![1.0, -0.5, 0.25]);
    for &t in &[0.1, 0.3, 0.6] {
        let w = s.reciprocal(t) / (s.a1() * t);
        assert!((w * s.eval(t)[0] - 1.0).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn numeric_residual_decreases_with_order() {
    let residuals: Vec<f64> =
        (3..=8).map(|n| alpha_numeric_check(&build_series(1.0, 2.0, 1.0, n).unwrap(), 0.1, 0.8).unwrap()).collect();
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
    assert!(residuals[5] < 1e-6);
    let s = build_series(1.0, 2.0, 1.0, 8).unwrap();
    assert!(matches!(alpha_numeric_check(&s, 0.1, 5.0), Err(TdoError::ConvergenceWarning { .. })));
}

#[test]
fn series_matches_shooting() {
    let s = build_series(1.0, 2.0, 1.0, 10).unwrap();
    let grid: Vec<f64> = (0..=8).map(|i| 0.1 + 0.05 * i as f64).collect();
    let shot = shoot(1.0, 2.0, 1.0, 1e-3, &grid, 1e-5);
    for (t, a) in grid.iter().zip(shot) {
        assert!((s.eval(*t)[0] - a).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn series_phase() {
    let s0 = build_series(1.0, 2.0, 0.0, 4).unwrap();
    let th = theta_series(&s0, 0.5, 2.0).unwrap();
    assert!((th - 2.0 / s0.a1() * 4f64.ln()).abs() < 1e-14);

    let s = build_series(1.0, 2.0, 1.0, 10).unwrap();
    let th = theta_series(&s, 0.5, 0.8).unwrap();
    let oracle = simpson(|t| 2.0 * s.reciprocal(t) / (s.a1() * t), 0.5, 0.8, 2000);
    assert!((th - oracle).abs() < 1e-8);
    assert_eq!(theta_series(&s, 0.6, 0.6).unwrap(), 0.0);
    assert!(theta_series(&s, 0.5, 3.0).is_err());
}

#[test]
fn bessel_values() {
    assert!((bessel_j(0.0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
    assert!((bessel_j(1.0, 2.5) - 0.497_094_102_464_274_1).abs() < 1e-13);
    for &x in &[0.3, 3.0, 11.9, 12.1, 15.0, 19.0] {
        let half = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
        assert!((bessel_j(0.5, x) - half).abs() < 1e-12, "x = {x}");
    }
    let (z, d1, _) = bessel_j_with_derivatives(0.0, 2.0);
    assert!((d1 + bessel_j(1.0, 2.0)).abs() < 1e-13);
    assert!((z - bessel_j(0.0, 2.0)).abs() == 0.0);
}

#[test]
fn bessel_equation_and_reduction() {
    for rho in [0.0, 1.0 / 3.0, 0.5, 1.0] {
        for i in 0..400 {
            let x = 0.1 + (20.0 - 0.1) * i as f64 / 399.0;
            assert!(bessel_ode_residual(rho, x).abs() < 1e-8, "rho = {rho}, x = {x}");
        }
    }
    let grid: Vec<f64> = (0..200).map(|i| 0.5 + 9.5 * i as f64 / 199.0).collect();
    // ρ = 1/2 (ν = 0), ℓ = 1
    assert!(bessel_reduction_check(1.0, 1.0, 0.0, &grid).unwrap() < 1e-10);
    // ρ = 0: Ω0²ν² = 1/4
    assert!(bessel_reduction_check(1.0, 1.0, 0.5, &grid).unwrap() < 1e-7);
    assert!(matches!(bessel_reduction_check(1.0, 1.0, 0.6, &grid), Err(TdoError::Parameter(_))));
}

#[test]
fn power_law_case() {
    let (bp, bm) = power_law_exponents(3.0 / 16.0).unwrap();
    assert_eq!((bp, bm), (0.25, -0.25));
    let grid: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    assert!(power_law_check(3.0 / 16.0, 1.3, -0.4, &grid).unwrap() < 1e-10);
    assert!(power_law_exponents(0.3).is_err());
}

#[test]
fn large_k0_examples() {
    // c1 = ω0/ℓ makes the radicand vanish
    let flat = LargeK0Approx::new(2.0, 1.0, 1.0, 0.5, 0.0).unwrap();
    for &t in &[0.0, 0.3, 1.7] {
        assert!((flat.alpha(t) - 0.5).abs() < 1e-15);
    }
    let (a0, _) = large_k0_approx(2.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    assert!((a0 - 1.0).abs() < 1e-15);
    let (a, _) = large_k0_approx(2.0, 1.0, 1.0, 1.0, 0.0, std::f64::consts::PI / 8.0).unwrap();
    assert!((a - (1.0 + 3f64.sqrt() / 2.0)).abs() < 1e-14);
    let approx = LargeK0Approx::new(2.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    assert!(approx.eom_residual(0.0, 1.0, 201).unwrap() < 0.05);
    assert!(matches!(LargeK0Approx::new(2.0, 1.0, 1.0, 0.4, 0.0), Err(TdoError::Parameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_recursion_and_residual(w0 in 0.2f64..3.0, l in 1.05f64..5.0, mu in 0.0f64..3.0, order in 1usize..14) {
        let s = build_series(w0, l, mu, order).unwrap();
        prop_assert_eq!(s.a.len(), order);
        let a1 = 2.0 * w0 / (l * l - 1.0).sqrt();
        prop_assert!((s.a[0] - a1).abs() <= 1e-15 * a1);
        for k in 1..order {
            let kf = k as f64;
            let want = s.a[k - 1] * (-mu * mu * (2.0 * kf - 1.0)) / (2.0 * kf * (4.0 * kf * kf - 1.0 + l * l));
            prop_assert!((s.a[k] - want).abs() <= 1e-13 * want.abs().max(1e-300));
        }
        let r = s.symbolic_residual();
        let scale = 4.0 * w0 * w0 + a1 * a1 * (l * l + mu * mu);
        for p in -2..=(2 * order as i64 - 1) {
            prop_assert!(r.at_power(p).abs() <= 1e-12 * scale, "power {}", p);
        }
    }

    #[test]
    fn reciprocal_identity(w0 in 0.2f64..3.0, l in 1.05f64..5.0, mu in 0.0f64..2.0, order in 2usize..10) {
        let s = build_series(w0, l, mu, order).unwrap();
        let hat: Vec<f64> = s.a.iter().map(|a| a / s.a1()).collect();
        let prod = mul(&hat, &s.a_tilde);
        prop_assert!((prod[0] - 1.0).abs() < 1e-15);
        for c in prod.iter().take(order).skip(1) {
            prop_assert!(c.abs() < 1e-12);
        }
    }
}
