use proptest::prelude::*;
use std::collections::BTreeMap;
use tdo_core::ermakov::{ep_residual, ErmakovState, DEFAULT_K};
use tdo_core::minimum::{
    check_criterion, check_criterion_on, default_initial_condition, minimum_eom_residual, sigma_minimum,
    MinUncertaintyModel,
};
use tdo_core::models::{eom_residual, ModelDescriptor};
use tdo_core::quantum::{bogolubov, quadratures, vacuum_expectations, Reference};
use tdo_core::TdoError;

fn model(name: &str, params: &[(&str, f64)]) -> ModelDescriptor {
    let overrides: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ModelDescriptor::from_catalog(name, &overrides).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_examples() {
    let r = check_criterion(&model("exp_frequency", &[("omega0", 1.0), ("gamma0", 1.0)]), 1e-8).unwrap();
    assert!(r.is_minimum);
    assert!((r.c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    let r = check_criterion(&model("harmonic", &[]), 1e-8).unwrap();
    assert!(r.is_minimum);
    assert!((r.c - 0.5f64.sqrt()).abs() < 1e-15);
    // m ω = e^{γt} is not constant
    let kc = model("kanai_caldirola", &[("omega0", 1.0), ("gamma", 1.0)]);
    assert!(kc.m(1.0) * kc.omega(1.0) > 2.0 * kc.m(0.0) * kc.omega(0.0));
    assert!(!check_criterion(&kc, 1e-8).unwrap().is_minimum);
}

#[test]
fn criterion_report_json_shape() {
    let r = check_criterion(&model("tsquared", &[]), 1e-8).unwrap();
    let v = serde_json::to_value(r).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    assert_eq!(keys, ["c", "is_minimum", "max_violation", "samples"]);
}

#[test]
fn criterion_errors() {
    let h = model("harmonic", &[]);
    let e = check_criterion_on(&h, 1.0, 0.0, 10, 1e-8).unwrap_err();
    assert_eq!(e.kind(), "DomainError");
    assert!(check_criterion_on(&h, 0.0, 1.0, 0, 1e-8).is_err());
    assert!(check_criterion(&h, 0.0).is_err());
    assert!(matches!(
        MinUncertaintyModel::from_model(model("kanai_caldirola", &[])),
        Err(TdoError::CriterionViolated { .. })
    ));
}

#[test]
fn exp_frequency_branch_solves_the_auxiliary_equation() {
    let mm = MinUncertaintyModel::new(model("exp_frequency", &[]), 0.0, 2.0).unwrap();
    for i in 0..=40 {
        let t = 0.05 * i as f64;
        assert!(mm.mmin_residual(t).unwrap().abs() < 1e-8);
        // σ = c sqrt(m) = e^{t/2}/sqrt(2) for c = 1/sqrt(2), ω0 = γ0 = 1
        let (s, sd) = mm.sigma(t).unwrap();
        let exact = (0.5 * t).exp() / 2f64.sqrt();
        assert!(rel(s, exact) < 1e-14);
        assert!(rel(sd, 0.5 * exact) < 1e-14);
        // σ̈ = σ/4 for this branch
        let res = ep_residual(&mm.base, DEFAULT_K, t, s, 0.25 * s).unwrap();
        assert!(res.abs() < 1e-8 * (1.0 + DEFAULT_K / s.powi(3)));
    }
}

#[test]
fn harmonic_and_tsquared_branches() {
    let h = MinUncertaintyModel::from_model(model("harmonic", &[("omega0", 2.0)])).unwrap();
    let s = sigma_minimum(&h, 1.3).unwrap();
    assert!((s.sigma - 0.5).abs() < 1e-15);
    assert_eq!(s.sigma_dot, 0.0);

    let c = 0.8;
    let ts = MinUncertaintyModel::new(model("tsquared", &[("m0", 1.0), ("c", c)]), 1.0, 3.0).unwrap();
    for &t in &[1.0, 1.5, 2.0, 3.0] {
        let s = sigma_minimum(&ts, t).unwrap();
        assert!(rel(s.sigma, c * t) < 1e-14);
        let want = -1.0 / (c * c * t) + 1.0 / (c * c);
        assert!((s.theta - want).abs() < 1e-12, "theta at {t}");
    }
}

#[test]
fn minimum_eom_matches_base_eom() {
    let ts = MinUncertaintyModel::new(model("tsquared", &[("m0", 1.0), ("c", 0.5f64.sqrt())]), 0.5, 2.0).unwrap();
    let (c1, c2) = (0.7, -1.3);
    let q = |t: f64| {
        let (s, c) = (1.0 / t).sin_cos();
        let u = c1 * c + c2 * s;
        let v = -c1 * s + c2 * c;
        // d/dt of (1/t) = −1/t²
        [u, -v / (t * t), -u / t.powi(4) + 2.0 * v / t.powi(3)]
    };
    for &t in &[0.5, 1.0, 2.0] {
        let r = minimum_eom_residual(&ts, q, t).unwrap();
        assert!(r.abs() < 1e-9);
        assert!((r - eom_residual(&ts.base, q, t).unwrap()).abs() < 1e-10);
    }
    assert_eq!(minimum_eom_residual(&ts, |_| [0.0; 3], 1.0).unwrap(), 0.0);

    let ef = MinUncertaintyModel::from_model(model("exp_frequency", &[])).unwrap();
    let q = |t: f64| {
        let x = (-t).exp();
        let (s, c) = x.sin_cos();
        [s, -c * x, -s * x * x + c * x]
    };
    for i in 0..=10 {
        let t = 0.2 * i as f64;
        let r = minimum_eom_residual(&ef, q, t).unwrap();
        assert!(r.abs() < 1e-9);
        assert!((r - eom_residual(&ef.base, q, t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn default_initial_condition_picks_the_minimum_branch() {
    let ts = model("tsquared", &[]);
    let (s, sd) = default_initial_condition(&ts, 0.5, 2.0).unwrap();
    assert!(rel(s, 0.5 * 0.5f64.sqrt()) < 1e-12);
    assert!(rel(sd, 0.5f64.sqrt()) < 1e-12);
    // non-minimal model with Ω² = 0.75
    let kc = model("kanai_caldirola", &[]);
    let (s, sd) = default_initial_condition(&kc, 0.0, 1.0).unwrap();
    assert!(rel(s, 3f64.powf(-0.25)) < 1e-14);
    assert_eq!(sd, 0.0);
}

#[test]
fn quadratic_growth_away_from_the_minimum() {
    let kc = model("kanai_caldirola", &[("gamma", 0.8)]);
    let (t, sigma) = (0.7, 1.3);
    let damping = kc.sample(t).unwrap().damping();
    for eps in [1e-3, 1e-4, -1e-3, -1e-4] {
        let s = ErmakovState { t, sigma, sigma_dot: damping * sigma / 2.0 + eps, theta: 0.0, k: 0.0, f: 0.0 };
        let excess = quadratures(&kc, &s, 1.0).unwrap().product - 0.5;
        assert!(excess > 0.0);
        let predicted = sigma * sigma * eps * eps;
        assert!(rel(excess, predicted) < 1e-5, "eps = {eps}");
    }
}

fn min_model() -> impl Strategy<Value = MinUncertaintyModel> {
    prop_oneof![
        (0.3f64..3.0, 0.1f64..2.0, 0.3f64..2.0).prop_map(|(w, g, c)| {
            MinUncertaintyModel::from_model(model("exp_frequency", &[("omega0", w), ("gamma0", g), ("c", c)])).unwrap()
        }),
        (0.3f64..3.0, 0.3f64..2.0).prop_map(|(m0, c)| {
            MinUncertaintyModel::from_model(model("tsquared", &[("m0", m0), ("c", c)])).unwrap()
        }),
        (0.3f64..3.0, 0.3f64..3.0).prop_map(|(m0, w)| {
            MinUncertaintyModel::from_model(model("harmonic", &[("m0", m0), ("omega0", w)])).unwrap()
        }),
        (1.1f64..2.0, 0.2f64..0.8).prop_map(|(nu, k0)| {
            MinUncertaintyModel::from_model(model("bessel_type", &[("nu", nu), ("k0", k0)])).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimum_branch_saturates_and_is_bogolubov_trivial(mm in min_model(), hbar in 0.2f64..3.0) {
        let (t0, t1) = mm.base.default_window();
        let reference = Reference::at(&mm.base, t0).unwrap();
        let m0 = mm.base.m(t0);
        let c2 = mm.c * mm.c;
        let mut h_scaled = None;
        for i in 0..25 {
            let t = t0 + (t1 - t0) * i as f64 / 24.0;
            let s = sigma_minimum(&mm, t).unwrap();
            let q = quadratures(&mm.base, &s, hbar).unwrap();
            prop_assert!((q.product - hbar / 2.0).abs() <= 1e-10 * hbar);
            let pair = bogolubov(&mm.base, &s, reference).unwrap();
            prop_assert!((pair.mu - 1.0).norm() <= 1e-9);
            prop_assert!(pair.nu.norm() <= 1e-9);
            let v = vacuum_expectations(&mm.base, &s, hbar).unwrap();
            prop_assert!(rel(v.q2, hbar * c2) < 1e-10);
            prop_assert!(rel(v.p2, hbar / (4.0 * c2)) < 1e-10);
            prop_assert!(rel(v.energy, hbar * mm.base.omega(t) / 2.0) < 1e-9);
            let scaled = v.energy * mm.base.m(t) / m0;
            let first = *h_scaled.get_or_insert(scaled);
            prop_assert!(rel(scaled, first) < 1e-9);
            prop_assert!(mm.mmin_residual(t).unwrap().abs() < 1e-8 * mm.c.powi(-4).max(1.0));
        }
    }
}
