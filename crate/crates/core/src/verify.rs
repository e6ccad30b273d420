//! Self-checks grouped into suites. Each check reports the largest error it
//! saw against its tolerance; the report is deterministic for fixed inputs.

use crate::ermakov::{
    integrate_ep, phase_closed_form, pinney_sample, BasisPair, EpOptions, ErmakovState, PhaseCase, PinneyCombination,
    SigmaBranch,
};
use crate::error::{Result, TdoError};
use crate::minimum::{
    check_criterion, default_initial_condition, minimum_eom_residual, sigma_minimum, MinUncertaintyModel,
};
use crate::models::{catalog, exp_frequency_solution, tsquared_solution, ModelDescriptor};
use crate::ode::{integrate_gk, StepControl};
use crate::quantum::{
    bogolubov, moduli_from_invariants, quadratures, uncertainty_via_bogolubov, vacuum_expectations, Reference,
};
use crate::series::bessel::{bessel_ode_residual, bessel_reduction_check, power_law_check};
use crate::series::exact::{self, rational};
use crate::series::{
    alpha_numeric_check, build_series, residual_coefficients, shooting_solution, theta_series, LargeK0Approx,
};
use num::{BigRational, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

pub const SUITES: [&str; 6] = ["models", "ermakov", "bogolubov", "minimum", "series", "bessel"];
pub const DEFAULT_SERIES_ORDER: usize = 8;
const HBAR: f64 = 1.0;
const SAMPLES: usize = 200;
/// Level below which the series residual is dominated by rounding.
pub const RESIDUAL_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub max_err: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

struct Collector {
    prefix: String,
    checks: Vec<Check>,
}

impl Collector {
    fn new(prefix: &str) -> Self {
        Collector { prefix: prefix.to_string(), checks: Vec::new() }
    }

    fn add(&mut self, name: &str, err: Result<f64>, tol: f64) {
        let name = format!("{}.{}", self.prefix, name);
        let check = match err {
            Ok(e) => Check { name, pass: e.is_finite() && e <= tol, max_err: e, tol },
            Err(e) => Check { name: format!("{name} [{}]", e.kind()), pass: false, max_err: f64::NAN, tol },
        };
        self.checks.push(check);
    }

    /// A check that only has to hold (reported as error 0 or 1).
    fn add_bool(&mut self, name: &str, ok: Result<bool>) {
        self.add(name, ok.map(|b| if b { 0.0 } else { 1.0 }), 0.0);
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn max_of<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn model(name: &str, kv: &[(&str, f64)]) -> Result<ModelDescriptor> {
    let o: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ModelDescriptor::from_catalog(name, &o)
}

fn tight() -> EpOptions {
    EpOptions { control: StepControl::with_rtol(1e-12), ..Default::default() }
}

/// Trajectory over the model's default window from its default initial data.
pub fn catalog_trajectory(m: &ModelDescriptor, samples: usize) -> Result<Vec<ErmakovState>> {
    let (t0, t1) = m.default_window();
    let init = default_initial_condition(m, t0, t1)?;
    integrate_ep(m, init, &linspace(t0, t1, samples), &EpOptions::default())
}

fn perturbed_trajectory(m: &ModelDescriptor, samples: usize) -> Result<Vec<ErmakovState>> {
    let (t0, t1) = m.default_window();
    let (s0, sd0) = default_initial_condition(m, t0, t1)?;
    integrate_ep(m, (1.3 * s0, sd0 + 0.2), &linspace(t0, t1, samples), &EpOptions::default())
}

pub fn run(suite: &str, order: usize) -> Result<Report> {
    let checks = match suite {
        "models" => models_suite(),
        "ermakov" => ermakov_suite(),
        "bogolubov" => bogolubov_suite(),
        "minimum" => minimum_suite(),
        "series" => series_suite(order),
        "bessel" => bessel_suite(),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run(s, order)?.checks);
            }
            all
        }
        other => {
            return Err(TdoError::Parameter(format!(
                "unknown suite `{other}` (expected one of {}, all)",
                SUITES.join(", ")
            )))
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { suite: suite.to_string(), checks, pass })
}

fn fd_error(f: impl Fn(f64) -> f64, d: impl Fn(f64) -> f64, ts: &[f64]) -> f64 {
    max_of(ts.iter().map(|&t| {
        let h = 1e-5 * t.abs().max(1.0);
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        let exact = d(t);
        (fd - exact).abs() / (1.0 + exact.abs())
    }))
}

fn models_suite() -> Vec<Check> {
    let mut c = Collector::new("models");
    for m in catalog() {
        let (a, b) = m.default_window();
        let ts: Vec<f64> = (1..=100).map(|i| a + (b - a) * i as f64 / 101.0).collect();
        let s = |t: f64| m.sample_unchecked(t);
        c.add(&format!("{}.m_dot", m.name), Ok(fd_error(|t| s(t).m, |t| s(t).m_dot, &ts)), 1e-6);
        c.add(&format!("{}.m_ddot", m.name), Ok(fd_error(|t| s(t).m_dot, |t| s(t).m_ddot, &ts)), 1e-6);
        c.add(&format!("{}.m_dddot", m.name), Ok(fd_error(|t| s(t).m_ddot, |t| s(t).m_dddot, &ts)), 1e-6);
        c.add(&format!("{}.omega_dot", m.name), Ok(fd_error(|t| s(t).omega, |t| s(t).omega_dot, &ts)), 1e-6);
        c.add(&format!("{}.omega2_dot", m.name), Ok(fd_error(|t| s(t).omega2(), |t| s(t).omega2_dot(), &ts)), 1e-6);
        c.add_bool(&format!("{}.mass_positive", m.name), Ok(ts.iter().all(|&t| s(t).m > 0.0)));
    }

    c.add(
        "exp_frequency.m_omega_constant",
        model("exp_frequency", &[("omega0", 1.7), ("gamma0", 0.6), ("c", 0.9)]).map(|m| {
            let target = 1.0 / (2.0 * 0.81);
            max_of(linspace(0.0, 5.0, 101).into_iter().map(|t| (m.m(t) * m.omega(t) / target - 1.0).abs()))
        }),
        1e-12,
    );
    c.add(
        "harmonic.omega2",
        model("harmonic", &[("omega0", 1.3)]).map(|m| {
            max_of(linspace(0.0, 10.0, 11).into_iter().map(|t| (m.sample_unchecked(t).omega2() - 1.69).abs()))
        }),
        1e-15,
    );
    c.add(
        "kanai_caldirola.omega2",
        model("kanai_caldirola", &[("omega0", 1.0), ("gamma", 1.0)]).and_then(|m| {
            let mut worst: f64 = 0.0;
            for t in linspace(0.0, 3.0, 31) {
                let cs = m.coefficients(t)?;
                worst = worst.max((cs.omega2 - 0.75).abs()).max((cs.damping - 1.0).abs());
            }
            Ok(worst)
        }),
        1e-14,
    );
    c.add(
        "tsquared.coefficients_at_1",
        model("tsquared", &[]).and_then(|m| {
            let cs = m.coefficients(1.0)?;
            Ok((cs.damping - 2.0).abs().max((cs.omega2 - 1.0).abs()))
        }),
        1e-14,
    );
    c.add(
        "exp_frequency.closed_form_eom",
        model("exp_frequency", &[]).and_then(|m| {
            let q = exp_frequency_solution(1.0, 1.0, 1.0, 0.5);
            let mut worst: f64 = 0.0;
            for t in linspace(0.0, 2.0, 41) {
                worst = worst.max(m.eom_residual(&q, t)?.abs());
            }
            Ok(worst)
        }),
        1e-9,
    );
    c.add(
        "tsquared.closed_form_eom",
        model("tsquared", &[]).and_then(|m| {
            let q = tsquared_solution(1.0, std::f64::consts::FRAC_1_SQRT_2, 1.0, 0.0);
            let mut worst: f64 = 0.0;
            for t in [0.5, 1.0, 2.0] {
                worst = worst.max(m.eom_residual(&q, t)?.abs());
            }
            Ok(worst)
        }),
        1e-9,
    );
    c.checks
}

fn rel_sigma_error(states: &[ErmakovState], exact: impl Fn(f64) -> f64) -> f64 {
    max_of(states.iter().map(|s| (s.sigma / exact(s.t) - 1.0).abs()))
}

fn ermakov_suite() -> Vec<Check> {
    let mut c = Collector::new("ermakov");
    let opts = EpOptions::default();
    let root_half = std::f64::consts::FRAC_1_SQRT_2;

    // Constant branch of the harmonic oscillator.
    let harmonic = model("harmonic", &[]);
    let constant = harmonic
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|m| integrate_ep(m, (root_half, 0.0), &linspace(0.0, 20.0, 201), &opts));
    c.add(
        "harmonic_const.sigma",
        constant.clone().map(|s| max_of(s.iter().map(|x| (x.sigma - root_half).abs()))),
        1e-9,
    );
    c.add("harmonic_const.theta_20", constant.clone().map(|s| (s.last().unwrap().theta - 40.0).abs()), 1e-7);

    // Oscillating branch, k = 2.
    let osc = SigmaBranch::Oscillating { omega: 1.0, k: 2.0, c1: 0.0 };
    let (s0, sd0, _) = osc.eval(0.0);
    let osc_traj = harmonic
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|m| integrate_ep(m, (s0, sd0), &linspace(0.0, 20.0, 401), &opts));
    c.add("harmonic_oscillating.sigma", osc_traj.clone().map(|s| rel_sigma_error(&s, |t| osc.eval(t).0)), 1e-6);

    // Kanai–Caldirola with Ω0² = −0.16.
    let kc = model("kanai_caldirola", &[("omega0", 0.3), ("gamma", 1.0)]);
    let kc_traj =
        kc.as_ref().map_err(Clone::clone).and_then(|m| integrate_ep(m, (1.0, 0.0), &linspace(0.0, 3.0, 301), &opts));
    let hyp = SigmaBranch::fit(-0.16, 1.0, 0.0, 0.0);
    c.add(
        "kc_hyperbolic.sigma",
        kc_traj.clone().and_then(|s| {
            let b = hyp.clone()?;
            Ok(rel_sigma_error(&s, |t| b.eval(t).0))
        }),
        1e-6,
    );

    // Pinney superposition against integration, with its own residual.
    let pinney_models = [
        ("harmonic", vec![("omega0", 1.4)], (0.5, 0.3)),
        ("kanai_caldirola", vec![("omega0", 1.0), ("gamma", 1.0)], (0.9, -0.1)),
        ("kanai_caldirola", vec![("omega0", 0.3), ("gamma", 1.0)], (1.0, 0.0)),
        ("exp_frequency", vec![], (0.8, 0.2)),
        ("tsquared", vec![], (0.6, 0.1)),
    ];
    for (i, (name, params, init)) in pinney_models.iter().enumerate() {
        let res = model(name, params).and_then(|m| {
            let (t0, t1) = m.default_window();
            let grid = linspace(t0, t1, 101);
            let pair = BasisPair::for_model(&m, t0)?;
            let comb = PinneyCombination::fit(&pair, 0.25, init.0, init.1, t0)?;
            let num = integrate_ep(&m, *init, &grid, &opts)?;
            let mut agree: f64 = 0.0;
            let mut resid: f64 = 0.0;
            let mut wr: f64 = 0.0;
            for s in &num {
                let p = pinney_sample(&pair, &comb, s.t)?;
                agree = agree.max((p.sigma / s.sigma - 1.0).abs());
                resid = resid.max(p.residual.abs() / (1.0 + 0.25 / p.sigma.powi(3)));
                wr = wr.max((pair.wronskian_at(s.t) / pair.w0() - 1.0).abs());
            }
            Ok((agree, resid, wr))
        });
        let tag = format!("{name}#{i}");
        c.add(&format!("pinney_vs_numeric.{tag}"), res.clone().map(|r| r.0), 1e-6);
        c.add(&format!("pinney_residual.{tag}"), res.clone().map(|r| r.1), 1e-8);
        c.add(&format!("wronskian_drift.{tag}"), res.map(|r| r.2), 1e-8);
    }
    c.add(
        "pinney_constants.k2_turning_point",
        crate::ermakov::harmonic_pinney_constants(1.0, 2.0, 0.0, 0.0).and_then(|comb| {
            let (s, _) = crate::ermakov::sigma_from_basis(&BasisPair::constant(1.0, 0.0), &comb, 0.0)?;
            Ok((s * s - (2.0 - 3f64.sqrt()) / 2.0).abs())
        }),
        1e-15,
    );

    // k conservation over 20 periods for constant Ω².
    let drift = |m: &ModelDescriptor, init: (f64, f64)| -> Result<f64> {
        let w = m.sample(0.0)?.omega2().sqrt();
        let t1 = 20.0 * 2.0 * std::f64::consts::PI / w;
        let s = integrate_ep(m, init, &linspace(0.0, t1, 401), &tight())?;
        Ok(max_of(s.iter().map(|x| (x.k - s[0].k).abs())))
    };
    c.add("k_drift.harmonic", harmonic.as_ref().map_err(Clone::clone).and_then(|m| drift(m, (s0, sd0))), 1e-8);
    c.add("k_drift.kanai_caldirola", model("kanai_caldirola", &[]).and_then(|m| drift(&m, (1.0, 0.2))), 1e-8);

    // Balance k = E − F for time-dependent Ω².
    for name in ["exp_frequency", "tsquared", "bessel_type"] {
        let res = model(name, &[]).and_then(|m| {
            let s = perturbed_trajectory(&m, 201)?;
            Ok((max_of(s.iter().map(|x| (x.k - s[0].k).abs())), s.windows(2).all(|w| w[1].theta >= w[0].theta)))
        });
        c.add(&format!("balance_drift.{name}"), res.clone().map(|r| r.0), 1e-7);
        c.add_bool(&format!("theta_nondecreasing.{name}"), res.map(|r| r.1));
    }

    // Closed-form phases against the integrated θ.
    for (case, res) in phase_comparisons() {
        c.add(&format!("phase.{case}"), res, 1e-6);
    }
    c.add(
        "phase.exp_frequency_reference",
        PhaseCase::from_name("exp_frequency", &BTreeMap::new())
            .and_then(|p| phase_closed_form(&p, 0.0, 1.0))
            .map(|v| (v - 1.264_241_117_657_115_4).abs()),
        1e-12,
    );
    c.checks
}

/// `(case, |θ_closed − θ_integrated|)` for the six closed-form phases.
pub fn phase_comparisons() -> Vec<(&'static str, Result<f64>)> {
    let opts = tight();
    let compare = |m: &ModelDescriptor, case: &PhaseCase, init: (f64, f64), t0: f64, t1: f64| -> Result<f64> {
        let grid = linspace(t0, t1, 51);
        let states = integrate_ep(m, init, &grid, &opts)?;
        let mut worst: f64 = 0.0;
        for s in &states {
            worst = worst.max((phase_closed_form(case, t0, s.t)? - s.theta).abs());
        }
        Ok(worst)
    };
    let params =
        |kv: &[(&str, f64)]| -> BTreeMap<String, f64> { kv.iter().map(|(k, v)| (k.to_string(), *v)).collect() };
    let mut out = Vec::new();
    out.push((
        "harmonic_const",
        model("harmonic", &[]).and_then(|m| {
            let case = PhaseCase::from_name("harmonic_const", &params(&[("omega0", 1.0)]))?;
            compare(&m, &case, (std::f64::consts::FRAC_1_SQRT_2, 0.0), 0.0, 20.0)
        }),
    ));
    out.push((
        "harmonic_oscillating",
        model("harmonic", &[]).and_then(|m| {
            let case =
                PhaseCase::from_name("harmonic_oscillating", &params(&[("omega0", 1.0), ("k", 2.0), ("c1", 0.0)]))?;
            let (s0, sd0, _) = SigmaBranch::Oscillating { omega: 1.0, k: 2.0, c1: 0.0 }.eval(0.0);
            compare(&m, &case, (s0, sd0), 0.0, 20.0)
        }),
    ));
    out.push((
        "kc_hyperbolic",
        model("kanai_caldirola", &[("omega0", 0.3), ("gamma", 1.0)]).and_then(|m| {
            let SigmaBranch::Hyperbolic { c1, c2, .. } = SigmaBranch::fit(-0.16, 1.0, 0.0, 0.0)? else {
                unreachable!()
            };
            let case = PhaseCase::from_name(
                "kc_hyperbolic",
                &params(&[("omega0", 0.3), ("gamma", 1.0), ("c1", c1), ("c2", c2)]),
            )?;
            compare(&m, &case, (1.0, 0.0), 0.0, 3.0)
        }),
    ));
    out.push((
        "exp_frequency",
        model("exp_frequency", &[]).and_then(|m| {
            let case = PhaseCase::from_name("exp_frequency", &BTreeMap::new())?;
            let init = default_initial_condition(&m, 0.0, 2.0)?;
            compare(&m, &case, init, 0.0, 2.0)
        }),
    ));
    out.push((
        "tsquared",
        model("tsquared", &[("m0", 1.0), ("c", 1.0)]).and_then(|m| {
            let case = PhaseCase::from_name("tsquared", &params(&[("m0", 1.0), ("c", 1.0)]))?;
            let init = default_initial_condition(&m, 1.0, 2.0)?;
            compare(&m, &case, init, 1.0, 2.0)
        }),
    ));
    out.push((
        "bessel_series",
        model("bessel_type", &[]).and_then(|m| {
            let case = PhaseCase::from_name("bessel_series", &BTreeMap::new())?;
            let init = default_initial_condition(&m, 0.1, 1.0)?;
            compare(&m, &case, init, 0.1, 1.0)
        }),
    ));
    out
}

struct QuantumErrors {
    normalization: f64,
    bound: f64,
    routes: f64,
    moduli: f64,
    sum_diff: f64,
    saturation: f64,
    mu_one: f64,
}

fn quantum_errors(m: &ModelDescriptor, states: &[ErmakovState]) -> Result<QuantumErrors> {
    let reference = Reference::at(m, states[0].t)?;
    let mut e = QuantumErrors {
        normalization: 0.0,
        bound: 0.0,
        routes: 0.0,
        moduli: 0.0,
        sum_diff: 0.0,
        saturation: 0.0,
        mu_one: 0.0,
    };
    for s in states {
        let q = quadratures(m, s, HBAR)?;
        let b = bogolubov(m, s, reference)?;
        let sample = m.sample(s.t)?;
        let via = uncertainty_via_bogolubov(&b, HBAR);
        let direct = q.product_from_variances();
        e.normalization = e.normalization.max((b.normalization() - 1.0).abs());
        e.bound = e.bound.max(0.5 * HBAR - q.product);
        e.routes = e
            .routes
            .max((via / q.product - 1.0).abs())
            .max((direct / q.product - 1.0).abs())
            .max((via / direct - 1.0).abs());
        let (mu2, nu2) = moduli_from_invariants(m, s, reference)?;
        let scale = b.mu.norm_sqr().max(1.0);
        e.moduli = e.moduli.max((mu2 - b.mu.norm_sqr()).abs() / scale).max((nu2 - b.nu.norm_sqr()).abs() / scale);
        let m0w0 = reference.m0 * reference.omega0;
        let eta = crate::quantum::eta(sample.damping(), s);
        let sum = (2.0 * sample.m / m0w0).sqrt() * eta;
        let diff = (2.0 * m0w0 / sample.m).sqrt() * s.sigma;
        e.sum_diff = e.sum_diff.max((b.mu + b.nu - sum).norm() / sum.norm()).max((b.mu - b.nu - diff).norm() / diff);
        e.saturation = e.saturation.max((q.product - 0.5 * HBAR).abs());
        e.mu_one = e.mu_one.max((b.mu - 1.0).norm()).max(b.nu.norm());
    }
    Ok(e)
}

pub const MINIMUM_MODELS: [&str; 4] = ["harmonic", "exp_frequency", "tsquared", "bessel_type"];

fn bogolubov_suite() -> Vec<Check> {
    let mut c = Collector::new("bogolubov");
    for m in catalog() {
        for (label, traj) in
            [("default", catalog_trajectory(&m, SAMPLES)), ("perturbed", perturbed_trajectory(&m, SAMPLES))]
        {
            let e = traj.and_then(|s| quantum_errors(&m, &s));
            let tag = format!("{}.{}", m.name, label);
            c.add(&format!("normalization.{tag}"), e.as_ref().map(|e| e.normalization).map_err(Clone::clone), 1e-10);
            c.add(
                &format!("heisenberg_bound.{tag}"),
                e.as_ref().map(|e| e.bound.max(0.0)).map_err(Clone::clone),
                1e-12,
            );
            c.add(&format!("route_equivalence.{tag}"), e.as_ref().map(|e| e.routes).map_err(Clone::clone), 1e-10);
            c.add(&format!("moduli_from_invariants.{tag}"), e.as_ref().map(|e| e.moduli).map_err(Clone::clone), 1e-8);
            c.add(&format!("mu_plus_minus_nu.{tag}"), e.as_ref().map(|e| e.sum_diff).map_err(Clone::clone), 1e-12);
            if label == "default" && MINIMUM_MODELS.contains(&m.name.as_str()) {
                c.add(&format!("saturation.{tag}"), e.as_ref().map(|e| e.saturation).map_err(Clone::clone), 1e-9);
                c.add(&format!("mu_one_nu_zero.{tag}"), e.as_ref().map(|e| e.mu_one).map_err(Clone::clone), 1e-9);
            }
        }
    }
    // Largest excess of the oscillating harmonic branch over one σ period is
    // (ħ/2)(k/ω0 − 1).
    for k in [1.1, 1.5, 2.0, 3.0] {
        c.add(
            &format!("oscillating_excess.k{k}"),
            oscillating_excess(1.0, k).map(|v| (v / (0.5 * HBAR * (k - 1.0)) - 1.0).abs()),
            1e-6,
        );
    }
    c.checks
}

/// Numerically sampled `max_t (product − ħ/2)` along the oscillating
/// harmonic branch with first integral `k` (ħ = 1).
pub fn oscillating_excess(omega0: f64, k: f64) -> Result<f64> {
    let m = model("harmonic", &[("omega0", omega0)])?;
    let (s0, sd0, _) = SigmaBranch::Oscillating { omega: omega0, k, c1: 0.0 }.eval(0.0);
    let period = std::f64::consts::PI / omega0;
    let states = integrate_ep(&m, (s0, sd0), &linspace(0.0, period, 10001), &tight())?;
    let mut worst = f64::NEG_INFINITY;
    for s in &states {
        worst = worst.max(quadratures(&m, s, HBAR)?.product - 0.5 * HBAR);
    }
    Ok(worst)
}

fn minimum_suite() -> Vec<Check> {
    let mut c = Collector::new("minimum");
    for name in MINIMUM_MODELS {
        let res = model(name, &[]).and_then(MinUncertaintyModel::from_model).and_then(|mm| {
            let (t0, t1) = mm.base.default_window();
            let cc = mm.c;
            let m_ref = mm.base.m(mm.t0);
            let reference = Reference::at(&mm.base, mm.t0)?;
            let mut errs = [0.0f64; 8];
            let mut h_scaled0 = None;
            for t in linspace(t0, t1, SAMPLES) {
                let s = sigma_minimum(&mm, t)?;
                let q = quadratures(&mm.base, &s, HBAR)?;
                let b = bogolubov(&mm.base, &s, reference)?;
                let v = vacuum_expectations(&mm.base, &s, HBAR)?;
                let ms = mm.base.sample(t)?;
                errs[0] = errs[0].max((q.product - 0.5 * HBAR).abs());
                errs[1] = errs[1].max((b.mu - 1.0).norm()).max(b.nu.norm());
                errs[2] = errs[2].max((v.q2 / (HBAR * cc * cc) - 1.0).abs());
                errs[3] = errs[3].max((v.p2 / (HBAR / (4.0 * cc * cc)) - 1.0).abs());
                errs[4] = errs[4].max((v.energy / (0.5 * HBAR * ms.omega) - 1.0).abs());
                let scaled = v.energy * ms.m / m_ref;
                let h0 = *h_scaled0.get_or_insert(scaled);
                errs[5] = errs[5].max((scaled / h0 - 1.0).abs());
                errs[6] = errs[6].max(mm.mmin_residual(t)?.abs() * cc.powi(4));
                // σ̈ from σ = c sqrt(m).
                let r = ms.m.sqrt();
                let sdd = cc * (ms.m_ddot / (2.0 * r) - ms.m_dot * ms.m_dot / (4.0 * ms.m * r));
                let ep = sdd + ms.omega2() * s.sigma - 0.25 / s.sigma.powi(3);
                errs[7] = errs[7].max(ep.abs() / (1.0 + 0.25 / s.sigma.powi(3)));
            }
            Ok(errs)
        });
        let names = [
            ("product_saturation", 1e-10),
            ("mu_one_nu_zero", 1e-9),
            ("vacuum_q2", 1e-10),
            ("vacuum_p2", 1e-10),
            ("zero_point_energy", 1e-9),
            ("rescaled_hamiltonian", 1e-9),
            ("mmin_residual", 1e-8),
            ("ep_residual", 1e-8),
        ];
        for (i, (label, tol)) in names.iter().enumerate() {
            c.add(&format!("{label}.{name}"), res.as_ref().map(|e| e[i]).map_err(Clone::clone), *tol);
        }
        c.add(
            &format!("full_stack_saturation.{name}"),
            model(name, &[])
                .and_then(|m| catalog_trajectory(&m, SAMPLES).and_then(|s| quantum_errors(&m, &s)))
                .map(|e| e.saturation),
            1e-8,
        );
    }

    c.add_bool(
        "criterion.exp_frequency",
        model("exp_frequency", &[])
            .and_then(|m| check_criterion(&m, 1e-8))
            .map(|r| r.is_minimum && (r.c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12),
    );
    c.add_bool(
        "criterion.harmonic",
        model("harmonic", &[])
            .and_then(|m| check_criterion(&m, 1e-8))
            .map(|r| r.is_minimum && (r.c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15),
    );
    c.add_bool(
        "criterion.kanai_caldirola_rejected",
        model("kanai_caldirola", &[]).and_then(|m| check_criterion(&m, 1e-8)).map(|r| !r.is_minimum),
    );

    // Perturbing σ̇ by ε raises the product by ħσ²ε²(1 + o(1)).
    c.add(
        "argmin_quadratic_growth",
        model("exp_frequency", &[]).and_then(MinUncertaintyModel::from_model).and_then(|mm| {
            let mut worst: f64 = 0.0;
            for t in [0.0, 0.7, 1.9] {
                let base = sigma_minimum(&mm, t)?;
                for eps in [1e-3, 1e-4] {
                    let mut s = base;
                    s.sigma_dot += eps;
                    let excess = quadratures(&mm.base, &s, HBAR)?.product - 0.5 * HBAR;
                    if !(excess > 0.0) {
                        return Ok(f64::INFINITY);
                    }
                    worst = worst.max((excess / (HBAR * base.sigma.powi(2) * eps * eps) - 1.0).abs());
                }
            }
            Ok(worst)
        }),
        1e-4,
    );

    let eom = |name: &str, q: &dyn Fn(f64) -> [f64; 3], ts: &[f64]| -> Result<(f64, f64)> {
        let mm = MinUncertaintyModel::from_model(model(name, &[])?)?;
        let mut worst: f64 = 0.0;
        let mut same: f64 = 0.0;
        for &t in ts {
            let r = minimum_eom_residual(&mm, q, t)?;
            worst = worst.max(r.abs());
            same = same.max((r - mm.base.eom_residual(q, t)?).abs());
        }
        Ok((worst, same))
    };
    let exp_q = exp_frequency_solution(1.0, 1.0, 0.4, -1.1);
    let ts_q = tsquared_solution(1.0, std::f64::consts::FRAC_1_SQRT_2, 0.3, 0.8);
    let e1 = eom("exp_frequency", &exp_q, &linspace(0.0, 2.0, 21));
    let e2 = eom("tsquared", &ts_q, &[0.5, 1.0, 2.0]);
    c.add("min_eom_residual.exp_frequency", e1.as_ref().map(|e| e.0).map_err(Clone::clone), 1e-9);
    c.add("min_eom_matches_base.exp_frequency", e1.map(|e| e.1), 1e-10);
    c.add("min_eom_residual.tsquared", e2.as_ref().map(|e| e.0).map_err(Clone::clone), 1e-9);
    c.add("min_eom_matches_base.tsquared", e2.map(|e| e.1), 1e-10);

    c.add(
        "theta.tsquared",
        model("tsquared", &[("m0", 1.0), ("c", 1.0)])
            .and_then(|m| MinUncertaintyModel::new(m, 1.0, 2.0))
            .and_then(|mm| Ok((sigma_minimum(&mm, 2.0)?.theta - 0.5).abs())),
        1e-12,
    );
    c.checks
}

fn series_suite(order: usize) -> Vec<Check> {
    let mut c = Collector::new("series");
    let order = order.max(1);
    let (w0, lambda, mu_s) = (1.0, 2.0, 1.0);

    let l2 = rational(lambda) * rational(lambda);
    let m2 = rational(mu_s) * rational(mu_s);
    let n_exact = order.max(10);
    let ratio: Vec<BigRational> = exact::ratio_coefficients(&l2, &m2, n_exact + 1);
    let product = exact::product_coefficients(&l2, &m2, n_exact + 1);
    let tri = exact::triangular_coefficients(&l2, &m2, n_exact + 1);
    c.add_bool("exact.product_equals_ratio", Ok(ratio == product));
    c.add_bool(
        "exact.triangular_equals_ratio",
        Ok(ratio.iter().enumerate().all(|(k, r)| tri[2 * k + 1] == *r) && tri.iter().step_by(2).all(|v| v.is_zero())),
    );

    // Exact residual through t^{2N−1} of the order-N truncation, for the
    // polynomial normalized by a_1 (a_1 itself is irrational).
    let exact_resid = {
        let mut full = vec![BigRational::zero(); 2 * order];
        for (k, r) in ratio.iter().take(order).enumerate() {
            full[2 * k + 1] = r.clone();
        }
        // Dividing the equation by a_1² turns −4ω0² into −(λ² − 1).
        let shifted = &l2 - BigRational::from_integer(1.into());
        let r = residual_coefficients(&shifted, &l2, &m2, &full);
        (-2..=(2 * order as i64 - 1)).filter(|&p| !r.at_power(p).is_zero()).count()
    };
    c.add("exact.residual_nonzero_terms", Ok(exact_resid as f64), 0.0);

    let series = build_series(w0, lambda, mu_s, order);
    c.add(
        "symbolic_residual_float",
        series.as_ref().map_err(Clone::clone).map(|s| {
            let r = s.symbolic_residual();
            max_of((-2..=(2 * order as i64 - 1)).map(|p| r.at_power(p).abs()))
        }),
        1e-12,
    );
    c.add(
        "forced_a0_residual",
        Ok({
            let a0 = 0.3;
            let r = residual_coefficients(&4.0, &(lambda * lambda), &(mu_s * mu_s), &[a0, 1.0]);
            (r.at_power(-2) - lambda * lambda * a0 * a0).abs()
        }),
        1e-15,
    );

    // Numeric residual decay.
    let residuals: Result<Vec<f64>> = (1..=order.max(8))
        .map(|n| build_series(w0, lambda, mu_s, n).and_then(|s| alpha_numeric_check(&s, 0.1, 0.8)))
        .collect();
    c.add("numeric_residual.order8", residuals.as_ref().map(|r| r[7]).map_err(Clone::clone), 1e-6);
    let decay = |r: &[f64], hi: usize| -> f64 {
        // Number of orders in 3..=hi that fail to decrease while above the
        // rounding floor.
        (3..hi)
            .filter(|&n| {
                let (a, b) = (r[n - 1], r[n]);
                !(b < a || (a <= RESIDUAL_FLOOR && b <= RESIDUAL_FLOOR))
            })
            .count() as f64
    };
    c.add(
        "numeric_residual.strictly_decreasing_3_to_8",
        residuals.as_ref().map(|r| (3..8).filter(|&n| !(r[n] < r[n - 1])).count() as f64).map_err(Clone::clone),
        0.0,
    );
    if order > 8 {
        c.add(
            &format!("numeric_residual.decreasing_3_to_{order}"),
            residuals.as_ref().map(|r| decay(r, order)).map_err(Clone::clone),
            0.0,
        );
    }

    c.add(
        "shooting_agreement",
        series.as_ref().map_err(Clone::clone).and_then(|s| {
            let grid = linspace(0.1, 0.5, 41);
            let shot = shooting_solution(w0, lambda, mu_s, 1e-4, &grid, 1e-12)?;
            Ok(max_of(grid.iter().zip(&shot).map(|(&t, a)| (s.eval(t)[0] - a).abs() / a)))
        }),
        1e-6,
    );

    c.add(
        "reciprocal_identity",
        series.as_ref().map_err(Clone::clone).map(|s| {
            let hat: Vec<f64> = s.a.iter().map(|a| a / s.a1()).collect();
            let n = s.a_tilde.len();
            max_of((0..n).map(|k| {
                let mut v = 0.0;
                for j in 0..=k {
                    if j < hat.len() {
                        v += hat[j] * s.a_tilde[k - j];
                    }
                }
                (v - if k == 0 { 1.0 } else { 0.0 }).abs()
            }))
        }),
        1e-12,
    );

    c.add_bool(
        "determinant_form_orders_le_6",
        Ok({
            let mut ok = true;
            for n in 1..=6 {
                let hat = exact::ratio_coefficients(&l2, &m2, n);
                let tilde = exact::reciprocal(&hat, n + 1);
                let mut full = vec![BigRational::zero(); 2 * n];
                for (k, h) in hat.iter().enumerate() {
                    full[2 * k + 1] = h.clone();
                }
                for (j, t) in tilde.iter().enumerate() {
                    if 2 * j < 2 * n && exact::reciprocal_by_determinant(&full, 2 * j) != *t {
                        ok = false;
                    }
                }
            }
            ok
        }),
    );

    c.add(
        "theta_series_vs_quadrature",
        series.as_ref().map_err(Clone::clone).and_then(|s| {
            let th = theta_series(s, 0.5, 0.8)?;
            let q = integrate_gk(&|t: f64| 2.0 * w0 / s.eval(t)[0], 0.5, 0.8, 1e-14);
            Ok((th - q).abs())
        }),
        1e-8,
    );
    c.add(
        "theta_series_linear_case",
        build_series(1.5, 3.0, 0.0, order).and_then(|s| {
            let th = theta_series(&s, 0.5, 2.0)?;
            Ok((th - 2.0 * 1.5 / s.a1() * 4f64.ln()).abs())
        }),
        1e-13,
    );
    c.add_bool(
        "radius_guard",
        Ok(matches!(
            series.as_ref().map(|s| alpha_numeric_check(s, 0.1, 5.0 / mu_s)),
            Ok(Err(TdoError::ConvergenceWarning { .. }))
        )),
    );
    c.add(
        "bessel_type_closure",
        model("bessel_type", &[("order", order as f64)]).map(|m| {
            let (lo, hi) = (m.domain.lo, m.domain.hi);
            let m0w0 = m.param("m0") * m.param("omega0");
            max_of(linspace(lo, hi, 201).into_iter().map(|t| (m.m(t) * m.omega(t) / m0w0 - 1.0).abs()))
        }),
        1e-9,
    );
    c.add(
        "large_k0_eom",
        LargeK0Approx::new(2.0, 1.0, 1.0, 1.0, 0.0).and_then(|a| a.eom_residual(0.0, 1.0, 101)),
        0.05,
    );
    c.add(
        "mu_zero_residual",
        build_series(1.0, 2.5, 0.0, order).and_then(|s| alpha_numeric_check(&s, 0.1, 50.0)),
        1e-12,
    );
    c.checks
}

fn bessel_suite() -> Vec<Check> {
    let mut c = Collector::new("bessel");
    let xs = linspace(0.1, 20.0, 400);
    for (label, rho) in [("0", 0.0), ("1/3", 1.0 / 3.0), ("1/2", 0.5), ("1", 1.0)] {
        c.add(
            &format!("ode_residual.rho={label}"),
            Ok(max_of(xs.iter().map(|&x| bessel_ode_residual(rho, x).abs()))),
            1e-8,
        );
    }
    for (label, nu) in [("0", 0.5), ("1/3", (5.0f64 / 36.0).sqrt()), ("1/2", 0.0)] {
        c.add(&format!("reduction.rho={label}"), bessel_reduction_check(1.0, 1.0, nu, &xs), 1e-7);
    }
    c.add("power_law.quarter", power_law_check(3.0 / 16.0, 1.3, -0.7, &linspace(0.1, 10.0, 100)), 1e-10);
    c.add("reference.j0_1", Ok((crate::series::bessel::bessel_j(0.0, 1.0) - 0.765_197_686_557_966_6).abs()), 1e-14);
    c.checks
}
