//! The minimum-uncertainty criterion `m ω = 1/(2c²)` and its distinguished
//! auxiliary solution `σ = c sqrt(m)`.

use crate::ermakov::{first_integral, ErmakovState, DEFAULT_K};
use crate::error::{Result, TdoError};
use crate::models::ModelDescriptor;
use crate::ode::integrate_gk;
use serde::Serialize;

pub const CRITERION_SAMPLES: usize = 201;
pub const CRITERION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionReport {
    pub is_minimum: bool,
    pub c: f64,
    pub max_violation: f64,
    pub samples: usize,
}

/// Samples `m ω` on `samples` uniform points of `[t0, t1]`; `c` comes from
/// the median and `max_violation` is the largest relative deviation from it.
pub fn check_criterion_on(
    model: &ModelDescriptor,
    t0: f64,
    t1: f64,
    samples: usize,
    tol: f64,
) -> Result<CriterionReport> {
    if !(tol > 0.0) {
        return Err(TdoError::Parameter(format!("tol must be positive, got {tol}")));
    }
    if samples == 0 || !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(TdoError::EmptyWindow(format!("[{t0}, {t1}] with {samples} samples")));
    }
    let step = if samples > 1 { (t1 - t0) / (samples - 1) as f64 } else { 0.0 };
    let mut products = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = model.sample(t0 + step * i as f64)?;
        products.push(s.m * s.omega);
    }
    let mut sorted = products.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    if !(median > 0.0) {
        return Ok(CriterionReport { is_minimum: false, c: f64::NAN, max_violation: f64::INFINITY, samples });
    }
    let max_violation = products.iter().map(|p| ((p - median) / median).abs()).fold(0.0, f64::max);
    Ok(CriterionReport { is_minimum: max_violation <= tol, c: (2.0 * median).powf(-0.5), max_violation, samples })
}

/// [`check_criterion_on`] over the model's default window.
pub fn check_criterion(model: &ModelDescriptor, tol: f64) -> Result<CriterionReport> {
    let (t0, t1) = model.default_window();
    check_criterion_on(model, t0, t1, CRITERION_SAMPLES, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinUncertaintyModel {
    pub base: ModelDescriptor,
    pub c: f64,
    /// Lower limit of the phase integral.
    pub t0: f64,
}

impl MinUncertaintyModel {
    /// Wraps `base` after checking the criterion on `[t0, t1]`.
    pub fn new(base: ModelDescriptor, t0: f64, t1: f64) -> Result<Self> {
        let r = check_criterion_on(&base, t0, t1, CRITERION_SAMPLES, CRITERION_TOL)?;
        if !r.is_minimum {
            return Err(TdoError::CriterionViolated { max_violation: r.max_violation, tol: CRITERION_TOL });
        }
        Ok(MinUncertaintyModel { base, c: r.c, t0 })
    }

    /// Wraps `base` over its default window.
    pub fn from_model(base: ModelDescriptor) -> Result<Self> {
        let (t0, t1) = base.default_window();
        MinUncertaintyModel::new(base, t0, t1)
    }

    /// `(σ, σ̇) = (c sqrt(m), c ṁ/(2 sqrt(m)))`.
    pub fn sigma(&self, t: f64) -> Result<(f64, f64)> {
        let s = self.base.sample(t)?;
        let r = s.m.sqrt();
        Ok((self.c * r, self.c * s.m_dot / (2.0 * r)))
    }

    /// `θ = 2∫ω dt` from `t0` by adaptive quadrature.
    pub fn theta(&self, t: f64) -> Result<f64> {
        self.base.domain.check(t)?;
        let base = &self.base;
        let w = |s: f64| 2.0 * base.omega(s);
        let (lo, hi, sign) = if t >= self.t0 { (self.t0, t, 1.0) } else { (t, self.t0, -1.0) };
        Ok(sign * integrate_gk(&w, lo, hi, 1e-13))
    }

    /// `2 m m̈ − ṁ² + 4Ω² m² − 1/c⁴`, which vanishes iff `c sqrt(m)` solves
    /// the auxiliary equation.
    pub fn mmin_residual(&self, t: f64) -> Result<f64> {
        let s = self.base.sample(t)?;
        Ok(2.0 * s.m * s.m_ddot - s.m_dot * s.m_dot + 4.0 * s.omega2() * s.m * s.m - self.c.powi(-4))
    }
}

/// Auxiliary state on the minimum branch at `t`: `k` is the first integral
/// at `t0` and `F` its change since then.
pub fn sigma_minimum(model: &MinUncertaintyModel, t: f64) -> Result<ErmakovState> {
    let (sigma, sigma_dot) = model.sigma(t)?;
    let (s0, sd0) = model.sigma(model.t0)?;
    let e = first_integral(model.base.sample(t)?.omega2(), DEFAULT_K, sigma, sigma_dot);
    let e0 = first_integral(model.base.sample(model.t0)?.omega2(), DEFAULT_K, s0, sd0);
    Ok(ErmakovState { t, sigma, sigma_dot, theta: model.theta(t)?, k: e0, f: e - e0 })
}

/// Initial data used when none is given: the minimum branch when the
/// criterion holds on `[t0, t1]`, otherwise `σ0 = (4|Ω²(t0)|)^{-1/4}` (the
/// constant solution for constant `Ω² > 0`) with `σ̇0 = 0`.
pub fn default_initial_condition(model: &ModelDescriptor, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let r = check_criterion_on(model, t0, t1, CRITERION_SAMPLES, CRITERION_TOL)?;
    if r.is_minimum {
        let s = model.sample(t0)?;
        let root = s.m.sqrt();
        return Ok((r.c * root, r.c * s.m_dot / (2.0 * root)));
    }
    let w2 = model.sample(t0)?.omega2().abs();
    if w2 > 1e-300 {
        Ok(((4.0 * w2).powf(-0.25), 0.0))
    } else {
        Ok((std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }
}

/// `q̈ − (ω̇/ω) q̇ + ω² q`.
pub fn minimum_eom_residual<F: Fn(f64) -> [f64; 3]>(model: &MinUncertaintyModel, q: F, t: f64) -> Result<f64> {
    let s = model.base.sample(t)?;
    if s.omega == 0.0 {
        return Err(TdoError::Domain { t, lo: model.base.domain.lo, hi: model.base.domain.hi });
    }
    let [q0, q1, q2] = q(t);
    Ok(q2 - s.omega_dot / s.omega * q1 + s.omega * s.omega * q0)
}
