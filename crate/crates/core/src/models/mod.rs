//! Oscillator models `m(t)`, `ω(t)` with analytic derivatives, and the
//! derived coefficients `M = ṁ/m` and `Ω² = ω² − Ṁ/2 − M²/4`.

pub mod tabulated;

use crate::error::{Result, TdoError};
use crate::series::{build_series, AlphaSeries};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use tabulated::Table;

pub const DEFAULT_T_MIN: f64 = 1e-3;

pub const CATALOG_NAMES: [&str; 5] = ["harmonic", "kanai_caldirola", "exp_frequency", "tsquared", "bessel_type"];

/// Closed time interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn all() -> Self {
        Domain { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(TdoError::Domain { t, lo: self.lo, hi: self.hi })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Harmonic,
    KanaiCaldirola,
    ExpFrequency,
    TSquared,
    BesselType(AlphaSeries),
    Tabulated(Table),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDescriptor {
    pub name: String,
    pub kind: ModelKind,
    pub params: BTreeMap<String, f64>,
    pub domain: Domain,
}

/// Model values and derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSample {
    pub t: f64,
    pub m: f64,
    pub m_dot: f64,
    pub m_ddot: f64,
    pub m_dddot: f64,
    pub omega: f64,
    pub omega_dot: f64,
}

impl ModelSample {
    /// `M = ṁ/m`.
    pub fn damping(&self) -> f64 {
        self.m_dot / self.m
    }

    /// `Ṁ = m̈/m − M²`.
    pub fn damping_dot(&self) -> f64 {
        let d = self.damping();
        self.m_ddot / self.m - d * d
    }

    /// `M̈ = m⃛/m − ṁ m̈/m² − 2 M Ṁ`.
    pub fn damping_ddot(&self) -> f64 {
        let d = self.damping();
        self.m_dddot / self.m - d * self.m_ddot / self.m - 2.0 * d * self.damping_dot()
    }

    pub fn omega2(&self) -> f64 {
        let d = self.damping();
        self.omega * self.omega - 0.5 * self.damping_dot() - 0.25 * d * d
    }

    /// `d(Ω²)/dt = 2ωω̇ − M̈/2 − MṀ/2`.
    pub fn omega2_dot(&self) -> f64 {
        2.0 * self.omega * self.omega_dot - 0.5 * self.damping_ddot() - 0.5 * self.damping() * self.damping_dot()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSample {
    pub t: f64,
    #[serde(rename = "M")]
    pub damping: f64,
    #[serde(rename = "Omega2")]
    pub omega2: f64,
}

fn defaults(name: &str) -> Option<Vec<(&'static str, f64)>> {
    Some(match name {
        "harmonic" => vec![("m0", 1.0), ("omega0", 1.0)],
        "kanai_caldirola" => vec![("m0", 1.0), ("omega0", 1.0), ("gamma", 1.0)],
        "exp_frequency" => vec![("omega0", 1.0), ("gamma0", 1.0), ("c", FRAC_1_SQRT_2)],
        "tsquared" => vec![("m0", 1.0), ("c", FRAC_1_SQRT_2), ("t_min", DEFAULT_T_MIN)],
        "bessel_type" => vec![
            ("m0", 1.0),
            ("omega0", 1.0),
            ("Omega0", 1.0),
            ("k0", 0.5),
            ("nu", 1.0),
            ("order", 10.0),
            ("t_min", DEFAULT_T_MIN),
        ],
        _ => return None,
    })
}

/// The five catalog models with default parameters.
pub fn catalog() -> Vec<ModelDescriptor> {
    CATALOG_NAMES
        .iter()
        .map(|n| ModelDescriptor::from_catalog(n, &BTreeMap::new()).expect("defaults are valid"))
        .collect()
}

fn positive(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = params[key];
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(TdoError::Parameter(format!("{key} must be positive and finite, got {v}")))
    }
}

fn finite(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = params[key];
    if v.is_finite() {
        Ok(v)
    } else {
        Err(TdoError::Parameter(format!("{key} must be finite, got {v}")))
    }
}

impl ModelDescriptor {
    /// Catalog model `name` with `overrides` applied on top of its defaults.
    pub fn from_catalog(name: &str, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let defs = defaults(name).ok_or_else(|| TdoError::UnknownModel(name.to_string()))?;
        let mut params: BTreeMap<String, f64> = defs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        for (k, v) in overrides {
            match params.get_mut(k) {
                Some(slot) => *slot = *v,
                None => return Err(TdoError::Parameter(format!("model `{name}` has no parameter `{k}`"))),
            }
        }
        let (kind, domain) = match name {
            "harmonic" => {
                positive(&params, "m0")?;
                positive(&params, "omega0")?;
                (ModelKind::Harmonic, Domain::all())
            }
            "kanai_caldirola" => {
                positive(&params, "m0")?;
                positive(&params, "omega0")?;
                finite(&params, "gamma")?;
                (ModelKind::KanaiCaldirola, Domain::all())
            }
            "exp_frequency" => {
                positive(&params, "omega0")?;
                positive(&params, "c")?;
                let g = params["gamma0"];
                if !(g > 0.0 && g.is_finite()) {
                    return Err(TdoError::Parameter(format!("gamma0 must be > 0, got {g}")));
                }
                (ModelKind::ExpFrequency, Domain::all())
            }
            "tsquared" => {
                positive(&params, "m0")?;
                positive(&params, "c")?;
                let t_min = positive(&params, "t_min")?;
                (ModelKind::TSquared, Domain { lo: t_min, hi: f64::INFINITY })
            }
            "bessel_type" => {
                positive(&params, "m0")?;
                let omega0 = positive(&params, "omega0")?;
                let big = finite(&params, "Omega0")?;
                let k0 = finite(&params, "k0")?;
                let nu = finite(&params, "nu")?;
                let t_min = positive(&params, "t_min")?;
                let order = params["order"];
                if !(order >= 1.0 && order.fract() == 0.0 && order <= 1000.0) {
                    return Err(TdoError::Parameter(format!("order must be a positive integer, got {order}")));
                }
                let series = build_series(omega0, 2.0 * big * nu, 2.0 * big * k0, order as usize)?;
                let hi = series.convergence_radius();
                if t_min >= hi {
                    return Err(TdoError::Parameter(format!("t_min = {t_min} is not below the series radius {hi}")));
                }
                let model = ModelDescriptor {
                    name: name.to_string(),
                    kind: ModelKind::BesselType(series.clone()),
                    params: params.clone(),
                    domain: Domain { lo: t_min, hi },
                };
                model.check_alpha_positive()?;
                return Ok(model);
            }
            _ => unreachable!(),
        };
        Ok(ModelDescriptor { name: name.to_string(), kind, params, domain })
    }

    /// User model from tabulated samples.
    pub fn tabulated(name: &str, table: Table) -> Self {
        let domain = Domain { lo: table.t_min(), hi: table.t_max() };
        ModelDescriptor { name: name.to_string(), kind: ModelKind::Tabulated(table), params: BTreeMap::new(), domain }
    }

    fn check_alpha_positive(&self) -> Result<()> {
        if let ModelKind::BesselType(s) = &self.kind {
            let hi = if self.domain.hi.is_finite() { self.domain.hi } else { 10.0 * self.domain.lo.max(1.0) };
            for i in 0..=400 {
                let t = self.domain.lo + (hi - self.domain.lo) * i as f64 / 400.0;
                let a = s.eval(t)[0];
                if !(a > 0.0) {
                    return Err(TdoError::NonPositiveAlpha { t, alpha: a });
                }
            }
        }
        Ok(())
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params.get(key).copied().unwrap_or(f64::NAN)
    }

    /// Values and derivatives at `t`, checked against the domain.
    pub fn sample(&self, t: f64) -> Result<ModelSample> {
        self.domain.check(t)?;
        Ok(self.sample_unchecked(t))
    }

    pub fn sample_unchecked(&self, t: f64) -> ModelSample {
        let p = |k: &str| self.param(k);
        match &self.kind {
            ModelKind::Harmonic => {
                ModelSample { t, m: p("m0"), m_dot: 0.0, m_ddot: 0.0, m_dddot: 0.0, omega: p("omega0"), omega_dot: 0.0 }
            }
            ModelKind::KanaiCaldirola => {
                let g = p("gamma");
                let m = p("m0") * (g * t).exp();
                ModelSample {
                    t,
                    m,
                    m_dot: g * m,
                    m_ddot: g * g * m,
                    m_dddot: g * g * g * m,
                    omega: p("omega0"),
                    omega_dot: 0.0,
                }
            }
            ModelKind::ExpFrequency => {
                let (w0, g, c) = (p("omega0"), p("gamma0"), p("c"));
                let m = (g * t).exp() / (2.0 * c * c * w0);
                let omega = w0 * (-g * t).exp();
                ModelSample {
                    t,
                    m,
                    m_dot: g * m,
                    m_ddot: g * g * m,
                    m_dddot: g * g * g * m,
                    omega,
                    omega_dot: -g * omega,
                }
            }
            ModelKind::TSquared => {
                let (m0, c) = (p("m0"), p("c"));
                let omega = 1.0 / (2.0 * m0 * c * c * t * t);
                ModelSample {
                    t,
                    m: m0 * t * t,
                    m_dot: 2.0 * m0 * t,
                    m_ddot: 2.0 * m0,
                    m_dddot: 0.0,
                    omega,
                    omega_dot: -2.0 * omega / t,
                }
            }
            ModelKind::BesselType(s) => {
                let (m0, w0) = (p("m0"), p("omega0"));
                let [a, da, dda, ddda] = s.eval(t);
                ModelSample {
                    t,
                    m: m0 * a,
                    m_dot: m0 * da,
                    m_ddot: m0 * dda,
                    m_dddot: m0 * ddda,
                    omega: w0 / a,
                    omega_dot: -w0 * da / (a * a),
                }
            }
            ModelKind::Tabulated(table) => {
                let [m, m_dot, m_ddot, m_dddot] = table.mass.eval(t);
                let [omega, omega_dot, _, _] = table.omega.eval(t);
                ModelSample { t, m, m_dot, m_ddot, m_dddot, omega, omega_dot }
            }
        }
    }

    pub fn m(&self, t: f64) -> f64 {
        self.sample_unchecked(t).m
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.sample_unchecked(t).omega
    }

    pub fn coefficients(&self, t: f64) -> Result<CoefficientSample> {
        let s = self.sample(t)?;
        Ok(CoefficientSample { t, damping: s.damping(), omega2: s.omega2() })
    }

    /// True when `Ω²` is constant in time.
    pub fn has_constant_omega2(&self) -> bool {
        matches!(self.kind, ModelKind::Harmonic | ModelKind::KanaiCaldirola)
    }

    /// Time window used by the verification suites and as CLI default.
    pub fn default_window(&self) -> (f64, f64) {
        match &self.kind {
            ModelKind::Harmonic => (0.0, 20.0),
            ModelKind::KanaiCaldirola => (0.0, 3.0),
            ModelKind::ExpFrequency => (0.0, 2.0),
            ModelKind::TSquared => (0.5_f64.max(self.domain.lo), 2.0_f64.max(self.domain.lo * 4.0)),
            ModelKind::BesselType(_) => {
                let lo = 0.1_f64.max(self.domain.lo);
                (lo, 1.0_f64.min(self.domain.hi).max(lo * 2.0).min(self.domain.hi))
            }
            ModelKind::Tabulated(_) => (self.domain.lo, self.domain.hi),
        }
    }

    /// `q̈ + M q̇ + ω² q` for a trajectory returning `[q, q̇, q̈]`.
    pub fn eom_residual<F: Fn(f64) -> [f64; 3]>(&self, q: F, t: f64) -> Result<f64> {
        let s = self.sample(t)?;
        let [q0, q1, q2] = q(t);
        Ok(q2 + s.damping() * q1 + s.omega * s.omega * q0)
    }

    pub fn info(&self) -> ModelInfo {
        ModelInfo {
            name: self.name.clone(),
            params: self.params.clone(),
            domain: self.domain,
            window: self.default_window(),
        }
    }
}

/// Serializable summary for the `catalog` listing.
#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub domain: Domain,
    pub window: (f64, f64),
}

pub fn coefficients(model: &ModelDescriptor, t: f64) -> Result<CoefficientSample> {
    model.coefficients(t)
}

pub fn eom_residual<F: Fn(f64) -> [f64; 3]>(model: &ModelDescriptor, q: F, t: f64) -> Result<f64> {
    model.eom_residual(q, t)
}

/// `q = c1 cos x + c2 sin x`, `x = (ω0/γ0) e^{−γ0 t}`: general solution of the
/// exponentially-decaying-frequency oscillator.
pub fn exp_frequency_solution(omega0: f64, gamma0: f64, c1: f64, c2: f64) -> impl Fn(f64) -> [f64; 3] {
    move |t| {
        let x = omega0 / gamma0 * (-gamma0 * t).exp();
        let dx = -gamma0 * x;
        let ddx = gamma0 * gamma0 * x;
        let (s, c) = x.sin_cos();
        let q = c1 * c + c2 * s;
        let qx = -c1 * s + c2 * c;
        [q, qx * dx, -q * dx * dx + qx * ddx]
    }
}

/// `q = c1 cos(a/t) + c2 sin(a/t)`, `a = 1/(2 m0 c²)`, for the `tsquared` model.
pub fn tsquared_solution(m0: f64, c: f64, c1: f64, c2: f64) -> impl Fn(f64) -> [f64; 3] {
    let a = 1.0 / (2.0 * m0 * c * c);
    move |t| {
        let u = a / t;
        let du = -a / (t * t);
        let ddu = 2.0 * a / (t * t * t);
        let (s, co) = u.sin_cos();
        let q = c1 * co + c2 * s;
        let qu = -c1 * s + c2 * co;
        [q, qu * du, -q * du * du + qu * ddu]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(name: &str, kv: &[(&str, f64)]) -> ModelDescriptor {
        let o = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        ModelDescriptor::from_catalog(name, &o).unwrap()
    }

    #[test]
    fn catalog_has_five_models() {
        let names: Vec<String> = catalog().into_iter().map(|m| m.name).collect();
        assert_eq!(names, CATALOG_NAMES);
    }

    #[test]
    fn reference_values() {
        let h = with("harmonic", &[]);
        assert_eq!(h.m(2.0), 1.0);
        assert_eq!(h.omega(2.0), 1.0);
        let kc = with("kanai_caldirola", &[]);
        assert!((kc.m(1.0) - std::f64::consts::E).abs() < 1e-15);
        let c = kc.coefficients(0.7).unwrap();
        assert!((c.damping - 1.0).abs() < 1e-15);
        assert!((c.omega2 - 0.75).abs() < 1e-14);
        let ts = with("tsquared", &[]);
        let c = ts.coefficients(1.0).unwrap();
        assert!((c.damping - 2.0).abs() < 1e-15);
        assert!((c.omega2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ModelDescriptor::from_catalog("duffing", &BTreeMap::new()), Err(TdoError::UnknownModel(_))));
        let o = [("gamma0".to_string(), 0.0)].into_iter().collect();
        assert!(matches!(ModelDescriptor::from_catalog("exp_frequency", &o), Err(TdoError::Parameter(_))));
        let o = [("gamma".to_string(), 1.0)].into_iter().collect();
        assert!(ModelDescriptor::from_catalog("harmonic", &o).is_err());
        let ts = with("tsquared", &[]);
        assert!(matches!(ts.coefficients(0.0), Err(TdoError::Domain { .. })));
    }

    #[test]
    fn zero_trajectory_has_zero_residual() {
        for m in catalog() {
            let t = m.default_window().0;
            assert_eq!(m.eom_residual(|_| [0.0; 3], t).unwrap(), 0.0);
        }
    }
}
