//! Closed-form amplitude branches for constant `Ω²` (with `K = 1/4`) and the
//! closed-form phases of every case that has one.

use super::atan_tan_unwrapped;
use crate::error::{Result, TdoError};
use crate::series::{build_series, theta_series, AlphaSeries};
use std::collections::BTreeMap;

/// Solutions of `σ̈ + Ω0² σ = 1/(4σ³)`, `Ω0²` constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaBranch {
    /// `σ = 1/sqrt(2Ω0)`.
    Constant { omega: f64 },
    /// `σ² = k/(2Ω0²) − S/(2Ω0²) cos(2c1 + 2Ω0 t)`, `S = sqrt(k² − Ω0²)`.
    Oscillating { omega: f64, k: f64, c1: f64 },
    /// `σ² = c1 + B cosh(2c2 + 2κt)`, `B = sqrt(c1² + 1/(4κ²))`, `Ω0² = −κ²`.
    Hyperbolic { kappa: f64, c1: f64, c2: f64 },
}

impl SigmaBranch {
    /// Branch through `(σ0, σ̇0)` at `t0`.
    pub fn fit(omega2: f64, sigma0: f64, sigma_dot0: f64, t0: f64) -> Result<Self> {
        if !(sigma0 > 0.0) {
            return Err(TdoError::Parameter(format!("sigma0 must be positive, got {sigma0}")));
        }
        let s0 = sigma0 * sigma0;
        let ds0 = 2.0 * sigma0 * sigma_dot0;
        let k = sigma_dot0 * sigma_dot0 + omega2 * s0 + 0.25 / s0;
        if omega2 > 0.0 {
            let w = omega2.sqrt();
            let s = (k * k - omega2).max(0.0).sqrt();
            if s <= 1e-12 * k {
                return Ok(SigmaBranch::Constant { omega: w });
            }
            let cos2y = -(s0 - k / (2.0 * omega2)) * 2.0 * omega2 / s;
            let sin2y = ds0 * w / s;
            let y0 = 0.5 * sin2y.atan2(cos2y);
            Ok(SigmaBranch::Oscillating { omega: w, k, c1: y0 - w * t0 })
        } else if omega2 < 0.0 {
            let kappa = (-omega2).sqrt();
            let c1 = -k / (2.0 * kappa * kappa);
            let u0 = 0.5 * ((ds0 / (2.0 * kappa)) / (s0 - c1)).atanh();
            Ok(SigmaBranch::Hyperbolic { kappa, c1, c2: u0 - kappa * t0 })
        } else {
            Err(TdoError::Parameter("Omega^2 = 0 has no closed-form branch here".into()))
        }
    }

    pub fn omega2(&self) -> f64 {
        match *self {
            SigmaBranch::Constant { omega } | SigmaBranch::Oscillating { omega, .. } => omega * omega,
            SigmaBranch::Hyperbolic { kappa, .. } => -kappa * kappa,
        }
    }

    /// `[σ², d(σ²)/dt, d²(σ²)/dt²]`.
    fn sigma_sq(&self, t: f64) -> [f64; 3] {
        match *self {
            SigmaBranch::Constant { omega } => [0.5 / omega, 0.0, 0.0],
            SigmaBranch::Oscillating { omega, k, c1 } => {
                let s = (k * k - omega * omega).max(0.0).sqrt();
                let (sn, cs) = (2.0 * (c1 + omega * t)).sin_cos();
                [(k - s * cs) / (2.0 * omega * omega), s * sn / omega, 2.0 * s * cs]
            }
            SigmaBranch::Hyperbolic { kappa, c1, c2 } => {
                let b = (c1 * c1 + 0.25 / (kappa * kappa)).sqrt();
                let x = 2.0 * (c2 + kappa * t);
                [c1 + b * x.cosh(), 2.0 * kappa * b * x.sinh(), 4.0 * kappa * kappa * b * x.cosh()]
            }
        }
    }

    /// `(σ, σ̇, σ̈)`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let [s, ds, dds] = self.sigma_sq(t);
        let sigma = s.sqrt();
        let sigma_dot = ds / (2.0 * sigma);
        (sigma, sigma_dot, (0.5 * dds - sigma_dot * sigma_dot) / sigma)
    }

    /// `θ(t1) − θ(t0)`.
    pub fn theta(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            SigmaBranch::Constant { omega } => 2.0 * omega * (t1 - t0),
            SigmaBranch::Oscillating { omega, k, c1 } => {
                let g = (k + (k * k - omega * omega).max(0.0).sqrt()) / omega;
                2.0 * (atan_tan_unwrapped(g, c1 + omega * t1) - atan_tan_unwrapped(g, c1 + omega * t0))
            }
            SigmaBranch::Hyperbolic { kappa, c1, c2 } => {
                let d = (4.0 * kappa * kappa * c1 * c1 + 1.0).sqrt() - 2.0 * kappa * c1;
                let f = |t: f64| (d * (c2 + kappa * t).tanh()).atan();
                2.0 * (f(t1) - f(t0))
            }
        }
    }
}

/// Identifiers accepted by [`PhaseCase::from_name`].
pub const PHASE_CASES: [&str; 6] =
    ["harmonic_const", "harmonic_oscillating", "kc_hyperbolic", "exp_frequency", "tsquared", "bessel_series"];

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseCase {
    HarmonicConst { omega0: f64 },
    HarmonicOscillating { omega0: f64, k: f64, c1: f64 },
    KcHyperbolic { kappa: f64, c1: f64, c2: f64 },
    ExpFrequency { omega0: f64, gamma0: f64 },
    TSquared { m0c2: f64 },
    BesselSeries(AlphaSeries),
}

impl PhaseCase {
    /// Builds a case from its identifier and named parameters; missing
    /// parameters take the catalog defaults.
    ///
    /// | case | parameters |
    /// |---|---|
    /// | `harmonic_const` | `omega0` |
    /// | `harmonic_oscillating` | `omega0`, `k`, `c1` |
    /// | `kc_hyperbolic` | `omega0`, `gamma`, `c1`, `c2` (`c1` is the σ² offset) |
    /// | `exp_frequency` | `omega0`, `gamma0` |
    /// | `tsquared` | `m0`, `c` |
    /// | `bessel_series` | `omega0`, `Omega0`, `k0`, `nu`, `order` |
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        Ok(match name {
            "harmonic_const" => PhaseCase::HarmonicConst { omega0: get("omega0", 1.0) },
            "harmonic_oscillating" => {
                PhaseCase::HarmonicOscillating { omega0: get("omega0", 1.0), k: get("k", 2.0), c1: get("c1", 0.0) }
            }
            "kc_hyperbolic" => {
                let (w0, g) = (get("omega0", 0.3), get("gamma", 1.0));
                let kappa2 = 0.25 * g * g - w0 * w0;
                if !(kappa2 > 0.0) {
                    return Err(TdoError::Parameter(format!(
                        "kc_hyperbolic needs gamma^2/4 > omega0^2, got Omega0^2 = {}",
                        -kappa2
                    )));
                }
                PhaseCase::KcHyperbolic { kappa: kappa2.sqrt(), c1: get("c1", 0.0), c2: get("c2", 0.0) }
            }
            "exp_frequency" => {
                let g = get("gamma0", 1.0);
                if !(g > 0.0) {
                    return Err(TdoError::Parameter(format!("gamma0 must be > 0, got {g}")));
                }
                PhaseCase::ExpFrequency { omega0: get("omega0", 1.0), gamma0: g }
            }
            "tsquared" => {
                let c = get("c", std::f64::consts::FRAC_1_SQRT_2);
                PhaseCase::TSquared { m0c2: get("m0", 1.0) * c * c }
            }
            "bessel_series" => {
                let big = get("Omega0", 1.0);
                let order = get("order", 10.0);
                if !(order >= 1.0 && order.fract() == 0.0) {
                    return Err(TdoError::Parameter(format!("bad series order {order}")));
                }
                PhaseCase::BesselSeries(build_series(
                    get("omega0", 1.0),
                    2.0 * big * get("nu", 1.0),
                    2.0 * big * get("k0", 0.5),
                    order as usize,
                )?)
            }
            other => return Err(TdoError::UnknownCase(other.to_string())),
        })
    }
}

/// Closed-form `θ(t1) − θ(t0)` for `case`.
pub fn phase_closed_form(case: &PhaseCase, t0: f64, t1: f64) -> Result<f64> {
    if t0 == t1 {
        return Ok(0.0);
    }
    Ok(match case {
        PhaseCase::HarmonicConst { omega0 } => SigmaBranch::Constant { omega: *omega0 }.theta(t0, t1),
        PhaseCase::HarmonicOscillating { omega0, k, c1 } => {
            if *k < *omega0 {
                return Err(TdoError::Parameter(format!("need k >= omega0, got k = {k}")));
            }
            SigmaBranch::Oscillating { omega: *omega0, k: *k, c1: *c1 }.theta(t0, t1)
        }
        PhaseCase::KcHyperbolic { kappa, c1, c2 } => {
            SigmaBranch::Hyperbolic { kappa: *kappa, c1: *c1, c2: *c2 }.theta(t0, t1)
        }
        PhaseCase::ExpFrequency { omega0, gamma0 } => {
            2.0 * omega0 / gamma0 * ((-gamma0 * t0).exp() - (-gamma0 * t1).exp())
        }
        PhaseCase::TSquared { m0c2 } => {
            if t0 <= 0.0 || t1 <= 0.0 {
                return Err(TdoError::Domain { t: t0.min(t1), lo: 0.0, hi: f64::INFINITY });
            }
            (1.0 / t0 - 1.0 / t1) / m0c2
        }
        PhaseCase::BesselSeries(series) => theta_series(series, t0, t1)?,
    })
}
