//! Pinney superposition `σ² = A y1² + B y2² + 2C y1 y2` over a basis of the
//! reduced linear equation `ÿ + Ω² y = 0`.

use crate::error::{Result, TdoError};
use crate::models::{ModelDescriptor, ModelKind};

/// Two independent solutions of `ÿ + Ω²(t) y = 0` in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisPair {
    /// `cos Ω(t − t_ref)`, `sin Ω(t − t_ref)`.
    Trig { omega: f64, t_ref: f64 },
    /// `cosh κ(t − t_ref)`, `sinh κ(t − t_ref)` for `Ω² = −κ²`.
    Hyperbolic { kappa: f64, t_ref: f64 },
    /// `1`, `t − t_ref` for `Ω² = 0`.
    Linear { t_ref: f64 },
    /// `e^{γ0 t/2} cos x`, `e^{γ0 t/2} sin x`, `x = (ω0/γ0) e^{−γ0 t}`.
    ExpFrequency { omega0: f64, gamma0: f64 },
    /// `t cos(a/t)`, `t sin(a/t)`, `Ω² = a²/t⁴`.
    TSquared { a: f64 },
}

impl BasisPair {
    /// Basis for a constant `Ω²`.
    pub fn constant(omega2: f64, t_ref: f64) -> Self {
        if omega2 > 0.0 {
            BasisPair::Trig { omega: omega2.sqrt(), t_ref }
        } else if omega2 < 0.0 {
            BasisPair::Hyperbolic { kappa: (-omega2).sqrt(), t_ref }
        } else {
            BasisPair::Linear { t_ref }
        }
    }

    /// Closed-form basis for a catalog model, when one exists.
    pub fn for_model(model: &ModelDescriptor, t_ref: f64) -> Result<Self> {
        let p = |k: &str| model.param(k);
        match &model.kind {
            ModelKind::Harmonic | ModelKind::KanaiCaldirola => {
                Ok(BasisPair::constant(model.sample_unchecked(t_ref).omega2(), t_ref))
            }
            ModelKind::ExpFrequency => Ok(BasisPair::ExpFrequency { omega0: p("omega0"), gamma0: p("gamma0") }),
            ModelKind::TSquared => Ok(BasisPair::TSquared { a: 1.0 / (2.0 * p("m0") * p("c").powi(2)) }),
            _ => Err(TdoError::Parameter(format!("no closed-form basis for model `{}`", model.name))),
        }
    }

    /// `[y1, ẏ1, y2, ẏ2]` at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        match *self {
            BasisPair::Trig { omega, t_ref } => {
                let (s, c) = (omega * (t - t_ref)).sin_cos();
                [c, -omega * s, s, omega * c]
            }
            BasisPair::Hyperbolic { kappa, t_ref } => {
                let x = kappa * (t - t_ref);
                let (s, c) = (x.sinh(), x.cosh());
                [c, kappa * s, s, kappa * c]
            }
            BasisPair::Linear { t_ref } => [1.0, 0.0, t - t_ref, 1.0],
            BasisPair::ExpFrequency { omega0, gamma0 } => {
                let e = (0.5 * gamma0 * t).exp();
                let x = omega0 / gamma0 * (-gamma0 * t).exp();
                let dx = -gamma0 * x;
                let (s, c) = x.sin_cos();
                [e * c, e * (0.5 * gamma0 * c - s * dx), e * s, e * (0.5 * gamma0 * s + c * dx)]
            }
            BasisPair::TSquared { a } => {
                let (s, c) = (a / t).sin_cos();
                [t * c, c + a * s / t, t * s, s - a * c / t]
            }
        }
    }

    pub fn omega2(&self, t: f64) -> f64 {
        match *self {
            BasisPair::Trig { omega, .. } => omega * omega,
            BasisPair::Hyperbolic { kappa, .. } => -kappa * kappa,
            BasisPair::Linear { .. } => 0.0,
            BasisPair::ExpFrequency { omega0, gamma0 } => {
                let w = omega0 * (-gamma0 * t).exp();
                w * w - 0.25 * gamma0 * gamma0
            }
            BasisPair::TSquared { a } => a * a / t.powi(4),
        }
    }

    /// Nominal Wronskian `y1 ẏ2 − ẏ1 y2`.
    pub fn w0(&self) -> f64 {
        match *self {
            BasisPair::Trig { omega, .. } => omega,
            BasisPair::Hyperbolic { kappa, .. } => kappa,
            BasisPair::Linear { .. } => 1.0,
            BasisPair::ExpFrequency { omega0, .. } => -omega0,
            BasisPair::TSquared { a } => -a,
        }
    }

    /// Wronskian evaluated from the basis at `t`.
    pub fn wronskian_at(&self, t: f64) -> f64 {
        let [y1, d1, y2, d2] = self.eval(t);
        y1 * d2 - d1 * y2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinneyCombination {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Ermakov constant `K`.
    pub k_const: f64,
}

impl PinneyCombination {
    /// Checks `AB − C² = K/W0²` to `1e-8·max(1, |K/W0²|)`.
    pub fn check(&self, pair: &BasisPair) -> Result<()> {
        let lhs = self.a * self.b - self.c * self.c;
        let rhs = self.k_const / pair.w0().powi(2);
        if (lhs - rhs).abs() > 1e-8 * rhs.abs().max(1.0) {
            Err(TdoError::ConstraintViolation { lhs, rhs })
        } else {
            Ok(())
        }
    }

    /// Constants reproducing `σ(t0) = σ0`, `σ̇(t0) = σ̇0`.
    ///
    /// Built from `σ² = u1² + K u2²` with `u1(t0) = σ0`, `u̇1(t0) = σ̇0`,
    /// `u2(t0) = 0`, `u̇2(t0) = 1/σ0`, expanded in the basis.
    pub fn fit(pair: &BasisPair, k_const: f64, sigma0: f64, sigma_dot0: f64, t0: f64) -> Result<Self> {
        if !(sigma0 > 0.0) {
            return Err(TdoError::Parameter(format!("sigma0 must be positive, got {sigma0}")));
        }
        let [y1, d1, y2, d2] = pair.eval(t0);
        let w = y1 * d2 - d1 * y2;
        let p1 = (sigma0 * d2 - sigma_dot0 * y2) / w;
        let p2 = (sigma_dot0 * y1 - sigma0 * d1) / w;
        let r1 = -y2 / (sigma0 * w);
        let r2 = y1 / (sigma0 * w);
        Ok(PinneyCombination {
            a: p1 * p1 + k_const * r1 * r1,
            b: p2 * p2 + k_const * r2 * r2,
            c: p1 * p2 + k_const * r1 * r2,
            k_const,
        })
    }
}

/// Constants of the oscillating harmonic branch (`q0 = 1`, `K = 1/4`),
/// with `φ = 2c1 + 2ω0 t0`:
/// `A = (k − S cos φ)/(2ω0²)`, `B = (k + S cos φ)/(2ω0²)`, `C = −S sin φ/(2ω0²)`,
/// `S = sqrt(k² − ω0²)`. Paired with the `Trig` basis at `t_ref = 0`.
pub fn harmonic_pinney_constants(omega0: f64, k: f64, c1: f64, t0: f64) -> Result<PinneyCombination> {
    if !(omega0 > 0.0) || k < omega0 {
        return Err(TdoError::Parameter(format!("need omega0 > 0 and k >= omega0, got omega0 = {omega0}, k = {k}")));
    }
    let s = (k * k - omega0 * omega0).sqrt();
    let phi = 2.0 * c1 + 2.0 * omega0 * t0;
    let den = 2.0 * omega0 * omega0;
    Ok(PinneyCombination {
        a: (k - s * phi.cos()) / den,
        b: (k + s * phi.cos()) / den,
        c: -s * phi.sin() / den,
        k_const: 0.25,
    })
}

/// Value, first and second derivative of `σ` from the superposition, plus
/// the Ermakov residual `σ̈ + Ω²σ − K/σ³` computed with the analytic `σ̈`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinneySample {
    pub sigma: f64,
    pub sigma_dot: f64,
    pub sigma_ddot: f64,
    pub residual: f64,
}

pub fn pinney_sample(pair: &BasisPair, comb: &PinneyCombination, t: f64) -> Result<PinneySample> {
    comb.check(pair)?;
    let [y1, d1, y2, d2] = pair.eval(t);
    let (a, b, c) = (comb.a, comb.b, comb.c);
    let q = a * y1 * y1 + b * y2 * y2 + 2.0 * c * y1 * y2;
    if !(q > 0.0) {
        return Err(TdoError::NonRealSigma { t, radicand: q });
    }
    let w2 = pair.omega2(t);
    let half_dq = a * y1 * d1 + b * y2 * d2 + c * (d1 * y2 + y1 * d2);
    let p = a * d1 * d1 + b * d2 * d2 + 2.0 * c * d1 * d2;
    // Q̈/2 = P − Ω² Q
    let half_ddq = p - w2 * q;
    let sigma = q.sqrt();
    let sigma_dot = half_dq / sigma;
    let sigma_ddot = (half_ddq - sigma_dot * sigma_dot) / sigma;
    let residual = sigma_ddot + w2 * sigma - comb.k_const / sigma.powi(3);
    Ok(PinneySample { sigma, sigma_dot, sigma_ddot, residual })
}

/// `(σ, σ̇)` from the superposition.
pub fn sigma_from_basis(pair: &BasisPair, comb: &PinneyCombination, t: f64) -> Result<(f64, f64)> {
    let s = pinney_sample(pair, comb, t)?;
    Ok((s.sigma, s.sigma_dot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_branch() {
        let pair = BasisPair::constant(1.0, 0.0);
        let comb = PinneyCombination { a: 0.5, b: 0.5, c: 0.0, k_const: 0.25 };
        for &t in &[0.0, 0.3, 7.0] {
            let (s, sd) = sigma_from_basis(&pair, &comb, t).unwrap();
            assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
            assert!(sd.abs() < 1e-15);
        }
    }

    #[test]
    fn constraint_and_radicand_errors() {
        let pair = BasisPair::constant(1.0, 0.0);
        let bad = PinneyCombination { a: 0.5, b: 0.5, c: 0.2, k_const: 0.25 };
        assert!(matches!(sigma_from_basis(&pair, &bad, 0.0), Err(TdoError::ConstraintViolation { .. })));
        // AB − C² = 1/4 with A < 0 and B < 0 gives a negative radicand.
        let neg = PinneyCombination { a: -0.5, b: -0.5, c: 0.0, k_const: 0.25 };
        assert!(matches!(sigma_from_basis(&pair, &neg, 0.0), Err(TdoError::NonRealSigma { .. })));
    }

    #[test]
    fn oscillating_constants_at_origin() {
        let comb = harmonic_pinney_constants(1.0, 2.0, 0.0, 0.0).unwrap();
        let pair = BasisPair::constant(1.0, 0.0);
        let (s, _) = sigma_from_basis(&pair, &comb, 0.0).unwrap();
        assert!((s * s - (2.0 - 3f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn basis_wronskians_are_constant() {
        let pairs = [
            BasisPair::constant(2.0, 0.3),
            BasisPair::constant(-0.16, 0.0),
            BasisPair::constant(0.0, 1.0),
            BasisPair::ExpFrequency { omega0: 1.3, gamma0: 0.7 },
            BasisPair::TSquared { a: 0.8 },
        ];
        for p in pairs {
            for &t in &[0.2, 0.9, 2.5] {
                let w = p.wronskian_at(t);
                assert!((w - p.w0()).abs() < 1e-12 * p.w0().abs().max(1.0), "{p:?} t={t}");
            }
        }
    }

    #[test]
    fn fit_reproduces_initial_data() {
        let pair = BasisPair::ExpFrequency { omega0: 1.0, gamma0: 1.0 };
        let comb = PinneyCombination::fit(&pair, 0.25, 0.9, -0.2, 0.4).unwrap();
        comb.check(&pair).unwrap();
        let s = pinney_sample(&pair, &comb, 0.4).unwrap();
        assert!((s.sigma - 0.9).abs() < 1e-14);
        assert!((s.sigma_dot + 0.2).abs() < 1e-14);
        assert!(s.residual.abs() < 1e-12);
    }
}
