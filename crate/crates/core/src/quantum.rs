//! Scalar coefficient functions of the quantum oscillator: `ξ`, `η`,
//! variances, the uncertainty product and the Bogolubov coefficients.
//! All functions expect states of the `K = 1/4` auxiliary equation.

use crate::ermakov::ErmakovState;
use crate::error::{Result, TdoError};
use crate::models::ModelDescriptor;
use num::complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    pub t: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub xi: Complex64,
    pub eta: Complex64,
    /// `(ħ/2) sqrt(1 + 4σ²(σ̇ − Mσ/2)²)`.
    pub product: f64,
    pub hbar: f64,
}

impl QuadratureReport {
    /// `sqrt(varQ · varP)`, the second route to the product.
    pub fn product_from_variances(&self) -> f64 {
        (self.var_q * self.var_p).sqrt()
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(TdoError::Units(format!("hbar must be positive and finite, got {hbar}")))
    }
}

/// `Mσ/2 − σ̇`, the quantity whose vanishing marks minimum uncertainty.
fn excess(damping: f64, state: &ErmakovState) -> f64 {
    0.5 * damping * state.sigma - state.sigma_dot
}

pub fn xi(damping: f64, state: &ErmakovState) -> Complex64 {
    -Complex64::new(excess(damping, state), 0.5 / state.sigma)
}

pub fn eta(damping: f64, state: &ErmakovState) -> Complex64 {
    Complex64::new(0.5 / state.sigma, excess(damping, state))
}

pub fn quadratures(model: &ModelDescriptor, state: &ErmakovState, hbar: f64) -> Result<QuadratureReport> {
    check_hbar(hbar)?;
    let s = model.sample(state.t)?;
    let damping = s.damping();
    let xi = xi(damping, state);
    let e = excess(damping, state);
    let sigma = state.sigma;
    Ok(QuadratureReport {
        t: state.t,
        var_q: hbar / s.m * sigma * sigma,
        var_p: hbar * s.m * xi.norm_sqr(),
        xi,
        eta: eta(damping, state),
        product: 0.5 * hbar * (1.0 + 4.0 * sigma * sigma * e * e).sqrt(),
        hbar,
    })
}

/// Mass and frequency of the fixed Schrödinger-picture operator `a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub m0: f64,
    pub omega0: f64,
}

impl Reference {
    pub fn new(m0: f64, omega0: f64) -> Result<Self> {
        if m0 > 0.0 && omega0 > 0.0 && m0.is_finite() && omega0.is_finite() {
            Ok(Reference { m0, omega0 })
        } else {
            Err(TdoError::Units(format!("reference needs m0 > 0 and omega0 > 0, got ({m0}, {omega0})")))
        }
    }

    /// Model values at `t0`.
    pub fn at(model: &ModelDescriptor, t0: f64) -> Result<Self> {
        let s = model.sample(t0)?;
        Reference::new(s.m, s.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogolubovPair {
    pub mu: Complex64,
    pub nu: Complex64,
    pub reference: Reference,
}

impl BogolubovPair {
    /// `|μ|² − |ν|²`.
    pub fn normalization(&self) -> f64 {
        self.mu.norm_sqr() - self.nu.norm_sqr()
    }
}

pub fn bogolubov(model: &ModelDescriptor, state: &ErmakovState, reference: Reference) -> Result<BogolubovPair> {
    let reference = Reference::new(reference.m0, reference.omega0)?;
    let s = model.sample(state.t)?;
    let m0w0 = reference.m0 * reference.omega0;
    let pre = (s.m / (2.0 * m0w0)).sqrt();
    let eta = eta(s.damping(), state);
    let shift = m0w0 / s.m * state.sigma;
    Ok(BogolubovPair { mu: pre * (eta + shift), nu: pre * (eta - shift), reference })
}

/// `|μ|²` and `|ν|²` from the invariant-based formulas
/// `(m/(2m0ω0)){k + F + (a² + M²/2 − ω² + Ṁ/2)σ² − Mσσ̇} ± 1/2`, `a = m0ω0/m`.
pub fn moduli_from_invariants(
    model: &ModelDescriptor,
    state: &ErmakovState,
    reference: Reference,
) -> Result<(f64, f64)> {
    let s = model.sample(state.t)?;
    let m0w0 = reference.m0 * reference.omega0;
    let a = m0w0 / s.m;
    let d = s.damping();
    let sig = state.sigma;
    let brace = state.k + state.f + (a * a + 0.5 * d * d - s.omega * s.omega + 0.5 * s.damping_dot()) * sig * sig
        - d * sig * state.sigma_dot;
    let base = s.m / (2.0 * m0w0) * brace;
    Ok((base + 0.5, base - 0.5))
}

/// `(ħ/2)|μ + ν||μ − ν|`.
pub fn uncertainty_via_bogolubov(pair: &BogolubovPair, hbar: f64) -> f64 {
    0.5 * hbar * (pair.mu + pair.nu).norm() * (pair.mu - pair.nu).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumExpectations {
    pub q2: f64,
    pub p2: f64,
    pub energy: f64,
}

/// `⟨Q²⟩`, `⟨P²⟩` and `⟨H⟩ = ⟨P²⟩/(2m) + mω²⟨Q²⟩/2` in the vacuum of `a(t)`.
pub fn vacuum_expectations(model: &ModelDescriptor, state: &ErmakovState, hbar: f64) -> Result<VacuumExpectations> {
    let r = quadratures(model, state, hbar)?;
    let s = model.sample(state.t)?;
    Ok(VacuumExpectations {
        q2: r.var_q,
        p2: r.var_p,
        energy: r.var_p / (2.0 * s.m) + 0.5 * s.m * s.omega * s.omega * r.var_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn harmonic() -> ModelDescriptor {
        ModelDescriptor::from_catalog("harmonic", &BTreeMap::new()).unwrap()
    }

    fn state(t: f64, sigma: f64, sigma_dot: f64) -> ErmakovState {
        ErmakovState { t, sigma, sigma_dot, theta: 0.0, k: 0.0, f: 0.0 }
    }

    #[test]
    fn ground_state_is_minimal() {
        let s = state(0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let r = quadratures(&harmonic(), &s, 1.0).unwrap();
        assert!((r.product - 0.5).abs() < 1e-15);
        let v = vacuum_expectations(&harmonic(), &s, 1.0).unwrap();
        assert!((v.energy - 0.5).abs() < 1e-15);
        let p = bogolubov(&harmonic(), &s, Reference::new(1.0, 1.0).unwrap()).unwrap();
        assert!((p.mu - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(p.nu.norm() < 1e-15);
    }

    #[test]
    fn eta_and_xi_have_equal_modulus() {
        let s = state(0.0, 0.8, -0.3);
        assert!((xi(0.4, &s).norm_sqr() - eta(0.4, &s).norm_sqr()).abs() < 1e-15);
        assert_eq!(eta(0.4, &s), -Complex64::i() * xi(0.4, &s).conj());
    }

    #[test]
    fn units_errors() {
        let s = state(0.0, 1.0, 0.0);
        assert!(matches!(quadratures(&harmonic(), &s, 0.0), Err(TdoError::Units(_))));
        assert!(matches!(quadratures(&harmonic(), &s, -1.0), Err(TdoError::Units(_))));
        assert!(matches!(Reference::new(0.0, 1.0), Err(TdoError::Units(_))));
    }

    #[test]
    fn real_squeeze_parameters() {
        let r: f64 = 0.5;
        let pair = BogolubovPair {
            mu: Complex64::new(r.cosh(), 0.0),
            nu: Complex64::new(r.sinh(), 0.0),
            reference: Reference::new(1.0, 1.0).unwrap(),
        };
        assert!((uncertainty_via_bogolubov(&pair, 1.0) - 0.5).abs() < 1e-15);
        assert!((pair.normalization() - 1.0).abs() < 1e-14);
    }
}
