//! The auxiliary equation `σ̈ + Ω²σ = K/σ³`: numerical integration with the
//! phase `θ = ∫dt/σ²` and the balance functional `F` carried as extra state,
//! plus closed forms.

pub mod closed;
pub mod pinney;

pub use closed::{phase_closed_form, PhaseCase, SigmaBranch, PHASE_CASES};
pub use pinney::{
    harmonic_pinney_constants, pinney_sample, sigma_from_basis, BasisPair, PinneyCombination, PinneySample,
};

use crate::error::{Result, TdoError};
use crate::models::ModelDescriptor;
use crate::ode::{solve_on_grid, StepControl};
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_K: f64 = 0.25;
pub const SIGMA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErmakovState {
    pub t: f64,
    pub sigma: f64,
    pub sigma_dot: f64,
    pub theta: f64,
    /// `σ̇² + Ω²σ² + K/σ² − F`; constant along a trajectory.
    pub k: f64,
    /// `∫ d(Ω²)/dt σ² dt` from the trajectory start.
    #[serde(rename = "F")]
    pub f: f64,
}

impl ErmakovState {
    /// Instantaneous first integral `σ̇² + Ω²σ² + K/σ²` (equals `k + F`).
    pub fn energy(&self) -> f64 {
        self.k + self.f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpOptions {
    pub k_const: f64,
    pub control: StepControl,
    pub floor: f64,
}

impl Default for EpOptions {
    fn default() -> Self {
        EpOptions { k_const: DEFAULT_K, control: StepControl::default(), floor: SIGMA_FLOOR }
    }
}

/// `σ̇² + Ω²σ² + K/σ²`.
pub fn first_integral(omega2: f64, k_const: f64, sigma: f64, sigma_dot: f64) -> f64 {
    sigma_dot * sigma_dot + omega2 * sigma * sigma + k_const / (sigma * sigma)
}

/// `σ̈ + Ω²σ − K/σ³` at `t`.
pub fn ep_residual(model: &ModelDescriptor, k_const: f64, t: f64, sigma: f64, sigma_ddot: f64) -> Result<f64> {
    let w2 = model.sample(t)?.omega2();
    Ok(sigma_ddot + w2 * sigma - k_const / sigma.powi(3))
}

/// `t0, t0 + dt, …` up to and including `t1`.
pub fn output_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t1 > t0) || !(dt > 0.0) || !t0.is_finite() || !t1.is_finite() {
        return Err(TdoError::EmptyWindow(format!("t0 = {t0}, t1 = {t1}, dt = {dt}")));
    }
    let n = ((t1 - t0) / dt * (1.0 + 1e-12)).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| t0 + i as f64 * dt).collect();
    if t1 - grid[n] > 1e-9 * dt {
        grid.push(t1);
    } else {
        grid[n] = t1;
    }
    Ok(grid)
}

/// Integrates the auxiliary equation from `grid[0]` with `σ(grid[0]) = σ0`,
/// `σ̇ = σ̇0`, returning one state per grid point.
pub fn integrate_ep(
    model: &ModelDescriptor,
    init: (f64, f64),
    grid: &[f64],
    opts: &EpOptions,
) -> Result<Vec<ErmakovState>> {
    let (sigma0, sigma_dot0) = init;
    let Some(&t0) = grid.first() else {
        return Err(TdoError::EmptyWindow("empty output grid".into()));
    };
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(TdoError::Parameter("output grid must be nondecreasing".into()));
    }
    if opts.k_const < 0.0 {
        return Err(TdoError::Parameter(format!("K = {} must be nonnegative", opts.k_const)));
    }
    model.domain.check(t0)?;
    model.domain.check(*grid.last().unwrap())?;
    if !(sigma0 >= opts.floor) {
        return Err(TdoError::SingularityApproached { t: t0, sigma: sigma0, floor: opts.floor });
    }
    let kk = opts.k_const;
    let rhs = |t: f64, y: &[f64; 4]| {
        let s = model.sample_unchecked(t);
        let sig = y[0];
        let sig2 = sig * sig;
        [y[1], -s.omega2() * sig + kk / (sig2 * sig), 1.0 / sig2, s.omega2_dot() * sig2]
    };
    let floor = opts.floor;
    let states = solve_on_grid(&rhs, t0, [sigma0, sigma_dot0, 0.0, 0.0], grid, opts.control, |t, y| {
        if y[0] < floor || !y.iter().all(|v| v.is_finite()) {
            Err(TdoError::SingularityApproached { t, sigma: y[0], floor })
        } else {
            Ok(())
        }
    })?;
    Ok(grid
        .iter()
        .zip(states)
        .map(|(&t, y)| {
            let w2 = model.sample_unchecked(t).omega2();
            ErmakovState {
                t,
                sigma: y[0],
                sigma_dot: y[1],
                theta: y[2],
                k: first_integral(w2, kk, y[0], y[1]) - y[3],
                f: y[3],
            }
        })
        .collect())
}

/// Continuous branch of `atan(g·tan y)`, agreeing with the principal value
/// on `(−π/2, π/2)` and shifting by `π·sign(g)` each time `y` crosses a pole.
pub fn atan_tan_unwrapped(g: f64, y: f64) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    let m = (y / (2.0 * PI)).round();
    let psi = y - 2.0 * PI * m;
    (g * psi.sin()).atan2(psi.cos()) + 2.0 * PI * m * g.signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn unwrapped_arctan_is_continuous_and_monotone() {
        let mut prev = atan_tan_unwrapped(2.5, -10.0);
        for i in 1..=20000 {
            let y = -10.0 + i as f64 * 1e-3;
            let v = atan_tan_unwrapped(2.5, y);
            assert!(v > prev && v - prev < 0.01, "y={y}");
            prev = v;
        }
        assert!((atan_tan_unwrapped(0.3, 0.4) - (0.3 * 0.4f64.tan()).atan()).abs() < 1e-15);
        assert!((atan_tan_unwrapped(1.0, 7.0) - 7.0).abs() < 1e-14);
        assert!((atan_tan_unwrapped(-1.0, 7.0) + 7.0).abs() < 1e-14);
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = output_grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = output_grid(0.0, 1.05, 0.1).unwrap();
        assert_eq!(*g.last().unwrap(), 1.05);
        assert!(output_grid(1.0, 1.0, 0.1).is_err());
        assert!(output_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn floor_and_domain_errors() {
        let h = ModelDescriptor::from_catalog("harmonic", &BTreeMap::new()).unwrap();
        let grid = output_grid(0.0, 1.0, 0.5).unwrap();
        assert!(matches!(
            integrate_ep(&h, (1e-9, 0.0), &grid, &EpOptions::default()),
            Err(TdoError::SingularityApproached { .. })
        ));
        let ts = ModelDescriptor::from_catalog("tsquared", &BTreeMap::new()).unwrap();
        assert!(matches!(integrate_ep(&ts, (1.0, 0.0), &grid, &EpOptions::default()), Err(TdoError::Domain { .. })));
    }
}
