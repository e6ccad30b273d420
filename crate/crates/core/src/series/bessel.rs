//! Bessel functions of the first kind for real order, plus the checks that
//! the linear `y` equation of the Bessel-type oscillator reduces to them.
//!
//! `J_ν(x)` uses the ascending series for `x <= 12` and Hankel's asymptotic
//! expansion above. Derivatives come from the order recurrences
//! `2J' = J_{ν-1} - J_{ν+1}` and `4J'' = J_{ν-2} - 2J_ν + J_{ν+2}`, so
//! checking the Bessel ODE with them is not circular.

use crate::error::{Result, TdoError};
use std::f64::consts::PI;

pub const SWITCHOVER: f64 = 12.0;

fn is_integer(nu: f64) -> bool {
    nu == nu.round()
}

fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    let q = -half * half;
    for k in 1..500 {
        let k = k as f64;
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > half {
            break;
        }
    }
    sum
}

fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = x - (0.5 * nu + 0.25) * PI;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        // Stop at the smallest term of the (divergent) expansion.
        if term.abs() >= prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_ν(x)` for `x > 0` and any real order.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if nu < 0.0 && is_integer(nu) {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * bessel_j(n, x);
    }
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x <= SWITCHOVER {
        series(nu, x)
    } else {
        asymptotic(nu, x)
    }
}

/// `(J_ν, J_ν', J_ν'')` via the order recurrences.
pub fn bessel_j_with_derivatives(nu: f64, x: f64) -> (f64, f64, f64) {
    let j = bessel_j(nu, x);
    let d1 = 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x));
    let d2 = 0.25 * (bessel_j(nu - 2.0, x) - 2.0 * j + bessel_j(nu + 2.0, x));
    (j, d1, d2)
}

/// `Z'' + Z'/x + (1 - ρ²/x²) Z` for `Z = J_ρ`.
pub fn bessel_ode_residual(rho: f64, x: f64) -> f64 {
    let (z, d1, d2) = bessel_j_with_derivatives(rho, x);
    d2 + d1 / x + (1.0 - rho * rho / (x * x)) * z
}

/// Max over `t_grid` of `|y'' + Ω0²(k0² + ν²/t²) y|` for `y = sqrt(t) J_ρ(ℓ t)`,
/// `ℓ = Ω0 k0`, `ρ² = 1/4 - Ω0²ν²`. For `ρ = 1/2` the elementary form
/// `y = sin(ℓ t)` is used.
pub fn bessel_reduction_check(omega0_big: f64, k0: f64, nu: f64, t_grid: &[f64]) -> Result<f64> {
    let o2nu2 = omega0_big * omega0_big * nu * nu;
    let rho2 = 0.25 - o2nu2;
    if rho2 < 0.0 {
        return Err(TdoError::Parameter(format!("rho^2 = {rho2} < 0: imaginary Bessel order is not supported")));
    }
    let rho = rho2.sqrt();
    let ell = omega0_big * k0;
    if ell == 0.0 {
        return Err(TdoError::Parameter("Omega0*k0 must be nonzero".into()));
    }
    let freq2 = |t: f64| omega0_big * omega0_big * k0 * k0 + o2nu2 / (t * t);
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        if t <= 0.0 {
            return Err(TdoError::Parameter(format!("grid point t = {t} must be positive")));
        }
        let (y, ddy) = if rho == 0.5 {
            let s = (ell * t).sin();
            (s, -ell * ell * s)
        } else {
            let x = ell * t;
            let (z, dz, ddz) = bessel_j_with_derivatives(rho, x);
            let st = t.sqrt();
            let y = st * z;
            let ddy = -0.25 * z / (t * st) + ell * dz / st + st * ell * ell * ddz;
            (y, ddy)
        };
        worst = worst.max((ddy + freq2(t) * y).abs());
    }
    Ok(worst)
}

/// Exponents `β± = ±sqrt(1/4 - Ω0²ν²)` of the power-law solutions of
/// `q'' + q'/t + (Ω0²ν² - 1/4) q/t² = 0` (the `μs = 0` oscillator).
pub fn power_law_exponents(omega0_nu_sq: f64) -> Result<(f64, f64)> {
    let disc = 0.25 - omega0_nu_sq;
    if disc < 0.0 {
        return Err(TdoError::Parameter(format!("1/4 - Omega0^2 nu^2 = {disc} < 0: exponents are complex")));
    }
    let b = disc.sqrt();
    Ok((b, -b))
}

/// Max relative EOM residual of `q = c1 t^{β+} + c2 t^{β-}` on `t_grid`.
pub fn power_law_check(omega0_nu_sq: f64, c1: f64, c2: f64, t_grid: &[f64]) -> Result<f64> {
    let (bp, bm) = power_law_exponents(omega0_nu_sq)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let part = |c: f64, b: f64| {
            let q = c * t.powf(b);
            (q, b * q / t, b * (b - 1.0) * q / (t * t))
        };
        let (q1, d1, dd1) = part(c1, bp);
        let (q2, d2, dd2) = part(c2, bm);
        let (q, dq, ddq) = (q1 + q2, d1 + d2, dd1 + dd2);
        let res = ddq + dq / t + (omega0_nu_sq - 0.25) * q / (t * t);
        let scale = ddq.abs() + (dq / t).abs() + (q / (t * t)).abs();
        worst = worst.max(res.abs() / scale.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
