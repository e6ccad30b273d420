//! Odd power series for the mass profile of the Bessel-type oscillator.
//!
//! With `m = m0 α(t)` and `ω = ω0/α(t)`, demanding
//! `Ω²(t) = Ω0² (k0² + ν²/t²)` turns into
//!
//! ```text
//! 2 α α'' - α'² - 4 ω0² + α² (μs² + λ²/t²) = 0,     λ = 2 Ω0 ν,  μs = 2 Ω0 k0
//! ```
//!
//! whose regular solution is `α = Σ a_{2k+1} t^{2k+1}` with
//! `a_1 = 2 ω0 / sqrt(λ² - 1)`. `order` counts retained coefficients:
//! order `N` keeps `a_1 .. a_{2N-1}`.

pub mod bessel;
pub mod exact;

use crate::error::{Result, TdoError};
use crate::ode::{solve_on_grid, StepControl};
use exact::{rational, rational_to_f64, Scalar};
use num::BigRational;
use serde::{Deserialize, Serialize};

/// Orders up to this bound have their coefficients computed in exact
/// rational arithmetic before rounding to `f64`.
pub const EXACT_ORDER_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSeries {
    pub omega0: f64,
    pub lambda: f64,
    pub mu_s: f64,
    pub order: usize,
    /// `a_1, a_3, .., a_{2N-1}`.
    pub a: Vec<f64>,
    /// Reciprocal-series coefficients `ã_0, ã_2, .., ã_{2N}` of `a_1 t / α`.
    pub a_tilde: Vec<f64>,
}

/// Coefficients of `α'²`, `α²` and `α α''` (indexed by power of t).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionTriple<T> {
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> ConvolutionTriple<T> {
    /// `a` is the full coefficient list indexed by power (`a[0]` is the constant term).
    pub fn from_coefficients(a: &[T]) -> Self {
        let n = a.len();
        let get = |i: usize| -> T { a.get(i).cloned().unwrap_or_else(T::zero) };
        let top = if n == 0 { 0 } else { 2 * (n - 1) };
        let mut b = Vec::with_capacity(top + 1);
        let mut c = Vec::with_capacity(top + 1);
        let mut d = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let mut bk = T::zero();
            let mut ck = T::zero();
            let mut dk = T::zero();
            for j in 0..=k {
                let w = T::from_usize((j + 1) * (k - j + 1)).unwrap();
                bk = bk + w * get(j + 1) * get(k - j + 1);
                ck = ck + get(j) * get(k - j);
                let w = T::from_usize((2 + k - j) * (1 + k - j)).unwrap();
                dk = dk + w * get(j) * get(k + 2 - j);
            }
            b.push(bk);
            c.push(ck);
            d.push(dk);
        }
        ConvolutionTriple { b, c, d }
    }
}

/// Residual coefficients, starting at power `t^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCoefficients<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> ResidualCoefficients<T> {
    pub const LOWEST_POWER: i64 = -2;

    pub fn at_power(&self, p: i64) -> T {
        let idx = p - Self::LOWEST_POWER;
        if idx < 0 {
            return T::zero();
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_else(T::zero)
    }

    pub fn highest_power(&self) -> i64 {
        self.coeffs.len() as i64 - 1 + Self::LOWEST_POWER
    }
}

/// Power-by-power residual of the α equation for an arbitrary polynomial `a`
/// (indexed by power), assembled from the convolution triple:
/// `λ² c_0 t⁻², λ² c_1 t⁻¹`, then `2 d_n - b_n - 4 ω0² δ_{n0} + μs² c_n + λ² c_{n+2}`.
pub fn residual_coefficients<T: Scalar>(four_w02: &T, lambda2: &T, mu2: &T, a: &[T]) -> ResidualCoefficients<T> {
    let tri = ConvolutionTriple::from_coefficients(a);
    let get = |v: &Vec<T>, i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
    let mut coeffs = vec![lambda2.clone() * get(&tri.c, 0), lambda2.clone() * get(&tri.c, 1)];
    let top = tri.c.len();
    for n in 0..top {
        let mut r = T::from_i64(2).unwrap() * get(&tri.d, n) - get(&tri.b, n)
            + mu2.clone() * get(&tri.c, n)
            + lambda2.clone() * get(&tri.c, n + 2);
        if n == 0 {
            r = r - four_w02.clone();
        }
        coeffs.push(r);
    }
    ResidualCoefficients { coeffs }
}

pub fn build_series(omega0: f64, lambda: f64, mu_s: f64, order: usize) -> Result<AlphaSeries> {
    if order < 1 {
        return Err(TdoError::Parameter("series order must be >= 1".into()));
    }
    if !(lambda * lambda > 1.0) {
        return Err(TdoError::Parameter(format!(
            "lambda^2 = {} must exceed 1 for a real leading coefficient",
            lambda * lambda
        )));
    }
    if !(omega0 > 0.0) || !mu_s.is_finite() {
        return Err(TdoError::Parameter("omega0 must be positive and mu_s finite".into()));
    }
    let a1 = 2.0 * omega0 / (lambda * lambda - 1.0).sqrt();

    let (normalized, tilde) = if order <= EXACT_ORDER_LIMIT {
        let l = rational(lambda);
        let m = rational(mu_s);
        let l2 = &l * &l;
        let m2 = &m * &m;
        let hat: Vec<BigRational> = exact::ratio_coefficients(&l2, &m2, order);
        let tilde = exact::reciprocal(&hat, order + 1);
        (hat.iter().map(rational_to_f64).collect::<Vec<_>>(), tilde.iter().map(rational_to_f64).collect::<Vec<_>>())
    } else {
        let hat = exact::ratio_coefficients(&(lambda * lambda), &(mu_s * mu_s), order);
        let tilde = exact::reciprocal(&hat, order + 1);
        (hat, tilde)
    };

    Ok(AlphaSeries { omega0, lambda, mu_s, order, a: normalized.iter().map(|h| h * a1).collect(), a_tilde: tilde })
}

impl AlphaSeries {
    pub fn a1(&self) -> f64 {
        self.a[0]
    }

    /// Estimated convergence radius used by the guards: `2/μs`.
    pub fn convergence_radius(&self) -> f64 {
        if self.mu_s == 0.0 {
            f64::INFINITY
        } else {
            2.0 / self.mu_s.abs()
        }
    }

    pub fn check_radius(&self, t_hi: f64) -> Result<()> {
        let radius = self.convergence_radius();
        if t_hi > radius {
            Err(TdoError::ConvergenceWarning { t_hi, radius })
        } else {
            Ok(())
        }
    }

    /// Full coefficient list indexed by power (even entries zero).
    pub fn full_coefficients(&self) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.a.len()];
        for (k, a) in self.a.iter().enumerate() {
            out[2 * k + 1] = *a;
        }
        out
    }

    /// `α/t = Σ a_{2k+1} t^{2k}` together with its first three derivatives.
    fn alpha_over_t(&self, t: f64) -> [f64; 4] {
        let s = t * t;
        // Horner in s for P(s) = Σ a_{2k+1} s^k, then chain rule in t.
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut ddp = 0.0;
        let mut dddp = 0.0;
        for a in self.a.iter().rev() {
            dddp = dddp * s + 3.0 * ddp;
            ddp = ddp * s + 2.0 * dp;
            dp = dp * s + p;
            p = p * s + a;
        }
        // d/dt = 2t d/ds
        let d1 = 2.0 * t * dp;
        let d2 = 2.0 * dp + 4.0 * s * ddp;
        let d3 = 12.0 * t * ddp + 8.0 * t * s * dddp;
        [p, d1, d2, d3]
    }

    /// `[α, α', α'', α''']` at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let [p, p1, p2, p3] = self.alpha_over_t(t);
        [t * p, p + t * p1, 2.0 * p1 + t * p2, 3.0 * p2 + t * p3]
    }

    /// `Σ ã_{2k} t^{2k}`, so that `ω = ω0/(a_1 t) · reciprocal(t)`.
    pub fn reciprocal(&self, t: f64) -> f64 {
        let s = t * t;
        self.a_tilde.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// Pointwise residual of the α equation, evaluated with `λ²(α/t)²` to
    /// avoid the cancellation in `α²/t²` near the origin.
    pub fn pointwise_residual(&self, t: f64) -> f64 {
        let [alpha, d1, d2, _] = self.eval(t);
        let over_t = self.alpha_over_t(t)[0];
        2.0 * alpha * d2 - d1 * d1 - 4.0 * self.omega0 * self.omega0
            + alpha * alpha * self.mu_s * self.mu_s
            + self.lambda * self.lambda * over_t * over_t
    }

    /// Residual coefficients of the truncated polynomial (floating point).
    /// All coefficients through `t^{2N-1}` vanish to rounding.
    pub fn symbolic_residual(&self) -> ResidualCoefficients<f64> {
        residual_coefficients(
            &(4.0 * self.omega0 * self.omega0),
            &(self.lambda * self.lambda),
            &(self.mu_s * self.mu_s),
            &self.full_coefficients(),
        )
    }

    /// `a_3` from `μ²a_1 + 6a_3 + 2x a_3 = 0` with x = λ² and with x = ν².
    /// Returns `(a_3 with λ², a_3 with ν²)` for the
    /// given ν; the series itself always uses the λ² reading.
    pub fn a3_candidates(&self, nu: f64) -> (f64, f64) {
        let m2 = self.mu_s * self.mu_s;
        let a1 = self.a1();
        (-m2 * a1 / (6.0 + 2.0 * self.lambda * self.lambda), -m2 * a1 / (6.0 + 2.0 * nu * nu))
    }
}

/// Max of the pointwise α-equation residual over 401 grid points in
/// `[t_lo, t_hi]`.
pub fn alpha_numeric_check(series: &AlphaSeries, t_lo: f64, t_hi: f64) -> Result<f64> {
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(TdoError::Parameter(format!("need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    series.check_radius(t_hi)?;
    const POINTS: usize = 401;
    Ok((0..POINTS)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (POINTS - 1) as f64)
        .map(|t| series.pointwise_residual(t).abs())
        .fold(0.0, f64::max))
}

/// Closed-form phase `θ = (2ω0/a_1)[ln t + Σ_{k≥1} ã_{2k} t^{2k}/(2k)]` between limits.
pub fn theta_series(series: &AlphaSeries, t0: f64, t1: f64) -> Result<f64> {
    if t0 == t1 {
        return Ok(0.0);
    }
    if !(t0 > 0.0 && t1 > 0.0) {
        return Err(TdoError::Parameter("series phase needs t0, t1 > 0".into()));
    }
    series.check_radius(t0.max(t1))?;
    let antiderivative = |t: f64| {
        let s = t * t;
        let mut tail = 0.0;
        let mut pow = 1.0;
        for (k, c) in series.a_tilde.iter().enumerate().skip(1) {
            pow *= s;
            tail += c * pow / (2.0 * k as f64);
        }
        t.ln() + tail
    };
    Ok(2.0 * series.omega0 / series.a1() * (antiderivative(t1) - antiderivative(t0)))
}

/// Independent numerical solution of the α equation by shooting from
/// `t = eps` with `α(eps) = a_1 eps`, `α'(eps) = a_1`. Returns `α` on `grid`.
pub fn shooting_solution(omega0: f64, lambda: f64, mu_s: f64, eps: f64, grid: &[f64], rtol: f64) -> Result<Vec<f64>> {
    if !(lambda * lambda > 1.0) {
        return Err(TdoError::Parameter("lambda^2 must exceed 1".into()));
    }
    let a1 = 2.0 * omega0 / (lambda * lambda - 1.0).sqrt();
    let (w2, l2, m2) = (omega0 * omega0, lambda * lambda, mu_s * mu_s);
    let rhs = |t: f64, y: &[f64; 2]| {
        let (a, da) = (y[0], y[1]);
        let dda = (da * da + 4.0 * w2 - a * a * (m2 + l2 / (t * t))) / (2.0 * a);
        [da, dda]
    };
    let control = StepControl { rtol, atol: rtol * 1e-3, h_init: Some(eps * 1e-3), ..Default::default() };
    let out = solve_on_grid(&rhs, eps, [a1 * eps, a1], grid, control, |t, y| {
        if y[0] <= 0.0 {
            Err(TdoError::NonPositiveAlpha { t, alpha: y[0] })
        } else {
            Ok(())
        }
    })?;
    Ok(out.into_iter().map(|y| y[0]).collect())
}

/// Approximate α for `k0² >> ν²/t²`:
/// `α = c1 + D sin(2ℓ(t + c2))`, `D = sqrt(c1² - ω0²/ℓ²)`, `ℓ = Ω0 k0`,
/// with the oscillator trajectory `q = C sin(Φ + φ0)`, `Φ' = -ω0/α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeK0Approx {
    pub omega0: f64,
    pub ell: f64,
    pub c1: f64,
    pub c2: f64,
    pub amplitude: f64,
}

impl LargeK0Approx {
    pub fn new(omega0_big: f64, k0: f64, omega0: f64, c1: f64, c2: f64) -> Result<Self> {
        let ell = omega0_big * k0;
        if ell == 0.0 || omega0 <= 0.0 {
            return Err(TdoError::Parameter("need Omega0*k0 != 0 and omega0 > 0".into()));
        }
        let rad = c1 * c1 - (omega0 / ell).powi(2);
        // Tolerate rounding at the degenerate threshold.
        if rad < -1e-14 * c1 * c1 {
            return Err(TdoError::Parameter(format!(
                "c1^2 = {} is below omega0^2/(Omega0 k0)^2 = {}",
                c1 * c1,
                (omega0 / ell).powi(2)
            )));
        }
        if c1 <= 0.0 {
            return Err(TdoError::NonPositiveAlpha { t: f64::NAN, alpha: c1 });
        }
        Ok(LargeK0Approx { omega0, ell: ell.abs(), c1, c2, amplitude: rad.max(0.0).sqrt() })
    }

    pub fn alpha(&self, t: f64) -> f64 {
        self.c1 + self.amplitude * (2.0 * self.ell * (t + self.c2)).sin()
    }

    /// Oscillator phase `Φ` with `Φ' = -ω0/α`, continuous across the poles of tan.
    pub fn phase(&self, t: f64) -> f64 {
        let scale = self.ell / self.omega0;
        let g = (self.amplitude - self.c1) * scale;
        let y = self.ell * (t + self.c2) - std::f64::consts::FRAC_PI_4;
        crate::ermakov::atan_tan_unwrapped(g, y)
    }

    pub fn q(&self, t: f64, amplitude: f64, phi0: f64) -> f64 {
        amplitude * (self.phase(t) + phi0).sin()
    }

    /// `max |q'' + (α'/α) q' + (ω0/α)² q|` on a grid, derivatives of `q` by
    /// fourth-order central differences.
    pub fn eom_residual(&self, t_lo: f64, t_hi: f64, points: usize) -> Result<f64> {
        let h = 1e-3;
        let mut worst: f64 = 0.0;
        for i in 0..points {
            let t = t_lo + (t_hi - t_lo) * i as f64 / (points.max(2) - 1) as f64;
            let a = self.alpha(t);
            if a <= 0.0 {
                return Err(TdoError::NonPositiveAlpha { t, alpha: a });
            }
            let da = 2.0 * self.ell * self.amplitude * (2.0 * self.ell * (t + self.c2)).cos();
            let q = |s: f64| self.q(s, 1.0, 0.0);
            let (qm2, qm1, q0, qp1, qp2) = (q(t - 2.0 * h), q(t - h), q(t), q(t + h), q(t + 2.0 * h));
            let dq = (qm2 - 8.0 * qm1 + 8.0 * qp1 - qp2) / (12.0 * h);
            let ddq = (-qm2 + 16.0 * qm1 - 30.0 * q0 + 16.0 * qp1 - qp2) / (12.0 * h * h);
            let w = self.omega0 / a;
            worst = worst.max((ddq + da / a * dq + w * w * q0).abs());
        }
        Ok(worst)
    }
}

pub fn large_k0_approx(omega0_big: f64, k0: f64, omega0: f64, c1: f64, c2: f64, t: f64) -> Result<(f64, f64)> {
    let approx = LargeK0Approx::new(omega0_big, k0, omega0, c1, c2)?;
    let alpha = approx.alpha(t);
    if alpha <= 0.0 {
        return Err(TdoError::NonPositiveAlpha { t, alpha });
    }
    Ok((alpha, approx.q(t, 1.0, 0.0)))
}

/// Quantifies dropping the `ω0²/(4σ³)` term: integrates the nonlinear
/// equation `σ'' + Ω0²(k0² + ν²/t²)σ - ω0²/(4σ³) = 0` and its linear
/// counterpart from the same data and returns the max relative deviation.
#[allow(clippy::too_many_arguments)]
pub fn linearization_deviation(
    omega0_big: f64,
    k0: f64,
    nu: f64,
    omega0: f64,
    sigma0: f64,
    sigma_dot0: f64,
    t0: f64,
    t1: f64,
) -> Result<f64> {
    if !(t0 > 0.0 && t1 > t0) || sigma0 <= 0.0 {
        return Err(TdoError::Parameter("need 0 < t0 < t1 and sigma0 > 0".into()));
    }
    let o2 = omega0_big * omega0_big;
    let w2 = omega0 * omega0;
    let freq2 = move |t: f64| o2 * (k0 * k0 + nu * nu / (t * t));
    let rhs = |t: f64, y: &[f64; 4]| {
        let f = freq2(t);
        [y[1], -f * y[0] + w2 / (4.0 * y[0].powi(3)), y[3], -f * y[2]]
    };
    let grid: Vec<f64> = (0..=200).map(|i| t0 + (t1 - t0) * i as f64 / 200.0).collect();
    let out =
        solve_on_grid(&rhs, t0, [sigma0, sigma_dot0, sigma0, sigma_dot0], &grid, StepControl::default(), |t, y| {
            if y[0] < 1e-8 {
                Err(TdoError::SingularityApproached { t, sigma: y[0], floor: 1e-8 })
            } else {
                Ok(())
            }
        })?;
    Ok(out.iter().map(|y| ((y[0] - y[2]) / y[0]).abs()).fold(0.0, f64::max))
}
