//! Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! The stepper works on fixed-size state arrays and advances to requested
//! output times exactly (the last step before an output time is clipped), so
//! every component of the state, including any quadrature accumulators
//! appended to it, shares the same error control.

use crate::error::{Result, TdoError};

/// Tolerances and limits for the adaptive stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Initial trial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-12, h_init: None, h_min: 1e-14, max_steps: 5_000_000 }
    }
}

impl StepControl {
    pub fn with_rtol(rtol: f64) -> Self {
        StepControl { rtol, atol: (rtol * 1e-2).max(1e-15), ..Default::default() }
    }
}

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
// PI controller exponents (Hairer & Wanner, order 5).
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Adaptive stepper state. Carries the step size and the FSAL derivative
/// between calls to [`Stepper::advance_to`].
#[derive(Debug, Clone)]
pub struct Stepper<const N: usize> {
    t: f64,
    y: [f64; N],
    h: f64,
    k1: Option<[f64; N]>,
    err_prev: f64,
    control: StepControl,
    steps: usize,
}

impl<const N: usize> Stepper<N> {
    pub fn new(t0: f64, y0: [f64; N], control: StepControl) -> Self {
        Stepper { t: t0, y: y0, h: control.h_init.unwrap_or(0.0), k1: None, err_prev: 1e-4, control, steps: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps
    }

    fn err_norm(&self, y0: &[f64; N], y1: &[f64; N], e: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.control.atol + self.control.rtol * y0[i].abs().max(y1[i].abs());
            let r = e[i] / sc;
            acc += r * r;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<F>(&self, f: &F, k1: &[f64; N], span: f64) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        // Hairer's starting-step heuristic.
        let sc = |i: usize| self.control.atol + self.control.rtol * self.y[i].abs();
        let d0 = (0..N).map(|i| (self.y[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..N).map(|i| (k1[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = axpy(&self.y, h0, &[(1.0, k1)]);
        let k2 = f(self.t + h0, &y1);
        let d2 = (0..N).map(|i| ((k2[i] - k1[i]) / sc(i)).powi(2)).sum::<f64>().sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(1.0 / 5.0) };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advances the solution to exactly `t_target`, calling `guard` on every
    /// accepted state. A guard error aborts the integration.
    pub fn advance_to<F, G>(&mut self, t_target: f64, f: &F, mut guard: G) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: FnMut(f64, &[f64; N]) -> Result<()>,
    {
        if t_target < self.t {
            return Err(TdoError::Parameter(format!("cannot integrate backwards from {} to {}", self.t, t_target)));
        }
        let mut k1 = match self.k1 {
            Some(k) => k,
            None => f(self.t, &self.y),
        };
        if self.h <= 0.0 {
            self.h = self.initial_step(f, &k1, (t_target - self.t).max(1e-12));
        }
        while self.t < t_target {
            if self.steps >= self.control.max_steps {
                return Err(TdoError::StepSizeUnderflow { t: self.t });
            }
            let remaining = t_target - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let t = self.t;
            let y = self.y;

            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + h, &y_new);
            let mut e = [0.0; N];
            for i in 0..N {
                e[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let err = self.err_norm(&y, &y_new, &e);

            if err.is_finite() && err <= 1.0 {
                let scale = if err == 0.0 {
                    MAX_SCALE
                } else {
                    (SAFETY * err.powf(-ALPHA) * self.err_prev.powf(BETA)).clamp(MIN_SCALE, MAX_SCALE)
                };
                self.err_prev = err.max(1e-4);
                self.t = if last { t_target } else { t + h };
                self.y = y_new;
                k1 = k7;
                self.steps += 1;
                // A clipped final step says nothing about the natural step size.
                if !last {
                    self.h = h * scale;
                }
                guard(self.t, &self.y)?;
            } else {
                let scale =
                    if err.is_finite() { (SAFETY * err.powf(-1.0 / 5.0)).clamp(MIN_SCALE, 1.0) } else { MIN_SCALE };
                self.h = h * scale;
                if self.h < self.control.h_min * t.abs().max(1.0) {
                    return Err(TdoError::StepSizeUnderflow { t });
                }
            }
        }
        self.k1 = Some(k1);
        Ok(self.y)
    }
}

/// Integrates `f` from `t0` and records the state at each time in `grid`
/// (which must be nondecreasing and start at or after `t0`).
pub fn solve_on_grid<const N: usize, F, G>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    grid: &[f64],
    control: StepControl,
    mut guard: G,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> Result<()>,
{
    let mut stepper = Stepper::new(t0, y0, control);
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        out.push(stepper.advance_to(t, f, &mut guard)?);
    }
    Ok(out)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
pub fn integrate_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    gk_recursive(f, a, b, tol, 0)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * hl, ((kron - gauss) * hl).abs())
}

fn gk_recursive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol.max(1e-15 * val.abs()) || depth >= 40 {
        return val;
    }
    let m = 0.5 * (a + b);
    gk_recursive(f, a, m, 0.5 * tol, depth + 1) + gk_recursive(f, m, b, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let period = 2.0 * std::f64::consts::PI;
        let out = solve_on_grid(&f, 0.0, [1.0, 0.0], &[period], StepControl::default(), |_, _| Ok(())).unwrap();
        assert!((out[0][0] - 1.0).abs() < 1e-9);
        assert!(out[0][1].abs() < 1e-9);
    }

    #[test]
    fn exponential_growth_matches_closed_form() {
        let f = |_t: f64, y: &[f64; 1]| [0.7 * y[0]];
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let out = solve_on_grid(&f, 0.0, [2.0], &grid, StepControl::default(), |_, _| Ok(())).unwrap();
        for (t, y) in grid.iter().zip(&out) {
            let exact = 2.0 * (0.7 * t).exp();
            assert!(((y[0] - exact) / exact).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn guard_error_aborts() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let r = solve_on_grid(&f, 0.0, [1.0], &[10.0], StepControl::default(), |t, y| {
            if y[0] < 0.5 {
                Err(TdoError::SingularityApproached { t, sigma: y[0], floor: 0.5 })
            } else {
                Ok(())
            }
        });
        assert!(matches!(r, Err(TdoError::SingularityApproached { .. })));
    }

    #[test]
    fn backwards_request_is_rejected() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut s = Stepper::new(1.0, [1.0], StepControl::default());
        assert!(s.advance_to(0.5, &f, |_, _| Ok(())).is_err());
    }

    #[test]
    fn gauss_kronrod_polynomial_and_oscillatory() {
        let v = integrate_gk(&|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-13);
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-12);
        let v = integrate_gk(&|x: f64| (10.0 * x).sin(), 0.0, 3.0, 1e-12);
        let exact = (1.0 - (30.0f64).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }
}
