//! Coefficient arithmetic shared by the floating-point and exact-rational
//! paths. Everything here is generic over [`Scalar`], so the same code that
//! builds the production series also runs over `BigRational` in the checks.

use num::traits::{FromPrimitive, Num};
use num::{BigInt, BigRational, ToPrimitive};
use std::ops::Neg;

pub trait Scalar: Clone + Num + FromPrimitive + Neg<Output = Self> {}
impl<T: Clone + Num + FromPrimitive + Neg<Output = T>> Scalar for T {}

#[inline]
fn int<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("small integer is representable")
}

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn rational_from_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Normalized odd coefficients `a_{2k+1}/a_1`, k = 0..n, from the two-term
/// ratio recursion `a_{2k+1}/a_{2k-1} = -mu^2 (2k-1) / (2k [(4k^2-1) + lambda^2])`.
pub fn ratio_coefficients<T: Scalar>(lambda2: &T, mu2: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(T::one());
    for k in 1..n as i64 {
        let num = -(mu2.clone() * int::<T>(2 * k - 1));
        let den = int::<T>(2 * k) * (int::<T>(4 * k * k - 1) + lambda2.clone());
        let prev = out.last().unwrap().clone();
        out.push(prev * num / den);
    }
    out
}

/// Same coefficients from the closed product form
/// `a_{2k+1} = (-1)^k mu^{2k} prod_{j=3,5,..,2k+1} (2k+2-j) / ((2k+3-j)(j(j-2)+lambda^2)) a_1`.
pub fn product_coefficients<T: Scalar>(lambda2: &T, mu2: &T, n: usize) -> Vec<T> {
    (0..n as i64)
        .map(|k| {
            let mut acc = T::one();
            for _ in 0..k {
                acc = acc * -mu2.clone();
            }
            let mut j = 3;
            while j <= 2 * k + 1 {
                let num = int::<T>(2 * k + 2 - j);
                let den = int::<T>(2 * k + 3 - j) * (int::<T>(j * (j - 2)) + lambda2.clone());
                acc = acc * num / den;
                j += 2;
            }
            acc
        })
        .collect()
}

/// Solves the power-by-power system obtained by inserting the full series
/// into `2 a a'' - a'^2 - 4 w0^2 + a^2 (mu^2 + lambda^2/t^2) = 0`, starting from
/// `a_0 = 0` and `a_1 = 1` (normalization; `a_1` itself is fixed by the `t^0`
/// equation). Returns the full coefficient list `a_0 .. a_{2n-1}`, even
/// entries included, normalized by `a_1`.
///
/// At power `t^p` (p >= 1) the unknown `a_{p+1}` enters linearly with
/// coefficient `2(p^2 - 1 + lambda^2) a_1`; every other term involves only
/// lower-index coefficients.
pub fn triangular_coefficients<T: Scalar>(lambda2: &T, mu2: &T, n: usize) -> Vec<T> {
    let len = if n == 0 { 0 } else { 2 * n };
    let mut a: Vec<T> = vec![T::zero(); len];
    if len == 0 {
        return a;
    }
    a[1] = T::one();
    for p in 1..(len - 2 + 1) {
        let target = p + 1;
        if target >= len {
            break;
        }
        // Residual at t^p with a_{target} = 0, then solve for it.
        a[target] = T::zero();
        let r = residual_at_power(&a, lambda2, mu2, &T::zero(), p as i64);
        let coeff = int::<T>(2) * (int::<T>((p * p) as i64 - 1) + lambda2.clone());
        a[target] = -r / coeff;
    }
    a
}

/// Coefficient of `t^p` in `2 a a'' - a'^2 - 4 w0^2 + mu^2 a^2 + lambda^2 a^2/t^2`
/// for the polynomial with coefficients `a` (index = power). `p >= -2`.
pub fn residual_at_power<T: Scalar>(a: &[T], lambda2: &T, mu2: &T, four_w02: &T, p: i64) -> T {
    let get = |i: i64| -> T {
        if i < 0 || i as usize >= a.len() {
            T::zero()
        } else {
            a[i as usize].clone()
        }
    };
    let c = |k: i64| -> T {
        let mut s = T::zero();
        for j in 0..=k {
            s = s + get(j) * get(k - j);
        }
        s
    };
    if p < 0 {
        return lambda2.clone() * c(p + 2);
    }
    let mut d = T::zero();
    let mut b = T::zero();
    for j in 0..=p {
        d = d + int::<T>((2 + p - j) * (1 + p - j)) * get(j) * get(p + 2 - j);
        b = b + int::<T>((j + 1) * (p - j + 1)) * get(j + 1) * get(p - j + 1);
    }
    let mut r = int::<T>(2) * d - b + mu2.clone() * c(p) + lambda2.clone() * c(p + 2);
    if p == 0 {
        r = r - four_w02.clone();
    }
    r
}

/// Formal reciprocal of `1 + sum_{k>=1} f_k s^k`: returns `g_0 .. g_{n-1}`.
pub fn reciprocal<T: Scalar>(f: &[T], n: usize) -> Vec<T> {
    let mut g: Vec<T> = Vec::with_capacity(n);
    if n == 0 {
        return g;
    }
    let f0 = f.first().cloned().unwrap_or_else(T::one);
    g.push(T::one() / f0.clone());
    for m in 1..n {
        let mut s = T::zero();
        for k in 1..=m {
            if k < f.len() {
                s = s + f[k].clone() * g[m - k].clone();
            }
        }
        g.push(-s / f0.clone());
    }
    g
}

/// Determinant by Gaussian elimination with first-nonzero pivoting.
pub fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return T::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..n {
                let v = m[col][c].clone();
                m[r][c] = m[r][c].clone() - factor.clone() * v;
            }
        }
    }
    det
}

/// Reciprocal-series coefficient `ã_k` (coefficient of `t^k`) from the
/// lower-Hessenberg determinant form, with `a` normalized so that `a[1] = 1`
/// (`a` indexed by power, `a[0] = 0`).
pub fn reciprocal_by_determinant<T: Scalar>(a: &[T], k: usize) -> T {
    if k == 0 {
        return T::one();
    }
    let get = |i: i64| -> T {
        if i < 0 || i as usize >= a.len() {
            T::zero()
        } else {
            a[i as usize].clone()
        }
    };
    let mut h = vec![vec![T::zero(); k]; k];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let idx = i as i64 - j as i64 + 2;
            if idx >= 0 {
                *cell = get(idx);
            }
        }
    }
    let det = determinant(h);
    if k.is_multiple_of(2) {
        det
    } else {
        -det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    fn r(n: i64, d: i64) -> BigRational {
        rational_from_ratio(n, d)
    }

    #[test]
    fn ratio_matches_hand_values() {
        // lambda = 2, mu = 1: a3/a1 = -1/14, a5/a3 = -3/76
        let c = ratio_coefficients(&r(4, 1), &r(1, 1), 3);
        assert_eq!(c[1], r(-1, 14));
        assert_eq!(c[2], r(-1, 14) * r(-3, 76));
    }

    #[test]
    fn product_form_equals_ratio_form() {
        let l2 = r(7, 3);
        let m2 = r(5, 2);
        assert_eq!(ratio_coefficients(&l2, &m2, 11), product_coefficients(&l2, &m2, 11));
    }

    #[test]
    fn triangular_system_has_zero_even_terms() {
        let a = triangular_coefficients(&r(4, 1), &r(1, 1), 6);
        for (i, v) in a.iter().enumerate() {
            if i % 2 == 0 {
                assert!(v.is_zero(), "a_{i} = {v}");
            }
        }
        assert_eq!(a[3], r(-1, 14));
    }

    #[test]
    fn reciprocal_of_geometric() {
        // 1/(1 - s) = 1 + s + s^2 + ...
        let g = reciprocal(&[r(1, 1), r(-1, 1)], 6);
        assert!(g.iter().all(|x| *x == r(1, 1)));
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![r(2, 1), r(1, 1), r(0, 1)], vec![r(1, 1), r(3, 1), r(1, 1)], vec![r(0, 1), r(1, 1), r(4, 1)]];
        assert_eq!(determinant(m), r(18, 1));
        let z = vec![vec![r(0, 1), r(0, 1)], vec![r(1, 1), r(2, 1)]];
        assert!(determinant(z).is_zero());
    }
}
