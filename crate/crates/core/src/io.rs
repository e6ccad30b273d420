//! CSV and JSON writers for trajectories. Numbers are printed with 17
//! significant digits so that every `f64` round-trips.

use crate::ermakov::ErmakovState;
use crate::error::Result;
use crate::models::ModelDescriptor;
use crate::quantum::{bogolubov, quadratures, Reference};
use serde::Serialize;
use std::io::Write;

pub const TRAJECTORY_HEADER: &str = "t,sigma,sigma_dot,theta,k,F";
pub const UNCERTAINTY_HEADER: &str = "t,varQ,varP,product,mu_re,mu_im,nu_re,nu_im";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> Result<()> {
    let line: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    writeln!(out, "{}", line.join(","))?;
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(out: &mut W, states: &[ErmakovState]) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in states {
        write_row(out, &[s.t, s.sigma, s.sigma_dot, s.theta, s.k, s.f])?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyRow {
    pub t: f64,
    #[serde(rename = "varQ")]
    pub var_q: f64,
    #[serde(rename = "varP")]
    pub var_p: f64,
    pub product: f64,
    pub mu_re: f64,
    pub mu_im: f64,
    pub nu_re: f64,
    pub nu_im: f64,
}

pub fn uncertainty_rows(
    model: &ModelDescriptor,
    states: &[ErmakovState],
    hbar: f64,
    reference: Reference,
) -> Result<Vec<UncertaintyRow>> {
    states
        .iter()
        .map(|s| {
            let q = quadratures(model, s, hbar)?;
            let b = bogolubov(model, s, reference)?;
            Ok(UncertaintyRow {
                t: s.t,
                var_q: q.var_q,
                var_p: q.var_p,
                product: q.product,
                mu_re: b.mu.re,
                mu_im: b.mu.im,
                nu_re: b.nu.re,
                nu_im: b.nu.im,
            })
        })
        .collect()
}

pub fn write_uncertainty_csv<W: Write>(out: &mut W, rows: &[UncertaintyRow]) -> Result<()> {
    writeln!(out, "{UNCERTAINTY_HEADER}")?;
    for r in rows {
        write_row(out, &[r.t, r.var_q, r.var_p, r.product, r.mu_re, r.mu_im, r.nu_re, r.nu_im])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains(' '));
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn trajectory_header_and_rows() {
        let s = ErmakovState { t: 0.0, sigma: 1.0, sigma_dot: 0.0, theta: 0.0, k: 1.25, f: 0.0 };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &[s, s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 6);
    }
}
