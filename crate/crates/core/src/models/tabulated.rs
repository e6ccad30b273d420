//! Monotone piecewise-cubic (Fritsch–Carlson) interpolation of tabulated
//! `(t, m, ω)` samples.

use crate::error::{Result, TdoError};
use std::io::Read;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(TdoError::Table("need at least two samples of equal length".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = delta[0];
        slopes[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                // Weighted harmonic mean (Fritsch–Butland form).
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Ok(MonotoneCubic { x, y, slopes })
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value and first three derivatives at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // Cubic in s: c0 + c1 s + c2 s² + c3 s³
        let c0 = y0;
        let c1 = m0;
        let c2 = 3.0 * (y1 - y0) - 2.0 * m0 - m1;
        let c3 = 2.0 * (y0 - y1) + m0 + m1;
        let v = c0 + s * (c1 + s * (c2 + s * c3));
        let d1 = (c1 + s * (2.0 * c2 + 3.0 * s * c3)) / h;
        let d2 = (2.0 * c2 + 6.0 * s * c3) / (h * h);
        let d3 = 6.0 * c3 / (h * h * h);
        [v, d1, d2, d3]
    }
}

/// Mass and frequency profiles read from `t,m,omega` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub t: Vec<f64>,
    pub mass: MonotoneCubic,
    pub omega: MonotoneCubic,
}

impl Table {
    pub fn from_samples(t: Vec<f64>, m: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if t.len() < 4 {
            return Err(TdoError::Table(format!("need at least 4 rows, got {}", t.len())));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(TdoError::Table("t must be strictly increasing".into()));
        }
        if m.iter().any(|&v| !(v > 0.0)) {
            return Err(TdoError::Table("mass samples must be positive".into()));
        }
        if t.iter().chain(&m).chain(&omega).any(|v| !v.is_finite()) {
            return Err(TdoError::Table("non-finite sample".into()));
        }
        Ok(Table { mass: MonotoneCubic::new(t.clone(), m)?, omega: MonotoneCubic::new(t.clone(), omega)?, t })
    }

    /// Parses CSV with header `t,m,omega`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["t", "m", "omega"] {
            return Err(TdoError::Table(format!("expected header `t,m,omega`, got `{}`", cols.join(","))));
        }
        let (mut t, mut m, mut w) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| TdoError::Table(format!("row {}: missing column", line + 2)))?
                    .parse::<f64>()
                    .map_err(|e| TdoError::Table(format!("row {}: {e}", line + 2)))
            };
            t.push(parse(0)?);
            m.push(parse(1)?);
            w.push(parse(2)?);
        }
        Table::from_samples(t, m, w)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Table::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }
}
