//! Run configuration: command-line flags layered over a JSON config file
//! layered over model defaults.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "TDO_DEFAULT_CONFIG";
pub const DEFAULT_DT_OUT: f64 = 0.1;
pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_CRITERION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub table: Option<PathBuf>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub dt_out: Option<f64>,
    pub hbar: Option<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub sigma0: Option<f64>,
    pub sigma_dot0: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// `--config` if given, else the file named by `TDO_DEFAULT_CONFIG`, else empty.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, String> {
        if let Some(p) = explicit {
            return FileConfig::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => FileConfig::load(Path::new(&p)),
            _ => Ok(FileConfig::default()),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub table: Option<PathBuf>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub dt_out: f64,
    pub hbar: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub sigma0: Option<f64>,
    pub sigma_dot0: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if let (Some(a), Some(b)) = (self.t0, self.t1) {
            if !(a < b) {
                return Err(format!("empty time range: t0 = {a} must be below t1 = {b}"));
            }
        }
        if !(self.dt_out > 0.0) {
            return Err(format!("dt_out must be positive, got {}", self.dt_out));
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0) {
                return Err(format!("tolerance `{k}` must be positive, got {v}"));
            }
        }
        for (k, v) in &self.params {
            if !v.is_finite() {
                return Err(format!("parameter `{k}` must be finite"));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    /// Output path for sweep job `index`: `name.ext` becomes `name_index.ext`.
    pub fn indexed_out(&self, index: usize) -> Option<PathBuf> {
        self.out.as_ref().map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = match p.extension() {
                Some(ext) => format!("{stem}_{index}.{}", ext.to_string_lossy()),
                None => format!("{stem}_{index}"),
            };
            p.with_file_name(name)
        })
    }
}

/// One `--sweep param=lo:hi:n` specification.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, String> {
        let (param, range) =
            spec.split_once('=').ok_or_else(|| format!("sweep `{spec}` is not of the form param=lo:hi:n"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 || param.is_empty() {
            return Err(format!("sweep `{spec}` is not of the form param=lo:hi:n"));
        }
        let lo: f64 = parts[0].parse().map_err(|e| format!("sweep lower bound: {e}"))?;
        let hi: f64 = parts[1].parse().map_err(|e| format!("sweep upper bound: {e}"))?;
        let n: usize = parts[2].parse().map_err(|e| format!("sweep count: {e}"))?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("sweep `{spec}` needs finite bounds and n >= 1"));
        }
        let values =
            if n == 1 { vec![lo] } else { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
        Ok(Sweep { param: param.to_string(), values })
    }
}
