//! Key-value configuration file, merged under command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use eitcool::{CoolingParams, Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StringOrList {
    One(String),
    Many(Vec<String>),
}

impl StringOrList {
    pub fn joined(&self) -> String {
        match self {
            StringOrList::One(s) => s.clone(),
            StringOrList::Many(v) => v.join(","),
        }
    }
}

/// Every key is optional; absent keys fall back to built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub nu: Option<f64>,
    pub omega_g: Option<f64>,
    pub omega_r: Option<f64>,
    pub gamma_g: Option<f64>,
    pub gamma_r: Option<f64>,
    pub eta_g: Option<f64>,
    pub eta_r: Option<f64>,
    pub phi_g: Option<f64>,
    pub phi_r: Option<f64>,
    pub delta_override: Option<f64>,
    pub n_max: Option<usize>,
    pub estimators: Option<StringOrList>,
    pub hamiltonian: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub vary: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub lock: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))
    }

    /// `later` wins wherever it sets a key.
    pub fn overlay(self, later: FileConfig) -> FileConfig {
        FileConfig {
            nu: later.nu.or(self.nu),
            omega_g: later.omega_g.or(self.omega_g),
            omega_r: later.omega_r.or(self.omega_r),
            gamma_g: later.gamma_g.or(self.gamma_g),
            gamma_r: later.gamma_r.or(self.gamma_r),
            eta_g: later.eta_g.or(self.eta_g),
            eta_r: later.eta_r.or(self.eta_r),
            phi_g: later.phi_g.or(self.phi_g),
            phi_r: later.phi_r.or(self.phi_r),
            delta_override: later.delta_override.or(self.delta_override),
            n_max: later.n_max.or(self.n_max),
            estimators: later.estimators.or(self.estimators),
            hamiltonian: later.hamiltonian.or(self.hamiltonian),
            format: later.format.or(self.format),
            out: later.out.or(self.out),
            vary: later.vary.or(self.vary),
            grid: later.grid.or(self.grid),
            lock: later.lock.or(self.lock),
        }
    }

    /// Applies any physical parameters set here on top of `base`.
    pub fn params_over(&self, base: CoolingParams) -> CoolingParams {
        CoolingParams {
            nu: self.nu.unwrap_or(base.nu),
            omega_g: self.omega_g.unwrap_or(base.omega_g),
            omega_r: self.omega_r.unwrap_or(base.omega_r),
            gamma_g: self.gamma_g.unwrap_or(base.gamma_g),
            gamma_r: self.gamma_r.unwrap_or(base.gamma_r),
            eta_g: self.eta_g.unwrap_or(base.eta_g),
            eta_r: self.eta_r.unwrap_or(base.eta_r),
            phi_g: self.phi_g.unwrap_or(base.phi_g),
            phi_r: self.phi_r.unwrap_or(base.phi_r),
            delta: base.delta,
        }
    }

    pub fn sets_params(&self) -> bool {
        [
            self.nu,
            self.omega_g,
            self.omega_r,
            self.gamma_g,
            self.gamma_r,
            self.eta_g,
            self.eta_r,
            self.phi_g,
            self.phi_r,
        ]
        .iter()
        .any(Option::is_some)
    }
}
