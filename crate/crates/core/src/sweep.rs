//! Single-point evaluation of every estimator and one-dimensional parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, SecondOrder};
use crate::error::{Error, Result};
use crate::hilbert::FockCutoff;
use crate::liouvillian::{self, Diagnostics, SolverConfig};
use crate::physics::{self, Basis, CoolingParams};
use crate::subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Steady state of the full truncated-Fock-space master equation.
    NumericFull,
    /// Steady state of the seven-state projected model.
    NumericProjected,
    /// `γ²/16Δ²`.
    Eq1,
    /// Second-order result, general Ω_g, Ω_r.
    Eq15,
    /// Second-order result in the weak-Ω_g limit.
    Eq16,
    /// Second-order result at Ω_g = Ω_r.
    Eq17,
}

impl Estimator {
    pub const ALL: [Estimator; 6] = [
        Estimator::NumericFull,
        Estimator::NumericProjected,
        Estimator::Eq1,
        Estimator::Eq15,
        Estimator::Eq16,
        Estimator::Eq17,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::NumericFull => "numeric_full",
            Estimator::NumericProjected => "numeric_projected",
            Estimator::Eq1 => "eq1",
            Estimator::Eq15 => "eq15",
            Estimator::Eq16 => "eq16",
            Estimator::Eq17 => "eq17",
        }
    }

    /// Parses a comma-separated list, keeping the first occurrence of duplicates.
    pub fn parse_list(s: &str) -> Result<Vec<Estimator>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let e: Estimator = part.parse()?;
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(out)
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown estimator `{s}`")))
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    OmegaG,
    EtaG,
    GammaG,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::OmegaG => "omega_g",
            Axis::EtaG => "eta_g",
            Axis::GammaG => "gamma_g",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "omega_g" => Ok(Axis::OmegaG),
            "eta_g" => Ok(Axis::EtaG),
            "gamma_g" => Ok(Axis::GammaG),
            other => Err(Error::config(format!("unknown sweep axis `{other}`"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the other parameters follow the swept one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lock {
    /// Ω_r/Ω_g stays at its base value.
    OmegaRatio,
    /// γ_g + γ_r stays at its base value.
    GammaTotal,
    /// η_r = η_g.
    EtaEqual,
    /// Only the swept parameter changes.
    Free,
}

impl Lock {
    fn fits(self, axis: Axis) -> bool {
        matches!(
            (self, axis),
            (Lock::Free, _)
                | (Lock::OmegaRatio, Axis::OmegaG)
                | (Lock::GammaTotal, Axis::GammaG)
                | (Lock::EtaEqual, Axis::EtaG)
        )
    }
}

impl FromStr for Lock {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "omega_ratio" => Ok(Lock::OmegaRatio),
            "gamma_total" => Ok(Lock::GammaTotal),
            "eta_equal" => Ok(Lock::EtaEqual),
            "free" | "none" => Ok(Lock::Free),
            other => Err(Error::config(format!("unknown lock `{other}`"))),
        }
    }
}

/// Which coupling operator the full numeric solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Expanded to first order in the Lamb-Dicke parameters.
    #[default]
    LambDicke,
    /// Exact `exp(iη cos φ (â + â†))` recoil.
    Full,
}

impl FromStr for HamiltonianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ld" | "lamb_dicke" => Ok(HamiltonianKind::LambDicke),
            "full" => Ok(HamiltonianKind::Full),
            other => Err(Error::config(format!("unknown Hamiltonian `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOptions {
    pub n_max: FockCutoff,
    pub hamiltonian: HamiltonianKind,
    /// Use this Δ instead of the resonance condition.
    pub delta_override: Option<f64>,
    pub solver: SolverConfig,
}

impl PointOptions {
    pub fn new(n_max: FockCutoff) -> Self {
        Self {
            n_max,
            hamiltonian: HamiltonianKind::default(),
            delta_override: None,
            solver: SolverConfig::default(),
        }
    }
}

/// Why an estimator has no value at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Failure {
    Divergence(String),
    DegenerateSteadyState(usize),
    Numerical(String),
    /// The formula's premise does not hold at this point.
    NotApplicable(String),
}

impl Failure {
    pub fn tag(&self) -> String {
        match self {
            Failure::Divergence(_) => "divergence".into(),
            Failure::DegenerateSteadyState(dim) => format!("degenerate_steady_state(dim={dim})"),
            Failure::Numerical(_) => "numerical".into(),
            Failure::NotApplicable(_) => "not_applicable".into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence(m) => Failure::Divergence(m),
            Error::DegenerateSteadyState { dim } => Failure::DegenerateSteadyState(dim),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Value { nbar: f64 },
    Failed { reason: Failure },
}

impl Outcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            Outcome::Value { nbar } => Some(*nbar),
            Outcome::Failed { .. } => None,
        }
    }

    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(nbar) => Outcome::Value { nbar },
            Err(e) => Outcome::Failed { reason: e.into() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub vary: Axis,
    pub value: f64,
    /// Parameters actually evaluated, Δ included.
    pub params: CoolingParams,
    pub outcomes: BTreeMap<Estimator, Outcome>,
    /// The two addends of the second-order result, when it was requested and finite.
    pub eq15_terms: Option<SecondOrder>,
    /// Diagnostics of the full steady-state solve.
    pub diagnostics: Option<Diagnostics>,
}

impl SweepRow {
    pub fn nbar(&self, e: Estimator) -> Option<f64> {
        self.outcomes.get(&e).and_then(Outcome::value)
    }

    /// Failures and sanity warnings, `;`-separated.
    pub fn flags(&self) -> String {
        let mut flags: Vec<String> = self
            .outcomes
            .iter()
            .filter_map(|(e, o)| match o {
                Outcome::Failed { reason } => Some(format!("{e}:{}", reason.tag())),
                Outcome::Value { .. } => None,
            })
            .collect();
        if let Some(d) = &self.diagnostics {
            if !d.is_sane() {
                flags.push("numeric_full:steady_state_diagnostics".into());
            }
        }
        flags.join(";")
    }
}

fn numeric_full(params: &CoolingParams, opts: &PointOptions) -> Result<liouvillian::SteadyState> {
    let h = match opts.hamiltonian {
        HamiltonianKind::LambDicke => physics::hamiltonian_ld(params, opts.n_max, Basis::Gre)?,
        HamiltonianKind::Full => physics::hamiltonian_full(params, opts.n_max)?,
    };
    let jumps = physics::jump_operators(params, opts.n_max, Basis::Gre)?;
    let l = liouvillian::build_liouvillian(&h, &jumps)?;
    liouvillian::steady_state_with(&l, &opts.solver)
}

fn equal_rabi(params: &CoolingParams) -> bool {
    (params.omega_g - params.omega_r).abs() <= 1e-12 * params.omega_g.max(params.omega_r)
}

/// Evaluates the requested estimators at one point. Δ follows the resonance
/// condition unless overridden in `opts`.
pub fn run_point(params: &CoolingParams, estimators: &[Estimator], opts: &PointOptions) -> Result<SweepRow> {
    run_point_on(Axis::OmegaG, params.omega_g, params, estimators, opts)
}

fn run_point_on(
    vary: Axis,
    value: f64,
    params: &CoolingParams,
    estimators: &[Estimator],
    opts: &PointOptions,
) -> Result<SweepRow> {
    if estimators.is_empty() {
        return Err(Error::config("no estimators requested"));
    }
    let mut p = *params;
    p.delta = match opts.delta_override {
        Some(delta) => delta,
        None => physics::eit_resonance_delta(p.omega_g, p.omega_r, p.nu)?,
    };
    p.validate()?;
    let d = physics::derive_eit(&p)?;

    let mut outcomes = BTreeMap::new();
    let mut eq15_terms = None;
    let mut diagnostics = None;
    for &e in estimators {
        let outcome = match e {
            Estimator::NumericFull => match numeric_full(&p, opts) {
                Ok(ss) => {
                    diagnostics = Some(ss.diagnostics());
                    Outcome::Value {
                        nbar: liouvillian::phonon_occupation(&ss),
                    }
                }
                Err(err) => Outcome::Failed { reason: err.into() },
            },
            Estimator::NumericProjected => {
                Outcome::from_result(subspace::solve_params(&p).map(|s| s.nbar()))
            }
            Estimator::Eq1 => Outcome::from_result(analytic::nbar_zeroth(p.gamma(), p.delta)),
            Estimator::Eq15 => {
                let r = analytic::nbar_second(&d, p.gamma(), p.delta);
                if let Ok(terms) = &r {
                    eq15_terms = Some(*terms);
                }
                Outcome::from_result(r.map(|t| t.total()))
            }
            Estimator::Eq16 => Outcome::from_result(analytic::nbar_weak_g(&p, &d)),
            Estimator::Eq17 if !equal_rabi(&p) => Outcome::Failed {
                reason: Failure::NotApplicable("requires Ω_g = Ω_r".into()),
            },
            Estimator::Eq17 => Outcome::from_result(analytic::nbar_equal(p.gamma(), p.delta, d.eta)),
        };
        outcomes.insert(e, outcome);
    }
    Ok(SweepRow {
        vary,
        value,
        params: p,
        outcomes,
        eq15_terms,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub vary: Axis,
    pub grid: Vec<f64>,
    pub lock: Lock,
    pub base: CoolingParams,
    pub estimators: Vec<Estimator>,
    pub options: PointOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sweep grid values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("sweep grid must be strictly increasing"));
        }
        if !self.lock.fits(self.vary) {
            return Err(Error::config(format!(
                "lock {:?} does not apply to a sweep over {}",
                self.lock, self.vary
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::config("no estimators requested"));
        }
        if self.lock == Lock::OmegaRatio && !(self.base.omega_g > 0.0) {
            return Err(Error::config("Ω_r/Ω_g lock needs a positive base Ω_g"));
        }
        self.base.validate()?;
        for v in &self.grid {
            self.params_at(*v).validate()?;
        }
        Ok(())
    }

    /// Base parameters with the swept value and its lock applied; Δ is left to [`run_point`].
    pub fn params_at(&self, value: f64) -> CoolingParams {
        let mut p = self.base;
        match self.vary {
            Axis::OmegaG => {
                if self.lock == Lock::OmegaRatio {
                    p.omega_r = value * self.base.omega_r / self.base.omega_g;
                }
                p.omega_g = value;
            }
            Axis::EtaG => {
                if self.lock == Lock::EtaEqual {
                    p.eta_r = value;
                }
                p.eta_g = value;
            }
            Axis::GammaG => {
                if self.lock == Lock::GammaTotal {
                    p.gamma_r = self.base.gamma() - value;
                }
                p.gamma_g = value;
            }
        }
        p
    }
}

/// Evaluates every grid point, concurrently, returning rows in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid
        .par_iter()
        .map(|&v| run_point_on(spec.vary, v, &spec.params_at(v), &spec.estimators, &spec.options))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Panel {
    pub const ALL: [Panel; 6] = [Panel::A, Panel::B, Panel::C, Panel::D, Panel::E, Panel::F];

    /// Ω_g of the panel's base point; Ω_r is 5Ω_g in the first column and Ω_g in the second.
    pub fn base_rabi(self) -> (f64, f64) {
        match self {
            Panel::A | Panel::C | Panel::E => (4.0, 20.0),
            Panel::B | Panel::D | Panel::F => (15.0, 15.0),
        }
    }
}

impl FromStr for Panel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Panel::A),
            "b" => Ok(Panel::B),
            "c" => Ok(Panel::C),
            "d" => Ok(Panel::D),
            "e" => Ok(Panel::E),
            "f" => Ok(Panel::F),
            other => Err(Error::config(format!("unknown panel `{other}`, expected a..f"))),
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Panel::A => "a",
            Panel::B => "b",
            Panel::C => "c",
            Panel::D => "d",
            Panel::E => "e",
            Panel::F => "f",
        })
    }
}

pub const FIGURE3_ESTIMATORS: [Estimator; 4] = [
    Estimator::NumericFull,
    Estimator::NumericProjected,
    Estimator::Eq1,
    Estimator::Eq15,
];

/// The six comparison panels: Ω_g sweeps, η_g sweeps and γ_g sweeps at fixed γ_g + γ_r = 20ν,
/// for Ω_g = Ω_r/5 and Ω_g = Ω_r.
pub fn builtin_figure3(panel: Panel, n_max: FockCutoff) -> Result<SweepSpec> {
    let (og, or) = panel.base_rabi();
    let base = CoolingParams::reference(og, or)?;
    let (vary, lock, grid) = match panel {
        Panel::A => (Axis::OmegaG, Lock::OmegaRatio, vec![2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]),
        Panel::B => (
            Axis::OmegaG,
            Lock::OmegaRatio,
            vec![6.0, 9.0, 12.0, 15.0, 18.0, 21.0, 24.0],
        ),
        Panel::C | Panel::D => (
            Axis::EtaG,
            Lock::EtaEqual,
            vec![0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2],
        ),
        Panel::E | Panel::F => (
            Axis::GammaG,
            Lock::GammaTotal,
            vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0],
        ),
    };
    let spec = SweepSpec {
        vary,
        grid,
        lock,
        base,
        estimators: FIGURE3_ESTIMATORS.to_vec(),
        options: PointOptions::new(n_max),
    };
    spec.validate()?;
    Ok(spec)
}
