//! `eitcool`: steady-state phonon occupation of EIT cooling from the command line.
//!
//! Exit status is 0 on success, 1 for configuration errors and 2 when a numerical
//! estimator fails.

mod config;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eitcool::hilbert::FockCutoff;
use eitcool::physics::{self, CoolingParams};
use eitcool::report::{self, Format};
use eitcool::sweep::{
    self, builtin_figure3, run_point, run_sweep, Estimator, Failure, HamiltonianKind, Lock, Outcome,
    Panel, PointOptions, SweepRow, SweepSpec,
};
use eitcool::{analytic, liouvillian, subspace, Error, Result};

use crate::config::{FileConfig, StringOrList};

const DEFAULT_N_MAX: usize = 12;

#[derive(Parser)]
#[command(name = "eitcool", version, about = "Steady-state phonon occupation of EIT cooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the estimators at a single parameter point.
    Point {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Sweep one parameter over a grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
        /// omega_g, eta_g or gamma_g
        #[arg(long)]
        vary: Option<String>,
        /// Comma-separated, strictly increasing values
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        grid: Option<Vec<f64>>,
        /// omega_ratio, gamma_total, eta_equal or free
        #[arg(long)]
        lock: Option<String>,
    },
    /// Reproduce one of the six comparison panels.
    Fig3 {
        #[command(flatten)]
        common: Common,
        /// a..f
        #[arg(long)]
        panel: String,
    },
    /// Fast internal consistency checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Key-value (TOML) file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Phonon cutoff for the full numeric solve
    #[arg(long)]
    n_max: Option<usize>,
    /// Comma-separated subset of numeric_full, numeric_projected, eq1, eq15, eq16, eq17
    #[arg(long)]
    estimators: Option<String>,
    /// ld or full
    #[arg(long)]
    hamiltonian: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or svg; defaults to the extension of --out, else csv
    #[arg(long)]
    format: Option<String>,
    /// Use this Δ instead of the resonance condition
    #[arg(long, allow_negative_numbers = true)]
    delta_override: Option<f64>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    omega_g: Option<f64>,
    #[arg(long)]
    omega_r: Option<f64>,
    #[arg(long)]
    gamma_g: Option<f64>,
    #[arg(long)]
    gamma_r: Option<f64>,
    #[arg(long)]
    eta_g: Option<f64>,
    #[arg(long)]
    eta_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_r: Option<f64>,
}

impl Common {
    /// File settings with the flags laid over them.
    fn resolve(&self, params: Option<&ParamArgs>) -> Result<FileConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let mut flags = FileConfig {
            n_max: self.n_max,
            estimators: self.estimators.clone().map(StringOrList::One),
            hamiltonian: self.hamiltonian.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            delta_override: self.delta_override,
            ..Default::default()
        };
        if let Some(p) = params {
            flags.nu = p.nu;
            flags.omega_g = p.omega_g;
            flags.omega_r = p.omega_r;
            flags.gamma_g = p.gamma_g;
            flags.gamma_r = p.gamma_r;
            flags.eta_g = p.eta_g;
            flags.eta_r = p.eta_r;
            flags.phi_g = p.phi_g;
            flags.phi_r = p.phi_r;
        }
        Ok(file.overlay(flags))
    }
}

struct Resolved {
    estimators: Vec<Estimator>,
    options: PointOptions,
    out: Option<PathBuf>,
    format: Format,
}

fn resolve_run(cfg: &FileConfig, default_estimators: &[Estimator]) -> Result<Resolved> {
    let n_max = FockCutoff::new(cfg.n_max.unwrap_or(DEFAULT_N_MAX))?;
    let estimators = match &cfg.estimators {
        Some(list) => Estimator::parse_list(&list.joined())?,
        None => default_estimators.to_vec(),
    };
    if estimators.is_empty() {
        return Err(Error::Config("no estimators requested".into()));
    }
    let mut options = PointOptions::new(n_max);
    if let Some(h) = &cfg.hamiltonian {
        options.hamiltonian = h.parse::<HamiltonianKind>()?;
    }
    if let Some(delta) = cfg.delta_override {
        if !delta.is_finite() {
            return Err(Error::Config("--delta-override must be finite".into()));
        }
        options.delta_override = Some(delta);
    }
    let format = match (&cfg.format, &cfg.out) {
        (Some(f), _) => f.parse()?,
        (None, Some(path)) => format_from_extension(path)?,
        (None, None) => Format::Csv,
    };
    Ok(Resolved {
        estimators,
        options,
        out: cfg.out.clone(),
        format,
    })
}

fn format_from_extension(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.parse(),
        None => Ok(Format::Csv),
    }
}

fn emit(rows: &[SweepRow], r: &Resolved, title: &str) -> Result<()> {
    match &r.out {
        Some(path) => {
            report::write(rows, path, r.format, title)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let text = report::render(rows, r.format, title)?;
            io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Failures of the numeric estimators, as opposed to formulas outside their domain.
fn numeric_failures(rows: &[SweepRow]) -> Vec<String> {
    let mut out = Vec::new();
    for row in rows {
        for (e, o) in &row.outcomes {
            let numeric = matches!(e, Estimator::NumericFull | Estimator::NumericProjected);
            if let Outcome::Failed { reason } = o {
                if numeric && matches!(reason, Failure::Numerical(_) | Failure::DegenerateSteadyState(_)) {
                    out.push(format!("{} = {}: {e} {}", row.vary, row.value, reason.tag()));
                }
            }
        }
        if row.diagnostics.is_some_and(|d| !d.is_sane()) {
            out.push(format!("{} = {}: steady-state diagnostics out of bounds", row.vary, row.value));
        }
    }
    out
}

fn finish(rows: &[SweepRow]) -> Result<ExitCode> {
    let failures = numeric_failures(rows);
    for f in &failures {
        eprintln!("warning: {f}");
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn point(common: &Common, params: &ParamArgs) -> Result<ExitCode> {
    let cfg = common.resolve(Some(params))?;
    let r = resolve_run(&cfg, &Estimator::ALL)?;
    let p = cfg.params_over(CoolingParams::reference(15.0, 15.0)?);
    let row = run_point(&p, &r.estimators, &r.options)?;
    let rows = [row];
    emit(&rows, &r, "single point")?;
    finish(&rows)
}

fn sweep_cmd(
    common: &Common,
    params: &ParamArgs,
    vary: Option<&str>,
    grid: Option<&[f64]>,
    lock: Option<&str>,
) -> Result<ExitCode> {
    let mut cfg = common.resolve(Some(params))?;
    if let Some(v) = vary {
        cfg.vary = Some(v.to_string());
    }
    if let Some(g) = grid {
        cfg.grid = Some(g.to_vec());
    }
    if let Some(l) = lock {
        cfg.lock = Some(l.to_string());
    }
    let r = resolve_run(&cfg, &sweep::FIGURE3_ESTIMATORS)?;
    let vary = cfg
        .vary
        .as_deref()
        .ok_or_else(|| Error::Config("sweep needs --vary".into()))?
        .parse()?;
    let spec = SweepSpec {
        vary,
        grid: cfg.grid.clone().ok_or_else(|| Error::Config("sweep needs --grid".into()))?,
        lock: cfg.lock.as_deref().map(str::parse).transpose()?.unwrap_or(Lock::Free),
        base: cfg.params_over(CoolingParams::reference(15.0, 15.0)?),
        estimators: r.estimators.clone(),
        options: r.options,
    };
    let rows = run_sweep(&spec)?;
    emit(&rows, &r, &format!("n̄ vs {}", spec.vary))?;
    finish(&rows)
}

fn fig3(common: &Common, panel: &str) -> Result<ExitCode> {
    let panel: Panel = panel.parse()?;
    let cfg = common.resolve(None)?;
    if cfg.sets_params() {
        return Err(Error::Config(
            "fig3 panels fix their own parameters; use `sweep` to change them".into(),
        ));
    }
    let r = resolve_run(&cfg, &sweep::FIGURE3_ESTIMATORS)?;
    let mut spec = builtin_figure3(panel, r.options.n_max)?;
    spec.estimators = r.estimators.clone();
    spec.options = r.options;
    let rows = run_sweep(&spec)?;
    emit(&rows, &r, &format!("panel ({panel}): n̄ vs {}", spec.vary))?;
    finish(&rows)
}

fn selftest() -> Result<ExitCode> {
    let mut failed = 0;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };

    let p = CoolingParams::reference(15.0, 15.0)?;
    let d = physics::derive_eit(&p)?;
    let second = analytic::nbar_second(&d, p.gamma(), p.delta)?.total();
    let equal = analytic::nbar_equal(p.gamma(), p.delta, d.eta)?;
    let gap = (second - equal).abs() / equal;
    report("equal-Rabi closed forms agree", gap < 1e-14, format!("rel {gap:.1e}"));

    let n_max = FockCutoff::new(6)?;
    let row = run_point(&p, &[Estimator::NumericFull, Estimator::NumericProjected], &PointOptions::new(n_max))?;
    match (row.nbar(Estimator::NumericFull), row.diagnostics) {
        (Some(n), Some(diag)) => {
            report("steady state is a density matrix", diag.is_sane(), format!("{diag:?}"));
            let rel = (n - equal).abs() / equal;
            report("full solve near the closed form", rel < 0.3, format!("n̄ {n:.4e}, rel {rel:.2}"));
            match row.nbar(Estimator::NumericProjected) {
                Some(m) => {
                    let rel = (m - n).abs() / n;
                    report("projected model near the full solve", rel < 0.15, format!("rel {rel:.3}"));
                }
                None => report("projected model near the full solve", false, row.flags()),
            }
        }
        _ => report("steady state is a density matrix", false, row.flags()),
    }

    let mut dark = p;
    dark.eta_g = 0.0;
    dark.eta_r = 0.0;
    let c = FockCutoff::new(4)?;
    let h = physics::hamiltonian_ld(&dark, c, physics::Basis::Gre)?;
    let j = physics::jump_operators(&dark, c, physics::Basis::Gre)?;
    let outcome = liouvillian::steady_state(&liouvillian::build_liouvillian(&h, &j)?);
    report(
        "degenerate steady state is detected",
        matches!(outcome, Err(Error::DegenerateSteadyState { .. })),
        match &outcome {
            Err(e) => e.to_string(),
            Ok(_) => "a steady state was returned".into(),
        },
    );

    let projected = subspace::solve_params(&dark);
    report(
        "projected model rejects η = 0",
        matches!(projected, Err(Error::DegenerateSteadyState { .. })),
        String::new(),
    );

    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Point { common, params } => point(common, params),
        Command::Sweep {
            common,
            params,
            vary,
            grid,
            lock,
        } => sweep_cmd(common, params, vary.as_deref(), grid.as_deref(), lock.as_deref()),
        Command::Fig3 { common, panel } => fig3(common, panel),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
