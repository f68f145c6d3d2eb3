//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use eitcool::analytic;
use eitcool::hilbert::FockCutoff;
use eitcool::liouvillian::{self, Diagnostics, SteadyState};
use eitcool::physics::{self, Basis, CoolingParams};
use eitcool::subspace;
use eitcool::sweep::{builtin_figure3, run_sweep, Estimator, Panel, SweepRow};
use eitcool::{Error, Result};

type Outcome = std::result::Result<String, String>;

/// Every steady state solved by the suite, for the sanity criterion.
#[derive(Default)]
struct Ledger {
    solved: Vec<(String, Diagnostics)>,
}

impl Ledger {
    fn record(&mut self, label: impl Into<String>, d: Diagnostics) {
        self.solved.push((label.into(), d));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn solve(p: &CoolingParams, n_max: usize, basis: Basis) -> Result<SteadyState> {
    let c = FockCutoff::new(n_max)?;
    let h = physics::hamiltonian_ld(p, c, basis)?;
    let jumps = physics::jump_operators(p, c, basis)?;
    liouvillian::steady_state(&liouvillian::build_liouvillian(&h, &jumps)?)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn formula_consistency() -> Outcome {
    let mut worst_equal = 0.0f64;
    for (omega, gg, gr, eta_g, eta_r) in [
        (15.0, 20.0 / 3.0, 40.0 / 3.0, 0.15, 0.15),
        (5.0, 1.0, 3.0, 0.1, 0.05),
        (30.0, 10.0, 2.0, 0.2, 0.12),
    ] {
        let mut p = CoolingParams::reference(omega, omega).map_err(|e| e.to_string())?;
        (p.gamma_g, p.gamma_r, p.eta_g, p.eta_r) = (gg, gr, eta_g, eta_r);
        let d = physics::derive_eit(&p).map_err(|e| e.to_string())?;
        let second = analytic::nbar_second(&d, p.gamma(), p.delta).map_err(|e| e.to_string())?;
        let equal = analytic::nbar_equal(p.gamma(), p.delta, d.eta).map_err(|e| e.to_string())?;
        worst_equal = worst_equal.max(rel(second.total(), equal));
    }
    let mut worst_weak = 0.0f64;
    for (og, or) in [(1.0, 20.0), (0.5, 20.0), (2.0, 40.0), (1.0, 30.0)] {
        let p = CoolingParams::reference(og, or).map_err(|e| e.to_string())?;
        let d = physics::derive_eit(&p).map_err(|e| e.to_string())?;
        let second = analytic::nbar_second(&d, p.gamma(), p.delta).map_err(|e| e.to_string())?;
        let weak = analytic::nbar_weak_g(&p, &d).map_err(|e| e.to_string())?;
        worst_weak = worst_weak.max(rel(second.total(), weak));
    }
    check(
        worst_equal <= 1e-14 && worst_weak <= 0.01,
        format!("equal-Rabi rel {worst_equal:.2e} (≤ 1e-14), weak-Ω_g rel {worst_weak:.2e} (≤ 1e-2)"),
    )
}

fn reconstruction() -> Outcome {
    let mut worst = 0.0f64;
    for (og, or, scale) in [(4.0, 20.0, 1.0), (15.0, 15.0, 1.0), (7.0, 11.0, 0.3), (2.0, 30.0, 2.0)] {
        let mut p = CoolingParams::reference(og, or).map_err(|e| e.to_string())?;
        p.gamma_g *= scale;
        p.gamma_r *= scale;
        let d = physics::derive_eit(&p).map_err(|e| e.to_string())?;
        let n = analytic::subspace_diagonals(&d, p.nu)
            .map_err(|e| e.to_string())?
            .phonon_number();
        let second = analytic::nbar_second(&d, p.gamma(), p.delta).map_err(|e| e.to_string())?;
        worst = worst.max(rel(n, second.total()));
    }
    check(worst <= 1e-10, format!("worst rel {worst:.2e} (≤ 1e-10)"))
}

fn subspace_closed_forms() -> Outcome {
    let mut p = CoolingParams::reference(15.0, 15.0).map_err(|e| e.to_string())?;
    p.gamma_g *= 0.1;
    p.gamma_r *= 0.1;
    let p = p.with_resonant_delta().map_err(|e| e.to_string())?;
    let d = physics::derive_eit(&p).map_err(|e| e.to_string())?;
    let state = subspace::solve_params(&p).map_err(|e| e.to_string())?;
    let got = subspace::relative_diagonals(&state);
    let want = analytic::subspace_diagonals(&d, p.nu).map_err(|e| e.to_string())?;
    let pairs = [
        ("b0", got.rho_b0b0, want.rho_b0b0),
        ("e0", got.rho_e0e0, want.rho_e0e0),
        ("d1", got.rho_d1d1, want.rho_d1d1),
        ("b1", got.rho_b1b1, want.rho_b1b1),
        ("e1", got.rho_e1e1, want.rho_e1e1),
        ("d2", got.rho_d2d2, want.rho_d2d2),
    ];
    let worst = pairs.iter().map(|(_, g, w)| (g - w).abs()).fold(0.0, f64::max);
    let per_entry: Vec<String> = pairs
        .iter()
        .filter(|(_, _, w)| *w != 0.0)
        .map(|(k, g, w)| format!("{k} {:.1e}", rel(*g, *w)))
        .collect();
    check(
        worst <= 1e-3,
        format!(
            "max |ρ_jj/ρ_d0d0 − closed form| = {worst:.2e} (≤ 1e-3); per-entry rel: {}",
            per_entry.join(", ")
        ),
    )
}

fn numeric(row: &SweepRow) -> std::result::Result<f64, String> {
    row.nbar(Estimator::NumericFull)
        .ok_or_else(|| format!("no numeric value at {} = {}: {}", row.vary, row.value, row.flags()))
}

fn figure3(panels: &[(Panel, Vec<SweepRow>)]) -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for (panel, rows) in panels {
        for row in rows {
            let n = numeric(row)?;
            let eq1 = row.nbar(Estimator::Eq1).ok_or("missing eq1")?;
            let eq15 = row.nbar(Estimator::Eq15).ok_or("missing eq15")?;
            let recoil = row.eq15_terms.ok_or("missing eq15 terms")?.recoil;
            if recoil > 0.2 * eq1 {
                checked += 1;
                if (eq15 - n).abs() > (eq1 - n).abs() {
                    violations.push(format!("{panel}:{}={}", row.vary, row.value));
                }
            }
            if *panel == Panel::F {
                min_ratio = min_ratio.min(n / eq1);
            }
        }
    }
    check(
        violations.is_empty() && min_ratio > 3.0,
        format!(
            "eq15 closer at {}/{checked} points{}; panel f min numeric/eq1 = {min_ratio:.2} (> 3)",
            checked - violations.len(),
            if violations.is_empty() {
                String::new()
            } else {
                format!(" (violations: {})", violations.join(" "))
            }
        ),
    )
}

fn divergence(rows: &[SweepRow]) -> Outcome {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| numeric(r).map(|n| (r.value, n)))
        .collect::<std::result::Result<_, _>>()?;
    let below: Vec<&(f64, f64)> = pts.iter().filter(|(g, _)| *g <= 2.0).collect();
    let increasing = below.windows(2).all(|w| w[0].1 > w[1].1);
    let at = |g: f64| pts.iter().find(|(v, _)| *v == g).map(|p| p.1);
    let (lo, hi) = (at(0.5).ok_or("γ_g = 0.5 missing")?, at(10.0).ok_or("γ_g = 10 missing")?);
    check(
        increasing && lo > 2.0 * hi,
        format!(
            "monotone below γ_g = 2: {increasing}; n̄(0.5)/n̄(10) = {:.2} (> 2)",
            lo / hi
        ),
    )
}

fn sanity(ledger: &Ledger) -> Outcome {
    let bad: Vec<&str> = ledger
        .solved
        .iter()
        .filter(|(_, d)| !d.is_sane())
        .map(|(l, _)| l.as_str())
        .collect();
    let worst = |f: fn(&Diagnostics) -> f64| ledger.solved.iter().map(|(_, d)| f(d)).fold(0.0, f64::max);
    let min_eig = ledger
        .solved
        .iter()
        .map(|(_, d)| d.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    check(
        bad.is_empty() && !ledger.solved.is_empty(),
        format!(
            "{} solves; worst trace {:.1e}, herm {:.1e}, residual {:.1e}, min eigenvalue {:.1e}{}",
            ledger.solved.len(),
            worst(|d| d.trace_defect),
            worst(|d| d.herm_defect),
            worst(|d| d.residual),
            min_eig,
            if bad.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", bad.join(" "))
            }
        ),
    )
}

fn truncation(ledger: &mut Ledger) -> Outcome {
    let mut worst = 0.0f64;
    for (og, or) in [Panel::A.base_rabi(), Panel::B.base_rabi()] {
        let p = CoolingParams::reference(og, or).map_err(|e| e.to_string())?;
        let mut n = Vec::new();
        for n_max in [10, 14] {
            let ss = solve(&p, n_max, Basis::Gre).map_err(|e| e.to_string())?;
            ledger.record(format!("truncation({og},{or},{n_max})"), ss.diagnostics());
            n.push(liouvillian::phonon_occupation(&ss));
        }
        worst = worst.max(rel(n[1], n[0]));
    }
    check(worst < 0.01, format!("worst rel change n_max 10 → 14: {worst:.2e} (< 1e-2)"))
}

fn basis_invariance(ledger: &mut Ledger) -> Outcome {
    let mut worst = 0.0f64;
    for (og, or) in [(4.0, 20.0), (15.0, 15.0), (7.0, 3.0)] {
        let p = CoolingParams::reference(og, or).map_err(|e| e.to_string())?;
        let gre = solve(&p, 8, Basis::Gre).map_err(|e| e.to_string())?;
        let dbe = solve(&p, 8, Basis::DbeExact).map_err(|e| e.to_string())?;
        ledger.record(format!("gre({og},{or})"), gre.diagnostics());
        ledger.record(format!("dbe({og},{or})"), dbe.diagnostics());
        worst = worst.max(
            (liouvillian::phonon_occupation(&gre) - liouvillian::phonon_occupation(&dbe)).abs(),
        );
    }
    check(worst < 1e-8, format!("worst |Δn̄| = {worst:.2e} (< 1e-8)"))
}

fn degeneracy() -> Outcome {
    let base = CoolingParams::reference(15.0, 15.0).map_err(|e| e.to_string())?;
    let mut cases = Vec::new();
    let mut no_recoil = base;
    no_recoil.eta_g = 0.0;
    no_recoil.eta_r = 0.0;
    cases.push(("η_g = η_r = 0", no_recoil));
    let mut parallel = base;
    parallel.phi_r = parallel.phi_g;
    cases.push(("φ_r = φ_g", parallel));
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, p) in cases {
        for n_max in [4, 8] {
            match solve(&p, n_max, Basis::Gre) {
                Err(Error::DegenerateSteadyState { dim }) => {
                    lines.push(format!("{label} n_max={n_max}: dim {dim}"))
                }
                other => {
                    ok = false;
                    lines.push(format!("{label} n_max={n_max}: {:?}", other.map(|s| s.nullspace_dim)));
                }
            }
        }
    }
    check(ok, lines.join("; "))
}

fn relaxation(ledger: &mut Ledger) -> Outcome {
    let p = CoolingParams::reference(15.0, 15.0).map_err(|e| e.to_string())?;
    let d = physics::derive_eit(&p).map_err(|e| e.to_string())?;
    let c = FockCutoff::new(6).map_err(|e| e.to_string())?;
    let h = physics::hamiltonian_ld(&p, c, Basis::Gre).map_err(|e| e.to_string())?;
    let jumps = physics::jump_operators(&p, c, Basis::Gre).map_err(|e| e.to_string())?;
    let l = liouvillian::build_liouvillian(&h, &jumps).map_err(|e| e.to_string())?;
    let ss = liouvillian::steady_state(&l).map_err(|e| e.to_string())?;
    ledger.record("relaxation", ss.diagnostics());

    let dark = eitcool::hilbert::BasisIndex::new(eitcool::hilbert::InternalLevel::D, 0);
    let u = physics::dark_bright_unitary(d.theta, c);
    let rho0 = &u * dark.projector(c) * u.adjoint();
    let t_final = 150.0 * p.gamma() / (d.eta * d.omega_d).powi(2);
    let rho = liouvillian::time_evolve(&l, &rho0, t_final, 0.9 / l.norm_one()).map_err(|e| e.to_string())?;
    let gap = (&rho - &ss.rho).norm_l2();
    check(gap < 1e-6, format!("‖ρ(t) − ρ_ss‖_F = {gap:.2e} at t = {t_final:.1}/ν (< 1e-6)"))
}

fn main() -> ExitCode {
    let n_max = FockCutoff::new(12).expect("valid cutoff");
    let mut ledger = Ledger::default();
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let line = (id, name, r, t.elapsed().as_secs_f64());
        print_line(&line);
        results.push(line);
    };

    timed(1, "formula consistency", &mut formula_consistency);
    timed(2, "closed-form reconstruction", &mut reconstruction);
    timed(3, "projected model vs closed forms", &mut subspace_closed_forms);

    let t = Instant::now();
    let mut panels = Vec::new();
    let mut sweep_error = None;
    for panel in Panel::ALL {
        match builtin_figure3(panel, n_max).and_then(|s| run_sweep(&s)) {
            Ok(rows) => {
                for r in &rows {
                    if let Some(d) = r.diagnostics {
                        ledger.record(format!("{panel}:{}={}", r.vary, r.value), d);
                    }
                }
                panels.push((panel, rows));
            }
            Err(e) => sweep_error = Some(format!("panel {panel}: {e}")),
        }
    }
    let sweep_secs = t.elapsed().as_secs_f64();
    let line = (
        4,
        "full numeric vs second order",
        match &sweep_error {
            Some(e) => Err(e.clone()),
            None => figure3(&panels),
        },
        sweep_secs,
    );
    print_line(&line);
    results.push(line);

    let panel_e = panels.iter().find(|(p, _)| *p == Panel::E).map(|(_, r)| r.clone());
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let line = (id, name, r, t.elapsed().as_secs_f64());
        print_line(&line);
        results.push(line);
    };
    timed(5, "divergence at weak γ_g", &mut || match &panel_e {
        Some(rows) => divergence(rows),
        None => Err("panel e sweep failed".into()),
    });
    timed(7, "truncation convergence", &mut || truncation(&mut ledger));
    timed(8, "basis invariance", &mut || basis_invariance(&mut ledger));
    timed(9, "degeneracy detection", &mut degeneracy);
    timed(10, "relaxation reaches the steady state", &mut || relaxation(&mut ledger));
    timed(6, "steady-state sanity", &mut || sanity(&ledger));

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn print_line((id, name, r, secs): &(u32, &str, Outcome, f64)) {
    let (tag, detail) = match r {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("[{tag}] criterion {id:>2} {name}: {detail} [{secs:.1}s]");
}
