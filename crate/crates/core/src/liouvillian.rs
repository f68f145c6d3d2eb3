//! Lindblad generator, its steady state, and a fixed-step propagator.
//!
//! Density matrices are vectorized by stacking columns: `vec(ρ)[i + j·D] = ρ[i, j]`,
//! so that `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat, MatRef, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{ComplexMatrix, INTERNAL_DIM};
use crate::linalg::{self, I, ONE, ZERO};
use crate::physics::Jump;

pub fn vectorize(rho: &ComplexMatrix) -> Result<Col<c64>> {
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::Dimension(format!(
            "cannot vectorize a non-square {}×{} matrix",
            n,
            rho.ncols()
        )));
    }
    Ok(Col::from_fn(n * n, |k| rho[(k % n, k / n)]))
}

pub fn devectorize(v: &Col<c64>) -> Result<ComplexMatrix> {
    let n = (v.nrows() as f64).sqrt().round() as usize;
    if n * n != v.nrows() {
        return Err(Error::Dimension(format!(
            "vector of length {} is not a vectorized square matrix",
            v.nrows()
        )));
    }
    Ok(Mat::from_fn(n, n, |i, j| v[i + j * n]))
}

/// `target += k · (a ⊗ b)`, visiting only nonzero entries.
fn add_kron(target: &mut ComplexMatrix, k: c64, a: MatRef<'_, c64>, b: MatRef<'_, c64>) {
    let (br, bc) = (b.nrows(), b.ncols());
    let nz = |m: MatRef<'_, c64>| {
        let mut out = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != ZERO {
                    out.push((i, j, m[(i, j)]));
                }
            }
        }
        out
    };
    let bnz = nz(b);
    for (ai, aj, av) in nz(a) {
        let s = k * av;
        for &(bi, bj, bv) in &bnz {
            target[(ai * br + bi, aj * bc + bj)] += s * bv;
        }
    }
}

/// Matrix of the Lindblad generator together with the operators that built it.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space_dim: usize,
    matrix: ComplexMatrix,
    /// `H − (i/2) Σ γ L†L`
    effective_hamiltonian: ComplexMatrix,
    /// `(γ, L, L†)`
    jumps: Vec<(f64, ComplexMatrix, ComplexMatrix)>,
}

impl Superoperator {
    /// Dimension `D` of the underlying Hilbert space.
    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// Dimension `D²` of the vectorized space.
    pub fn dim(&self) -> usize {
        self.space_dim * self.space_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `L(ρ)` evaluated directly on the density matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.effective_hamiltonian;
        let mut out = linalg::scaled((h * rho - rho * h.adjoint()).as_ref(), -I);
        for (rate, l, ld) in &self.jumps {
            let term = l * rho * ld;
            out += linalg::scaled(term.as_ref(), c64::new(*rate, 0.0));
        }
        out
    }

    pub fn norm_one(&self) -> f64 {
        linalg::norm_one(self.matrix.as_ref())
    }
}

/// `L(ρ) = −i[H, ρ] + Σ_j γ_j/2 (2 L_j ρ L_j† − {L_j†L_j, ρ})`.
pub fn build_liouvillian(h: &ComplexMatrix, jumps: &[Jump]) -> Result<Superoperator> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Dimension("Hamiltonian must be square".into()));
    }
    let herm = linalg::hermiticity_defect(h.as_ref());
    if herm > 1e-10 * (1.0 + h.norm_max()) {
        return Err(Error::config(format!(
            "Hamiltonian is not Hermitian (defect {herm:.3e})"
        )));
    }
    for j in jumps {
        if !(j.rate >= 0.0) || !j.rate.is_finite() {
            return Err(Error::config(format!("jump rate must be non-negative, got {}", j.rate)));
        }
        if j.operator.nrows() != n || j.operator.ncols() != n {
            return Err(Error::Dimension(format!(
                "jump operator is {}×{}, Hamiltonian is {n}×{n}",
                j.operator.nrows(),
                j.operator.ncols()
            )));
        }
    }

    let id = linalg::identity(n);
    let mut matrix = Mat::<c64>::zeros(n * n, n * n);
    add_kron(&mut matrix, -I, id.as_ref(), h.as_ref());
    add_kron(&mut matrix, I, h.transpose(), id.as_ref());

    let mut effective_hamiltonian = h.clone();
    let mut stored = Vec::with_capacity(jumps.len());
    for j in jumps {
        if j.rate == 0.0 {
            continue;
        }
        let l = &j.operator;
        let ld = linalg::adjoint(l.as_ref());
        let ldl = &ld * l;
        let g = c64::new(j.rate, 0.0);
        add_kron(&mut matrix, g, linalg::conjugate(l.as_ref()).as_ref(), l.as_ref());
        add_kron(&mut matrix, -g * 0.5, id.as_ref(), ldl.as_ref());
        add_kron(&mut matrix, -g * 0.5, ldl.transpose(), id.as_ref());
        effective_hamiltonian -= linalg::scaled(ldl.as_ref(), c64::new(0.0, j.rate / 2.0));
        stored.push((j.rate, l.clone(), ld));
    }

    Ok(Superoperator {
        space_dim: n,
        matrix,
        effective_hamiltonian,
        jumps: stored,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Singular values below `degeneracy_tol · ‖L‖₂` count towards the nullspace.
    pub degeneracy_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { degeneracy_tol: 1e-10 }
    }
}

/// Stationary density matrix with the diagnostics of the solve.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: ComplexMatrix,
    /// `|tr ρ − 1|`
    pub trace_defect: f64,
    /// `max |ρ − ρ†|`
    pub herm_defect: f64,
    /// Smallest eigenvalue of the Hermitian part of ρ.
    pub min_eigenvalue: f64,
    pub nullspace_dim: usize,
    /// `‖L(ρ)‖_F`
    pub residual: f64,
}

/// Diagnostics only, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub trace_defect: f64,
    pub herm_defect: f64,
    pub min_eigenvalue: f64,
    pub nullspace_dim: usize,
    pub residual: f64,
}

impl SteadyState {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            trace_defect: self.trace_defect,
            herm_defect: self.herm_defect,
            min_eigenvalue: self.min_eigenvalue,
            nullspace_dim: self.nullspace_dim,
            residual: self.residual,
        }
    }

    /// Whether every diagnostic is within the acceptance bounds.
    pub fn is_sane(&self) -> bool {
        self.diagnostics().is_sane()
    }
}

impl Diagnostics {
    /// Trace and Hermiticity within 1e-10, eigenvalues above −1e-8, residual below 1e-9.
    pub fn is_sane(&self) -> bool {
        self.trace_defect < 1e-10
            && self.herm_defect < 1e-10
            && self.min_eigenvalue > -1e-8
            && self.residual < 1e-9
    }
}

pub fn steady_state(l: &Superoperator) -> Result<SteadyState> {
    steady_state_with(l, &SolverConfig::default())
}

/// Solves `L v = 0` with `tr ρ = 1` replacing the first equation.
///
/// The nullspace is sized first from the singular values of `L`; a nullspace of
/// dimension above one is reported as [`Error::DegenerateSteadyState`] rather than
/// returning an arbitrary stationary state.
pub fn steady_state_with(l: &Superoperator, cfg: &SolverConfig) -> Result<SteadyState> {
    let n = l.space_dim;
    let nn = n * n;
    let sv = l
        .matrix
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD of the Liouvillian failed: {e:?}")))?;
    let norm = sv.first().copied().unwrap_or(0.0);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Numerical("Liouvillian is zero or not finite".into()));
    }
    let nullspace_dim = sv.iter().filter(|&&s| s <= cfg.degeneracy_tol * norm).count();
    match nullspace_dim {
        0 => {
            return Err(Error::Numerical(
                "Liouvillian has no numerically zero singular value".into(),
            ))
        }
        1 => {}
        dim => return Err(Error::DegenerateSteadyState { dim }),
    }

    let mut a = l.matrix.clone();
    for k in 0..nn {
        a[(0, k)] = ZERO;
    }
    for i in 0..n {
        a[(0, i + i * n)] = ONE;
    }
    let mut rhs = Col::<c64>::zeros(nn);
    rhs[0] = ONE;
    let x = a.partial_piv_lu().solve(&rhs);
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("steady-state linear system is singular".into()));
    }

    let rho = devectorize(&x)?;
    let trace_defect = (linalg::trace(rho.as_ref()) - ONE).norm();
    let herm_defect = linalg::hermiticity_defect(rho.as_ref());
    let min_eigenvalue = linalg::hermitian_part(rho.as_ref())
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalues of ρ failed: {e:?}")))?
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    let residual = (&l.matrix * &x).norm_l2();

    Ok(SteadyState {
        rho,
        trace_defect,
        herm_defect,
        min_eigenvalue,
        nullspace_dim,
        residual,
    })
}

/// `tr(ρ (1 ⊗ â†â))` for a composite density matrix.
///
/// # Panics
/// If the dimension of `rho` is not a multiple of 3.
pub fn occupation(rho: &ComplexMatrix) -> f64 {
    let d = rho.nrows();
    assert!(d.is_multiple_of(INTERNAL_DIM), "ρ is not a composite-space density matrix");
    let n: c64 = (0..d)
        .map(|i| rho[(i, i)] * ((i / INTERNAL_DIM) as f64))
        .sum();
    assert!(n.im.abs() < 1e-10, "imaginary occupation {}", n.im);
    n.re
}

pub fn phonon_occupation(ss: &SteadyState) -> f64 {
    occupation(&ss.rho)
}

/// Classical fourth-order Runge-Kutta propagation of `ρ̇ = L(ρ)`.
///
/// Steps are shortened uniformly so that an integer number of them lands on
/// `t_final`. Rejects `dt·‖L‖₁ ≥ 1`.
pub fn time_evolve(
    l: &Superoperator,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    let n = l.space_dim;
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::Dimension(format!(
            "initial state is {}×{}, generator acts on {n}×{n}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::config("time step must be positive and final time non-negative"));
    }
    let stiffness = dt * l.norm_one();
    if stiffness >= 1.0 {
        return Err(Error::Stability(stiffness));
    }

    let steps = (t_final / dt).ceil() as usize;
    if steps == 0 {
        return Ok(rho0.clone());
    }
    let h = t_final / steps as f64;
    let axpy = |x: &ComplexMatrix, k: f64, y: &ComplexMatrix| x + linalg::scaled(y.as_ref(), c64::new(k, 0.0));

    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = l.apply(&rho);
        let k2 = l.apply(&axpy(&rho, h / 2.0, &k1));
        let k3 = l.apply(&axpy(&rho, h / 2.0, &k2));
        let k4 = l.apply(&axpy(&rho, h, &k3));
        let incr = &k1 + linalg::scaled((&k2 + &k3).as_ref(), c64::new(2.0, 0.0)) + &k4;
        rho = axpy(&rho, h / 6.0, &incr);
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{self, BasisIndex, FockCutoff, InternalLevel};
    use crate::linalg::max_abs_diff;
    use crate::physics::{self, Basis, CoolingParams};
    use proptest::prelude::*;

    fn matrix_from(n: usize, v: &[(f64, f64)]) -> ComplexMatrix {
        Mat::from_fn(n, n, |i, j| c64::new(v[i * n + j].0, v[i * n + j].1))
    }

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        Mat::from_fn(n, n, |_, _| {
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            c64::new(next(), next())
        })
    }

    fn two_level_decay(gamma: f64) -> Superoperator {
        // basis (g, e)
        let h = Mat::<c64>::zeros(2, 2);
        let l = Mat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { ONE } else { ZERO });
        build_liouvillian(&h, &[Jump { rate: gamma, operator: l }]).unwrap()
    }

    fn model(p: &CoolingParams, n_max: usize, basis: Basis) -> Superoperator {
        let c = FockCutoff::new(n_max).unwrap();
        let h = physics::hamiltonian_ld(p, c, basis).unwrap();
        let j = physics::jump_operators(p, c, basis).unwrap();
        build_liouvillian(&h, &j).unwrap()
    }

    #[test]
    fn vectorize_identity() {
        let v = vectorize(&linalg::identity(2)).unwrap();
        let want = [ONE, ZERO, ZERO, ONE];
        for k in 0..4 {
            assert_eq!(v[k], want[k]);
        }
        assert!(vectorize(&Mat::zeros(2, 3)).is_err());
        assert!(devectorize(&Col::zeros(5)).is_err());
    }

    #[test]
    fn vectorize_sandwich_identity() {
        for seed in 0..4 {
            let a = random_matrix(3, seed);
            let x = random_matrix(3, seed + 100);
            let b = random_matrix(3, seed + 200);
            let lhs = vectorize(&(&a * &x * &b)).unwrap();
            let rhs = linalg::kron(b.transpose(), a.as_ref()) * vectorize(&x).unwrap();
            assert!((&lhs - &rhs).norm_max() < 1e-14);
        }
    }

    #[test]
    fn two_level_decay_populations() {
        let gamma = 1.7;
        let l = two_level_decay(gamma);
        let rho = Mat::from_fn(2, 2, |i, j| if (i, j) == (1, 1) { ONE } else { ZERO });
        let drho = l.apply(&rho);
        assert!((drho[(1, 1)].re + gamma).abs() < 1e-15);
        assert!((drho[(0, 0)].re - gamma).abs() < 1e-15);

        let via_matrix = devectorize(&(l.matrix() * vectorize(&rho).unwrap())).unwrap();
        assert!(max_abs_diff(via_matrix.as_ref(), drho.as_ref()) < 1e-15);
    }

    #[test]
    fn every_column_maps_to_a_traceless_matrix() {
        let p = CoolingParams::reference(15.0, 15.0).unwrap();
        let l = model(&p, 3, Basis::Gre);
        let n = l.space_dim();
        for k in 0..l.dim() {
            let col = Col::from_fn(l.dim(), |r| l.matrix()[(r, k)]);
            let img = devectorize(&col).unwrap();
            assert!(linalg::trace(img.as_ref()).norm() < 1e-12, "column {k}");
        }
        assert_eq!(n * n, l.dim());
    }

    #[test]
    fn spectrum_is_in_the_closed_left_half_plane() {
        let p = CoolingParams::reference(15.0, 15.0).unwrap();
        let l = model(&p, 6, Basis::Gre);
        let ev = l.matrix().eigenvalues().unwrap();
        let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10, "max real part {max_re}");
    }

    #[test]
    fn rejects_negative_rate_and_non_hermitian_hamiltonian() {
        let h = Mat::<c64>::zeros(2, 2);
        let op = linalg::identity(2);
        assert!(matches!(
            build_liouvillian(&h, &[Jump { rate: -1.0, operator: op.clone() }]),
            Err(Error::Config(_))
        ));
        let bad = Mat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { ONE } else { ZERO });
        assert!(build_liouvillian(&bad, &[]).is_err());
        assert!(matches!(
            build_liouvillian(&h, &[Jump { rate: 1.0, operator: linalg::identity(3) }]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn pure_decay_relaxes_to_ground() {
        let ss = steady_state(&two_level_decay(2.0)).unwrap();
        let want = Mat::from_fn(2, 2, |i, j| if (i, j) == (0, 0) { ONE } else { ZERO });
        assert!(max_abs_diff(ss.rho.as_ref(), want.as_ref()) < 1e-14);
        assert_eq!(ss.nullspace_dim, 1);
        assert!(ss.is_sane());
    }

    #[test]
    fn vanishing_recoil_is_degenerate() {
        let mut p = CoolingParams::reference(4.0, 20.0).unwrap();
        p.eta_g = 0.0;
        p.eta_r = 0.0;
        match steady_state(&model(&p, 4, Basis::Gre)) {
            Err(Error::DegenerateSteadyState { dim }) => assert_eq!(dim, 5),
            other => panic!("expected degeneracy, got {other:?}"),
        }
        // η = 0 through the geometry with nonzero η_g = η_r
        let mut p = CoolingParams::reference(4.0, 20.0).unwrap();
        p.phi_r = p.phi_g;
        assert!(matches!(
            steady_state(&model(&p, 4, Basis::Gre)),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn occupation_of_simple_states() {
        let c = FockCutoff::new(4).unwrap();
        let d0 = BasisIndex::new(InternalLevel::D, 0).projector(c);
        let d2 = BasisIndex::new(InternalLevel::D, 2).projector(c);
        assert_eq!(occupation(&d0), 0.0);
        assert_eq!(occupation(&d2), 2.0);
    }

    #[test]
    fn thermal_occupation() {
        // p_n ∝ 2^{-n} sums to n̄ = 1/(e^β − 1) = 1 without truncation
        let c = FockCutoff::new(20).unwrap();
        let weights: Vec<f64> = (0..=20).map(|n| 0.5f64.powi(n)).collect();
        let z: f64 = weights.iter().sum();
        let thermal = Mat::from_fn(21, 21, |i, j| {
            if i == j {
                c64::new(weights[i] / z, 0.0)
            } else {
                ZERO
            }
        });
        let rho = hilbert::embed(
            &hilbert::transition(InternalLevel::D, InternalLevel::D),
            &thermal,
        )
        .unwrap();
        assert_eq!(rho.nrows(), c.dim());
        assert!((occupation(&rho) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn evolution_without_generator_is_trivial() {
        let h = Mat::<c64>::zeros(3, 3);
        let l = build_liouvillian(&h, &[]).unwrap();
        let rho0 = linalg::hermitian_part(random_matrix(3, 9).as_ref());
        let out = time_evolve(&l, &rho0, 10.0, 0.1).unwrap();
        assert_eq!(max_abs_diff(out.as_ref(), rho0.as_ref()), 0.0);
    }

    #[test]
    fn evolution_follows_exponential_decay() {
        let gamma = 1.0;
        let l = two_level_decay(gamma);
        let rho0 = Mat::from_fn(2, 2, |i, j| if (i, j) == (1, 1) { ONE } else { ZERO });
        let out = time_evolve(&l, &rho0, 5.0, 0.01).unwrap();
        assert!((out[(1, 1)].re - (-5.0f64).exp()).abs() < 1e-6);
        assert!((linalg::trace(out.as_ref()) - ONE).norm() < 1e-12);
    }

    #[test]
    fn evolution_rejects_unstable_steps() {
        let l = two_level_decay(10.0);
        let rho0 = linalg::identity(2);
        assert!(matches!(time_evolve(&l, &rho0, 1.0, 0.5), Err(Error::Stability(_))));
    }

    #[test]
    fn relabeling_symmetry() {
        for (og, or) in [(4.0, 20.0), (15.0, 15.0)] {
            let p = CoolingParams::reference(og, or).unwrap();
            let a = phonon_occupation(&steady_state(&model(&p, 6, Basis::Gre)).unwrap());
            let b = phonon_occupation(&steady_state(&model(&p.relabeled(), 6, Basis::Gre)).unwrap());
            assert!((a - b).abs() < 1e-10 * a, "{a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn generator_preserves_trace_and_hermiticity(
            v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 81),
            og in 1.0f64..20.0, or in 1.0f64..20.0,
        ) {
            let p = CoolingParams::reference(og, or).unwrap();
            let c = FockCutoff::new(2).unwrap();
            let h = physics::hamiltonian_full(&p, c).unwrap();
            let j = physics::jump_operators(&p, c, Basis::Gre).unwrap();
            let l = build_liouvillian(&h, &j).unwrap();
            let rho = linalg::hermitian_part(matrix_from(9, &v).as_ref());
            let out = l.apply(&rho);
            prop_assert!(linalg::trace(out.as_ref()).norm() < 1e-10 * (1.0 + l.norm_one()));
            prop_assert!(linalg::hermiticity_defect(out.as_ref()) < 1e-10 * (1.0 + l.norm_one()));
            let via_matrix = devectorize(&(l.matrix() * vectorize(&rho).unwrap())).unwrap();
            prop_assert!(max_abs_diff(via_matrix.as_ref(), out.as_ref()) < 1e-11 * (1.0 + l.norm_one()));
        }

        #[test]
        fn vectorize_round_trip(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16)) {
            let m = matrix_from(4, &v);
            let back = devectorize(&vectorize(&m).unwrap()).unwrap();
            prop_assert_eq!(max_abs_diff(back.as_ref(), m.as_ref()), 0.0);
        }
    }
}
