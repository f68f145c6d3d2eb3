//! The projected seven-state model around `|d,0⟩`.
//!
//! States are kept in the order `|d,0⟩, |b,0⟩, |e,0⟩, |d,1⟩, |b,1⟩, |e,1⟩, |d,2⟩`,
//! which coincides with the first seven flat indices of the composite space. The
//! Hamiltonian is the dark/bright Hamiltonian restricted to those rows and columns;
//! the dissipator keeps the four `|e,n⟩ → |d,n⟩, |b,n⟩` channels.
//!
//! Stationarity is imposed on the 49 real expectation values
//!
//! ```text
//! ρ_jj,   σˣ_jk = tr((|j⟩⟨k| + |k⟩⟨j|) ρ),   σʸ_jk = tr((i|j⟩⟨k| − i|k⟩⟨j|) ρ),   j < k
//! ```
//!
//! so that `ρ_jk = (σˣ_jk + i σʸ_jk) / 2`.

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat};

use crate::error::{Error, Result};
use crate::hilbert::{BasisIndex, ComplexMatrix, FockCutoff, InternalLevel};
use crate::linalg::{self, I, ONE};
use crate::liouvillian::{self, Superoperator};
use crate::physics::{self, DerivedEit, Jump};

pub const SUBSPACE_DIM: usize = 7;
pub const OBSERVABLE_COUNT: usize = SUBSPACE_DIM * SUBSPACE_DIM;

/// The seven states in their fixed order.
pub const STATES: [BasisIndex; SUBSPACE_DIM] = [
    BasisIndex::new(InternalLevel::D, 0),
    BasisIndex::new(InternalLevel::B, 0),
    BasisIndex::new(InternalLevel::E, 0),
    BasisIndex::new(InternalLevel::D, 1),
    BasisIndex::new(InternalLevel::B, 1),
    BasisIndex::new(InternalLevel::E, 1),
    BasisIndex::new(InternalLevel::D, 2),
];

const RANK_TOL: f64 = 1e-10;

/// Position of a state in [`STATES`].
pub fn slot(state: BasisIndex) -> Option<usize> {
    STATES.iter().position(|&s| s == state)
}

/// One of the 49 real observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Population(usize),
    SigmaX(usize, usize),
    SigmaY(usize, usize),
}

impl Observable {
    /// Enumeration order: the seven populations, then `σˣ`, `σʸ` for each pair `j < k`.
    pub fn all() -> Vec<Observable> {
        let mut out: Vec<_> = (0..SUBSPACE_DIM).map(Observable::Population).collect();
        for j in 0..SUBSPACE_DIM {
            for k in j + 1..SUBSPACE_DIM {
                out.push(Observable::SigmaX(j, k));
                out.push(Observable::SigmaY(j, k));
            }
        }
        out
    }

    pub fn operator(self) -> ComplexMatrix {
        let mut m = Mat::<c64>::zeros(SUBSPACE_DIM, SUBSPACE_DIM);
        match self {
            Observable::Population(j) => m[(j, j)] = ONE,
            Observable::SigmaX(j, k) => {
                m[(j, k)] = ONE;
                m[(k, j)] = ONE;
            }
            Observable::SigmaY(j, k) => {
                m[(j, k)] = I;
                m[(k, j)] = -I;
            }
        }
        m
    }

    /// The matrix `B` with `tr(O B) = 1` that reconstructs `ρ = Σ ⟨O⟩ B`.
    fn dual(self) -> ComplexMatrix {
        let o = self.operator();
        match self {
            Observable::Population(_) => o,
            _ => linalg::scaled(o.as_ref(), c64::new(0.5, 0.0)),
        }
    }

    fn expectation(self, rho: &ComplexMatrix) -> f64 {
        linalg::trace((&self.operator() * rho).as_ref()).re
    }
}

#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    pub basis: [BasisIndex; SUBSPACE_DIM],
    pub hs: ComplexMatrix,
    pub jumps: Vec<Jump>,
    /// `M[m, m'] = tr(O_m 𝓛(B_m'))` over [`Observable::all`].
    pub stationarity: Mat<f64>,
}

fn restrict(op: &ComplexMatrix) -> ComplexMatrix {
    Mat::from_fn(SUBSPACE_DIM, SUBSPACE_DIM, |i, j| {
        op[(STATES[i].flat(), STATES[j].flat())]
    })
}

fn channel(rate: f64, to: BasisIndex, from: BasisIndex) -> Jump {
    let mut operator = Mat::<c64>::zeros(SUBSPACE_DIM, SUBSPACE_DIM);
    operator[(slot(to).unwrap(), slot(from).unwrap())] = ONE;
    Jump { rate, operator }
}

pub fn build_projected(d: &DerivedEit, nu: f64, delta: f64) -> Result<ProjectedSystem> {
    let two = FockCutoff::new(2)?;
    let hs = restrict(&physics::hamiltonian_reduced(d, nu, delta, two));
    let jumps = (0..2)
        .flat_map(|n| {
            let e = BasisIndex::new(InternalLevel::E, n);
            [
                channel(d.gamma_d, BasisIndex::new(InternalLevel::D, n), e),
                channel(d.gamma_b, BasisIndex::new(InternalLevel::B, n), e),
            ]
        })
        .collect::<Vec<_>>();
    let generator = liouvillian::build_liouvillian(&hs, &jumps)?;
    let stationarity = stationarity_matrix(&generator);
    Ok(ProjectedSystem {
        basis: STATES,
        hs,
        jumps,
        stationarity,
    })
}

fn stationarity_matrix(generator: &Superoperator) -> Mat<f64> {
    let obs = Observable::all();
    let ops: Vec<_> = obs.iter().map(|o| o.operator()).collect();
    let images: Vec<_> = obs.iter().map(|o| generator.apply(&o.dual())).collect();
    Mat::from_fn(OBSERVABLE_COUNT, OBSERVABLE_COUNT, |m, k| {
        linalg::trace((&ops[m] * &images[k]).as_ref()).re
    })
}

/// Stationary state of the projected model.
#[derive(Debug, Clone)]
pub struct ProjectedState {
    pub rho: ComplexMatrix,
    /// Expectations in [`Observable::all`] order.
    pub expectations: Vec<f64>,
    /// Rank of the stationarity matrix before normalization.
    pub rank: usize,
    /// Largest `|M x|` over the equations not replaced by normalization.
    pub residual: f64,
}

impl ProjectedState {
    pub fn population(&self, state: BasisIndex) -> f64 {
        self.rho[(index(state), index(state))].re
    }

    pub fn sigma_x(&self, a: BasisIndex, b: BasisIndex) -> f64 {
        Observable::SigmaX(index(a), index(b)).expectation(&self.rho)
    }

    pub fn sigma_y(&self, a: BasisIndex, b: BasisIndex) -> f64 {
        Observable::SigmaY(index(a), index(b)).expectation(&self.rho)
    }

    pub fn nbar(&self) -> f64 {
        nbar_projected(&self.rho)
    }
}

fn index(state: BasisIndex) -> usize {
    slot(state).unwrap_or_else(|| panic!("{state} is outside the projected subspace"))
}

/// Solves the stationarity equations with `Σ ρ_jj = 1` in place of the `ρ_{d0,d0}` equation.
pub fn solve_stationarity(sys: &ProjectedSystem) -> Result<ProjectedState> {
    let m = &sys.stationarity;
    let sv = m
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD of the stationarity system failed: {e:?}")))?;
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * top).count();
    if rank < OBSERVABLE_COUNT - 1 {
        return Err(Error::DegenerateSteadyState {
            dim: OBSERVABLE_COUNT - rank,
        });
    }

    let mut a = m.clone();
    for k in 0..OBSERVABLE_COUNT {
        a[(0, k)] = if k < SUBSPACE_DIM { 1.0 } else { 0.0 };
    }
    let mut rhs = Col::<f64>::zeros(OBSERVABLE_COUNT);
    rhs[0] = 1.0;
    let x = a.partial_piv_lu().solve(&rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("projected stationarity system is singular".into()));
    }
    let full = m * &x;
    let residual = (1..OBSERVABLE_COUNT).map(|i| full[i].abs()).fold(0.0, f64::max);

    let obs = Observable::all();
    let mut rho = Mat::<c64>::zeros(SUBSPACE_DIM, SUBSPACE_DIM);
    for (o, &v) in obs.iter().zip(x.iter()) {
        rho += linalg::scaled(o.dual().as_ref(), c64::new(v, 0.0));
    }
    Ok(ProjectedState {
        rho,
        expectations: x.iter().copied().collect(),
        rank,
        residual,
    })
}

/// `ρ_{d1,d1} + ρ_{b1,b1} + ρ_{e1,e1} + 2ρ_{d2,d2}`.
pub fn nbar_projected(rho7: &ComplexMatrix) -> f64 {
    assert_eq!(
        (rho7.nrows(), rho7.ncols()),
        (SUBSPACE_DIM, SUBSPACE_DIM),
        "expected a 7×7 density matrix"
    );
    STATES
        .iter()
        .enumerate()
        .map(|(i, s)| s.phonon as f64 * rho7[(i, i)].re)
        .sum()
}

/// Populations relative to `ρ_{d0,d0}`, comparable with the closed forms.
pub fn relative_diagonals(state: &ProjectedState) -> crate::analytic::SubspaceDiagonals {
    let p = |l, n| state.population(BasisIndex::new(l, n));
    let d0 = p(InternalLevel::D, 0);
    crate::analytic::SubspaceDiagonals {
        rho_b0b0: p(InternalLevel::B, 0) / d0,
        rho_e0e0: p(InternalLevel::E, 0) / d0,
        rho_d1d1: p(InternalLevel::D, 1) / d0,
        rho_b1b1: p(InternalLevel::B, 1) / d0,
        rho_e1e1: p(InternalLevel::E, 1) / d0,
        rho_d2d2: p(InternalLevel::D, 2) / d0,
    }
}

/// Reduced quantities for a set of cooling parameters, with Δ taken from the parameters.
pub fn solve_params(params: &physics::CoolingParams) -> Result<ProjectedState> {
    let d = physics::derive_eit(params)?;
    solve_stationarity(&build_projected(&d, params.nu, params.delta)?)
}
