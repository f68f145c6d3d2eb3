//! Physical parameters, the dark/bright transformation, and the model operators.
//!
//! The internal states are `|g⟩`, `|r⟩` (ground) and `|e⟩` (excited). Under the
//! EIT conditions the ground states are rotated into
//!
//! ```text
//! |d⟩ = cos θ |g⟩ − sin θ |r⟩,    |b⟩ = sin θ |g⟩ + cos θ |r⟩,    tan θ = Ω_g / Ω_r
//! ```
//!
//! where `|d⟩` is dark at zeroth order in the Lamb-Dicke parameters.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, ComplexMatrix, FockCutoff, InternalLevel, INTERNAL_DIM};
use crate::linalg::{self, ONE, ZERO};

/// Inputs of the three-level cooling model, frequencies in units of ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingParams {
    pub nu: f64,
    pub omega_g: f64,
    pub omega_r: f64,
    pub gamma_g: f64,
    pub gamma_r: f64,
    pub eta_g: f64,
    pub eta_r: f64,
    pub phi_g: f64,
    pub phi_r: f64,
    pub delta: f64,
}

impl CoolingParams {
    /// Parameters with Δ fixed by the resonance condition `Δ = (Ω_g² + Ω_r²)/4ν`.
    #[allow(clippy::too_many_arguments)]
    pub fn eit_resonant(
        omega_g: f64,
        omega_r: f64,
        gamma_g: f64,
        gamma_r: f64,
        eta_g: f64,
        eta_r: f64,
        phi_g: f64,
        phi_r: f64,
    ) -> Result<Self> {
        let p = Self {
            nu: 1.0,
            omega_g,
            omega_r,
            gamma_g,
            gamma_r,
            eta_g,
            eta_r,
            phi_g,
            phi_r,
            delta: eit_resonance_delta(omega_g, omega_r, 1.0)?,
        };
        p.validate()?;
        Ok(p)
    }

    /// The shared settings of the reference comparison: γ_g = 20/3, γ_r = 40/3,
    /// η_g = η_r = 0.15, φ_g = π/4, φ_r = 3π/4, resonant Δ.
    pub fn reference(omega_g: f64, omega_r: f64) -> Result<Self> {
        Self::eit_resonant(
            omega_g,
            omega_r,
            20.0 / 3.0,
            40.0 / 3.0,
            0.15,
            0.15,
            FRAC_PI_4,
            3.0 * FRAC_PI_4,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.nu,
            self.omega_g,
            self.omega_r,
            self.gamma_g,
            self.gamma_r,
            self.eta_g,
            self.eta_r,
            self.phi_g,
            self.phi_r,
            self.delta,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::config("parameters must be finite"));
        }
        if self.nu <= 0.0 {
            return Err(Error::config("trap frequency must be positive"));
        }
        if self.omega_g < 0.0 || self.omega_r < 0.0 {
            return Err(Error::config("Rabi frequencies must be non-negative"));
        }
        if self.gamma_g < 0.0 || self.gamma_r < 0.0 || self.gamma_g + self.gamma_r <= 0.0 {
            return Err(Error::config(
                "decay rates must be non-negative with a positive total",
            ));
        }
        if self.eta_g < 0.0 || self.eta_r < 0.0 {
            return Err(Error::config("Lamb-Dicke parameters must be non-negative"));
        }
        Ok(())
    }

    /// Total linewidth γ = γ_g + γ_r.
    pub fn gamma(&self) -> f64 {
        self.gamma_g + self.gamma_r
    }

    /// Recompute Δ from the resonance condition.
    pub fn with_resonant_delta(mut self) -> Result<Self> {
        self.delta = eit_resonance_delta(self.omega_g, self.omega_r, self.nu)?;
        Ok(self)
    }

    /// Swap the roles of `|g⟩` and `|r⟩`.
    pub fn relabeled(&self) -> Self {
        Self {
            omega_g: self.omega_r,
            omega_r: self.omega_g,
            gamma_g: self.gamma_r,
            gamma_r: self.gamma_g,
            eta_g: self.eta_r,
            eta_r: self.eta_g,
            phi_g: self.phi_r,
            phi_r: self.phi_g,
            ..*self
        }
    }

    /// Projected Lamb-Dicke parameters `η_j cos φ_j`.
    fn projected_eta(&self) -> (f64, f64) {
        (self.eta_g * self.phi_g.cos(), self.eta_r * self.phi_r.cos())
    }
}

/// Detuning that puts the `|d,n+1⟩ ↔ |+,n⟩` red sideband on resonance.
pub fn eit_resonance_delta(omega_g: f64, omega_r: f64, nu: f64) -> Result<f64> {
    if !(omega_g > 0.0 || omega_r > 0.0) {
        return Err(Error::config(
            "at least one Rabi frequency must be positive",
        ));
    }
    if !(nu > 0.0) {
        return Err(Error::config("trap frequency must be positive"));
    }
    Ok((omega_g * omega_g + omega_r * omega_r) / (4.0 * nu))
}

/// Quantities in the dark/bright representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedEit {
    /// Mixing angle in `[0, π/2]`.
    pub theta: f64,
    pub omega_d: f64,
    pub omega_b: f64,
    pub gamma_d: f64,
    pub gamma_b: f64,
    /// Effective Lamb-Dicke parameter `η_g cos φ_g − η_r cos φ_r`; may be negative.
    pub eta: f64,
}

pub fn derive_eit(params: &CoolingParams) -> Result<DerivedEit> {
    let (og, or) = (params.omega_g, params.omega_r);
    if !(og > 0.0 || or > 0.0) {
        return Err(Error::config(
            "dark/bright transformation needs a positive Rabi frequency",
        ));
    }
    let theta = og.atan2(or);
    let (s, c) = theta.sin_cos();
    let omega_b = og.hypot(or);
    let omega_d = og * or / omega_b;
    let (eg, er) = params.projected_eta();
    Ok(DerivedEit {
        theta,
        omega_d,
        omega_b,
        gamma_d: params.gamma_g * c * c + params.gamma_r * s * s,
        gamma_b: params.gamma_r * c * c + params.gamma_g * s * s,
        eta: eg - er,
    })
}

/// Internal basis and form in which the model operators are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Bare `{g, r, e}` states.
    Gre,
    /// Dark/bright states in the reduced form: the `|b,n⟩ ↔ |e,n±1⟩` sidebands are
    /// dropped and the dissipator keeps only the `γ_d`, `γ_b` channels.
    Dbe,
    /// Dark/bright states with every term kept, unitarily equivalent to [`Basis::Gre`].
    DbeExact,
}

impl Basis {
    pub fn representation(self) -> hilbert::Representation {
        match self {
            Basis::Gre => hilbert::Representation::Gre,
            Basis::Dbe | Basis::DbeExact => hilbert::Representation::Dbe,
        }
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gre" => Ok(Basis::Gre),
            "dbe" => Ok(Basis::Dbe),
            "dbe-exact" | "dbe_exact" => Ok(Basis::DbeExact),
            other => Err(Error::config(format!("unknown basis `{other}`"))),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Gre => "gre",
            Basis::Dbe => "dbe",
            Basis::DbeExact => "dbe-exact",
        })
    }
}

/// A Lindblad channel `γ/2 (2LρL† − {L†L, ρ})`.
#[derive(Debug, Clone)]
pub struct Jump {
    pub rate: f64,
    pub operator: ComplexMatrix,
}

fn embedded(to: InternalLevel, from: InternalLevel, phonon: &ComplexMatrix) -> ComplexMatrix {
    hilbert::embed(&hilbert::transition(to, from), phonon).expect("dimensions are fixed")
}

fn scale(m: &ComplexMatrix, k: c64) -> ComplexMatrix {
    linalg::scaled(m.as_ref(), k)
}

/// `ν â†â − Δ |e⟩⟨e|`.
fn bare_hamiltonian(nu: f64, delta: f64, cutoff: FockCutoff) -> ComplexMatrix {
    let n = cutoff.dim();
    Mat::from_fn(n, n, |i, j| {
        if i != j {
            return ZERO;
        }
        let phonon = (i / INTERNAL_DIM) as f64;
        let excited = if i % INTERNAL_DIM == InternalLevel::E.ordinal() {
            delta
        } else {
            0.0
        };
        c64::new(nu * phonon - excited, 0.0)
    })
}

fn with_hermitian_conjugate(bare: ComplexMatrix, coupling: ComplexMatrix) -> ComplexMatrix {
    &bare + &coupling + coupling.adjoint()
}

/// Hamiltonian with the exact recoil operators `exp(i η_j cos φ_j (â + â†))`, in the
/// `{g, r, e}` basis.
pub fn hamiltonian_full(params: &CoolingParams, cutoff: FockCutoff) -> Result<ComplexMatrix> {
    params.validate()?;
    let x = hilbert::quadrature(cutoff);
    let (eg, er) = params.projected_eta();
    let kick = |eta: f64| linalg::expm(linalg::scaled(x.as_ref(), c64::new(0.0, eta)).as_ref());
    let coupling = scale(
        &embedded(InternalLevel::E, InternalLevel::G, &kick(eg)),
        c64::new(params.omega_g / 2.0, 0.0),
    ) + scale(
        &embedded(InternalLevel::E, InternalLevel::R, &kick(er)),
        c64::new(params.omega_r / 2.0, 0.0),
    );
    Ok(with_hermitian_conjugate(
        bare_hamiltonian(params.nu, params.delta, cutoff),
        coupling,
    ))
}

/// Dark/bright Hamiltonian without the `|b,n⟩ ↔ |e,n±1⟩` sidebands:
///
/// ```text
/// ν â†â − Δ|e⟩⟨e| + (Ω_b/2 |e⟩⟨b| + i ηΩ_d/2 |e⟩⟨d| (â + â†) + h.c.)
/// ```
pub fn hamiltonian_reduced(d: &DerivedEit, nu: f64, delta: f64, cutoff: FockCutoff) -> ComplexMatrix {
    let id = linalg::identity(cutoff.phonon_dim());
    let x = hilbert::quadrature(cutoff);
    let coupling = scale(
        &embedded(InternalLevel::E, InternalLevel::B, &id),
        c64::new(d.omega_b / 2.0, 0.0),
    ) + scale(
        &embedded(InternalLevel::E, InternalLevel::D, &x),
        c64::new(0.0, d.eta * d.omega_d / 2.0),
    );
    with_hermitian_conjugate(bare_hamiltonian(nu, delta, cutoff), coupling)
}

/// Hamiltonian expanded to first order in the Lamb-Dicke parameters.
pub fn hamiltonian_ld(
    params: &CoolingParams,
    cutoff: FockCutoff,
    basis: Basis,
) -> Result<ComplexMatrix> {
    params.validate()?;
    let id = linalg::identity(cutoff.phonon_dim());
    let x = hilbert::quadrature(cutoff);
    let half = |v: f64| c64::new(v / 2.0, 0.0);
    let i_half = |v: f64| c64::new(0.0, v / 2.0);

    let coupling = match basis {
        Basis::Gre => {
            let (eg, er) = params.projected_eta();
            let eg_ = embedded(InternalLevel::E, InternalLevel::G, &id);
            let er_ = embedded(InternalLevel::E, InternalLevel::R, &id);
            let egx = embedded(InternalLevel::E, InternalLevel::G, &x);
            let erx = embedded(InternalLevel::E, InternalLevel::R, &x);
            scale(&eg_, half(params.omega_g))
                + scale(&er_, half(params.omega_r))
                + scale(&egx, i_half(eg * params.omega_g))
                + scale(&erx, i_half(er * params.omega_r))
        }
        Basis::Dbe | Basis::DbeExact => {
            let d = derive_eit(params)?;
            let h = hamiltonian_reduced(&d, params.nu, params.delta, cutoff);
            if basis == Basis::Dbe {
                return Ok(h);
            }
            let ebx = embedded(InternalLevel::E, InternalLevel::B, &x);
            let sideband = scale(&ebx, i_half(bright_sideband_coupling(params, &d)));
            return Ok(with_hermitian_conjugate(h, sideband));
        }
    };
    Ok(with_hermitian_conjugate(
        bare_hamiltonian(params.nu, params.delta, cutoff),
        coupling,
    ))
}

/// Strength of the `|b,n⟩ ↔ |e,n±1⟩` sideband, `(Ω_g² η_g cos φ_g + Ω_r² η_r cos φ_r)/Ω_b`.
pub fn bright_sideband_coupling(params: &CoolingParams, d: &DerivedEit) -> f64 {
    let (eg, er) = params.projected_eta();
    (params.omega_g.powi(2) * eg + params.omega_r.powi(2) * er) / d.omega_b
}

/// Spontaneous-emission channels at zeroth order in the Lamb-Dicke parameters.
pub fn jump_operators(
    params: &CoolingParams,
    cutoff: FockCutoff,
    basis: Basis,
) -> Result<Vec<Jump>> {
    params.validate()?;
    let id = linalg::identity(cutoff.phonon_dim());
    let jumps = match basis {
        Basis::Gre => vec![
            Jump {
                rate: params.gamma_g,
                operator: embedded(InternalLevel::G, InternalLevel::E, &id),
            },
            Jump {
                rate: params.gamma_r,
                operator: embedded(InternalLevel::R, InternalLevel::E, &id),
            },
        ],
        Basis::Dbe => {
            let d = derive_eit(params)?;
            vec![
                Jump {
                    rate: d.gamma_d,
                    operator: embedded(InternalLevel::D, InternalLevel::E, &id),
                },
                Jump {
                    rate: d.gamma_b,
                    operator: embedded(InternalLevel::B, InternalLevel::E, &id),
                },
            ]
        }
        Basis::DbeExact => {
            // |g⟩⟨e| and |r⟩⟨e| rewritten in dark/bright components
            let d = derive_eit(params)?;
            let (s, c) = d.theta.sin_cos();
            let de = embedded(InternalLevel::D, InternalLevel::E, &id);
            let be = embedded(InternalLevel::B, InternalLevel::E, &id);
            let combo = |a: f64, b: f64| scale(&de, c64::new(a, 0.0)) + scale(&be, c64::new(b, 0.0));
            vec![
                Jump {
                    rate: params.gamma_g,
                    operator: combo(c, s),
                },
                Jump {
                    rate: params.gamma_r,
                    operator: combo(-s, c),
                },
            ]
        }
    };
    Ok(jumps)
}

/// `V ⊗ 1` whose columns are `|d⟩`, `|b⟩`, `|e⟩` written in `{g, r, e}` coordinates.
///
/// An operator `A` in the gre basis has dbe matrix `U† A U`.
pub fn dark_bright_unitary(theta: f64, cutoff: FockCutoff) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let v = Mat::from_fn(INTERNAL_DIM, INTERNAL_DIM, |i, j| match (i, j) {
        (0, 0) | (1, 1) => c64::new(c, 0.0),
        (0, 1) => c64::new(s, 0.0),
        (1, 0) => c64::new(-s, 0.0),
        (2, 2) => ONE,
        _ => ZERO,
    });
    hilbert::embed(&v, &linalg::identity(cutoff.phonon_dim())).expect("dimensions are fixed")
}
