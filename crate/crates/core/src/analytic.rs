//! Closed-form steady-state occupations.
//!
//! The sideband-cooling baselines and the leading EIT result `γ²/16Δ²` are
//! independent of the Lamb-Dicke parameter. The second-order result adds
//!
//! ```text
//! (η² Ω_d² / Ω_b²) · (1/2 + γ_b/γ_d)
//! ```
//!
//! which follows from the diagonal populations of the 7-level subspace around
//! `|d,0⟩` in [`subspace_diagonals`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::{CoolingParams, DerivedEit};

/// Dipole emission pattern factor for free-space sideband cooling.
pub const DIPOLE_GEOMETRY_FACTOR: f64 = 2.0 / 5.0;

/// Free-space sideband cooling limit `(α + 1/4)(γ/2ν)²`.
pub fn nbar_sideband(gamma: f64, nu: f64, alpha: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::config("trap frequency must be positive"));
    }
    Ok((alpha + 0.25) * (gamma / (2.0 * nu)).powi(2))
}

/// Standing-wave sideband cooling limit `(1/4)(γ/2ν)²`.
pub fn nbar_standing_wave(gamma: f64, nu: f64) -> Result<f64> {
    nbar_sideband(gamma, nu, 0.0)
}

/// Leading EIT result `γ²/16Δ²`.
pub fn nbar_zeroth(gamma: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::Divergence("γ²/16Δ² requires Δ ≠ 0".into()));
    }
    Ok(gamma * gamma / (16.0 * delta * delta))
}

/// Populations of the projected subspace relative to `ρ_{d0,d0} = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubspaceDiagonals {
    pub rho_b0b0: f64,
    pub rho_e0e0: f64,
    pub rho_d1d1: f64,
    pub rho_b1b1: f64,
    pub rho_e1e1: f64,
    pub rho_d2d2: f64,
}

impl SubspaceDiagonals {
    /// `ρ_{d1,d1} + ρ_{b1,b1} + ρ_{e1,e1} + 2ρ_{d2,d2}`.
    pub fn phonon_number(&self) -> f64 {
        self.rho_d1d1 + self.rho_b1b1 + self.rho_e1e1 + 2.0 * self.rho_d2d2
    }
}

fn check_domain(d: &DerivedEit) -> Result<()> {
    if !(d.gamma_d > 0.0) {
        return Err(Error::Divergence(
            "γ_d = 0: no decay into the dark state, cooling is impossible".into(),
        ));
    }
    if !(d.omega_b > 0.0) {
        return Err(Error::Divergence("Ω_b = 0".into()));
    }
    Ok(())
}

pub fn subspace_diagonals(d: &DerivedEit, nu: f64) -> Result<SubspaceDiagonals> {
    check_domain(d)?;
    if d.eta == 0.0 || d.omega_d == 0.0 {
        return Err(Error::Divergence(
            "ρ_{d1,d1} carries a 1/(ηΩ_d)² term; η·Ω_d must be nonzero".into(),
        ));
    }
    let (gd, gb) = (d.gamma_d, d.gamma_b);
    let coupling = d.eta.powi(2) * d.omega_d.powi(2) / d.omega_b.powi(2);
    let bright = coupling * (gd + gb) / (4.0 * gd);
    let heating = 4.0 * gd * nu * nu * (gd + gb) / (d.eta.powi(2) * d.omega_d.powi(2) * d.omega_b.powi(2));
    Ok(SubspaceDiagonals {
        rho_b0b0: bright,
        rho_e0e0: 0.0,
        rho_d1d1: bright * (1.0 + heating),
        rho_b1b1: bright,
        rho_e1e1: 0.0,
        rho_d2d2: coupling / 4.0 * (gb / gd),
    })
}

/// Coherences of the projected subspace, in the same units as the `rho_b0b0` they derive from.
///
/// `σˣ_{jk} = tr((|j⟩⟨k| + |k⟩⟨j|) ρ)` and `σʸ_{jk} = tr((i|j⟩⟨k| − i|k⟩⟨j|) ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaIntermediates {
    pub sigma_d0e1_x: f64,
    pub sigma_e0d1_x: f64,
    pub sigma_b0e0_y: f64,
    pub sigma_b1e1_y: f64,
}

/// Leading-order coherences given `ρ_{b0,b0}`, valid when `4Δν = Ω_b²` and `ηΩ_d ≪ Ω_b`.
pub fn sigma_intermediates(d: &DerivedEit, nu: f64, rho_b0b0: f64) -> Result<SigmaIntermediates> {
    check_domain(d)?;
    if d.eta == 0.0 || d.omega_d == 0.0 {
        return Err(Error::Divergence("σˣ carries a 1/(ηΩ_d) factor".into()));
    }
    let x = rho_b0b0 * 8.0 * nu * nu * d.gamma_d / (d.eta * d.omega_d * d.omega_b.powi(2));
    let y = rho_b0b0 * 8.0 * nu * nu * d.gamma_b / d.omega_b.powi(3);
    Ok(SigmaIntermediates {
        sigma_d0e1_x: x,
        sigma_e0d1_x: x,
        sigma_b0e0_y: y,
        sigma_b1e1_y: y,
    })
}

/// The two addends of the second-order occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrder {
    /// `γ²/16Δ²`
    pub zeroth: f64,
    /// `(η²Ω_d²/Ω_b²)(1/2 + γ_b/γ_d)`
    pub recoil: f64,
}

impl SecondOrder {
    pub fn total(&self) -> f64 {
        self.zeroth + self.recoil
    }
}

pub fn nbar_second(d: &DerivedEit, gamma: f64, delta: f64) -> Result<SecondOrder> {
    check_domain(d)?;
    let zeroth = nbar_zeroth(gamma, delta)?;
    let recoil = d.eta.powi(2) * d.omega_d.powi(2) / d.omega_b.powi(2) * (0.5 + d.gamma_b / d.gamma_d);
    Ok(SecondOrder { zeroth, recoil })
}

/// Second-order occupation in the `Ω_g ≪ Ω_r` limit, written with the bare
/// `Ω_g, Ω_r, γ_g, γ_r`. Diverges as `γ_g → 0`.
pub fn nbar_weak_g(params: &CoolingParams, d: &DerivedEit) -> Result<f64> {
    if !(params.gamma_g > 0.0) {
        return Err(Error::Divergence("weak-Ω_g limit diverges at γ_g = 0".into()));
    }
    if !(params.omega_r > 0.0) {
        return Err(Error::Divergence("weak-Ω_g limit requires Ω_r > 0".into()));
    }
    let zeroth = nbar_zeroth(params.gamma(), params.delta)?;
    let ratio = params.omega_g / params.omega_r;
    Ok(zeroth + d.eta.powi(2) * ratio * ratio * (0.5 + params.gamma_r / params.gamma_g))
}

/// Second-order occupation at `Ω_g = Ω_r`: `γ²/16Δ² + 3η²/8`.
pub fn nbar_equal(gamma: f64, delta: f64, eta: f64) -> Result<f64> {
    Ok(nbar_zeroth(gamma, delta)? + 0.375 * eta * eta)
}
