//! Order-of-magnitude time and length scales of a neutron–proton collision.
//!
//! Inputs and outputs are in laboratory units (eV, Å, s); each estimator is
//! a one-line formula with ħ and c taken from [`UnitsContext`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::UnitsContext;

/// Kinematic inputs for the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicsInput {
    /// Momentum transfer as a wavenumber, 1/Å.
    pub q: f64,
    /// RMS nuclear velocity, Å/s.
    pub v0: f64,
    /// Width of `S(q, ω)`, eV.
    pub delta_e: f64,
    /// Mean energy above the ground state, eV.
    pub e_s: f64,
    /// Incident neutron energy, eV.
    pub e0: f64,
    /// Interaction range, Å.
    pub range: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfDomain {
            name,
            requirement: "> 0 and finite",
            value,
        })
    }
}

/// Impulse-approximation scattering time from `τ q v₀ ≈ 1`, seconds.
pub fn scattering_time_ia(q_inv_angstrom: f64, v0_angstrom_per_s: f64) -> Result<f64> {
    Ok(1.0 / (positive("q", q_inv_angstrom)? * positive("v0", v0_angstrom_per_s)?))
}

/// `ħ/ΔE` in seconds for a spectral width in eV.
pub fn scattering_time_width(units: &UnitsContext, delta_e_ev: f64) -> Result<f64> {
    Ok(units.hbar_ev_s / positive("deltaE", delta_e_ev)?)
}

/// Minimum orthogonalisation time `πħ/(2E_s)`, seconds.
pub fn margolus_levitin(units: &UnitsContext, e_s_ev: f64) -> Result<f64> {
    Ok(PI * units.hbar_ev_s / (2.0 * positive("Es", e_s_ev)?))
}

/// Classical time for a neutron of kinetic energy `E₀` (eV) to cross
/// `range` (Å), seconds. Non-relativistic: `v = sqrt(2E₀/m_n)`.
pub fn transit_time(units: &UnitsContext, e0_ev: f64, range_angstrom: f64) -> Result<f64> {
    let e0_j = positive("E0", e0_ev)? * crate::units::EV_J;
    let speed = (2.0 * e0_j / units.neutron_mass_kg).sqrt();
    Ok(units.angstrom_to_m(positive("range", range_angstrom)?) / speed)
}

/// Light-travel distance `c τ_act`, Å.
pub fn causal_radius(units: &UnitsContext, tau_act_s: f64) -> Result<f64> {
    Ok(units.m_to_angstrom(units.c_m_s * positive("tau_act", tau_act_s)?))
}

/// Every estimate for one set of kinematic inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleTable {
    pub input: KinematicsInput,
    pub tau_ia_s: f64,
    pub tau_width_s: f64,
    pub t_orthogonal_s: f64,
    pub tau_act_s: f64,
    pub causal_radius_angstrom: f64,
}

impl TimescaleTable {
    pub fn compute(units: &UnitsContext, input: KinematicsInput) -> Result<Self> {
        let tau_act_s = transit_time(units, input.e0, input.range)?;
        Ok(Self {
            input,
            tau_ia_s: scattering_time_ia(input.q, input.v0)?,
            tau_width_s: scattering_time_width(units, input.delta_e)?,
            t_orthogonal_s: margolus_levitin(units, input.e_s)?,
            tau_act_s,
            causal_radius_angstrom: causal_radius(units, tau_act_s)?,
        })
    }

    /// `τ_act < T⊥ ≤ τ_sc(ΔE)`.
    pub fn hierarchy_holds(&self) -> bool {
        self.tau_act_s < self.t_orthogonal_s && self.t_orthogonal_s <= self.tau_width_s
    }
}
