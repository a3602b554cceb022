//! Finite-time neutron scattering rates for a system under pointer-basis
//! dephasing.
//!
//! A model is a set of energies, a Lindblad variable `X` sharing the energy
//! eigenbasis, a dephasing constant `K` and density operators `n(q)`. The
//! crate evaluates the correlation `C(q, t) = ⟨n(-q, t) n(q)⟩` under
//! `∂ρ/∂t = -i[H, ρ] - K[X, [X, ρ]]`, the transition rate over a finite
//! scattering time, its ratio to the `K = 0` rate, and `S(q, ω)`.
//!
//! Internally ħ = 1, energies are in eV, lengths in Å and times in ħ/eV.
//! [`units`] converts at the boundary.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod models;
pub mod scattering;
pub mod timescales;
pub mod units;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix};
pub use models::{
    build_custom, build_oscillator, thermal_state, LindbladCoupling, ModelSystem, OscillatorSpec,
};
pub use units::UnitsContext;
