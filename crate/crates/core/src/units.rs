//! Physical constants and unit conversions.
//!
//! Internally every computation uses ħ = 1 with energies in eV and lengths
//! in Å. The natural time unit is therefore ħ/eV ≈ 0.6582 fs, and a mass is
//! carried as `m c² / (ħ c)²` in 1/(eV·Å²) so that `q²/(2m)` comes out in eV.
//! Conversion happens only when reading configuration and writing output.

/// Reduced Planck constant, eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Speed of light, m/s (exact).
pub const C_M_S: f64 = 299_792_458.0;
/// Neutron mass, kg.
pub const NEUTRON_MASS_KG: f64 = 1.674_927_498e-27;
/// Elementary charge, J per eV (exact).
pub const EV_J: f64 = 1.602_176_634e-19;
/// ħc, eV·Å.
pub const HBAR_C_EV_ANGSTROM: f64 = 1_973.269_804;
/// Atomic mass unit rest energy, eV.
pub const AMU_EV: f64 = 931_494_102.4;
/// Proton mass, amu.
pub const PROTON_MASS_AMU: f64 = 1.007_276_467;
/// Boltzmann constant, eV/K.
pub const BOLTZMANN_EV_K: f64 = 8.617_333_262e-5;

const ANGSTROM_M: f64 = 1e-10;
const ATTOSECOND_S: f64 = 1e-18;

/// Constants used at the input/output boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsContext {
    pub hbar_ev_s: f64,
    pub c_m_s: f64,
    pub neutron_mass_kg: f64,
}

impl Default for UnitsContext {
    fn default() -> Self {
        Self {
            hbar_ev_s: HBAR_EV_S,
            c_m_s: C_M_S,
            neutron_mass_kg: NEUTRON_MASS_KG,
        }
    }
}

impl UnitsContext {
    /// Angular frequency in 1/s for an energy in eV.
    pub fn ev_to_inv_s(&self, e_ev: f64) -> f64 {
        e_ev / self.hbar_ev_s
    }

    pub fn inv_s_to_ev(&self, rate: f64) -> f64 {
        rate * self.hbar_ev_s
    }

    pub fn angstrom_to_m(&self, x: f64) -> f64 {
        x * ANGSTROM_M
    }

    pub fn m_to_angstrom(&self, x: f64) -> f64 {
        x / ANGSTROM_M
    }

    pub fn s_to_as(&self, t: f64) -> f64 {
        t / ATTOSECOND_S
    }

    pub fn as_to_s(&self, t: f64) -> f64 {
        t * ATTOSECOND_S
    }

    /// Length of the natural time unit ħ/eV in seconds.
    pub fn natural_time_s(&self) -> f64 {
        self.hbar_ev_s
    }

    pub fn as_to_natural(&self, t_as: f64) -> f64 {
        self.as_to_s(t_as) / self.hbar_ev_s
    }

    pub fn natural_to_as(&self, t: f64) -> f64 {
        self.s_to_as(t * self.hbar_ev_s)
    }

    pub fn s_to_natural(&self, t_s: f64) -> f64 {
        t_s / self.hbar_ev_s
    }

    pub fn natural_to_s(&self, t: f64) -> f64 {
        t * self.hbar_ev_s
    }

    /// Mass in amu to the internal unit 1/(eV·Å²).
    pub fn amu_to_natural_mass(&self, m_amu: f64) -> f64 {
        m_amu * AMU_EV / (HBAR_C_EV_ANGSTROM * HBAR_C_EV_ANGSTROM)
    }

    /// Velocity in Å per natural time unit to Å/s.
    pub fn natural_velocity_to_angstrom_per_s(&self, v: f64) -> f64 {
        v / self.hbar_ev_s
    }

    pub fn angstrom_per_s_to_natural_velocity(&self, v: f64) -> f64 {
        v * self.hbar_ev_s
    }
}
