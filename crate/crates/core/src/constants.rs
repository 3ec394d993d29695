//! Physical constants (CODATA 2018) and particle presets.

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Newtonian gravitational constant, m^3 kg^-1 s^-2.
pub const G: f64 = 6.674_30e-11;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Electron mass, kg.
pub const M_E: f64 = 9.109_383_701_5e-31;
/// Standard gravitational acceleration, m/s^2.
pub const G_STD: f64 = 9.806_65;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Carbon-12 mass, kg.
pub const M_C12: f64 = 12.0 * AMU;

/// Diamond density, kg/m^3.
pub const DIAMOND_DENSITY: f64 = 3510.0;
/// Cesium-133 atomic mass, kg.
pub const CS_MASS: f64 = 2.2069e-25;
/// Rubidium-87 atomic mass, kg.
pub const RB87_MASS: f64 = 86.909_180_531 * AMU;

/// Default recoil wavenumber, 1/m.
pub const K_DEFAULT: f64 = 2.0e7;
/// Recoil wavenumber used for the thermal-regime table, 1/m.
pub const K_TABLE: f64 = 1.9e7;
/// Two-photon Raman recoil at 637 nm, 1/m.
pub const K_RAMAN_637: f64 = 2.0 * 2.0 * std::f64::consts::PI / 637e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub g_newton: f64,
    pub k_b: f64,
    pub m_e: f64,
    pub planck_mass: f64,
    pub planck_length: f64,
    pub g_std: f64,
}

impl PhysicalConstants {
    pub fn codata2018() -> Self {
        let planck_mass = planck_mass();
        PhysicalConstants {
            hbar: HBAR,
            c: C,
            g_newton: G,
            k_b: K_B,
            m_e: M_E,
            planck_mass,
            planck_length: HBAR / (planck_mass * C),
            g_std: G_STD,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// M_p = sqrt(hbar c / G).
#[inline]
pub fn planck_mass() -> f64 {
    (HBAR * C / G).sqrt()
}

/// l_p = hbar / (M_p c).
#[inline]
pub fn planck_length() -> f64 {
    HBAR / (planck_mass() * C)
}

/// Named recoil wavenumber presets.
pub fn k_preset(name: &str) -> Option<f64> {
    match name {
        "default" | "k2e7" => Some(K_DEFAULT),
        "table" | "k1.9e7" => Some(K_TABLE),
        "raman637" => Some(K_RAMAN_637),
        _ => None,
    }
}

/// Named atomic mass presets.
pub fn atom_mass(name: &str) -> Option<f64> {
    match name.to_ascii_lowercase().as_str() {
        "cs" | "cs133" | "cesium" => Some(CS_MASS),
        "rb" | "rb87" | "rubidium" => Some(RB87_MASS),
        _ => None,
    }
}
