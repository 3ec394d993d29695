//! Closed-form precision bounds on xi1 and xi2 and the phase-frequency scales they compare against.

use serde::{Deserialize, Serialize};

use crate::constants::{PhysicalConstants, CS_MASS, M_C12, RB87_MASS};
use crate::error::{Result, SimError};
use crate::model::{ParticleSpec, RecoilSpec};

/// Mass imprecision, either absolute (kg) or relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum MassUncertainty {
    Absolute(f64),
    Relative(f64),
}

impl MassUncertainty {
    pub fn relative(&self, mass: f64) -> f64 {
        match *self {
            MassUncertainty::Absolute(dm) => dm / mass,
            MassUncertainty::Relative(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Repetitions.
    pub n: f64,
    /// Pulse separation, s.
    pub big_t: f64,
    /// Detuning imprecision, rad/s.
    pub delta_delta: f64,
    pub mass_uncertainty: MassUncertainty,
    /// Imprecision of hbar/m_e, J s/kg.
    pub d_hbar_me: f64,
    /// Assumed xi1 for the cross term of the mass bound.
    pub xi1_prior: f64,
}

impl BoundInputs {
    /// N = 1000, T = 500 us, one carbon-12 mass of uncertainty.
    pub fn nanodiamond() -> Self {
        BoundInputs {
            n: 1000.0,
            big_t: 500e-6,
            delta_delta: 2.0 * std::f64::consts::PI * 10.0,
            mass_uncertainty: MassUncertainty::Absolute(M_C12),
            d_hbar_me: 5.9e-14,
            xi1_prior: 1.0,
        }
    }

    /// N = 1e8, T = 10 ms, relative mass uncertainty 1e-9.
    pub fn cesium() -> Self {
        BoundInputs { n: 1e8, big_t: 10e-3, mass_uncertainty: MassUncertainty::Relative(1e-9), ..Self::nanodiamond() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.n >= 1.0
            && self.big_t > 0.0
            && self.delta_delta >= 0.0
            && self.d_hbar_me >= 0.0
            && match self.mass_uncertainty {
                MassUncertainty::Absolute(v) | MassUncertainty::Relative(v) => v >= 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(SimError::domain("bound inputs need N >= 1, T > 0 and non-negative imprecisions"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiBounds {
    pub xi1: f64,
    pub xi2: f64,
}

// Formulas over an explicit constant set so that the units audit can rescale them.

fn shot_noise_in(c: &PhysicalConstants, n: f64, big_t: f64, m: f64, k: f64) -> XiBounds {
    let s = 1.0 / n.sqrt();
    XiBounds { xi1: s * c.planck_mass / (c.c * big_t) / (m * k), xi2: s * c.planck_mass / (big_t * c.hbar * k * k) }
}

fn laser_frequency_in(c: &PhysicalConstants, dd: f64, m: f64, k: f64) -> XiBounds {
    XiBounds { xi1: c.planck_mass / c.c / (m * k) * dd, xi2: c.planck_mass / c.hbar / (k * k) * dd }
}

fn mass_precision_in(c: &PhysicalConstants, xi1: f64, dm_rel: f64, m: f64, k: f64) -> XiBounds {
    XiBounds {
        xi1: xi1 * dm_rel + c.planck_mass / (m * m) * (c.hbar * k / c.c) * dm_rel,
        xi2: c.planck_mass / m * dm_rel,
    }
}

fn fine_structure_in(c: &PhysicalConstants, d_hbar_me: f64, m: f64, k: f64) -> XiBounds {
    XiBounds {
        xi1: c.planck_mass * c.m_e / c.c * k / (m * m) * d_hbar_me,
        xi2: c.planck_mass / m / (c.hbar / c.m_e) * d_hbar_me,
    }
}

fn consts() -> PhysicalConstants {
    PhysicalConstants::codata2018()
}

pub fn shot_noise_bounds(inputs: &BoundInputs, particle: &ParticleSpec, recoil: &RecoilSpec) -> Result<XiBounds> {
    inputs.validate()?;
    Ok(shot_noise_in(&consts(), inputs.n, inputs.big_t, particle.mass, recoil.k_mag))
}

pub fn laser_frequency_bounds(inputs: &BoundInputs, particle: &ParticleSpec, recoil: &RecoilSpec) -> Result<XiBounds> {
    inputs.validate()?;
    Ok(laser_frequency_in(&consts(), inputs.delta_delta, particle.mass, recoil.k_mag))
}

pub fn mass_precision_bounds(inputs: &BoundInputs, particle: &ParticleSpec, recoil: &RecoilSpec) -> Result<XiBounds> {
    inputs.validate()?;
    let m = particle.mass;
    Ok(mass_precision_in(&consts(), inputs.xi1_prior, inputs.mass_uncertainty.relative(m), m, recoil.k_mag))
}

pub fn fine_structure_bounds(inputs: &BoundInputs, particle: &ParticleSpec, recoil: &RecoilSpec) -> Result<XiBounds> {
    inputs.validate()?;
    Ok(fine_structure_in(&consts(), inputs.d_hbar_me, particle.mass, recoil.k_mag))
}

/// A recoil (h/m) measurement with a given relative uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilMeasurement {
    pub mass: f64,
    pub relative_uncertainty: f64,
}

impl RecoilMeasurement {
    /// Cs h/m at 2 x 7.4 ppb (alpha determined to 7.4 ppb).
    pub fn cesium() -> Self {
        RecoilMeasurement { mass: CS_MASS, relative_uncertainty: 2.0 * 7.4e-9 }
    }

    /// Rb h/m at 2 x 0.66 ppb.
    pub fn rubidium() -> Self {
        RecoilMeasurement { mass: RB87_MASS, relative_uncertainty: 2.0 * 0.66e-9 }
    }

    /// xi2 shifts the measured recoil frequency by the relative amount xi2 m / M_p.
    pub fn xi2_bound(&self) -> f64 {
        consts().planck_mass / self.mass * self.relative_uncertainty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFrequencies {
    /// hbar k^2 / (2 pi m), Hz.
    pub f_zero: f64,
    /// xi1 m c k / (2 pi M_p), Hz.
    pub f_xi1: f64,
    /// xi2 hbar k^2 / (2 pi M_p), Hz.
    pub f_xi2: f64,
    /// Maximal path splitting hbar k T / m, m.
    pub max_splitting: f64,
}

pub fn phase_frequency_contributions(
    particle: &ParticleSpec,
    recoil: &RecoilSpec,
    xi1: f64,
    xi2: f64,
    big_t: f64,
) -> PhaseFrequencies {
    let c = consts();
    let m = particle.mass;
    let k = recoil.k_mag;
    let two_pi = 2.0 * std::f64::consts::PI;
    PhaseFrequencies {
        f_zero: c.hbar * k * k / (two_pi * m),
        f_xi1: xi1 * m * c.c * k / (two_pi * c.planck_mass),
        f_xi2: xi2 * c.hbar * k * k / (two_pi * c.planck_mass),
        max_splitting: c.hbar * k * big_t / m,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    /// Radius in m, absent for atoms.
    pub radius: Option<f64>,
    pub mass: f64,
    pub shot_noise: XiBounds,
    pub laser_frequency: XiBounds,
    pub mass_precision: XiBounds,
    pub fine_structure: XiBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
    pub cesium: BoundRow,
    pub prior_cesium_xi2: f64,
    pub prior_rubidium_xi2: f64,
}

fn row(particle: &ParticleSpec, inputs: &BoundInputs, recoil: &RecoilSpec) -> Result<BoundRow> {
    Ok(BoundRow {
        radius: particle.radius(),
        mass: particle.mass,
        shot_noise: shot_noise_bounds(inputs, particle, recoil)?,
        laser_frequency: laser_frequency_bounds(inputs, particle, recoil)?,
        mass_precision: mass_precision_bounds(inputs, particle, recoil)?,
        fine_structure: fine_structure_bounds(inputs, particle, recoil)?,
    })
}

/// All bound families over nanodiamond radii, plus the Cs reference row.
pub fn bound_sweep(radii: &[f64], nanodiamond: &BoundInputs, cesium: &BoundInputs, recoil: &RecoilSpec) -> Result<BoundTable> {
    if radii.is_empty() {
        return Err(SimError::domain("radius grid is empty"));
    }
    let rows = radii
        .iter()
        .map(|&r| row(&ParticleSpec::nanodiamond(r)?, nanodiamond, recoil))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundTable {
        rows,
        cesium: row(&ParticleSpec::cesium(), cesium, recoil)?,
        prior_cesium_xi2: RecoilMeasurement::cesium().xi2_bound(),
        prior_rubidium_xi2: RecoilMeasurement::rubidium().xi2_bound(),
    })
}
