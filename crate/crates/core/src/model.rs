//! Experiment description: particle, recoil, timing, laser and environment.

use serde::{Deserialize, Serialize};

use crate::constants::{self, HBAR};
use crate::dispersion::Dispersion;
use crate::error::{Result, SimError};
use crate::thermal::thermal_state;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParticleKind {
    NanodiamondFromRadius { radius: f64, density: f64 },
    AtomPreset { name: String },
    ExplicitMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub mass: f64,
    pub kind: ParticleKind,
}

impl ParticleSpec {
    pub fn nanodiamond(radius: f64) -> Result<Self> {
        particle_from_radius(radius, constants::DIAMOND_DENSITY)
    }

    pub fn atom(name: &str) -> Result<Self> {
        let mass = constants::atom_mass(name)
            .ok_or_else(|| SimError::config(format!("unknown atom preset '{name}'")))?;
        Ok(ParticleSpec { mass, kind: ParticleKind::AtomPreset { name: name.to_string() } })
    }

    pub fn cesium() -> Self {
        ParticleSpec {
            mass: constants::CS_MASS,
            kind: ParticleKind::AtomPreset { name: "Cs".into() },
        }
    }

    pub fn explicit(mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(SimError::domain(format!("mass must be positive, got {mass}")));
        }
        Ok(ParticleSpec { mass, kind: ParticleKind::ExplicitMass })
    }

    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            ParticleKind::NanodiamondFromRadius { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

/// Homogeneous sphere of given radius and density.
pub fn particle_from_radius(radius: f64, density: f64) -> Result<ParticleSpec> {
    if !(radius > 0.0 && radius.is_finite()) || !(density > 0.0 && density.is_finite()) {
        return Err(SimError::domain(format!(
            "radius and density must be positive (radius {radius}, density {density})"
        )));
    }
    let mass = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3) * density;
    Ok(ParticleSpec { mass, kind: ParticleKind::NanodiamondFromRadius { radius, density } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilSpec {
    pub k_mag: f64,
    pub direction: Vec3,
    /// Second-cycle pulses recoil along -direction.
    #[serde(default = "default_true")]
    pub reverse_second_cycle: bool,
}

fn default_true() -> bool {
    true
}

impl RecoilSpec {
    pub fn new(k_mag: f64, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !k_mag.is_finite() || k_mag <= 0.0 {
            return Err(SimError::domain("recoil needs k > 0 and a nonzero direction"));
        }
        Ok(RecoilSpec { k_mag, direction: direction / n, reverse_second_cycle: true })
    }

    /// Recoil along +z.
    pub fn along_z(k_mag: f64) -> Self {
        RecoilSpec { k_mag, direction: Vec3::z(), reverse_second_cycle: true }
    }

    pub fn hbar_k(&self) -> f64 {
        HBAR * self.k_mag
    }

    /// Momentum kick vector hbar k direction.
    pub fn kick(&self) -> Vec3 {
        self.direction * self.hbar_k()
    }

    pub fn k_vec(&self) -> Vec3 {
        self.direction * self.k_mag
    }
}

impl Default for RecoilSpec {
    fn default() -> Self {
        RecoilSpec::along_z(constants::K_DEFAULT)
    }
}

/// Pulse timing. The four epochs are t0, t0+T, t0+T+tau, t0+2T+tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingSpec {
    pub t0: f64,
    pub big_t: f64,
    pub tau: f64,
}

impl TimingSpec {
    pub fn new(big_t: f64, tau: f64) -> Result<Self> {
        if !(big_t > 0.0) || !(tau >= 0.0) || !big_t.is_finite() || !tau.is_finite() {
            return Err(SimError::domain(format!("need T > 0 and tau >= 0 (T {big_t}, tau {tau})")));
        }
        Ok(TimingSpec { t0: 0.0, big_t, tau })
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.big_t
    }
    pub fn t2(&self) -> f64 {
        self.t1() + self.tau
    }
    pub fn tf(&self) -> f64 {
        self.t2() + self.big_t
    }
    pub fn epochs(&self) -> [f64; 4] {
        [self.t0, self.t1(), self.t2(), self.tf()]
    }
    pub fn total(&self) -> f64 {
        2.0 * self.big_t + self.tau
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detuning {
    Constant(f64),
    /// (time, detuning) samples, integrated with the trapezoid rule.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserSpec {
    pub detuning: Detuning,
    pub phases: [f64; 4],
}

impl Default for LaserSpec {
    fn default() -> Self {
        LaserSpec { detuning: Detuning::Constant(0.0), phases: [0.0; 4] }
    }
}

impl LaserSpec {
    pub fn constant(delta: f64) -> Self {
        LaserSpec { detuning: Detuning::Constant(delta), phases: [0.0; 4] }
    }

    /// Integral of the detuning from `t0` to `t`.
    pub fn detuning_integral(&self, t0: f64, t: f64) -> f64 {
        match &self.detuning {
            Detuning::Constant(d) => d * (t - t0),
            Detuning::Tabulated(samples) => trapezoid_between(samples, t0, t),
        }
    }

    /// Effective laser phase at each pulse epoch.
    pub fn pulse_phases(&self, timing: &TimingSpec) -> [f64; 4] {
        let e = timing.epochs();
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = self.phases[i] + self.detuning_integral(e[0], e[i]);
        }
        out
    }

    /// Laser contribution to the closed-pair phase.
    pub fn closed_pair_phase(&self, timing: &TimingSpec) -> f64 {
        let l = self.pulse_phases(timing);
        l[3] - l[2] + l[1] - l[0]
    }
}

fn interp(samples: &[(f64, f64)], t: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    if t <= samples[0].0 {
        return samples[0].1;
    }
    let last = samples[samples.len() - 1];
    if t >= last.0 {
        return last.1;
    }
    let i = samples.partition_point(|s| s.0 <= t);
    let (ta, da) = samples[i - 1];
    let (tb, db) = samples[i];
    da + (db - da) * (t - ta) / (tb - ta)
}

fn trapezoid_between(samples: &[(f64, f64)], a: f64, b: f64) -> f64 {
    if b < a {
        return -trapezoid_between(samples, b, a);
    }
    let mut knots = vec![a];
    knots.extend(samples.iter().map(|s| s.0).filter(|&t| t > a && t < b));
    knots.push(b);
    knots
        .windows(2)
        .map(|w| 0.5 * (interp(samples, w[0]) + interp(samples, w[1])) * (w[1] - w[0]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasSpec {
    pub pressure: f64,
    pub mass: f64,
    pub temperature: f64,
}

impl Default for GasSpec {
    fn default() -> Self {
        // Molecular nitrogen at 10 K.
        GasSpec { pressure: 0.0, mass: 28.0 * constants::AMU, temperature: 10.0 }
    }
}

/// `g_vec` is the gradient of the potential per unit mass, so the inertial force is
/// `-m g_vec` and free-fall momentum evolves as `p0 - m g_vec (t - t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub g_vec: Vec3,
    pub temperature: f64,
    pub trap_freqs: [f64; 3],
    pub gas: GasSpec,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec {
            g_vec: Vec3::zeros(),
            temperature: 0.0,
            trap_freqs: [2.0 * std::f64::consts::PI; 3],
            gas: GasSpec::default(),
        }
    }
}

impl EnvironmentSpec {
    pub fn isotropic(temperature: f64, omega: f64) -> Self {
        EnvironmentSpec { temperature, trap_freqs: [omega; 3], ..Default::default() }
    }

    pub fn with_gravity(mut self, g_vec: Vec3) -> Self {
        self.g_vec = g_vec;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessGroups {
    /// M_p g / (hbar k^2 c).
    pub x: f64,
    /// Thermal momentum spread in recoil units.
    pub sigma_tilde: f64,
    /// 2 mu hbar k T.
    pub t_tilde: f64,
    /// 2 m g T / (hbar k).
    pub chi_grav_tilde: f64,
}

pub fn dimensionless_groups(
    particle: &ParticleSpec,
    recoil: &RecoilSpec,
    timing: &TimingSpec,
    env: &EnvironmentSpec,
    dispersion: &Dispersion,
) -> Result<DimensionlessGroups> {
    let g = env.g_vec.norm();
    let hk = recoil.hbar_k();
    let state = thermal_state(particle, env)?;
    Ok(DimensionlessGroups {
        x: constants::planck_mass() * g / (HBAR * recoil.k_mag.powi(2) * constants::C),
        sigma_tilde: state.sigma_along(&recoil.direction) / hk,
        t_tilde: 2.0 * dispersion.mu * hk * timing.big_t,
        chi_grav_tilde: 2.0 * particle.mass * g * timing.big_t / hk,
    })
}
