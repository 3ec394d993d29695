//! JSON run configuration.
//!
//! Every section is optional and falls back to a 50 nm nanodiamond, k = 2e7 1/m along z,
//! T = 500 us, no gravity, ground-state trap at 2 pi x 1 Hz and xi1 = 1.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{self, DIAMOND_DENSITY};
use crate::dispersion::{Dispersion, DispersionParams};
use crate::error::{Result, SimError};
use crate::model::{particle_from_radius, EnvironmentSpec, GasSpec, LaserSpec, ParticleSpec, RecoilSpec, TimingSpec};
use crate::numerics::gk::QuadOptions;
use crate::thermal::{thermal_state, Averaging, ElementOptions, Overlap, PhaseContent, ThermalState};
use crate::paths::Xi1Model;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    /// "nanodiamond", "atom" or "explicit"; inferred from the other keys when absent.
    pub kind: Option<String>,
    pub radius_m: Option<f64>,
    pub density_kg_m3: Option<f64>,
    pub mass_kg: Option<f64>,
    pub preset: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoilConfig {
    pub k_per_m: f64,
    pub direction: [f64; 3],
    pub reverse_second_cycle: bool,
}

impl Default for RecoilConfig {
    fn default() -> Self {
        RecoilConfig { k_per_m: constants::K_DEFAULT, direction: [0.0, 0.0, 1.0], reverse_second_cycle: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingConfig {
    #[serde(rename = "T_s")]
    pub big_t_s: f64,
    pub tau_s: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig { big_t_s: 500e-6, tau_s: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaserConfig {
    pub detuning_rad_s: f64,
    pub phases_rad: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasConfig {
    #[serde(rename = "pressure_Pa")]
    pub pressure_pa: f64,
    pub mass_kg: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
}

impl Default for GasConfig {
    fn default() -> Self {
        let g = GasSpec::default();
        GasConfig { pressure_pa: g.pressure, mass_kg: g.mass, temperature_k: g.temperature }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentConfig {
    pub g_vec: [f64; 3],
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub trap_freqs_rad_s: [f64; 3],
    pub gas: GasConfig,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        let e = EnvironmentSpec::default();
        EnvironmentConfig { g_vec: [0.0; 3], temperature_k: e.temperature, trap_freqs_rad_s: e.trap_freqs, gas: GasConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub xi1: f64,
    pub xi2: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig { xi1: 1.0, xi2: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadOptions::default();
        Tolerances { abs: q.abs_tol, rel: q.rel_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub seed: u64,
    pub quadrature_order: usize,
    pub mc_samples: usize,
    /// "gauss_hermite", "monte_carlo" or "analytic".
    pub averaging: String,
    pub tolerances: Tolerances,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            seed: 0,
            quadrature_order: 64,
            mc_samples: 100_000,
            averaging: "gauss_hermite".into(),
            tolerances: Tolerances::default(),
        }
    }
}

/// Interference options for traces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferenceConfig {
    pub overlap: Overlap,
    pub content: PhaseContent,
    pub xi1_model: Xi1Model,
    /// Mean initial momentum, kg m/s.
    pub p0: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub zeta: f64,
    pub orthogonal: bool,
    pub adjusted: bool,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { zeta: 5.0, orthogonal: false, adjusted: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub particle: ParticleConfig,
    pub recoil: RecoilConfig,
    pub timing: TimingConfig,
    pub laser: LaserConfig,
    pub environment: EnvironmentConfig,
    pub dispersion: DispersionConfig,
    pub numerics: NumericsConfig,
    pub interference: InterferenceConfig,
    pub stability: StabilityConfig,
}

/// Validated model objects built from a [`Config`].
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub particle: ParticleSpec,
    pub recoil: RecoilSpec,
    pub timing: TimingSpec,
    pub laser: LaserSpec,
    pub env: EnvironmentSpec,
    pub dispersion: Dispersion,
    pub state: ThermalState,
    pub options: ElementOptions,
    pub xi1_model: Xi1Model,
    pub quad: QuadOptions,
    pub seed: u64,
}

fn cfg_err(e: SimError) -> SimError {
    match e {
        SimError::Config(_) => e,
        other => SimError::config(other.to_string()),
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SimError::config(format!("invalid config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical JSON, used for manifests and digests.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        h.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn particle_spec(&self) -> Result<ParticleSpec> {
        let p = &self.particle;
        let kind = match (&p.kind, &p.preset, p.radius_m, p.mass_kg) {
            (Some(k), _, _, _) => k.as_str(),
            (None, Some(_), _, _) => "atom",
            (None, None, Some(_), _) => "nanodiamond",
            (None, None, None, Some(_)) => "explicit",
            (None, None, None, None) => "nanodiamond",
        };
        match kind {
            "nanodiamond" => particle_from_radius(p.radius_m.unwrap_or(50e-9), p.density_kg_m3.unwrap_or(DIAMOND_DENSITY)),
            "atom" => ParticleSpec::atom(p.preset.as_deref().unwrap_or("Cs")),
            "explicit" => ParticleSpec::explicit(p.mass_kg.ok_or_else(|| SimError::config("particle.mass_kg is required for kind 'explicit'"))?),
            other => Err(SimError::config(format!("unknown particle kind '{other}'"))),
        }
        .map_err(cfg_err)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let particle = self.particle_spec()?;
        let r = &self.recoil;
        let mut recoil = RecoilSpec::new(r.k_per_m, Vec3::from(r.direction)).map_err(cfg_err)?;
        recoil.reverse_second_cycle = r.reverse_second_cycle;
        let timing = TimingSpec::new(self.timing.big_t_s, self.timing.tau_s).map_err(cfg_err)?;
        let laser = LaserSpec { phases: self.laser.phases_rad, ..LaserSpec::constant(self.laser.detuning_rad_s) };
        let e = &self.environment;
        let env = EnvironmentSpec {
            g_vec: Vec3::from(e.g_vec),
            temperature: e.temperature_k,
            trap_freqs: e.trap_freqs_rad_s,
            gas: GasSpec { pressure: e.gas.pressure_pa, mass: e.gas.mass_kg, temperature: e.gas.temperature_k },
        };
        let dispersion = Dispersion::for_particle(&particle, DispersionParams::new(self.dispersion.xi1, self.dispersion.xi2));
        let state = thermal_state(&particle, &env).map_err(cfg_err)?;
        let n = &self.numerics;
        let averaging = match n.averaging.as_str() {
            "gauss_hermite" => Averaging::GaussHermite { order: n.quadrature_order },
            "monte_carlo" => Averaging::MonteCarlo { samples: n.mc_samples, seed: n.seed },
            "analytic" => Averaging::Analytic,
            other => return Err(SimError::config(format!("unknown averaging '{other}'"))),
        };
        if n.quadrature_order < 2 || n.mc_samples < 2 {
            return Err(SimError::config("quadrature_order and mc_samples must be >= 2"));
        }
        let options = ElementOptions {
            averaging,
            overlap: self.interference.overlap,
            content: self.interference.content,
            p_center: Vec3::from(self.interference.p0),
        };
        let quad = QuadOptions { abs_tol: n.tolerances.abs, rel_tol: n.tolerances.rel, ..QuadOptions::default() };
        Ok(Resolved {
            particle,
            recoil,
            timing,
            laser,
            env,
            dispersion,
            state,
            options,
            xi1_model: self.interference.xi1_model,
            quad,
            seed: n.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = Config::from_json("{}").unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.particle.radius(), Some(50e-9));
        assert_eq!(r.recoil.k_mag, 2e7);
        assert_eq!(r.timing.big_t, 500e-6);
        assert_eq!(c.digest(), Config::default().digest());
    }

    #[test]
    fn schema_keys() {
        let text = r#"{
            "particle": {"preset": "Cs"},
            "recoil": {"k_per_m": 1.9e7, "direction": [1, 0, 0]},
            "timing": {"T_s": 1e-3, "tau_s": 2e-4},
            "laser": {"detuning_rad_s": 3.0, "phases_rad": [0, 0.1, 0, 0]},
            "environment": {"g_vec": [0, 0, 9.81], "temperature_K": 1e-6, "trap_freqs_rad_s": [10, 10, 20],
                            "gas": {"pressure_Pa": 1e-8, "mass_kg": 4.6e-26, "temperature_K": 10}},
            "dispersion": {"xi1": 0.5, "xi2": 2},
            "numerics": {"seed": 9, "quadrature_order": 32, "mc_samples": 1000, "tolerances": {"abs": 1e-10, "rel": 1e-8}}
        }"#;
        let r = Config::from_json(text).unwrap().resolve().unwrap();
        assert_eq!(r.particle.mass, constants::CS_MASS);
        assert_eq!(r.recoil.direction, Vec3::x());
        assert_eq!(r.timing.tau, 2e-4);
        assert_eq!(r.env.trap_freqs[2], 20.0);
        assert_eq!(r.env.gas.pressure, 1e-8);
        assert_eq!(r.dispersion.params.xi2, 2.0);
        assert_eq!(r.options.averaging, Averaging::GaussHermite { order: 32 });
        assert_eq!(r.seed, 9);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(Config::from_json(r#"{"particle": {"radius": 1}}"#), Err(SimError::Config(_))));
        let bad = Config::from_json(r#"{"particle": {"radius_m": -1}}"#).unwrap();
        assert!(matches!(bad.resolve(), Err(SimError::Config(_))));
        let bad = Config::from_json(r#"{"particle": {"preset": "Xe"}}"#).unwrap();
        assert!(matches!(bad.resolve(), Err(SimError::Config(_))));
        let bad = Config::from_json(r#"{"numerics": {"averaging": "simpson"}}"#).unwrap();
        assert!(matches!(bad.resolve(), Err(SimError::Config(_))));
    }
}
