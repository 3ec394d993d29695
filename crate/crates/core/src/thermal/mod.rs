//! Thermal harmonic-oscillator initial state and its coherence and visibility factors.

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Result, SimError};
use crate::model::{EnvironmentSpec, ParticleSpec};
use crate::Vec3;

pub mod ensemble;
pub mod envelope;

pub use ensemble::{
    closed_paths_population, closed_paths_probability, interference_element, pair_phase, total_population, Averaging,
    ElementOptions, InterferenceElement, Overlap, PhaseContent, PopulationResult,
};
pub use envelope::{frequency_distribution, t2_envelope, t2_estimate, FrequencyDistribution, Orientation, T2Envelope};

/// Per-axis Gaussian thermal state of a harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub mass: f64,
    pub sigma_p: [f64; 3],
    pub sigma_z: [f64; 3],
    pub n_mean: [f64; 3],
    pub omega: [f64; 3],
}

/// Mean phonon number 1 / (exp(hbar w / k_B T) - 1).
pub fn mean_phonon_number(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

pub fn thermal_state(particle: &ParticleSpec, env: &EnvironmentSpec) -> Result<ThermalState> {
    if !(env.temperature >= 0.0) {
        return Err(SimError::domain(format!("temperature must be >= 0, got {}", env.temperature)));
    }
    let m = particle.mass;
    let mut s = ThermalState { mass: m, sigma_p: [0.0; 3], sigma_z: [0.0; 3], n_mean: [0.0; 3], omega: env.trap_freqs };
    for a in 0..3 {
        let w = env.trap_freqs[a];
        if !(w > 0.0) {
            return Err(SimError::domain(format!("trap frequency must be > 0, got {w}")));
        }
        let n = mean_phonon_number(w, env.temperature);
        s.n_mean[a] = n;
        s.sigma_p[a] = (0.5 * m * w * HBAR * (2.0 * n + 1.0)).sqrt();
        s.sigma_z[a] = (0.5 * HBAR / (m * w) * (2.0 * n + 1.0)).sqrt();
    }
    Ok(s)
}

impl ThermalState {
    /// Minimum-uncertainty-consistent state with prescribed momentum spreads at trap frequency `omega`.
    ///
    /// Axes with zero spread are treated as sharp momenta with unbounded position spread.
    pub fn from_sigma_p(mass: f64, sigma_p: [f64; 3], omega: f64) -> Result<Self> {
        if !(mass > 0.0) || !(omega > 0.0) {
            return Err(SimError::domain("mass and trap frequency must be positive"));
        }
        let mut s = ThermalState { mass, sigma_p, sigma_z: [0.0; 3], n_mean: [0.0; 3], omega: [omega; 3] };
        for a in 0..3 {
            let sp = sigma_p[a];
            if !(sp >= 0.0) {
                return Err(SimError::domain(format!("momentum spread must be >= 0, got {sp}")));
            }
            let ground = 0.5 * mass * omega * HBAR;
            s.n_mean[a] = (0.5 * (sp * sp / ground - 1.0)).max(0.0);
            s.sigma_z[a] = if sp == 0.0 { f64::INFINITY } else { 0.5 * HBAR * (2.0 * s.n_mean[a] + 1.0) / sp };
        }
        Ok(s)
    }

    /// Momentum spread projected on a unit direction.
    pub fn sigma_along(&self, dir: &Vec3) -> f64 {
        let n = dir.norm();
        (0..3).map(|a| (dir[a] / n).powi(2) * self.sigma_p[a].powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_isotropic(&self) -> bool {
        self.sigma_p[0] == self.sigma_p[1] && self.sigma_p[1] == self.sigma_p[2]
    }
}

/// Single-axis coherence <p|rho|p + dp> of the thermal state.
pub fn coherence_element(state: &ThermalState, axis: usize, p: f64, dp: f64) -> f64 {
    let sp = state.sigma_p[axis];
    let sz = state.sigma_z[axis];
    let x = (p + 0.5 * dp) / sp;
    let density = (-0.5 * x * x).exp() / (sp * (2.0 * std::f64::consts::PI).sqrt());
    density * (-(dp * dp) * sz * sz / (2.0 * HBAR * HBAR)).exp()
}

/// Product of the per-axis coherence elements.
pub fn coherence_element_3d(state: &ThermalState, p: &Vec3, dp: &Vec3) -> f64 {
    (0..3).map(|a| coherence_element(state, a, p[a], dp[a])).product()
}

/// Final separation dz0 - dp t_tot / m.
pub fn effective_separation(dz0: &Vec3, dp: &Vec3, particle: &ParticleSpec, t_tot: f64) -> Vec3 {
    dz0 - dp * (t_tot / particle.mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityFactors {
    pub v_dz: f64,
    pub v_dp: f64,
    pub dz_r: [f64; 3],
    pub dp_r: [f64; 3],
}

pub fn visibility_factors(state: &ThermalState, dz: &Vec3, dp: &Vec3) -> VisibilityFactors {
    let mut f = VisibilityFactors { v_dz: 1.0, v_dp: 1.0, dz_r: [0.0; 3], dp_r: [0.0; 3] };
    let mut ez = 0.0;
    let mut ep = 0.0;
    for a in 0..3 {
        // Written through the spreads so that states built from sigma_p alone are covered.
        f.dz_r[a] = 2.0_f64.sqrt() * HBAR / state.sigma_p[a];
        f.dp_r[a] = 2.0_f64.sqrt() * HBAR / state.sigma_z[a];
        if dz[a] != 0.0 {
            ez += (dz[a] / f.dz_r[a]).powi(2);
        }
        if dp[a] != 0.0 {
            ep += (dp[a] / f.dp_r[a]).powi(2);
        }
    }
    f.v_dz = (-ez).exp();
    f.v_dp = (-ep).exp();
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{CS_MASS, K_TABLE};

    fn sigma_tilde(r: f64, t: f64) -> f64 {
        let p = ParticleSpec::nanodiamond(r).unwrap();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(t, 2.0 * std::f64::consts::PI)).unwrap();
        s.sigma_p[2] / (HBAR * K_TABLE)
    }

    #[test]
    fn ground_state_and_uncertainty() {
        let p = ParticleSpec::cesium();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(0.0, 100.0)).unwrap();
        assert_eq!(s.n_mean, [0.0; 3]);
        assert!((s.sigma_p[0].powi(2) / (0.5 * CS_MASS * 100.0 * HBAR) - 1.0).abs() < 1e-14);
        assert!((s.sigma_p[0] * s.sigma_z[0] / (0.5 * HBAR) - 1.0).abs() < 1e-14);
        let hot = thermal_state(&p, &EnvironmentSpec::isotropic(1e-3, 100.0)).unwrap();
        assert!(hot.sigma_p[1] * hot.sigma_z[1] > 0.5 * HBAR);
        assert!(thermal_state(&p, &EnvironmentSpec::isotropic(-1.0, 100.0)).is_err());
    }

    #[test]
    fn boltzmann_limit() {
        let p = ParticleSpec::cesium();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(10.0, 1.0)).unwrap();
        assert!((s.sigma_p[0].powi(2) / (CS_MASS * K_B * 10.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn table_sigmas() {
        assert!((sigma_tilde(5e-9, 4e-6) / 153.0 - 1.0).abs() < 0.1);
        assert!((sigma_tilde(50e-9, 1e-3) / 8e4 - 1.0).abs() < 0.1);
    }

    #[test]
    fn coherence_marginal_and_peak() {
        let p = ParticleSpec::cesium();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(1e-6, 50.0)).unwrap();
        let sp = s.sigma_p[0];
        let n = 20001;
        let h = 20.0 * sp / (n - 1) as f64;
        let total: f64 = (0..n).map(|i| coherence_element(&s, 0, -10.0 * sp + i as f64 * h, 0.0) * h).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let dp = 0.3 * HBAR / s.sigma_z[0];
        let peak = coherence_element(&s, 0, -0.5 * dp, dp);
        assert!(peak > coherence_element(&s, 0, -0.5 * dp + 0.01 * sp, dp));
        assert!(peak > coherence_element(&s, 0, -0.5 * dp - 0.01 * sp, dp));
    }

    #[test]
    fn visibility_reference_lengths() {
        let p = ParticleSpec::cesium();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(1e-6, 50.0)).unwrap();
        let w = 50.0;
        let n = s.n_mean[0];
        let dz_r = (4.0 * HBAR / (CS_MASS * w * (2.0 * n + 1.0))).sqrt();
        let dp_r = (4.0 * HBAR * CS_MASS * w / (2.0 * n + 1.0)).sqrt();
        let f = visibility_factors(&s, &Vec3::new(0.0, 0.0, dz_r), &Vec3::zeros());
        assert!((f.dz_r[2] / dz_r - 1.0).abs() < 1e-12);
        assert!((f.dp_r[2] / dp_r - 1.0).abs() < 1e-12);
        assert!((f.v_dz - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(f.v_dp, 1.0);
        let none = visibility_factors(&s, &Vec3::zeros(), &Vec3::zeros());
        assert_eq!((none.v_dz, none.v_dp), (1.0, 1.0));
    }

    #[test]
    fn effective_separation_cases() {
        let p = ParticleSpec::nanodiamond(50e-9).unwrap();
        let dp = Vec3::new(0.0, 0.0, 2.0 * HBAR * K_TABLE);
        assert_eq!(effective_separation(&Vec3::zeros(), &Vec3::zeros(), &p, 1.0), Vec3::zeros());
        let dz0 = dp * (1.1e-3 / p.mass);
        assert!(effective_separation(&dz0, &dp, &p, 1.1e-3).norm() < 1e-30);
        let z = effective_separation(&Vec3::zeros(), &dp, &p, 1.1e-3).norm();
        assert!((z / 2.4e-12 - 1.0).abs() < 0.1, "{z}");
    }

    #[test]
    fn from_sigma_roundtrip() {
        let p = ParticleSpec::cesium();
        let s = thermal_state(&p, &EnvironmentSpec::isotropic(1e-5, 30.0)).unwrap();
        let r = ThermalState::from_sigma_p(p.mass, s.sigma_p, 30.0).unwrap();
        for a in 0..3 {
            assert!((r.sigma_z[a] / s.sigma_z[a] - 1.0).abs() < 1e-10);
            assert!((r.n_mean[a] / s.n_mean[a] - 1.0).abs() < 1e-8);
        }
        assert!(r.is_isotropic());
    }
}
