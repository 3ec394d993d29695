//! Visibility losses from cycle-time errors, Doppler-detuned pulses and gas collisions.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Result, SimError};
use crate::model::{GasSpec, RecoilSpec};
use crate::numerics::gk::{integrate_adaptive, QuadOptions};
use crate::numerics::rng::block_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Cycle-time error, s.
    pub d_t: f64,
    /// Rabi frequency, rad/s.
    pub rabi: f64,
    /// Velocity spread along k, m/s.
    pub sigma_v: f64,
    pub gas: GasSpec,
    /// Constant path separation, m.
    pub dz: f64,
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

fn mc<F: FnMut(&mut rand_chacha::ChaCha8Rng) -> f64>(samples: usize, seed: u64, mut f: F) -> McEstimate {
    let mut rng = block_rng(seed, 0);
    // Welford update; near-unit visibilities make the naive variance cancel.
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..samples {
        let v = f(&mut rng);
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    let n = samples as f64;
    let var = m2 / n;
    McEstimate { mean, stderr: (var / n).sqrt() }
}

fn check_sigma(sigma_v: f64) -> Result<()> {
    if sigma_v >= 0.0 {
        Ok(())
    } else {
        Err(SimError::domain(format!("velocity spread must be >= 0, got {sigma_v}")))
    }
}

/// <exp(i k v dT)> over a normal velocity: exp(-(k sigma_v dT)^2 / 2).
pub fn time_error_visibility(sigma_v: f64, recoil: &RecoilSpec, d_t: f64) -> Result<f64> {
    check_sigma(sigma_v)?;
    Ok((-0.5 * (recoil.k_mag * sigma_v * d_t).powi(2)).exp())
}

pub fn time_error_visibility_mc(sigma_v: f64, recoil: &RecoilSpec, d_t: f64, samples: usize, seed: u64) -> McEstimate {
    mc(samples, seed, |rng| {
        let v: f64 = sigma_v * rng.sample::<f64, _>(StandardNormal);
        (recoil.k_mag * v * d_t).cos()
    })
}

/// Fringe factor (2 |t| |r|)^4 of four identical pulses of resonant area pi/2 at detuning `delta`.
///
/// Both paths of a closed pair use every pulse once in transmission and once in reflection.
pub fn pulse_pair_factor(delta: f64, rabi: f64) -> f64 {
    let duration = 0.5 * std::f64::consts::PI / rabi;
    let w = (rabi * rabi + delta * delta).sqrt();
    let r2 = (rabi / w * (0.5 * w * duration).sin()).powi(2);
    (4.0 * r2 * (1.0 - r2)).powi(2)
}

/// Gaussian velocity average of the pulse factor with Doppler detuning k v.
pub fn doppler_pulse_visibility(sigma_v: f64, recoil: &RecoilSpec, rabi: f64) -> Result<f64> {
    check_sigma(sigma_v)?;
    if !(rabi > 0.0) {
        return Err(SimError::domain(format!("Rabi frequency must be > 0, got {rabi}")));
    }
    if sigma_v == 0.0 {
        return Ok(pulse_pair_factor(0.0, rabi));
    }
    // In units of the velocity spread; the resonance width is rabi / (k sigma_v).
    let width = rabi / (recoil.k_mag * sigma_v);
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let f = |u: f64| norm * (-0.5 * u * u).exp() * pulse_pair_factor(recoil.k_mag * sigma_v * u, rabi);
    let mut breaks: Vec<f64> = [-4.0, -1.0, 0.0, 1.0, 4.0].iter().map(|b| b * width).filter(|b: &f64| b.abs() < 12.0).collect();
    breaks.extend([-3.0, 3.0]);
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 20_000 };
    integrate_adaptive(f, -12.0, 12.0, &breaks, &opts)
}

pub fn doppler_pulse_visibility_mc(sigma_v: f64, recoil: &RecoilSpec, rabi: f64, samples: usize, seed: u64) -> McEstimate {
    mc(samples, seed, |rng| {
        let v: f64 = sigma_v * rng.sample::<f64, _>(StandardNormal);
        pulse_pair_factor(recoil.k_mag * v, rabi)
    })
}

/// Collision rate n sigma_geo <v> and the flux-weighted speed scale sqrt(k_B T / m) of the gas.
pub fn collision_rate(gas: &GasSpec, particle_radius: f64) -> Result<(f64, f64)> {
    if !(gas.pressure >= 0.0) || !(gas.temperature > 0.0) || !(gas.mass > 0.0) || !(particle_radius >= 0.0) {
        return Err(SimError::domain("gas needs pressure >= 0, temperature > 0, mass > 0 and radius >= 0"));
    }
    let n = gas.pressure / (K_B * gas.temperature);
    let s = (K_B * gas.temperature / gas.mass).sqrt();
    let mean_speed = (8.0 / std::f64::consts::PI).sqrt() * s;
    Ok((n * std::f64::consts::PI * particle_radius * particle_radius * mean_speed, s))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// <cos(q_z dz / hbar)> for isotropic elastic scattering of isotropic incoming gas molecules.
///
/// With incoming and outgoing directions independent and isotropic this is
/// <sinc^2(p dz / hbar)>, averaged over the flux-weighted speed density u e^-u, u = v^2 / 2 s^2.
pub fn mean_cos_transfer(gas: &GasSpec, dz: f64) -> Result<f64> {
    let (_, s) = collision_rate(gas, 0.0)?;
    if dz == 0.0 {
        return Ok(1.0);
    }
    let a = gas.mass * s * dz.abs() / HBAR;
    let f = |u: f64| u * (-u).exp() * sinc(a * (2.0 * u).sqrt()).powi(2);
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 20_000 };
    integrate_adaptive(f, 0.0, 80.0, &[1.0, 5.0], &opts)
}

/// exp(-Gamma t (1 - <cos(dp dz / hbar)>)) with hard-sphere cross section pi r^2.
pub fn collisional_visibility(gas: &GasSpec, particle_radius: f64, dz: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(SimError::domain(format!("time must be >= 0, got {t}")));
    }
    let (rate, _) = collision_rate(gas, particle_radius)?;
    if rate == 0.0 || t == 0.0 {
        return Ok(1.0);
    }
    Ok((-rate * t * (1.0 - mean_cos_transfer(gas, dz)?)).exp())
}

/// Samples flux-weighted speeds and isotropic in and out directions.
pub fn mean_cos_transfer_mc(gas: &GasSpec, dz: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    let (_, s) = collision_rate(gas, 0.0)?;
    let uni = rand_distr::Uniform::new_inclusive(-1.0, 1.0);
    Ok(mc(samples, seed, |rng| {
        // Flux-weighted Maxwell speed is s times a chi variable with four degrees of freedom.
        let chi2: f64 = (0..4).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum();
        let p = gas.mass * s * chi2.sqrt();
        let (c_in, c_out): (f64, f64) = (uni.sample(rng), uni.sample(rng));
        (p * (c_in - c_out) * dz / HBAR).cos()
    }))
}
