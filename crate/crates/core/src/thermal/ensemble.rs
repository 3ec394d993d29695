//! Interference elements tr(U_i rho U_j^dag) and output-port populations.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ThermalState;
use crate::constants::HBAR;
use crate::dispersion::Dispersion;
use crate::error::{Result, SimError};
use crate::model::{EnvironmentSpec, LaserSpec, ParticleSpec, RecoilSpec, TimingSpec};
use crate::numerics::hermite::gauss_hermite;
use crate::numerics::rng::{block_rng, blocks};
use crate::numerics::sum::ComplexSum;
use crate::paths::{PathUnitary, Xi1Model};
use crate::phase::{closed_pair_phase_for, ClosedPair};
use crate::Vec3;

/// Which part of the path phase enters the interference elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseContent {
    #[default]
    Full,
    /// Only the xi1 and xi2 contributions; kinetic and laser phases are dropped.
    QgOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overlap {
    #[default]
    Thermal,
    /// Every pair overlaps perfectly; the phase is evaluated at the mean momentum.
    Perfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Averaging {
    GaussHermite { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
    /// Closed-form Gaussian average; only valid when the pair phase is affine in p.
    Analytic,
}

impl Default for Averaging {
    fn default() -> Self {
        Averaging::GaussHermite { order: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ElementOptions {
    pub averaging: Averaging,
    pub overlap: Overlap,
    pub content: PhaseContent,
    /// Mean momentum of the initial state.
    pub p_center: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceElement {
    pub value: Complex64,
    /// Pair phase at the mean momentum.
    pub phase0: f64,
    pub v_dp: f64,
    /// Gaussian position-separation factor from the affine part of the pair phase.
    pub v_dz: f64,
    /// Effective final separation hbar grad of the affine pair phase.
    pub dz: Vec3,
    /// Standard error of `value` for Monte Carlo averaging.
    pub stderr: Option<f64>,
}

fn content_scale(d: &Dispersion, content: PhaseContent) -> f64 {
    match content {
        PhaseContent::Full => 1.0,
        PhaseContent::QgOnly => {
            let c = d.quad_coeff();
            if c == 0.0 {
                0.0
            } else {
                let kin = if d.terms.kinetic { 0.5 / d.mass } else { 0.0 };
                (c - kin) / c
            }
        }
    }
}

/// Affine quadratic part of the pair phase, returned as (constant, gradient).
fn quad_pair_affine(ui: &PathUnitary, uj: &PathUnitary) -> (f64, Vec3) {
    let dp = ui.p_f - uj.p_f;
    let ctx = &ui.ctx;
    let c = ctx.dispersion.quad_coeff();
    let t_tot = ctx.timing.total();
    let drift = ctx.reference_drift_integral();
    let (ai, bi) = ui.quad_affine();
    let (aj, bj) = uj.quad_affine();
    let constant = -(2.0 * c / HBAR) * dp.dot(&drift) + ai - aj - 0.5 * (bi + bj).dot(&dp);
    let grad = bi - bj - dp * (2.0 * c * t_tot / HBAR);
    (constant, grad)
}

fn is_affine(ui: &PathUnitary) -> bool {
    !matches!(ui.ctx.xi1_model, Xi1Model::Exact { .. }) || ui.ctx.dispersion.lin_coeff() == 0.0
}

/// Delta phi_ij(p, dp) = phi_i(p - dp/2) - phi_j(p + dp/2).
pub fn pair_phase(ui: &PathUnitary, uj: &PathUnitary, p: &Vec3, content: PhaseContent) -> f64 {
    let (a, b) = quad_pair_affine(ui, uj);
    let half = (ui.p_f - uj.p_f) * 0.5;
    let xi1 = ui.xi1_difference(&(p - half), uj, &(p + half));
    let quad = (a + b.dot(p)) * content_scale(&ui.ctx.dispersion, content);
    match content {
        PhaseContent::Full => quad + xi1 + ui.laser_phase - uj.laser_phase,
        PhaseContent::QgOnly => quad + xi1,
    }
}

pub fn interference_element(
    ui: &PathUnitary,
    uj: &PathUnitary,
    state: &ThermalState,
    opts: &ElementOptions,
) -> Result<InterferenceElement> {
    if ui.ctx != uj.ctx {
        return Err(SimError::domain("path unitaries belong to different configurations"));
    }
    let dp = ui.p_f - uj.p_f;
    let phase0 = pair_phase(ui, uj, &opts.p_center, opts.content);
    let scale = content_scale(&ui.ctx.dispersion, opts.content);
    let dz = quad_pair_affine(ui, uj).1 * (HBAR * scale);
    let mut ep = 0.0;
    let mut ez = 0.0;
    for a in 0..3 {
        if dp[a] != 0.0 {
            ep += (dp[a] * state.sigma_z[a] / HBAR).powi(2);
        }
        if dz[a] != 0.0 {
            ez += (dz[a] * state.sigma_p[a] / HBAR).powi(2);
        }
    }
    let v_dp = (-0.5 * ep).exp();
    let v_dz = (-0.5 * ez).exp();
    let rotate = |phi: f64| Complex64::from_polar(1.0, -phi);

    if opts.overlap == Overlap::Perfect {
        return Ok(InterferenceElement { value: rotate(phase0), phase0, v_dp: 1.0, v_dz: 1.0, dz, stderr: None });
    }
    let f = |delta: Vec3| rotate(pair_phase(ui, uj, &(opts.p_center + delta), opts.content));
    match opts.averaging {
        Averaging::Analytic => {
            if !is_affine(ui) {
                return Err(SimError::Unsupported("closed-form average needs a phase affine in p".into()));
            }
            Ok(InterferenceElement { value: rotate(phase0) * (v_dp * v_dz), phase0, v_dp, v_dz, dz, stderr: None })
        }
        Averaging::GaussHermite { order } => {
            let value = if v_dp == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                gauss_hermite(order)?.expect_3d(state.sigma_p, f) * v_dp
            };
            Ok(InterferenceElement { value, phase0, v_dp, v_dz, dz, stderr: None })
        }
        Averaging::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(SimError::domain("Monte Carlo averaging needs at least one sample"));
            }
            let parts: Vec<ComplexSum> = blocks(samples)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(b, len)| {
                    let mut rng = block_rng(seed, b);
                    let mut acc = ComplexSum::default();
                    for _ in 0..len {
                        let mut d = Vec3::zeros();
                        for a in 0..3 {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            d[a] = z * state.sigma_p[a];
                        }
                        acc.add(f(d));
                    }
                    acc
                })
                .collect();
            let mut total = ComplexSum::default();
            for p in &parts {
                total.merge(p);
            }
            let mean = total.value() / samples as f64;
            // |e^{-i phi}| = 1, so Var(re) + Var(im) = 1 - |mean|^2.
            let var = (1.0 - mean.norm_sqr()).max(0.0);
            let stderr = v_dp * (var / samples as f64).sqrt();
            Ok(InterferenceElement { value: mean * v_dp, phase0, v_dp, v_dz, dz, stderr: Some(stderr) })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairElement {
    pub i: usize,
    pub j: usize,
    pub labels: (String, String),
    pub element: InterferenceElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationResult {
    pub population: f64,
    pub elements: Vec<PairElement>,
}

/// Population of the output port shared by `unitaries`, (1/2)(1 + 2^{-(n-1)} sum_{i<j} 2 Re eta_i eta_j^* E_ij).
pub fn total_population(unitaries: &[PathUnitary], state: &ThermalState, opts: &ElementOptions) -> Result<PopulationResult> {
    if unitaries.is_empty() {
        return Err(SimError::domain("no paths given"));
    }
    let port = unitaries[0].path.final_state;
    if unitaries.iter().any(|u| u.path.final_state != port) {
        return Err(SimError::domain("paths end in different internal states"));
    }
    let mut elements = Vec::new();
    let mut acc = crate::numerics::NeumaierSum::new();
    for i in 0..unitaries.len() {
        for j in i + 1..unitaries.len() {
            let (a, b) = (&unitaries[i], &unitaries[j]);
            let e = interference_element(a, b, state, opts)?;
            acc.add(2.0 * (a.eta * b.eta.conj() * e.value).re);
            elements.push(PairElement { i, j, labels: (a.path.label(), b.path.label()), element: e });
        }
    }
    let n_paths = unitaries.len() as f64;
    let population = 0.5 * (1.0 + acc.value() / n_paths);
    Ok(PopulationResult { population, elements })
}

/// (1/2)(1 + (1/4)[cos phi_l + cos phi_u]).
pub fn closed_paths_probability(phi_lower: f64, phi_upper: f64) -> f64 {
    0.5 * (1.0 + 0.25 * (phi_lower.cos() + phi_upper.cos()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedPopulation {
    pub phi_lower: f64,
    pub phi_upper: f64,
    pub population: f64,
}

/// Ground-port population when only the two closed pairs interfere.
#[allow(clippy::too_many_arguments)]
pub fn closed_paths_population(
    p0: &Vec3,
    delta_p_acc: &Vec3,
    particle: &ParticleSpec,
    dispersion: &Dispersion,
    recoil: &RecoilSpec,
    timing: &TimingSpec,
    laser: &LaserSpec,
    env: &EnvironmentSpec,
) -> Result<ClosedPopulation> {
    let l = closed_pair_phase_for(ClosedPair::Lower, p0, delta_p_acc, particle, dispersion, recoil, timing, laser, env)?;
    let u = closed_pair_phase_for(ClosedPair::Upper, p0, delta_p_acc, particle, dispersion, recoil, timing, laser, env)?;
    Ok(ClosedPopulation { phi_lower: l.total, phi_upper: u.total, population: closed_paths_probability(l.total, u.total) })
}
