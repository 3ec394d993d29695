//! Momentum-inversion configurations that keep the full xi1 phase under gravity and
//! thermal motion.
//!
//! In the gravity-driven scheme the particle starts with a momentum parallel to the first
//! recoil, gravity (opposing that recoil) decelerates it during the gap, and the second
//! cycle runs with the momentum anti-parallel to the first recoil. The orthogonal scheme
//! instead lets a perpendicular gravity rotate the momentum by about pi/2.

use serde::{Deserialize, Serialize};

use crate::dispersion::{Dispersion, EnergyTerms};
use crate::error::{Result, SimError};
use crate::model::{DimensionlessGroups, EnvironmentSpec, LaserSpec, ParticleSpec, RecoilSpec, TimingSpec};
use crate::numerics::gk::QuadOptions;
use crate::paths::{build_unitaries, enumerate_paths, Internal, PathUnitary, PhaseContext, Xi1Model};
use crate::phase::{cycle_kicks, xi1_phase_kicks, MomentumSchedule};
use crate::thermal::{interference_element, total_population, ElementOptions, ThermalState};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryGeometry {
    /// Gravity anti-parallel to the first recoil inverts the momentum during the gap.
    #[default]
    Parallel,
    /// Gravity perpendicular to the recoil rotates the momentum by about pi/2.
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryDesign {
    pub geometry: RecoveryGeometry,
    /// Initial momentum at t0.
    pub p1: Vec3,
    /// Momentum at the start of the second cycle.
    pub p2: Vec3,
    pub tau: f64,
    pub zeta: f64,
    /// Parallel initial momentum in units of hbar k.
    pub p_tilde_z: f64,
    pub warnings: Vec<String>,
}

/// Gravity-driven inversion: p~_z0 = m g_par T / (hbar k) + (1 + zeta sqrt2) sigma~ and
/// tau = (p_z(t1) + zeta sqrt2 sigma) / (m g_par), so that p_z(t2) = -zeta sqrt2 sigma.
///
/// The gravity term equals x T~ when xi1 = 1 and g is along k.
pub fn design_recovery(
    groups: &DimensionlessGroups,
    zeta: f64,
    big_t: f64,
    particle: &ParticleSpec,
    recoil: &RecoilSpec,
    env: &EnvironmentSpec,
) -> Result<RecoveryDesign> {
    if !(zeta >= 0.0) || !(big_t > 0.0) {
        return Err(SimError::domain(format!("need zeta >= 0 and T > 0 (zeta {zeta}, T {big_t})")));
    }
    let m = particle.mass;
    let hk = recoil.hbar_k();
    let khat = recoil.direction;
    let g_par = env.g_vec.dot(&khat);
    if !(g_par > 0.0) {
        return Err(SimError::domain("gravity must oppose the first recoil (g_vec . k > 0) for the inversion scheme"));
    }
    let sigma = groups.sigma_tilde * hk;
    let margin = zeta * std::f64::consts::SQRT_2 * sigma;
    let p_tilde_z = m * g_par * big_t / hk + (1.0 + zeta * std::f64::consts::SQRT_2) * groups.sigma_tilde;
    let p1 = khat * (p_tilde_z * hk);
    let p_t1 = (p1 - env.g_vec * (m * big_t)).dot(&khat);
    let tau = (p_t1 + margin) / (m * g_par);
    let p2 = p1 - env.g_vec * (m * (big_t + tau));
    let mut warnings = Vec::new();
    if tau > 10.0 * big_t {
        warnings.push(format!(
            "thermal spread exceeds the gravitational momentum gain; the gap tau = {tau:.3e} s is much longer than T = {big_t:.3e} s"
        ));
    }
    Ok(RecoveryDesign { geometry: RecoveryGeometry::Parallel, p1, p2, tau, zeta, p_tilde_z, warnings })
}

/// Perpendicular-gravity scheme: a parallel start P = (1 + zeta sqrt2) sigma + zeta (hbar k + m g T)
/// and a gap long enough that the perpendicular momentum reaches zeta^2 P.
pub fn design_orthogonal(
    sigma_tilde: f64,
    zeta: f64,
    big_t: f64,
    particle: &ParticleSpec,
    recoil: &RecoilSpec,
    env: &EnvironmentSpec,
) -> Result<RecoveryDesign> {
    if !(zeta >= 1.0) || !(big_t > 0.0) {
        return Err(SimError::domain(format!("need zeta >= 1 and T > 0 (zeta {zeta}, T {big_t})")));
    }
    let m = particle.mass;
    let hk = recoil.hbar_k();
    let khat = recoil.direction;
    let g = env.g_vec.norm();
    if g == 0.0 || env.g_vec.dot(&khat).abs() > 1e-9 * g {
        return Err(SimError::domain("the orthogonal scheme needs gravity perpendicular to the recoil"));
    }
    let big_p = (1.0 + zeta * std::f64::consts::SQRT_2) * sigma_tilde * hk + zeta * (hk + m * g * big_t);
    let tau = (zeta * zeta * big_p / (m * g) - big_t).max(0.0);
    let p1 = khat * big_p;
    let p2 = p1 - env.g_vec * (m * (big_t + tau));
    let mut warnings = Vec::new();
    if tau > 10.0 * big_t {
        warnings.push(format!("gap tau = {tau:.3e} s is much longer than T = {big_t:.3e} s"));
    }
    Ok(RecoveryDesign { geometry: RecoveryGeometry::Orthogonal, p1, p2, tau, zeta, p_tilde_z: big_p / hk, warnings })
}

/// Directions of the static cycle momenta relative to the first recoil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceGeometry {
    ParallelParallel,
    ParallelAntiparallel,
    AntiparallelAntiparallel,
    Orthogonal,
}

/// Exact xi1 phase for static cycle momenta, in units of 2 mu hbar k T.
pub fn stability_phase_surface(
    p1_mag: f64,
    p2_mag: f64,
    geometry: SurfaceGeometry,
    dispersion: &Dispersion,
    recoil: &RecoilSpec,
    big_t: f64,
) -> Result<f64> {
    if !(p1_mag >= 0.0) || !(p2_mag >= 0.0) {
        return Err(SimError::domain("momentum magnitudes must be >= 0"));
    }
    if dispersion.mu == 0.0 {
        return Err(SimError::domain("the phase surface is normalized by mu and needs xi1 != 0"));
    }
    let k = recoil.direction;
    let perp = k.cross(&if k.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    let (d1, d2) = match geometry {
        SurfaceGeometry::ParallelParallel => (k, k),
        SurfaceGeometry::ParallelAntiparallel => (k, -k),
        SurfaceGeometry::AntiparallelAntiparallel => (-k, -k),
        SurfaceGeometry::Orthogonal => (k, perp),
    };
    let phi = static_xi1_phase(&(d1 * p1_mag), &(d2 * p2_mag), dispersion, recoil, big_t)?;
    Ok(phi / (2.0 * dispersion.mu * recoil.hbar_k() * big_t))
}

/// Exact xi1 phase of the lower closed pair with constant momenta in each cycle.
pub fn static_xi1_phase(p1: &Vec3, p2: &Vec3, dispersion: &Dispersion, recoil: &RecoilSpec, big_t: f64) -> Result<f64> {
    let s1 = MomentumSchedule::free_fall(*p1, Vec3::zeros(), 0.0, big_t);
    let s2 = MomentumSchedule::free_fall(*p2, Vec3::zeros(), 0.0, big_t);
    let (k1, k2) = cycle_kicks(recoil);
    let d = dispersion.with_terms(EnergyTerms::LINEAR);
    xi1_phase_kicks(&s1, &s2, &k1, &k2, &d, &QuadOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    Xi1Only,
    WithZeroOrder,
    ClosedPaths,
    AllPaths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySetup {
    pub particle: ParticleSpec,
    pub dispersion: Dispersion,
    pub recoil: RecoilSpec,
    pub env: EnvironmentSpec,
    pub laser: LaserSpec,
    pub state: ThermalState,
    pub zeta: f64,
    pub geometry: RecoveryGeometry,
    /// false runs the non-adjusted configuration with tau = 0 and p1 = 0.
    pub adjusted: bool,
    pub xi1_model: Xi1Model,
}

impl RecoverySetup {
    pub fn design(&self, big_t: f64) -> Result<RecoveryDesign> {
        if !self.adjusted {
            return Ok(RecoveryDesign {
                geometry: self.geometry,
                p1: Vec3::zeros(),
                p2: -self.env.g_vec * (self.particle.mass * big_t),
                tau: 0.0,
                zeta: self.zeta,
                p_tilde_z: 0.0,
                warnings: vec![],
            });
        }
        let sigma_tilde = self.state.sigma_along(&self.recoil.direction) / self.recoil.hbar_k();
        match self.geometry {
            RecoveryGeometry::Parallel => {
                let timing = TimingSpec::new(big_t, 0.0)?;
                let mut groups = crate::model::dimensionless_groups(&self.particle, &self.recoil, &timing, &self.env, &self.dispersion)?;
                groups.sigma_tilde = sigma_tilde;
                design_recovery(&groups, self.zeta, big_t, &self.particle, &self.recoil, &self.env)
            }
            RecoveryGeometry::Orthogonal => design_orthogonal(sigma_tilde, self.zeta, big_t, &self.particle, &self.recoil, &self.env),
        }
    }

    fn unitaries(&self, big_t: f64, tau: f64, terms: EnergyTerms, p_ref: &Vec3) -> Result<Vec<PathUnitary>> {
        let timing = TimingSpec::new(big_t, tau)?;
        let d = self.dispersion.with_terms(terms);
        let ctx = PhaseContext::new(&self.particle, &d, &self.recoil, &timing, &self.laser, &self.env).with_xi1_model(self.xi1_model);
        let paths = enumerate_paths(4, Internal::G, &self.recoil, &timing)?;
        Ok(build_unitaries(&paths, p_ref, &ctx))
    }

    /// 2 mu hbar k, rad/s.
    pub fn omega_xi1(&self) -> f64 {
        2.0 * self.dispersion.mu * self.recoil.hbar_k()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryTrace {
    pub mode: TraceMode,
    pub t: Vec<f64>,
    /// 2 mu hbar k T.
    pub t_tilde: Vec<f64>,
    pub population: Vec<f64>,
    /// (1/8)(1 + cos 2 mu hbar k T), the undisturbed xi1 fringe.
    pub ideal: Vec<f64>,
    /// Modulus of the lower closed-pair element.
    pub visibility: Vec<f64>,
    pub tau: Vec<f64>,
    pub p1: Vec<Vec3>,
}

fn find<'a>(u: &'a [PathUnitary], label: &str) -> &'a PathUnitary {
    u.iter().find(|x| x.path.label() == label).expect("complete path set")
}

pub fn simulate_recovery(setup: &RecoverySetup, t_grid: &[f64], mode: TraceMode, opts: &ElementOptions) -> Result<RecoveryTrace> {
    let mut tr = RecoveryTrace {
        mode,
        t: t_grid.to_vec(),
        t_tilde: vec![],
        population: vec![],
        ideal: vec![],
        visibility: vec![],
        tau: vec![],
        p1: vec![],
    };
    let w = setup.omega_xi1();
    for &big_t in t_grid {
        let design = setup.design(big_t)?;
        let terms = if mode == TraceMode::Xi1Only { EnergyTerms::LINEAR } else { EnergyTerms::ALL };
        let u = setup.unitaries(big_t, design.tau, terms, &design.p1)?;
        let o = ElementOptions { p_center: design.p1, ..*opts };
        let lower = interference_element(find(&u, "0000"), find(&u, "1111"), &setup.state, &o)?;
        let pop = match mode {
            TraceMode::Xi1Only | TraceMode::WithZeroOrder => 0.125 * (1.0 + lower.value.re),
            TraceMode::ClosedPaths => {
                let upper = interference_element(find(&u, "0110"), find(&u, "1001"), &setup.state, &o)?;
                0.5 * (1.0 + 0.25 * (lower.value.re + upper.value.re))
            }
            TraceMode::AllPaths => total_population(&u, &setup.state, &o)?.population,
        };
        tr.t_tilde.push(w * big_t);
        tr.population.push(pop);
        tr.ideal.push(0.125 * (1.0 + (w * big_t).cos()));
        tr.visibility.push(lower.value.norm());
        tr.tau.push(design.tau);
        tr.p1.push(design.p1);
    }
    Ok(tr)
}

/// Zero-order shift k.(p1 - p2) T / m of the gravity-driven scheme.
pub fn zero_order_shift(design: &RecoveryDesign, particle: &ParticleSpec, recoil: &RecoilSpec, big_t: f64) -> f64 {
    recoil.k_vec().dot(&(design.p1 - design.p2)) * big_t / particle.mass
}

/// Phase of a lower closed pair in units of 2 mu hbar k T, used for reporting.
pub fn normalized_xi1(phi: f64, dispersion: &Dispersion, recoil: &RecoilSpec, big_t: f64) -> f64 {
    phi / (2.0 * dispersion.mu * recoil.hbar_k() * big_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{planck_mass, C, HBAR};
    use crate::dispersion::DispersionParams;
    use crate::phase::closed_pair_phase;
    use crate::thermal::Averaging;

    /// Synthetic setup with given sigma~ and x at xi1 = 1.
    fn synthetic(sigma_tilde: f64, x: f64, zeta: f64, adjusted: bool) -> RecoverySetup {
        let particle = ParticleSpec::nanodiamond(5e-9).unwrap();
        let recoil = RecoilSpec::along_z(2e7);
        let g = x * HBAR * recoil.k_mag.powi(2) * C / planck_mass();
        let env = EnvironmentSpec::default().with_gravity(Vec3::new(0.0, 0.0, g));
        let dispersion = Dispersion::for_particle(&particle, DispersionParams::new(1.0, 0.0));
        let state = ThermalState::from_sigma_p(particle.mass, [sigma_tilde * recoil.hbar_k(); 3], 1.0).unwrap();
        RecoverySetup {
            particle,
            dispersion,
            recoil,
            env,
            laser: LaserSpec::default(),
            state,
            zeta,
            geometry: RecoveryGeometry::Parallel,
            adjusted,
            xi1_model: Xi1Model::Exact { include_gap: false },
        }
    }

    fn t_grid(s: &RecoverySetup, n: usize) -> Vec<f64> {
        let w = s.omega_xi1();
        (1..=n).map(|i| 4.0 * std::f64::consts::PI * i as f64 / n as f64 / w).collect()
    }

    #[test]
    fn design_formula() {
        let s = synthetic(100.0, 5.0, 5.0, true);
        let big_t = 2.0 / s.omega_xi1();
        let d = s.design(big_t).unwrap();
        let want = 5.0 * 2.0 + (1.0 + 5.0 * 2f64.sqrt()) * 100.0;
        assert!((d.p_tilde_z / want - 1.0).abs() < 1e-9, "{} {want}", d.p_tilde_z);
        let hk = s.recoil.hbar_k();
        assert!((d.p2.z / hk + 5.0 * 2f64.sqrt() * 100.0).abs() < 1e-6 * want);
        let z = synthetic(0.0, 5.0, 0.0, true);
        let dz = z.design(big_t).unwrap();
        assert!((dz.p_tilde_z - 10.0).abs() < 1e-9);
        let bad = RecoverySetup { env: s.env.with_gravity(-s.env.g_vec), ..s.clone() };
        assert!(bad.design(big_t).is_err());
    }

    #[test]
    fn nanodiamond_velocity_scale() {
        let p = ParticleSpec::nanodiamond(50e-9).unwrap();
        let recoil = RecoilSpec::along_z(1.9e7);
        let env = EnvironmentSpec::isotropic(1e-3, 2.0 * std::f64::consts::PI).with_gravity(Vec3::new(0.0, 0.0, 9.81));
        let d = Dispersion::for_particle(&p, DispersionParams::new(1.0, 0.0));
        let timing = TimingSpec::new(1e-4, 0.0).unwrap();
        let g = crate::model::dimensionless_groups(&p, &recoil, &timing, &env, &d).unwrap();
        let design = design_recovery(&g, 5.0, 1e-4, &p, &recoil, &env).unwrap();
        let v = design.p1.norm() / p.mass;
        assert!(v > 1e-4 && v < 1e-2, "{v}");
    }

    #[test]
    fn surface_values() {
        let p = ParticleSpec::nanodiamond(50e-9).unwrap();
        let d = Dispersion::for_particle(&p, DispersionParams::new(1.0, 0.0));
        let r = RecoilSpec::along_z(1.9e7);
        let hk = r.hbar_k();
        for mag in [0.0, 0.3, 1.0, 7.0, 1e3, 1e6] {
            let v = stability_phase_surface(mag * hk, mag * hk, SurfaceGeometry::ParallelAntiparallel, &d, &r, 1e-3).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "{mag} {v}");
        }
        let pp = stability_phase_surface(1e4 * hk, 1e4 * hk, SurfaceGeometry::ParallelParallel, &d, &r, 1e-3).unwrap();
        assert!(pp.abs() < 1e-3);
        let zero = stability_phase_surface(0.0, 0.0, SurfaceGeometry::Orthogonal, &d, &r, 1e-3).unwrap();
        assert!((zero - 1.0).abs() < 1e-12);
        let ortho = stability_phase_surface(1e4 * hk, 1e4 * hk, SurfaceGeometry::Orthogonal, &d, &r, 1e-3).unwrap();
        assert!((ortho - 0.5).abs() < 1e-3);
    }

    #[test]
    fn zero_order_shift_matches_phase_engine() {
        let s = synthetic(10.0, 5.0, 2.0, true);
        let big_t = 1.0 / s.omega_xi1();
        let d = s.design(big_t).unwrap();
        let timing = TimingSpec::new(big_t, d.tau).unwrap();
        let kin = s.dispersion.with_terms(EnergyTerms::KINETIC);
        let r = closed_pair_phase(&d.p1, &s.particle, &kin, &s.recoil, &timing, &s.laser, &s.env).unwrap();
        let shift = zero_order_shift(&d, &s.particle, &s.recoil, big_t);
        assert!((r.gravity / shift - 1.0).abs() < 1e-9, "{} {shift}", r.gravity);
    }

    #[test]
    fn recovery_restores_fringes() {
        let opts = ElementOptions { averaging: Averaging::GaussHermite { order: 24 }, ..Default::default() };
        let s = synthetic(100.0, 5.0, 5.0, true);
        let grid = t_grid(&s, 24);
        let tr = simulate_recovery(&s, &grid, TraceMode::Xi1Only, &opts).unwrap();
        assert!(tr.visibility.iter().all(|&v| v >= 0.9), "{:?}", tr.visibility);
        // Residual perpendicular spread lowers the frequency by about 2% (p_par ~ 7 sigma).
        for (p, i) in tr.population.iter().zip(&tr.ideal) {
            assert!((p - i).abs() < 0.03, "{p} {i}");
        }
        let normal = synthetic(100.0, 5.0, 5.0, false);
        let nt = simulate_recovery(&normal, &grid, TraceMode::Xi1Only, &opts).unwrap();
        // Without inversion the phase stays small and the trace never reaches a dark fringe.
        let min = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min(&tr.population) < 0.01);
        assert!(min(&nt.population) > 0.1, "{}", min(&nt.population));
    }

    #[test]
    fn visibility_monotone_in_zeta() {
        let mut last = 0.0;
        for zeta in [1.0, 2.0, 5.0] {
            let s = synthetic(100.0, 5.0, zeta, true);
            let big_t = 4.0 * std::f64::consts::PI / s.omega_xi1();
            let opts = ElementOptions { averaging: Averaging::MonteCarlo { samples: 20_000, seed: 3 }, ..Default::default() };
            let tr = simulate_recovery(&s, &[big_t], TraceMode::Xi1Only, &opts).unwrap();
            let v = tr.visibility[0];
            let se = (1.0 / 20_000f64).sqrt();
            assert!(v + 3.0 * se >= last, "{zeta} {v} {last}");
            last = v;
        }
    }
}
