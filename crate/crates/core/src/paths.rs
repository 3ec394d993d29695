//! Enumeration of the 2^(n-1) paths per output port of the four-pulse interferometer.
//!
//! Every path is described relative to the kick-free free-fall path seeded with the same
//! operator momentum, which keeps phases of heavy particles at a manageable size. All
//! kicks are along the recoil axis, so momentum offsets are integer multiples of hbar k.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::dispersion::{Dispersion, EnergyTerms};
use crate::error::{Result, SimError};
use crate::model::{EnvironmentSpec, LaserSpec, ParticleSpec, RecoilSpec, TimingSpec};
use crate::numerics::gk::{integrate_adaptive, QuadOptions};
use crate::numerics::segment::{abs_linear_integral, abs_linear_integral_diff};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Internal {
    G,
    E,
}

impl Internal {
    fn flip(self) -> Self {
        match self {
            Internal::G => Internal::E,
            Internal::E => Internal::G,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    /// Transition (true) or not at each pulse.
    pub bits: [bool; 4],
    /// Internal state before the first pulse and after each pulse.
    pub states: [Internal; 5],
    /// Kick at each pulse in units of hbar k along the recoil direction.
    pub kicks: [i32; 4],
    /// Cumulative offset after each pulse; entries 0..3 cover the three segments, entry 3 is p_f.
    pub offsets: [i32; 4],
    pub kick_schedule: Vec<(f64, Vec3)>,
    pub inversions: u32,
    pub final_state: Internal,
}

impl Path {
    pub fn label(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn eta(&self) -> Complex64 {
        match self.inversions % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        }
    }
}

/// Direction sign of the recoil of each pulse.
pub fn pulse_signs(recoil: &RecoilSpec) -> [i32; 4] {
    let s = if recoil.reverse_second_cycle { -1 } else { 1 };
    [1, 1, s, s]
}

pub fn enumerate_paths(n_pulses: usize, final_state: Internal, recoil: &RecoilSpec, timing: &TimingSpec) -> Result<Vec<Path>> {
    if n_pulses != 4 {
        return Err(SimError::Unsupported(format!("only the four-pulse geometry is enumerated, got {n_pulses}")));
    }
    let signs = pulse_signs(recoil);
    let epochs = timing.epochs();
    let mut out = Vec::with_capacity(8);
    for code in 0u8..16 {
        let bits = [code & 8 != 0, code & 4 != 0, code & 2 != 0, code & 1 != 0];
        let mut states = [Internal::G; 5];
        let mut kicks = [0; 4];
        let mut offsets = [0; 4];
        let mut schedule = Vec::new();
        let mut acc = 0;
        for i in 0..4 {
            let before = states[i];
            states[i + 1] = if bits[i] { before.flip() } else { before };
            if bits[i] {
                kicks[i] = match before {
                    Internal::G => signs[i],
                    Internal::E => -signs[i],
                };
                schedule.push((epochs[i], recoil.kick() * kicks[i] as f64));
            }
            acc += kicks[i];
            offsets[i] = acc;
        }
        if states[4] != final_state {
            continue;
        }
        out.push(Path {
            bits,
            states,
            kicks,
            offsets,
            kick_schedule: schedule,
            inversions: bits.iter().filter(|&&b| b).count() as u32,
            final_state,
        });
    }
    Ok(out)
}

/// How the xi1 (linear) part of the path phases is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum Xi1Model {
    /// Exact |p| integrals along each path; the gap between cycles is optional.
    Exact { include_gap: bool },
    /// Large momenta parallel to k in cycle one and anti-parallel in cycle two.
    Stability,
    /// Cycle one parallel to k, cycle two perpendicular to it.
    Orthogonal,
}

impl Default for Xi1Model {
    fn default() -> Self {
        Xi1Model::Exact { include_gap: false }
    }
}

/// Everything shared by the path unitaries of one interferometer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseContext {
    pub dispersion: Dispersion,
    pub recoil: RecoilSpec,
    pub timing: TimingSpec,
    pub laser_phases: [f64; 4],
    pub force: Vec3,
    /// Momentum transfer common to all paths at the start of the gap.
    pub delta_p_acc: Vec3,
    pub xi1_model: Xi1Model,
}

impl PhaseContext {
    pub fn new(
        particle: &ParticleSpec,
        dispersion: &Dispersion,
        recoil: &RecoilSpec,
        timing: &TimingSpec,
        laser: &LaserSpec,
        env: &EnvironmentSpec,
    ) -> Self {
        PhaseContext {
            dispersion: *dispersion,
            recoil: *recoil,
            timing: *timing,
            laser_phases: laser.pulse_phases(timing),
            force: -env.g_vec * particle.mass,
            delta_p_acc: Vec3::zeros(),
            xi1_model: Xi1Model::default(),
        }
    }

    pub fn with_xi1_model(mut self, model: Xi1Model) -> Self {
        self.xi1_model = model;
        self
    }

    /// (start, duration, reference momentum at start) for the three segments.
    #[inline]
    pub fn reference_segments(&self, p: &Vec3) -> [(f64, f64, Vec3); 3] {
        let t = &self.timing;
        let big_t = t.big_t;
        let s1 = p + self.force * big_t + self.delta_p_acc;
        let s2 = p + self.force * (big_t + t.tau) + self.delta_p_acc;
        [(t.t0, big_t, *p), (t.t1(), t.tau, s1), (t.t2(), big_t, s2)]
    }

    /// Integral over all segments of (p_ref(t) - p) dt.
    pub fn reference_drift_integral(&self) -> Vec3 {
        let segs = self.reference_segments(&Vec3::zeros());
        segs.iter().map(|(_, dt, p)| p * *dt + self.force * (0.5 * dt * dt)).sum()
    }

    fn linear_on_segment(&self, seg: usize) -> bool {
        match self.xi1_model {
            Xi1Model::Exact { include_gap } => seg != 1 || include_gap,
            _ => false,
        }
    }

    fn kick_unit(&self) -> Vec3 {
        self.recoil.kick()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathUnitary {
    pub path: Path,
    pub p_f: Vec3,
    /// Momentum offset from the kick-free path on each of the three segments.
    pub offsets: [Vec3; 3],
    /// Final position offset from the kick-free path, hbar grad phi at the reference momentum.
    pub z_f: Vec3,
    pub eta: Complex64,
    /// Laser contribution to the phase.
    pub laser_phase: f64,
    /// Phase constant of the idealized xi1 models.
    pub xi1_constant: f64,
    pub ctx: PhaseContext,
}

pub fn path_unitary(path: &Path, p_ref: &Vec3, ctx: &PhaseContext) -> PathUnitary {
    let unit = ctx.kick_unit();
    let offsets = [
        unit * path.offsets[0] as f64,
        unit * path.offsets[1] as f64,
        unit * path.offsets[2] as f64,
    ];
    let mut laser_phase = 0.0;
    for i in 0..4 {
        if path.bits[i] {
            match path.states[i] {
                Internal::G => laser_phase -= ctx.laser_phases[i],
                Internal::E => laser_phase += ctx.laser_phases[i],
            }
        }
    }
    let hk_t = ctx.recoil.hbar_k() * ctx.timing.big_t;
    let xi1_constant = ctx.dispersion.lin_coeff() / HBAR
        * match ctx.xi1_model {
            Xi1Model::Exact { .. } => 0.0,
            Xi1Model::Stability => hk_t * (path.offsets[0] - path.offsets[2]) as f64,
            Xi1Model::Orthogonal => hk_t * path.offsets[0] as f64,
        };
    let mut u = PathUnitary {
        path: path.clone(),
        p_f: unit * path.offsets[3] as f64,
        offsets,
        z_f: Vec3::zeros(),
        eta: path.eta(),
        laser_phase,
        xi1_constant,
        ctx: *ctx,
    };
    u.z_f = u.z_f_finite_difference(p_ref);
    u
}

impl PathUnitary {
    /// Quadratic-coefficient moments: phase = alpha + beta . p relative to the kick-free path.
    #[inline]
    pub fn quad_affine(&self) -> (f64, Vec3) {
        let c = self.ctx.dispersion.quad_coeff();
        let segs = self.ctx.reference_segments(&Vec3::zeros());
        let mut alpha = 0.0;
        let mut beta = Vec3::zeros();
        for (s, (_, dt, p0)) in segs.iter().enumerate() {
            let k = &self.offsets[s];
            let drift = p0 * *dt + self.ctx.force * (0.5 * dt * dt);
            alpha += c * (2.0 * k.dot(&drift) + k.norm_squared() * dt);
            beta += k * (2.0 * c * dt);
        }
        (alpha / HBAR, beta / HBAR)
    }

    /// Classical final position offset from the quadratic part of the dispersion.
    pub fn z_classical(&self) -> Vec3 {
        self.quad_affine().1 * HBAR
    }

    /// Linear-term phase mu sum_s int |p_ref + offset| dt on the included segments.
    #[inline]
    pub fn xi1_absolute(&self, p: &Vec3) -> f64 {
        let a = self.ctx.dispersion.lin_coeff();
        if a == 0.0 {
            return 0.0;
        }
        match self.ctx.xi1_model {
            Xi1Model::Exact { .. } => {
                let segs = self.ctx.reference_segments(p);
                let mut acc = 0.0;
                for (s, (_, dt, p0)) in segs.iter().enumerate() {
                    if self.ctx.linear_on_segment(s) {
                        acc += abs_linear_integral(&(p0 + self.offsets[s]), &self.ctx.force, *dt);
                    }
                }
                a * acc / HBAR
            }
            _ => self.xi1_constant,
        }
    }

    /// Linear-term phase of the kick-free path.
    pub fn xi1_reference(&self, p: &Vec3) -> f64 {
        let a = self.ctx.dispersion.lin_coeff();
        if a == 0.0 {
            return 0.0;
        }
        match self.ctx.xi1_model {
            Xi1Model::Exact { .. } => {
                let segs = self.ctx.reference_segments(p);
                let mut acc = 0.0;
                for (s, (_, dt, p0)) in segs.iter().enumerate() {
                    if self.ctx.linear_on_segment(s) {
                        acc += abs_linear_integral(p0, &self.ctx.force, *dt);
                    }
                }
                a * acc / HBAR
            }
            _ => 0.0,
        }
    }

    /// xi1_absolute(p) - other.xi1_absolute(p_other), evaluated segment by segment as a difference.
    pub fn xi1_difference(&self, p: &Vec3, other: &PathUnitary, p_other: &Vec3) -> f64 {
        self.xi1_exact_difference(p, &self.offsets, p_other, &other.offsets)
            .unwrap_or(self.xi1_constant - other.xi1_constant)
    }

    /// Linear-term phase relative to the kick-free path.
    pub fn xi1_relative(&self, p: &Vec3) -> f64 {
        self.xi1_exact_difference(p, &self.offsets, p, &[Vec3::zeros(); 3]).unwrap_or(self.xi1_constant)
    }

    fn xi1_exact_difference(&self, p1: &Vec3, k1: &[Vec3; 3], p2: &Vec3, k2: &[Vec3; 3]) -> Option<f64> {
        let a = self.ctx.dispersion.lin_coeff();
        if !matches!(self.ctx.xi1_model, Xi1Model::Exact { .. }) {
            return None;
        }
        if a == 0.0 {
            return Some(0.0);
        }
        let s1 = self.ctx.reference_segments(p1);
        let s2 = self.ctx.reference_segments(p2);
        let mut acc = 0.0;
        for s in 0..3 {
            if self.ctx.linear_on_segment(s) {
                let dt = s1[s].1;
                acc += abs_linear_integral_diff(&(s1[s].2 + k1[s]), &(s2[s].2 + k2[s]), &self.ctx.force, dt);
            }
        }
        Some(a * acc / HBAR)
    }

    /// Phase relative to the kick-free path seeded with the same momentum, including laser terms.
    pub fn phi_relative(&self, p: &Vec3) -> f64 {
        let (alpha, beta) = self.quad_affine();
        alpha + beta.dot(p) + self.xi1_relative(p) + self.laser_phase
    }

    /// Absolute phase (1/hbar) int E(p_path) dt plus laser terms.
    pub fn phi(&self, p: &Vec3) -> f64 {
        self.phi_reference(p) + self.phi_relative(p)
    }

    /// Absolute phase of the kick-free path.
    pub fn phi_reference(&self, p: &Vec3) -> f64 {
        let c = self.ctx.dispersion.quad_coeff();
        let segs = self.ctx.reference_segments(p);
        let f = &self.ctx.force;
        let mut quad = 0.0;
        for (_, dt, p0) in &segs {
            // int |p0 + f t|^2 dt
            quad += p0.norm_squared() * dt + p0.dot(f) * dt * dt + f.norm_squared() * dt.powi(3) / 3.0;
        }
        c * quad / HBAR + self.xi1_reference(p)
    }

    /// Relative phase by adaptive quadrature of E(p_path) - E(p_ref) along each segment.
    pub fn phi_relative_quadrature(&self, p: &Vec3) -> Result<f64> {
        let segs = self.ctx.reference_segments(p);
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 4000 };
        let mut acc = 0.0;
        for (s, (_, dt, p0)) in segs.iter().enumerate() {
            if *dt == 0.0 {
                continue;
            }
            let mut disp = self.ctx.dispersion;
            if !self.ctx.linear_on_segment(s) {
                disp = disp.with_terms(EnergyTerms { linear: false, ..disp.terms });
            }
            let k = self.offsets[s];
            let f = self.ctx.force;
            let mut breaks = vec![];
            for shift in [Vec3::zeros(), k] {
                if let Some(tc) = crate::numerics::segment::closest_approach(&(p0 + shift), &f, *dt) {
                    breaks.push(tc);
                }
            }
            acc += integrate_adaptive(|t| disp.delta_e(&(p0 + f * t), &k) / HBAR, 0.0, *dt, &breaks, &opts)?;
        }
        Ok(acc + self.xi1_constant + self.laser_phase)
    }

    /// hbar grad phi_relative by central differences with one Richardson step.
    pub fn z_f_finite_difference(&self, p_ref: &Vec3) -> Vec3 {
        let h = 1e-3 * self.ctx.recoil.hbar_k();
        let mut out = Vec3::zeros();
        for axis in 0..3 {
            let mut e = Vec3::zeros();
            e[axis] = 1.0;
            let d = |h: f64| (self.phi_relative(&(p_ref + e * h)) - self.phi_relative(&(p_ref - e * h))) / (2.0 * h);
            out[axis] = HBAR * (4.0 * d(0.5 * h) - d(h)) / 3.0;
        }
        out
    }

    /// Final position offset from integrating the group-velocity difference along the path.
    pub fn z_f_velocity(&self, p: &Vec3) -> Result<Vec3> {
        let segs = self.ctx.reference_segments(p);
        let mut out = Vec3::zeros();
        for (s, (_, dt, p0)) in segs.iter().enumerate() {
            if *dt == 0.0 {
                continue;
            }
            let mut disp = self.ctx.dispersion;
            if !self.ctx.linear_on_segment(s) {
                disp = disp.with_terms(EnergyTerms { linear: false, ..disp.terms });
            }
            let k = self.offsets[s];
            let f = self.ctx.force;
            let scale = (2.0 * disp.quad_coeff() * k.norm() + disp.lin_coeff().abs()) * dt;
            let opts = QuadOptions { abs_tol: 1e-14 * scale, rel_tol: 1e-12, max_intervals: 4000 };
            for axis in 0..3 {
                out[axis] += integrate_adaptive(
                    |t| {
                        let q = p0 + f * t;
                        (disp.velocity(&(q + k)) - disp.velocity(&q))[axis]
                    },
                    0.0,
                    *dt,
                    &[],
                    &opts,
                )?;
            }
        }
        Ok(out)
    }
}

pub fn build_unitaries(paths: &[Path], p_ref: &Vec3, ctx: &PhaseContext) -> Vec<PathUnitary> {
    paths.iter().map(|p| path_unitary(p, p_ref, ctx)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPair {
    pub i: usize,
    pub j: usize,
    pub dp: Vec3,
    /// Classical final position separation z_i - z_j.
    pub dz0: Vec3,
    pub closed: bool,
}

pub fn pair_table(unitaries: &[PathUnitary]) -> Vec<PathPair> {
    let mut out = Vec::new();
    for i in 0..unitaries.len() {
        for j in i + 1..unitaries.len() {
            let (a, b) = (&unitaries[i], &unitaries[j]);
            let dz0 = a.z_classical() - b.z_classical();
            let scale = a.z_classical().norm().max(b.z_classical().norm());
            let same_p = a.path.offsets[3] == b.path.offsets[3];
            let closed = same_p && dz0.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE);
            out.push(PathPair { i, j, dp: a.p_f - b.p_f, dz0, closed });
        }
    }
    out
}
