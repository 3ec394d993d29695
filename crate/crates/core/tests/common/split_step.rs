//! One-dimensional two-level wavefunction propagated by Strang splitting.
//!
//! Kinetic steps are applied in momentum space, the linear gravity potential in position
//! space and the pulses as pointwise beam splitters with e^{+-i(s k z + phi)}. For a quadratic
//! dispersion plus a linear potential the splitting error is a c-number phase common to both
//! internal states, so populations are exact up to the grid.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use simqg_core::HBAR;

pub struct Oracle {
    pub mass: f64,
    /// E(p) = quad p^2.
    pub quad: f64,
    /// Gravity along k; the force is -m g.
    pub g: f64,
    pub k: f64,
    pub signs: [i32; 4],
    pub laser_phases: [f64; 4],
    pub epochs: [f64; 4],
    pub sigma_z: f64,
    pub p0: f64,
    pub n: usize,
    pub length: f64,
    pub steps_per_segment: usize,
}

struct Grid {
    z: Vec<f64>,
    p: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Oracle {
    fn grid(&self) -> Grid {
        let n = self.n;
        let dz = self.length / n as f64;
        let z = (0..n).map(|j| (j as f64 - (n / 2) as f64) * dz).collect();
        let dp = 2.0 * std::f64::consts::PI * HBAR / self.length;
        let p = (0..n).map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dp).collect();
        let mut planner = FftPlanner::new();
        Grid { z, p, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn free(&self, gr: &Grid, psi: &mut [Complex64], dt: f64) {
        if dt == 0.0 {
            return;
        }
        let h = dt / self.steps_per_segment as f64;
        let n = psi.len() as f64;
        let kin: Vec<Complex64> = gr.p.iter().map(|p| Complex64::from_polar(1.0, -self.quad * p * p * h / (2.0 * HBAR))).collect();
        let pot: Vec<Complex64> = gr.z.iter().map(|z| Complex64::from_polar(1.0, -self.mass * self.g * z * h / HBAR)).collect();
        for _ in 0..self.steps_per_segment {
            gr.fwd.process(psi);
            psi.iter_mut().zip(&kin).for_each(|(a, b)| *a *= b);
            gr.inv.process(psi);
            psi.iter_mut().zip(&pot).for_each(|(a, b)| *a *= b / n);
            gr.fwd.process(psi);
            psi.iter_mut().zip(&kin).for_each(|(a, b)| *a *= b);
            gr.inv.process(psi);
            psi.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// Ground-state population after the fourth pulse, starting in g.
    pub fn ground_population(&self) -> f64 {
        let gr = self.grid();
        let dz = self.length / self.n as f64;
        let norm = (2.0 * std::f64::consts::PI * self.sigma_z.powi(2)).powf(-0.25);
        let mut g: Vec<Complex64> = gr
            .z
            .iter()
            .map(|z| Complex64::from_polar(norm * (-z * z / (4.0 * self.sigma_z.powi(2))).exp(), self.p0 * z / HBAR))
            .collect();
        let mut e = vec![Complex64::new(0.0, 0.0); self.n];
        let minus_i = Complex64::new(0.0, -1.0);
        for i in 0..4 {
            if i > 0 {
                let dt = self.epochs[i] - self.epochs[i - 1];
                self.free(&gr, &mut g, dt);
                self.free(&gr, &mut e, dt);
            }
            let s = self.signs[i] as f64;
            for j in 0..self.n {
                let ph = Complex64::from_polar(1.0, s * self.k * gr.z[j] + self.laser_phases[i]);
                let (a, b) = (g[j], e[j]);
                g[j] = (a + minus_i * ph.conj() * b) * FRAC_1_SQRT_2;
                e[j] = (b + minus_i * ph * a) * FRAC_1_SQRT_2;
            }
        }
        g.iter().map(|a| a.norm_sqr()).sum::<f64>() * dz
    }
}
