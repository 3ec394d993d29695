//! Distribution of the xi1 oscillation frequency over the thermal ensemble and its decay time.
//!
//! Without gravity the closed-pair xi1 phase of an atom with momentum p is
//! mu T [ (|p + k1| - |p|) + (|p + k2| - |p|) ], i.e. a frequency w(p) = 2 mu hbar k x(p)
//! with x(0) = 1.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ThermalState;
use crate::dispersion::{norm_diff, Dispersion};
use crate::error::{Result, SimError};
use crate::model::RecoilSpec;
use crate::numerics::sum::ComplexSum;
use crate::phase::cycle_kicks;
use crate::Vec3;

pub const BINS: usize = 2048;
pub const X_MIN: f64 = -0.1;
pub const X_MAX: f64 = 1.3;

/// Deterministic stratified sample of x(p) with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySamples {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// 2 mu hbar k, rad/s.
    pub omega_unit: f64,
}

fn midpoints(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (i as f64 + 0.5) / n as f64)
}

/// Which momenta of the thermal state are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// One-dimensional spread perpendicular to the recoil.
    #[default]
    Perpendicular,
    /// One-dimensional spread along the recoil.
    Parallel,
    /// The full three-dimensional state.
    Full,
}

/// Samples on a quantile-midpoint grid with `resolution` points per coordinate; the 1-D
/// orientations use `resolution^2` points and isotropic 3-D states the (parallel,
/// perpendicular) reduction.
pub fn frequency_samples(
    state: &ThermalState,
    dispersion: &Dispersion,
    recoil: &RecoilSpec,
    orientation: Orientation,
    resolution: usize,
) -> Result<FrequencySamples> {
    if resolution < 2 {
        return Err(SimError::domain("frequency grid needs at least 2 points per axis"));
    }
    let hk = recoil.hbar_k();
    let (k1, k2) = cycle_kicks(recoil);
    let (e1, e2) = (k1 / hk, k2 / hk);
    let x_of = |p: Vec3| 0.5 * (norm_diff(&p, &e1) + norm_diff(&p, &e2));
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let omega_unit = 2.0 * dispersion.lin_coeff() * recoil.k_mag;
    let mut x = Vec::new();
    let dir = recoil.direction;
    let perp = dir.cross(&if dir.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    if orientation != Orientation::Full {
        let axis = if orientation == Orientation::Parallel { dir } else { perp };
        let s = state.sigma_along(&axis) / hk;
        x = midpoints(resolution * resolution).map(|u| x_of(axis * (s * std_normal.inverse_cdf(u)))).collect();
    } else if state.is_isotropic() {
        let s = state.sigma_p[0] / hk;
        let par: Vec<f64> = midpoints(resolution).map(|u| s * std_normal.inverse_cdf(u)).collect();
        let rad: Vec<f64> = midpoints(resolution).map(|u| s * (-2.0 * (1.0 - u).ln()).sqrt()).collect();
        x.reserve(resolution * resolution);
        for &a in &par {
            for &r in &rad {
                x.push(x_of(dir * a + perp * r));
            }
        }
    } else {
        let n = ((resolution * resolution) as f64).cbrt().ceil() as usize;
        let q: Vec<f64> = midpoints(n).map(|u| std_normal.inverse_cdf(u)).collect();
        let s: Vec<f64> = state.sigma_p.iter().map(|v| v / hk).collect();
        for &a in &q {
            for &b in &q {
                for &c in &q {
                    x.push(x_of(Vec3::new(s[0] * a, s[1] * b, s[2] * c)));
                }
            }
        }
    }
    let w = vec![1.0 / x.len() as f64; x.len()];
    Ok(FrequencySamples { x, w, omega_unit })
}

impl FrequencySamples {
    /// |<exp(i w(p) T)>|.
    pub fn envelope(&self, t: f64) -> f64 {
        const CHUNK: usize = 1 << 16;
        let parts: Vec<ComplexSum> = self
            .x
            .par_chunks(CHUNK)
            .zip(self.w.par_chunks(CHUNK))
            .map(|(xs, ws)| {
                let mut acc = ComplexSum::default();
                for (x, w) in xs.iter().zip(ws) {
                    acc.add(Complex64::from_polar(*w, self.omega_unit * x * t));
                }
                acc
            })
            .collect();
        let mut total = ComplexSum::default();
        for p in &parts {
            total.merge(p);
        }
        total.value().norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDistribution {
    /// Bin centres in units of 2 mu hbar k.
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    /// Probability mass outside the binned range.
    pub outside: f64,
    /// 2 mu hbar k, rad/s.
    pub omega_unit: f64,
}

impl FrequencyDistribution {
    pub fn bin_width(&self) -> f64 {
        (X_MAX - X_MIN) / BINS as f64
    }

    /// Probability mass with x in [lo, hi), by whole bins.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let h = self.bin_width();
        self.x.iter().zip(&self.density).filter(|(x, _)| **x >= lo && **x < hi).map(|(_, d)| d * h).sum()
    }
}

pub fn frequency_distribution(
    state: &ThermalState,
    dispersion: &Dispersion,
    recoil: &RecoilSpec,
    orientation: Orientation,
) -> Result<FrequencyDistribution> {
    let s = frequency_samples(state, dispersion, recoil, orientation, 1000)?;
    let h = (X_MAX - X_MIN) / BINS as f64;
    let mut mass = vec![0.0; BINS];
    let mut outside = 0.0;
    for (x, w) in s.x.iter().zip(&s.w) {
        let b = ((x - X_MIN) / h).floor();
        if b >= 0.0 && (b as usize) < BINS {
            mass[b as usize] += w;
        } else {
            outside += w;
        }
    }
    Ok(FrequencyDistribution {
        x: (0..BINS).map(|i| X_MIN + (i as f64 + 0.5) * h).collect(),
        density: mass.iter().map(|m| m / h).collect(),
        outside,
        omega_unit: s.omega_unit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T2Envelope {
    pub t: Vec<f64>,
    pub envelope: Vec<f64>,
    /// First 1/e crossing, or the last grid time when `lower_bound` is set.
    pub t2: f64,
    pub lower_bound: bool,
}

const INV_E: f64 = 0.367_879_441_171_442_33;

fn first_crossing(t: &[f64], env: &[f64]) -> Option<usize> {
    let _ = t;
    env.iter().position(|&e| e < INV_E)
}

/// Envelope of the full 3-D thermal state on `t_grid`.
pub fn t2_envelope(state: &ThermalState, dispersion: &Dispersion, recoil: &RecoilSpec, t_grid: &[f64]) -> Result<T2Envelope> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SimError::domain("time grid must be non-empty and strictly increasing"));
    }
    let s = frequency_samples(state, dispersion, recoil, Orientation::Full, 1000)?;
    let envelope: Vec<f64> = t_grid.iter().map(|&t| s.envelope(t)).collect();
    let (t2, lower_bound) = match first_crossing(t_grid, &envelope) {
        Some(0) => (t_grid[0], false),
        Some(i) => {
            let (t0, t1) = (t_grid[i - 1], t_grid[i]);
            let (e0, e1) = (envelope[i - 1], envelope[i]);
            (t0 + (e0 - INV_E) / (e0 - e1) * (t1 - t0), false)
        }
        None => (*t_grid.last().unwrap(), true),
    };
    Ok(T2Envelope { t: t_grid.to_vec(), envelope, t2, lower_bound })
}

/// T2 on an automatic logarithmic grid with the crossing refined by bisection.
pub fn t2_estimate(state: &ThermalState, dispersion: &Dispersion, recoil: &RecoilSpec) -> Result<T2Envelope> {
    let s = frequency_samples(state, dispersion, recoil, Orientation::Full, 1000)?;
    if s.omega_unit == 0.0 {
        return Err(SimError::domain("xi1 frequency scale is zero; the envelope never decays"));
    }
    let sig = state.sigma_along(&recoil.direction) / recoil.hbar_k();
    let span = 400.0 * sig.max(1.0 / sig.max(1e-300)).max(1.0);
    let n = 160;
    let (lo, hi) = (1e-2f64.ln(), span.ln());
    let t: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp() / s.omega_unit.abs()).collect();
    let envelope: Vec<f64> = t.iter().map(|&x| s.envelope(x)).collect();
    let Some(i) = first_crossing(&t, &envelope) else {
        return Ok(T2Envelope { t2: *t.last().unwrap(), t, envelope, lower_bound: true });
    };
    let (mut a, mut b) = (t[i.saturating_sub(1)], t[i]);
    for _ in 0..40 {
        let m = (a * b).sqrt();
        if s.envelope(m) < INV_E {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(T2Envelope { t, envelope, t2: (a * b).sqrt(), lower_bound: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR;
    use crate::dispersion::DispersionParams;

    fn state(mass: f64, sigma_tilde: f64, k: f64) -> ThermalState {
        ThermalState::from_sigma_p(mass, [sigma_tilde * HBAR * k; 3], 1.0).unwrap()
    }

    fn dist(sigma_tilde: f64) -> FrequencyDistribution {
        let r = RecoilSpec::along_z(1.9e7);
        let d = Dispersion::new(1e-20, DispersionParams::new(1.0, 0.0));
        frequency_distribution(&state(1e-20, sigma_tilde, 1.9e7), &d, &r, Orientation::Perpendicular).unwrap()
    }

    #[test]
    fn regimes() {
        let cold = dist(1e-3);
        assert!(cold.mass_between(0.99, 1.01) > 0.99);
        let hot = dist(1e3);
        assert!(hot.mass_between(-0.1, 0.05) > 0.9);
        let mid = dist(1.0);
        let lo = mid.mass_between(0.0, 0.5);
        let hi = mid.mass_between(0.5, 1.0);
        assert!(lo > 0.2 && hi > 0.2, "{lo} {hi}");
        let par = frequency_distribution(&state(1e-20, 1.0, 1.9e7), &Dispersion::new(1e-20, DispersionParams::new(1.0, 0.0)), &RecoilSpec::along_z(1.9e7), Orientation::Parallel).unwrap();
        // x = 1 - |p~| inside the recoil, zero outside.
        assert!((par.mass_between(-0.1, 0.001) - 0.3173).abs() < 2e-3);
        for d in [&cold, &hot, &mid, &par] {
            let total: f64 = d.density.iter().sum::<f64>() * d.bin_width() + d.outside;
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn t2_scales_inverse_with_mass() {
        let r = RecoilSpec::along_z(1.9e7);
        let t2 = |m: f64| {
            let d = Dispersion::new(m, DispersionParams::new(1.0, 0.0));
            t2_estimate(&state(m, 30.0, 1.9e7), &d, &r).unwrap().t2
        };
        let a = t2(1e-21);
        let b = t2(4e-21);
        assert!((a / b / 4.0 - 1.0).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn grid_crossing_and_lower_bound() {
        let r = RecoilSpec::along_z(1.9e7);
        let d = Dispersion::new(1e-21, DispersionParams::new(1.0, 0.0));
        let s = state(1e-21, 30.0, 1.9e7);
        let est = t2_estimate(&s, &d, &r).unwrap();
        let grid: Vec<f64> = (1..200).map(|i| est.t2 * i as f64 / 100.0).collect();
        let e = t2_envelope(&s, &d, &r, &grid).unwrap();
        assert!(!e.lower_bound);
        assert!((e.t2 / est.t2 - 1.0).abs() < 0.02);
        let short = t2_envelope(&s, &d, &r, &grid[..50]).unwrap();
        assert!(short.lower_bound);
        assert!(t2_envelope(&s, &d, &r, &[2.0, 1.0]).is_err());
    }
}
