//! Ground-port population traces over a grid of pulse separations T.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Resolved;
use crate::error::{Result, SimError};
use crate::model::TimingSpec;
use crate::paths::{build_unitaries, enumerate_paths, Internal, PathUnitary, PhaseContext};
use crate::thermal::{interference_element, total_population, ElementOptions, ThermalState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    /// Both closed pairs: (1/2)(1 + (1/4) Re[E_lower + E_upper]).
    ClosedPairs,
    /// Lower closed pair alone: (1/8)(1 + Re E_lower).
    LowerPair,
    /// Every pair of the ground-port paths.
    AllPaths,
}

impl std::str::FromStr for TraceMode {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-pairs" => Ok(TraceMode::ClosedPairs),
            "lower-pair" => Ok(TraceMode::LowerPair),
            "all-paths" => Ok(TraceMode::AllPaths),
            _ => Err(SimError::config(format!("unknown trace mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub config_digest: String,
    pub seed: u64,
    pub mode: TraceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub t: Vec<f64>,
    pub p_g: Vec<f64>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn new(t: Vec<f64>, p_g: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        if t.len() != p_g.len() {
            return Err(SimError::domain("trace columns differ in length"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::domain("trace times must be strictly increasing"));
        }
        Ok(Trace { t, p_g, meta })
    }
}

/// n points from t_min to t_max inclusive.
pub fn uniform_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(t_max > t_min) {
        return Err(SimError::domain("grid needs n >= 2 and t_max > t_min"));
    }
    let h = (t_max - t_min) / (n - 1) as f64;
    Ok((0..n).map(|i| t_min + h * i as f64).collect())
}

/// Default sampling: 64 points per shortest period, spanning `periods` of the longest.
pub fn fringe_grid(f_max: f64, f_min: f64, periods: f64) -> Result<Vec<f64>> {
    if !(f_max >= f_min && f_min > 0.0 && periods > 0.0) {
        return Err(SimError::domain("fringe grid needs 0 < f_min <= f_max"));
    }
    let dt = 1.0 / (64.0 * f_max);
    let n = (periods / f_min / dt).round() as usize;
    Ok((0..n).map(|i| dt * (i + 1) as f64).collect())
}

fn by_label<'a>(u: &'a [PathUnitary], l: &str) -> &'a PathUnitary {
    u.iter().find(|x| x.path.label() == l).expect("complete path set")
}

/// (1/2)(1 + (1/4) sum over closed pairs of Re eta_i eta_j^* E_ij).
pub fn closed_pairs_population(u: &[PathUnitary], state: &ThermalState, opts: &ElementOptions, lower_only: bool) -> Result<f64> {
    let mut pairs = vec![("0000", "1111")];
    if !lower_only {
        pairs.push(("0110", "1001"));
    }
    let mut s = 0.0;
    for (a, b) in pairs {
        let (ua, ub) = (by_label(u, a), by_label(u, b));
        let e = interference_element(ua, ub, state, opts)?;
        s += (ua.eta * ub.eta.conj() * e.value).re;
    }
    Ok(if lower_only { 0.125 * (1.0 + s) } else { 0.5 * (1.0 + 0.25 * s) })
}

/// Population at one pulse separation, keeping tau and every other setting of `res`.
pub fn population_at(res: &Resolved, big_t: f64, mode: TraceMode) -> Result<f64> {
    let timing = TimingSpec::new(big_t, res.timing.tau)?;
    let ctx = PhaseContext::new(&res.particle, &res.dispersion, &res.recoil, &timing, &res.laser, &res.env).with_xi1_model(res.xi1_model);
    let paths = enumerate_paths(4, Internal::G, &res.recoil, &timing)?;
    let u = build_unitaries(&paths, &res.options.p_center, &ctx);
    match mode {
        TraceMode::ClosedPairs => closed_pairs_population(&u, &res.state, &res.options, false),
        TraceMode::LowerPair => closed_pairs_population(&u, &res.state, &res.options, true),
        TraceMode::AllPaths => Ok(total_population(&u, &res.state, &res.options)?.population),
    }
}

pub fn interference_trace(res: &Resolved, config_digest: &str, t_grid: &[f64], mode: TraceMode) -> Result<Trace> {
    let p_g = t_grid.par_iter().map(|&t| population_at(res, t, mode)).collect::<Result<Vec<_>>>()?;
    Trace::new(t_grid.to_vec(), p_g, TraceMeta { config_digest: config_digest.to_string(), seed: res.seed, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::config::Config;
    use crate::constants::HBAR;
    use crate::thermal::Averaging;

    #[test]
    fn standard_closed_pairs_fringe() {
        let mut c = Config::default();
        c.dispersion.xi1 = 0.0;
        c.particle.radius_m = Some(5e-9);
        let mut res = c.resolve().unwrap();
        res.options.averaging = Averaging::Analytic;
        let m = res.particle.mass;
        let k = res.recoil.k_mag;
        let grid = uniform_grid(1e-6, 2e-3, 40).unwrap();
        let tr = interference_trace(&res, &c.digest(), &grid, TraceMode::ClosedPairs).unwrap();
        for (t, p) in tr.t.iter().zip(&tr.p_g) {
            let want = 0.5 * (1.0 + 0.25 * 2.0 * (HBAR * k * k / m * t).cos());
            assert!((p - want).abs() < 1e-9, "{t} {p} {want}");
        }
    }

    #[test]
    fn grids() {
        assert!(uniform_grid(1.0, 1.0, 4).is_err());
        let g = fringe_grid(10.0, 5.0, 25.0).unwrap();
        assert_eq!(g.len(), 3200);
        assert!((g[1] - g[0] - 1.0 / 640.0).abs() < 1e-15);
        assert!(Trace::new(vec![1.0, 1.0], vec![0.0, 0.0], TraceMeta { config_digest: String::new(), seed: 0, mode: TraceMode::AllPaths }).is_err());
    }
}
