//! Data behind each reproduced figure and table.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::Config;
use super::output::{fmt, write_tables, Table};
use super::spectrum::{spectrum, Window};
use super::trace::closed_pairs_population;
use crate::bounds::{bound_sweep, phase_frequency_contributions, BoundInputs};
use crate::constants::{planck_mass, C, HBAR, K_B, K_TABLE};
use crate::dispersion::{Dispersion, DispersionParams, EnergyTerms};
use crate::error::{Result, SimError};
use crate::model::{EnvironmentSpec, GasSpec, LaserSpec, ParticleSpec, RecoilSpec, TimingSpec};
use crate::noise::{collisional_visibility, doppler_pulse_visibility, time_error_visibility};
use crate::paths::{build_unitaries, enumerate_paths, Internal, PathUnitary, PhaseContext, Xi1Model};
use crate::phase::{closed_pair_phase, gravity_overdamped_phase};
use crate::stability::{
    simulate_recovery, stability_phase_surface, static_xi1_phase, RecoveryGeometry, RecoverySetup, SurfaceGeometry,
    TraceMode as RecoveryMode,
};
use crate::thermal::{
    frequency_distribution, t2_envelope, t2_estimate, thermal_state, total_population, Averaging, ElementOptions,
    Orientation, Overlap, PhaseContent, ThermalState,
};
use crate::Vec3;

pub const FIGURE_IDS: &[&str] =
    &["2", "3", "4a", "4b", "5", "5c", "6a", "6-table", "7", "8a", "9", "10", "table2", "c1"];

/// Tables plus the parameters recorded in their manifests.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub tables: Vec<Table>,
    pub params: Value,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn xi1_dispersion(p: &ParticleSpec, xi1: f64) -> Dispersion {
    Dispersion::for_particle(p, DispersionParams::new(xi1, 0.0))
}

fn state_from_sigma_tilde(p: &ParticleSpec, recoil: &RecoilSpec, sigma_tilde: f64) -> Result<ThermalState> {
    ThermalState::from_sigma_p(p.mass, [sigma_tilde * recoil.hbar_k(); 3], 2.0 * PI)
}

/// Gravity of the given dimensionless strength x = M_p g / (hbar k^2 c).
fn gravity_for_x(x: f64, recoil: &RecoilSpec) -> f64 {
    x * HBAR * recoil.k_mag.powi(2) * C / planck_mass()
}

fn figure_options(order: usize) -> ElementOptions {
    ElementOptions { averaging: Averaging::GaussHermite { order }, ..Default::default() }
}

fn unitaries(
    p: &ParticleSpec,
    d: &Dispersion,
    r: &RecoilSpec,
    big_t: f64,
    env: &EnvironmentSpec,
    model: Xi1Model,
    p_ref: &Vec3,
) -> Result<Vec<PathUnitary>> {
    let timing = TimingSpec::new(big_t, 0.0)?;
    let ctx = PhaseContext::new(p, d, r, &timing, &LaserSpec::default(), env).with_xi1_model(model);
    Ok(build_unitaries(&enumerate_paths(4, Internal::G, r, &timing)?, p_ref, &ctx))
}

pub fn compute_figure(id: &str, cfg: &Config) -> Result<FigureOutput> {
    let res = cfg.resolve()?;
    match id {
        "2" => fig2(&res.recoil, res.timing.big_t),
        "3" => fig3(&res.recoil),
        "4a" => fig4a(),
        "4b" => fig4b(),
        "5" => fig5(cfg.numerics.quadrature_order.min(32)),
        "5c" => fig5c(cfg.numerics.quadrature_order.min(24)),
        "6a" => fig6a(),
        "6-table" => fig6_table(cfg),
        "7" => fig7(cfg.numerics.quadrature_order.min(24)),
        "8a" => fig8a(cfg.numerics.quadrature_order.min(24)),
        "9" => fig9(),
        "10" => fig10(),
        "table2" => table2(),
        "c1" => fig_c1(),
        other => Err(SimError::config(format!("unknown figure id '{other}' (known: {})", FIGURE_IDS.join(", ")))),
    }
}

fn fig2(recoil: &RecoilSpec, big_t: f64) -> Result<FigureOutput> {
    let mut t = Table::new("fig2_frequencies", &["radius [m]", "mass [kg]", "f_zero [Hz]", "f_xi1 [Hz]", "f_xi2 [Hz]", "max_splitting [m]"]);
    let mut cs = Table::new("fig2_cs", &["mass [kg]", "f_zero [Hz]", "f_xi1 [Hz]", "f_xi2 [Hz]", "max_splitting [m]"]);
    for r in log_grid(1e-9, 100e-9, 41) {
        let p = ParticleSpec::nanodiamond(r)?;
        let f = phase_frequency_contributions(&p, recoil, 1.0, 1.0, big_t);
        t.push_f64(&[r, p.mass, f.f_zero, f.f_xi1, f.f_xi2, f.max_splitting]);
    }
    let p = ParticleSpec::cesium();
    let f = phase_frequency_contributions(&p, recoil, 1.0, 1.0, big_t);
    cs.push_f64(&[p.mass, f.f_zero, f.f_xi1, f.f_xi2, f.max_splitting]);
    Ok(FigureOutput { tables: vec![t, cs], params: json!({"xi1": 1.0, "xi2": 1.0, "k_per_m": recoil.k_mag, "T_s": big_t}) })
}

fn fig3(recoil: &RecoilSpec) -> Result<FigureOutput> {
    let nd = BoundInputs::nanodiamond();
    let csi = BoundInputs::cesium();
    let radii = log_grid(1e-9, 100e-9, 41);
    let s = bound_sweep(&radii, &nd, &csi, recoil)?;
    let cols = [
        "radius [m]", "mass [kg]",
        "xi1_shot_noise [1]", "xi1_laser_frequency [1]", "xi1_mass [1]", "xi1_fine_structure [1]",
        "xi2_shot_noise [1]", "xi2_laser_frequency [1]", "xi2_mass [1]", "xi2_fine_structure [1]",
    ];
    let mut t = Table::new("fig3_bounds", &cols);
    let row = |r: &crate::bounds::BoundRow| {
        vec![
            r.radius.unwrap_or(f64::NAN), r.mass,
            r.shot_noise.xi1, r.laser_frequency.xi1, r.mass_precision.xi1, r.fine_structure.xi1,
            r.shot_noise.xi2, r.laser_frequency.xi2, r.mass_precision.xi2, r.fine_structure.xi2,
        ]
    };
    for r in &s.rows {
        t.push_f64(&row(r));
    }
    let mut cs = Table::new("fig3_cs", &cols);
    cs.push_f64(&row(&s.cesium));
    Ok(FigureOutput {
        tables: vec![t, cs],
        params: json!({
            "nanodiamond_inputs": nd, "cesium_inputs": csi, "k_per_m": recoil.k_mag,
            "prior_cesium_xi2": s.prior_cesium_xi2, "prior_rubidium_xi2": s.prior_rubidium_xi2,
        }),
    })
}

fn fig4a() -> Result<FigureOutput> {
    let p = ParticleSpec::nanodiamond(50e-9)?;
    let r = RecoilSpec::along_z(K_TABLE);
    let d = xi1_dispersion(&p, 1.0);
    let big_t = 1e-4;
    let hk = r.hbar_k();
    let norm = 2.0 * d.mu * hk * big_t;
    let mut t = Table::new("fig4a_phase_vs_momentum", &["p_over_hbar_k [1]", "parallel [1]", "perpendicular [1]", "antiparallel [1]"]);
    for m in log_grid(1e-3, 1e3, 121) {
        let mut row = vec![m];
        for dir in [Vec3::z(), Vec3::x(), -Vec3::z()] {
            let pv = dir * (m * hk);
            row.push(static_xi1_phase(&pv, &pv, &d, &r, big_t)? / norm);
        }
        t.push_f64(&row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"radius_m": 50e-9, "k_per_m": K_TABLE, "T_s": big_t, "normalization": "2 mu hbar k T"}) })
}

fn fig4b() -> Result<FigureOutput> {
    let p = ParticleSpec::nanodiamond(50e-9)?;
    let r = RecoilSpec::along_z(K_TABLE);
    let d = xi1_dispersion(&p, 1.0);
    let sigmas = [0.1, 0.5, 1.0, 2.0, 10.0];
    let dists = sigmas
        .iter()
        .map(|&s| frequency_distribution(&state_from_sigma_tilde(&p, &r, s)?, &d, &r, Orientation::Perpendicular))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["x [1]".to_string()];
    header.extend(sigmas.iter().map(|s| format!("density_sigma_{s} [1]")));
    let mut t = Table { name: "fig4b_frequency_distribution".into(), header, rows: vec![] };
    for i in 0..dists[0].x.len() {
        let mut row = vec![dists[0].x[i]];
        row.extend(dists.iter().map(|d| d.density[i]));
        t.push_f64(&row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"sigma_tilde": sigmas, "orientation": "perpendicular", "x": "omega / (2 mu hbar k)"}) })
}

/// (1/8)(1 + Re E_lower) over a grid of T, thermal state, exact xi1 phase only.
fn lower_pair_xi1(p: &ParticleSpec, r: &RecoilSpec, env: &EnvironmentSpec, state: &ThermalState, grid: &[f64], order: usize) -> Result<Vec<f64>> {
    let d = xi1_dispersion(p, 1.0).with_terms(EnergyTerms::LINEAR);
    let opts = figure_options(order);
    grid.par_iter()
        .map(|&bt| {
            let u = unitaries(p, &d, r, bt, env, Xi1Model::Exact { include_gap: false }, &Vec3::zeros())?;
            closed_pairs_population(&u, state, &opts, true)
        })
        .collect()
}

fn fig5(order: usize) -> Result<FigureOutput> {
    let p = ParticleSpec::nanodiamond(5e-9)?;
    let r = RecoilSpec::along_z(K_TABLE);
    let d = xi1_dispersion(&p, 1.0);
    let w = 2.0 * d.mu * r.hbar_k();
    let sigmas = [0.1, 1.0, 10.0];
    let tt = lin_grid(0.05, 30.0, 200);
    let grid: Vec<f64> = tt.iter().map(|x| x / w).collect();
    let mut header = vec!["t_tilde [1]".to_string()];
    for s in sigmas {
        header.push(format!("pg_sigma_{s} [1]"));
        header.push(format!("envelope_sigma_{s} [1]"));
    }
    let mut cols = Vec::new();
    for s in sigmas {
        let st = state_from_sigma_tilde(&p, &r, s)?;
        cols.push(lower_pair_xi1(&p, &r, &EnvironmentSpec::default(), &st, &grid, order)?);
        cols.push(t2_envelope(&st, &d, &r, &grid)?.envelope);
    }
    let mut t = Table { name: "fig5_thermal_decay".into(), header, rows: vec![] };
    for i in 0..grid.len() {
        let mut row = vec![tt[i]];
        row.extend(cols.iter().map(|c| c[i]));
        t.push_f64(&row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"radius_m": 5e-9, "k_per_m": K_TABLE, "sigma_tilde": sigmas, "gauss_hermite_order": order}) })
}

fn synthetic_setup(sigma_tilde: f64, x: f64, zeta: f64, adjusted: bool) -> Result<RecoverySetup> {
    let particle = ParticleSpec::nanodiamond(5e-9)?;
    let recoil = RecoilSpec::along_z(K_TABLE);
    let env = EnvironmentSpec::default().with_gravity(Vec3::new(0.0, 0.0, gravity_for_x(x, &recoil)));
    let dispersion = xi1_dispersion(&particle, 1.0);
    let state = state_from_sigma_tilde(&particle, &recoil, sigma_tilde)?;
    Ok(RecoverySetup {
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
    })
}

fn fig5c(order: usize) -> Result<FigureOutput> {
    let adjusted = synthetic_setup(100.0, 5.0, 5.0, true)?;
    let normal = synthetic_setup(100.0, 5.0, 5.0, false)?;
    let w = adjusted.omega_xi1();
    let tt = lin_grid(0.05, 4.0 * PI, 120);
    let grid: Vec<f64> = tt.iter().map(|x| x / w).collect();
    let opts = figure_options(order);
    let a = simulate_recovery(&adjusted, &grid, RecoveryMode::Xi1Only, &opts)?;
    let n = simulate_recovery(&normal, &grid, RecoveryMode::Xi1Only, &opts)?;
    let mut t = Table::new("fig5c_recovery", &["t_tilde [1]", "ideal [1]", "recovered [1]", "normal [1]", "visibility [1]", "p_tilde_z [1]"]);
    let hk = adjusted.recoil.hbar_k();
    for i in 0..grid.len() {
        t.push_f64(&[tt[i], a.ideal[i], a.population[i], n.population[i], a.visibility[i], a.p1[i].z / hk]);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"sigma_tilde": 100.0, "x": 5.0, "zeta": 5.0, "gauss_hermite_order": order}) })
}

fn fig6a() -> Result<FigureOutput> {
    let p = ParticleSpec::nanodiamond(5e-9)?;
    let r = RecoilSpec::along_z(K_TABLE);
    let d = xi1_dispersion(&p, 1.0).with_terms(EnergyTerms::LINEAR);
    let w = 2.0 * d.mu * r.hbar_k();
    let xs = [0.1, 1.0, 5.0];
    let mut header = vec!["t_tilde [1]".to_string()];
    for x in xs {
        header.push(format!("phase_norm_x_{x} [1]"));
        header.push(format!("pg_x_{x} [1]"));
        header.push(format!("overdamped_x_{x} [1]"));
    }
    let mut t = Table { name: "fig6a_gravity".into(), header, rows: vec![] };
    for tt in lin_grid(0.05, 20.0, 200) {
        let big_t = tt / w;
        let timing = TimingSpec::new(big_t, 0.0)?;
        let mut row = vec![tt];
        for x in xs {
            // Gravity perpendicular to the recoil.
            let env = EnvironmentSpec::default().with_gravity(Vec3::new(gravity_for_x(x, &r), 0.0, 0.0));
            let phi = closed_pair_phase(&Vec3::zeros(), &p, &d, &r, &timing, &LaserSpec::default(), &env)?.xi1;
            row.extend([phi / tt, 0.125 * (1.0 + phi.cos()), gravity_overdamped_phase(x, tt).unwrap_or(f64::NAN)]);
        }
        t.push_f64(&row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"x": xs, "gravity": "perpendicular to k", "p0": 0.0}) })
}

fn fig6_table(cfg: &Config) -> Result<FigureOutput> {
    let res = cfg.resolve()?;
    let ctx = PhaseContext::new(&res.particle, &res.dispersion, &res.recoil, &res.timing, &res.laser, &res.env).with_xi1_model(res.xi1_model);
    let p0 = res.options.p_center;
    let u = build_unitaries(&enumerate_paths(4, Internal::G, &res.recoil, &res.timing)?, &p0, &ctx);
    let hk = res.recoil.hbar_k();
    let second = &u[1];
    let mut t = Table::new(
        "fig6_paths",
        &["label", "kicks", "p_f_over_hbar_k [1]", "z_f_rel [m]", "phi_rel [rad]", "phi_xi1 [rad]", "eta_re [1]", "eta_im [1]"],
    );
    for x in &u {
        let kicks = x.path.kicks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        let dz = (x.z_f - second.z_f).dot(&res.recoil.direction);
        let xi1 = x.xi1_relative(&p0);
        t.push(vec![
            x.path.label(),
            kicks,
            fmt(x.p_f.dot(&res.recoil.direction) / hk),
            fmt(dz),
            fmt(x.phi_relative(&p0) - second.phi_relative(&p0)),
            fmt(xi1),
            fmt(x.eta.re),
            fmt(x.eta.im),
        ]);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"relative_to": second.path.label()}) })
}

fn fig7(order: usize) -> Result<FigureOutput> {
    let particle = ParticleSpec::nanodiamond(50e-9)?;
    let recoil = RecoilSpec::along_z(K_TABLE);
    let env = EnvironmentSpec::isotropic(1e-3, 2.0 * PI).with_gravity(Vec3::new(0.0, 0.0, 9.81));
    let dispersion = xi1_dispersion(&particle, 1.0);
    let state = thermal_state(&particle, &env)?;
    let base = RecoverySetup {
        particle: particle.clone(),
        dispersion,
        recoil,
        env,
        laser: LaserSpec::default(),
        state,
        zeta: 5.0,
        geometry: RecoveryGeometry::Parallel,
        adjusted: true,
        xi1_model: Xi1Model::Exact { include_gap: false },
    };
    let w = base.omega_xi1();
    let tt = lin_grid(0.05, 8.0 * PI, 160);
    let grid: Vec<f64> = tt.iter().map(|x| x / w).collect();
    let opts = figure_options(order);
    let full = simulate_recovery(&base, &grid, RecoveryMode::WithZeroOrder, &opts)?;
    let xi1 = simulate_recovery(&base, &grid, RecoveryMode::Xi1Only, &opts)?;
    let kin = RecoverySetup { dispersion: xi1_dispersion(&particle, 0.0), ..base.clone() };
    let zero = simulate_recovery(&kin, &grid, RecoveryMode::WithZeroOrder, &opts)?;
    let par = simulate_recovery(&RecoverySetup { adjusted: false, ..base.clone() }, &grid, RecoveryMode::Xi1Only, &opts)?;
    let perp_env = base.env.with_gravity(Vec3::new(9.81, 0.0, 0.0));
    let perp = simulate_recovery(&RecoverySetup { adjusted: false, env: perp_env, ..base.clone() }, &grid, RecoveryMode::Xi1Only, &opts)?;
    let mut t = Table::new(
        "fig7_recovery_50nm",
        &["T [s]", "t_tilde [1]", "zero_order_and_xi1 [1]", "xi1 [1]", "zero_order [1]", "ideal [1]", "normal_g_parallel [1]", "normal_g_perpendicular [1]", "v1 [m/s]", "tau [s]"],
    );
    for i in 0..grid.len() {
        t.push_f64(&[
            grid[i], tt[i], full.population[i], xi1.population[i], zero.population[i], xi1.ideal[i],
            par.population[i], perp.population[i], full.p1[i].norm() / particle.mass, full.tau[i],
        ]);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"radius_m": 50e-9, "temperature_K": 1e-3, "zeta": 5.0, "g": 9.81, "gauss_hermite_order": order}) })
}

fn fig8a(order: usize) -> Result<FigureOutput> {
    let r = RecoilSpec::along_z(K_TABLE);
    let cases = [("cs_4uK", ParticleSpec::cesium(), 4e-6), ("nd50_1mK", ParticleSpec::nanodiamond(50e-9)?, 1e-3)];
    let tt = lin_grid(0.05, 8.0 * PI, 160);
    let mut header = vec!["t_tilde [1]".to_string(), "ideal [1]".to_string()];
    let mut cols = Vec::new();
    for (name, p, temp) in &cases {
        let env = EnvironmentSpec::isotropic(*temp, 2.0 * PI).with_gravity(Vec3::new(9.81, 0.0, 0.0));
        let d = xi1_dispersion(p, 1.0);
        let w = 2.0 * d.mu * r.hbar_k();
        let grid: Vec<f64> = tt.iter().map(|x| x / w).collect();
        let st = thermal_state(p, &env)?;
        cols.push(lower_pair_xi1(p, &r, &env, &st, &grid, order)?);
        header.push(format!("pg_{name} [1]"));
    }
    let mut t = Table { name: "fig8a_gravity_thermal".into(), header, rows: vec![] };
    for i in 0..tt.len() {
        let mut row = vec![tt[i], 0.125 * (1.0 + tt[i].cos())];
        row.extend(cols.iter().map(|c| c[i]));
        t.push_f64(&row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"gravity": "perpendicular to k", "cases": ["Cs 4 uK", "50 nm 1 mK"], "gauss_hermite_order": order}) })
}

/// Traces (i)-(iv): closed pairs, lower pair, all paths with perfect overlap, all paths with
/// gravity and thermal overlap. Returns (T grid per trace, populations, omega_xi1 per trace).
pub fn fig9_traces() -> Result<Vec<(Vec<f64>, Vec<f64>, f64)>> {
    let r = RecoilSpec::along_z(K_TABLE);
    let small = ParticleSpec::nanodiamond(10e-9)?;
    let big = ParticleSpec::nanodiamond(50e-9)?;
    let flat = EnvironmentSpec::isotropic(1e-3, 2.0 * PI);
    let heavy = flat.with_gravity(Vec3::new(0.0, 0.0, 9.81));
    let qg = ElementOptions { averaging: Averaging::Analytic, content: PhaseContent::QgOnly, ..Default::default() };
    let perfect = ElementOptions { overlap: Overlap::Perfect, ..qg };
    let thermal = ElementOptions { averaging: Averaging::Analytic, ..Default::default() };
    type Case<'a> = (&'a ParticleSpec, &'a EnvironmentSpec, ElementOptions, u8);
    let cases: [Case; 4] = [(&small, &flat, qg, 0), (&small, &flat, qg, 1), (&big, &flat, perfect, 2), (&big, &heavy, thermal, 2)];
    cases
        .iter()
        .map(|(p, env, opts, kind)| {
            let d = xi1_dispersion(p, 1.0);
            let w = 2.0 * d.mu * r.hbar_k();
            let period = 2.0 * PI / w;
            // 25 periods, 128 samples per period.
            let n = 25 * 128;
            let grid: Vec<f64> = (1..=n).map(|i| period * i as f64 / 128.0).collect();
            let st = thermal_state(p, env)?;
            let pops = grid
                .par_iter()
                .map(|&bt| {
                    let u = unitaries(p, &d, &r, bt, env, Xi1Model::Stability, &Vec3::zeros())?;
                    match kind {
                        0 => closed_pairs_population(&u, &st, opts, false),
                        1 => closed_pairs_population(&u, &st, opts, true),
                        _ => Ok(total_population(&u, &st, opts)?.population),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((grid, pops, w))
        })
        .collect()
}

fn fig9() -> Result<FigureOutput> {
    let traces = fig9_traces()?;
    let names = ["i_closed_pairs", "ii_lower_pair", "iii_all_paths_perfect", "iv_all_paths_thermal"];
    let mut tables = Vec::new();
    let mut peaks = serde_json::Map::new();
    for ((grid, pops, w), name) in traces.iter().zip(names) {
        let mut t = Table::new(&format!("fig9a_{name}"), &["T [s]", "t_tilde [1]", "p_g [1]"]);
        for (bt, pg) in grid.iter().zip(pops) {
            t.push_f64(&[*bt, w * bt, *pg]);
        }
        tables.push(t);
        let s = spectrum(grid, pops, Window::Rectangular, 1)?;
        let norm = s.normalized();
        let f_unit = w / (2.0 * PI);
        let mut st = Table::new(&format!("fig9b_{name}"), &["f [Hz]", "f_over_f_xi1 [1]", "magnitude [1]"]);
        for (f, m) in s.freq.iter().zip(&norm) {
            if *f <= 3.0 * f_unit {
                st.push_f64(&[*f, f / f_unit, *m]);
            }
        }
        tables.push(st);
        let pk: Vec<f64> = s.peaks(0.05).iter().map(|p| p.freq / f_unit).collect();
        peaks.insert(name.to_string(), json!(pk));
    }
    Ok(FigureOutput {
        tables,
        params: json!({"periods": 25, "samples_per_period": 128, "xi1_model": "stability", "temperature_K": 1e-3, "peaks_over_f_xi1": peaks, "normalization": "largest peak = 1"}),
    })
}

fn fig10() -> Result<FigureOutput> {
    let r = RecoilSpec::along_z(2e7);
    let pressures = [1e-6, 1e-8, 1e-10];
    let big_t = 100e-6;
    let mut header = vec!["radius [m]".to_string(), "dz [m]".to_string()];
    header.extend(pressures.iter().map(|p| format!("visibility_p_{p:e} [1]")));
    let mut a = Table { name: "fig10a_collisions".into(), header, rows: vec![] };
    for rad in log_grid(1e-9, 100e-9, 41) {
        let p = ParticleSpec::nanodiamond(rad)?;
        let dz = r.hbar_k() * big_t / p.mass;
        let mut row = vec![rad, dz];
        for pr in pressures {
            let gas = GasSpec { pressure: pr, ..GasSpec::default() };
            row.push(collisional_visibility(&gas, rad, dz, 2.0 * big_t)?);
        }
        a.push_f64(&row);
    }
    let rabi = 2.0 * PI * 10e6;
    let d_t = 10e-9;
    let mut b = Table::new("fig10b_time_pulse", &["sigma_v [m/s]", "time_error [1]", "pulse_error [1]"]);
    for sv in log_grid(1e-4, 10.0, 61) {
        b.push_f64(&[sv, time_error_visibility(sv, &r, d_t)?, doppler_pulse_visibility(sv, &r, rabi)?]);
    }
    let mut marks = Table::new("fig10b_markers", &["particle", "temperature [K]", "sigma_v [m/s]"]);
    for (name, p) in [("Cs", ParticleSpec::cesium()), ("nd5nm", ParticleSpec::nanodiamond(5e-9)?)] {
        for temp in [4e-6, 1e-3, 10.0] {
            marks.push(vec![name.into(), fmt(temp), fmt((K_B * temp / p.mass).sqrt())]);
        }
    }
    Ok(FigureOutput {
        tables: vec![a, b, marks],
        params: json!({"gas": GasSpec::default(), "pressures_Pa": pressures, "total_time_s": 2.0 * big_t, "rabi_rad_s": rabi, "dT_s": d_t, "k_per_m": 2e7}),
    })
}

fn table2() -> Result<FigureOutput> {
    let r = RecoilSpec::along_z(K_TABLE);
    let particles = [("5nm", ParticleSpec::nanodiamond(5e-9)?), ("50nm", ParticleSpec::nanodiamond(50e-9)?), ("Cs", ParticleSpec::cesium())];
    let temps = [("HO", 0.0), ("4uK", 4e-6), ("1mK", 1e-3), ("10K", 10.0)];
    let mut t = Table::new("table2_sigma_t2", &["particle", "temperature", "sigma_tilde [1]", "T2 [s]", "T2_lower_bound"]);
    let cells: Vec<_> = particles.iter().flat_map(|p| temps.iter().map(move |tp| (p, tp))).collect();
    let rows = cells
        .par_iter()
        .map(|((pn, p), (tn, temp))| {
            let env = EnvironmentSpec::isotropic(*temp, 2.0 * PI);
            let st = thermal_state(p, &env)?;
            let d = xi1_dispersion(p, 1.0);
            let e = t2_estimate(&st, &d, &r)?;
            Ok(vec![pn.to_string(), tn.to_string(), fmt(st.sigma_along(&r.direction) / r.hbar_k()), fmt(e.t2), e.lower_bound.to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    for row in rows {
        t.push(row);
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"k_per_m": K_TABLE, "trap_rad_s": 2.0 * PI, "t2_convention": "first 1/e crossing of the 3-D thermal envelope"}) })
}

fn fig_c1() -> Result<FigureOutput> {
    let p = ParticleSpec::nanodiamond(50e-9)?;
    let r = RecoilSpec::along_z(K_TABLE);
    let d = xi1_dispersion(&p, 1.0);
    let hk = r.hbar_k();
    let mut t = Table::new("figc1_surface", &["p1_over_hbar_k [1]", "p2_over_hbar_k [1]", "parallel_parallel [1]", "parallel_antiparallel [1]", "antiparallel_antiparallel [1]", "orthogonal [1]"]);
    let grid = log_grid(1e-2, 1e2, 21);
    for &a in &grid {
        for &b in &grid {
            let mut row = vec![a, b];
            for g in [SurfaceGeometry::ParallelParallel, SurfaceGeometry::ParallelAntiparallel, SurfaceGeometry::AntiparallelAntiparallel, SurfaceGeometry::Orthogonal] {
                row.push(stability_phase_surface(a * hk, b * hk, g, &d, &r, 1e-4)?);
            }
            t.push_f64(&row);
        }
    }
    Ok(FigureOutput { tables: vec![t], params: json!({"normalization": "2 mu hbar k T", "k_per_m": K_TABLE}) })
}

/// Computes figure `id` and writes its tables with manifests into `out_dir`.
pub fn reproduce_figure(id: &str, cfg: &Config, out_dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    let f = compute_figure(id, cfg)?;
    let manifest = json!({"figure": id, "config_digest": cfg.digest(), "seed": cfg.numerics.seed, "params": f.params});
    write_tables(out_dir, &f.tables, &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id() {
        assert!(matches!(compute_figure("11", &Config::default()), Err(SimError::Config(_))));
    }

    #[test]
    fn cheap_figures_have_expected_shape() {
        let c = Config::default();
        let f = compute_figure("3", &c).unwrap();
        assert_eq!(f.tables[0].rows.len(), 41);
        let p = compute_figure("6-table", &c).unwrap();
        assert_eq!(p.tables[0].rows.len(), 8);
        let a = compute_figure("4a", &c).unwrap();
        let par = a.tables[0].column("parallel").unwrap();
        assert!((par[0] - 1.0).abs() < 1e-2 && par[par.len() - 1].abs() < 1e-2);
        let anti = a.tables[0].column("antiparallel").unwrap();
        assert!(anti.iter().all(|v| v.abs() <= 1.0 + 1e-9));
    }

    #[test]
    fn figure_csv_is_deterministic() {
        let c = Config::default();
        let a = compute_figure("10", &c).unwrap();
        let b = compute_figure("10", &c).unwrap();
        for (x, y) in a.tables.iter().zip(&b.tables) {
            assert_eq!(x.to_csv().unwrap(), y.to_csv().unwrap());
        }
    }
}
