use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use simqg_core::analysis::figures::{reproduce_figure, FIGURE_IDS};
use simqg_core::analysis::output::{write_tables, Table};
use simqg_core::analysis::trace::{fringe_grid, interference_trace, uniform_grid, TraceMode};
use simqg_core::analysis::{spectrum, Config, Resolved, Window};
use simqg_core::bounds::{
    fine_structure_bounds, laser_frequency_bounds, mass_precision_bounds, shot_noise_bounds, BoundInputs, RecoilMeasurement,
};
use simqg_core::model::dimensionless_groups;
use simqg_core::noise::{collisional_visibility, doppler_pulse_visibility, time_error_visibility};
use simqg_core::paths::{build_unitaries, enumerate_paths};
use simqg_core::phase::closed_pair_phase;
use simqg_core::stability::{simulate_recovery, RecoveryGeometry, RecoverySetup, TraceMode as RecoveryMode};
use simqg_core::thermal::total_population;
use simqg_core::{GasSpec, Internal, PhaseContext, SimError};

#[derive(Parser)]
#[command(name = "simqg", version, about = "Ramsey-Borde interferometer signals under modified dispersion")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// JSON configuration file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase, groups and all-path population at the configured T.
    Run,
    /// Closed-pair phase decomposition at the configured p0.
    Phase,
    /// The eight ground-port paths as CSV.
    Paths,
    /// Population trace over a grid of T.
    Trace(GridArgs),
    /// Amplitude spectrum of a trace.
    Spectrum {
        #[command(flatten)]
        grid: GridArgs,
        /// Read T and p_g from a trace CSV instead of computing one.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "rectangular")]
        window: WindowArg,
        #[arg(long, default_value_t = 1)]
        pad: usize,
    },
    /// Precision bounds on xi1 and xi2 for the configured particle.
    Bounds,
    /// Recovery configuration trace and design report.
    Recover {
        #[arg(long, default_value_t = 4.0)]
        periods: f64,
        #[arg(long, value_enum, default_value = "xi1-only")]
        mode: RecoverModeArg,
    },
    /// Collisional, timing and pulse visibilities.
    Noise,
    /// Reproduce the data behind a figure or table ("all" for every id).
    Fig {
        #[arg(long)]
        id: String,
    },
}

#[derive(Args, Clone)]
struct GridArgs {
    #[arg(long, value_enum, default_value = "closed-pairs")]
    mode: TraceModeArg,
    /// Grid start in s; with --t-max and --n gives a uniform grid.
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Periods of 2 mu hbar k spanned by the default grid.
    #[arg(long, default_value_t = 25.0)]
    periods: f64,
}

#[derive(ValueEnum, Clone, Copy)]
enum TraceModeArg {
    ClosedPairs,
    LowerPair,
    AllPaths,
}

#[derive(ValueEnum, Clone, Copy)]
enum WindowArg {
    Rectangular,
    Hann,
}

#[derive(ValueEnum, Clone, Copy)]
enum RecoverModeArg {
    Xi1Only,
    WithZeroOrder,
    ClosedPaths,
    AllPaths,
}

fn load_config(g: &Global) -> Result<Config> {
    let mut c = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = g.seed {
        c.numerics.seed = s;
    }
    if let Some(q) = g.quadrature_order {
        c.numerics.quadrature_order = q;
    }
    if let Some(m) = g.mc_samples {
        c.numerics.mc_samples = m;
    }
    Ok(c)
}

fn manifest(cfg: &Config, command: &str, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "command": command,
        "config_digest": cfg.digest(),
        "seed": cfg.numerics.seed,
        "config": serde_json::from_str::<serde_json::Value>(&cfg.to_json()).unwrap_or_default(),
        "params": extra,
    })
}

fn print_written(files: &[PathBuf]) {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
}

fn t_grid(res: &Resolved, g: &GridArgs) -> Result<Vec<f64>> {
    if let (Some(a), Some(b), Some(n)) = (g.t_min, g.t_max, g.n) {
        return Ok(uniform_grid(a, b, n)?);
    }
    let f = 2.0 * res.dispersion.mu * res.recoil.hbar_k() / (2.0 * std::f64::consts::PI);
    if !(f > 0.0) {
        return Err(SimError::config("default T grid needs xi1 != 0; pass --t-min, --t-max and --n").into());
    }
    // Headroom for the 2 omega component of all-path traces.
    Ok(fringe_grid(2.0 * f, f, g.periods)?)
}

fn trace_mode(m: TraceModeArg) -> TraceMode {
    match m {
        TraceModeArg::ClosedPairs => TraceMode::ClosedPairs,
        TraceModeArg::LowerPair => TraceMode::LowerPair,
        TraceModeArg::AllPaths => TraceMode::AllPaths,
    }
}

fn read_trace(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let (mut t, mut p) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64> { Ok(rec.get(i).context("short row")?.parse()?) };
        t.push(get(0)?);
        p.push(get(1)?);
    }
    Ok((t, p))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.global)?;
    let out = &cli.global.out;
    match cli.cmd {
        Cmd::Run => {
            let r = cfg.resolve()?;
            let groups = dimensionless_groups(&r.particle, &r.recoil, &r.timing, &r.env, &r.dispersion)?;
            let p0 = r.options.p_center;
            let phase = closed_pair_phase(&p0, &r.particle, &r.dispersion, &r.recoil, &r.timing, &r.laser, &r.env)?;
            let ctx = PhaseContext::new(&r.particle, &r.dispersion, &r.recoil, &r.timing, &r.laser, &r.env).with_xi1_model(r.xi1_model);
            let u = build_unitaries(&enumerate_paths(4, Internal::G, &r.recoil, &r.timing)?, &p0, &ctx);
            let pop = total_population(&u, &r.state, &r.options)?;
            let report = json!({
                "config_digest": cfg.digest(),
                "mass_kg": r.particle.mass,
                "mu": r.dispersion.mu,
                "groups": groups,
                "phase": phase,
                "population": pop.population,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Cmd::Phase => {
            let r = cfg.resolve()?;
            let phase = closed_pair_phase(&r.options.p_center, &r.particle, &r.dispersion, &r.recoil, &r.timing, &r.laser, &r.env)?;
            println!("{}", serde_json::to_string_pretty(&phase)?);
        }
        Cmd::Paths => {
            let files = reproduce_figure("6-table", &cfg, out)?;
            print!("{}", std::fs::read_to_string(&files[0])?);
            print_written(&files);
        }
        Cmd::Trace(g) => {
            let r = cfg.resolve()?;
            let grid = t_grid(&r, &g)?;
            let tr = interference_trace(&r, &cfg.digest(), &grid, trace_mode(g.mode))?;
            let mut t = Table::new("trace", &["T [s]", "p_g [1]"]);
            for (a, b) in tr.t.iter().zip(&tr.p_g) {
                t.push_f64(&[*a, *b]);
            }
            print_written(&write_tables(out, &[t], &manifest(&cfg, "trace", json!({"mode": tr.meta.mode})))?);
        }
        Cmd::Spectrum { grid, input, window, pad } => {
            let (t, p) = match input {
                Some(path) => read_trace(&path)?,
                None => {
                    let r = cfg.resolve()?;
                    let tr = interference_trace(&r, &cfg.digest(), &t_grid(&r, &grid)?, trace_mode(grid.mode))?;
                    (tr.t, tr.p_g)
                }
            };
            let w = match window {
                WindowArg::Rectangular => Window::Rectangular,
                WindowArg::Hann => Window::Hann,
            };
            let s = spectrum(&t, &p, w, pad)?;
            let norm = s.normalized();
            let mut tab = Table::new("spectrum", &["f [Hz]", "magnitude [1]", "normalized [1]"]);
            for i in 0..s.freq.len() {
                tab.push_f64(&[s.freq[i], s.magnitude[i], norm[i]]);
            }
            let peaks: Vec<_> = s.peaks(0.05).iter().map(|p| json!({"f_hz": p.freq, "magnitude": p.magnitude})).collect();
            println!("{}", serde_json::to_string_pretty(&json!({"peaks": peaks}))?);
            print_written(&write_tables(out, &[tab], &manifest(&cfg, "spectrum", json!({"window": w, "pad": pad, "peaks": peaks})))?);
        }
        Cmd::Bounds => {
            let r = cfg.resolve()?;
            let inputs = if r.particle.radius().is_some() { BoundInputs::nanodiamond() } else { BoundInputs::cesium() };
            let rows = [
                ("shot noise", shot_noise_bounds(&inputs, &r.particle, &r.recoil)?),
                ("laser frequency", laser_frequency_bounds(&inputs, &r.particle, &r.recoil)?),
                ("mass precision", mass_precision_bounds(&inputs, &r.particle, &r.recoil)?),
                ("fine structure", fine_structure_bounds(&inputs, &r.particle, &r.recoil)?),
            ];
            println!("{:<18} {:>12} {:>12}", "source", "d_xi1", "d_xi2");
            for (name, b) in &rows {
                println!("{name:<18} {:>12.3e} {:>12.3e}", b.xi1, b.xi2);
            }
            println!("{:<18} {:>12} {:>12.3e}", "Cs h/m prior", "", RecoilMeasurement::cesium().xi2_bound());
            println!("{:<18} {:>12} {:>12.3e}", "Rb h/m prior", "", RecoilMeasurement::rubidium().xi2_bound());
            print_written(&reproduce_figure("3", &cfg, out)?);
        }
        Cmd::Recover { periods, mode } => {
            let r = cfg.resolve()?;
            let setup = RecoverySetup {
                particle: r.particle.clone(),
                dispersion: r.dispersion,
                recoil: r.recoil,
                env: r.env,
                laser: r.laser.clone(),
                state: r.state,
                zeta: cfg.stability.zeta,
                geometry: if cfg.stability.orthogonal { RecoveryGeometry::Orthogonal } else { RecoveryGeometry::Parallel },
                adjusted: cfg.stability.adjusted,
                xi1_model: r.xi1_model,
            };
            let f = setup.omega_xi1() / (2.0 * std::f64::consts::PI);
            if !(f > 0.0) {
                return Err(SimError::config("recover needs xi1 != 0").into());
            }
            let grid = fringe_grid(f, f, periods)?;
            let mode = match mode {
                RecoverModeArg::Xi1Only => RecoveryMode::Xi1Only,
                RecoverModeArg::WithZeroOrder => RecoveryMode::WithZeroOrder,
                RecoverModeArg::ClosedPaths => RecoveryMode::ClosedPaths,
                RecoverModeArg::AllPaths => RecoveryMode::AllPaths,
            };
            let tr = simulate_recovery(&setup, &grid, mode, &r.options)?;
            let design = setup.design(r.timing.big_t)?;
            let groups = dimensionless_groups(&r.particle, &r.recoil, &r.timing, &r.env, &r.dispersion)?;
            let mut t = Table::new("recover", &["T [s]", "t_tilde [1]", "p_g [1]", "ideal [1]", "visibility [1]", "tau [s]", "p1_z [kg m/s]"]);
            for i in 0..tr.t.len() {
                t.push_f64(&[tr.t[i], tr.t_tilde[i], tr.population[i], tr.ideal[i], tr.visibility[i], tr.tau[i], tr.p1[i].dot(&r.recoil.direction)]);
            }
            let report = json!({"design_at_config_T": design, "groups": groups, "mode": mode});
            println!("{}", serde_json::to_string_pretty(&report)?);
            for w in &design.warnings {
                eprintln!("warning: {w}");
            }
            print_written(&write_tables(out, &[t], &manifest(&cfg, "recover", report))?);
        }
        Cmd::Noise => {
            let r = cfg.resolve()?;
            let radius = r.particle.radius().unwrap_or(50e-9);
            let dz = r.recoil.hbar_k() * r.timing.big_t / r.particle.mass;
            let total = r.timing.total();
            let mut a = Table::new("noise_pressure", &["pressure [Pa]", "visibility [1]"]);
            for i in 0..=40 {
                let p = 10f64.powf(-12.0 + 8.0 * i as f64 / 40.0);
                let gas = GasSpec { pressure: p, ..r.env.gas };
                a.push_f64(&[p, collisional_visibility(&gas, radius, dz, total)?]);
            }
            let rabi = 2.0 * std::f64::consts::PI * 10e6;
            let d_t = 10e-9;
            let mut b = Table::new("noise_sigma_v", &["sigma_v [m/s]", "time_error [1]", "pulse_error [1]"]);
            for i in 0..=40 {
                let sv = 10f64.powf(-4.0 + 5.0 * i as f64 / 40.0);
                b.push_f64(&[sv, time_error_visibility(sv, &r.recoil, d_t)?, doppler_pulse_visibility(sv, &r.recoil, rabi)?]);
            }
            let extra = json!({"dz_m": dz, "total_time_s": total, "radius_m": radius, "rabi_rad_s": rabi, "dT_s": d_t});
            print_written(&write_tables(out, &[a, b], &manifest(&cfg, "noise", extra))?);
        }
        Cmd::Fig { id } => {
            let ids: Vec<&str> = if id == "all" { FIGURE_IDS.to_vec() } else { vec![id.as_str()] };
            for id in ids {
                print_written(&reproduce_figure(id, &cfg, out)?);
            }
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<SimError>() {
        Some(SimError::Config(_)) => 2,
        Some(SimError::Convergence { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SIMQG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
