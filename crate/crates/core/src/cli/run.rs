use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::hamiltonian::{
    build_eta, build_hamiltonian, characteristic_polynomial, intertwining_operator, pseudo_hermiticity_residual,
};
use crate::params::{linspace, Knob, SystemParams};
use crate::phase_diagram::{critical_gamma, gap_map_with, scan_plane_with, AxisSpec, CriticalGammaSpec, ScanOptions};
use crate::spectral::{eigenvalues, sweep_points, track_branches};
use crate::transmission::{line_cut, transmission_map, TransmissionParams};

use super::config::{Command, RunConfig, SweepSpec};
use super::output::{format_number, CsvTable};
use super::CliError;

/// Overrides the default worker count when the config leaves `threads` unset.
pub const THREADS_ENV: &str = "MAGNON_EP_LAB_THREADS";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub data_files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub results: Value,
}

/// Worker count: config field, then the environment override, then all cores.
pub fn resolve_threads(configured: Option<usize>) -> usize {
    configured
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&n: &usize| n > 0)
        })
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn num(v: f64) -> String {
    format_number(v)
}

/// Value of a sweep coordinate in internal units (units of g, radians).
fn internal(config: &RunConfig, knob: Knob, v: f64) -> f64 {
    match knob {
        Knob::Theta => v.to_radians(),
        Knob::G => v,
        _ => v / config.g_input,
    }
}

/// Axis coordinates as written to CSV: degrees for θ, units of g otherwise.
fn csv_axis(config: &RunConfig, s: &SweepSpec) -> Vec<f64> {
    let values = linspace(s.lo, s.hi, s.n);
    match s.knob {
        Knob::Theta | Knob::G => values,
        _ => values.into_iter().map(|v| v / config.g_input).collect(),
    }
}

fn axis_spec(config: &RunConfig, s: &SweepSpec) -> AxisSpec {
    AxisSpec::new(s.knob, internal(config, s.knob, s.lo), internal(config, s.knob, s.hi), s.n)
}

fn run_spectrum(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let s = &config.sweep;
    let points = sweep_points(
        &config.params,
        Knob::OmegaM,
        internal(config, s.knob, s.lo),
        internal(config, s.knob, s.hi),
        s.n,
    )?;
    let sweep = track_branches(&points)?;
    let real_points = points
        .par_iter()
        .map(|p| eigenvalues(&build_hamiltonian(p)).map(|sp| sp.is_real()))
        .collect::<crate::Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&r| r)
        .count();
    let mut table = CsvTable::new(&["omega_m", "branch", "re_omega", "im_omega"]);
    for (i, wm) in csv_axis(config, s).into_iter().enumerate() {
        for (b, z) in sweep.at(i).iter().enumerate() {
            table.push(vec![num(wm), b.to_string(), num(z.re), num(z.im)]);
        }
    }
    Ok((table, json!({ "points": s.n, "all_real_points": real_points })))
}

fn run_phase_diagram(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let y = config.sweep_y.as_ref().expect("validated");
    let opts = ScanOptions {
        epsilon_real: config.tolerances.epsilon_real,
        bracket_rel: config.tolerances.bracket_rel,
    };
    let grid = scan_plane_with(&config.params, &axis_spec(config, &config.sweep), &axis_spec(config, y), &opts)?;
    let xs = csv_axis(config, &config.sweep);
    let ys = csv_axis(config, y);
    let mut table = CsvTable::new(&["x", "y", "classification"]);
    let mut real_cells = 0usize;
    for (iy, yv) in ys.iter().enumerate() {
        for (ix, xv) in xs.iter().enumerate() {
            let c = grid.get(ix, iy);
            real_cells += usize::from(c.is_real());
            table.push(vec![num(*xv), num(*yv), c.as_str().to_string()]);
        }
    }
    Ok((
        table,
        json!({
            "x_knob": config.sweep.knob,
            "y_knob": y.knob,
            "cells": xs.len() * ys.len(),
            "real_cells": real_cells,
        }),
    ))
}

fn transmission_params(config: &RunConfig) -> crate::Result<TransmissionParams> {
    TransmissionParams::new(config.params, config.beta)
}

fn omega_range(config: &RunConfig) -> (f64, f64) {
    (config.omega.lo / config.g_input, config.omega.hi / config.g_input)
}

fn run_transmission(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let s = &config.sweep;
    let grid = transmission_map(
        &transmission_params(config)?,
        omega_range(config),
        config.omega.n,
        (internal(config, s.knob, s.lo), internal(config, s.knob, s.hi)),
        s.n,
        config.normalize,
    )?;
    let mut table = CsvTable::new(&["omega_m", "omega", "s21_abs"]);
    for (wm, w, m) in grid.cells() {
        table.push(vec![num(wm), num(w), num(m)]);
    }
    Ok((
        table,
        json!({
            "cells": grid.omega_values.len() * grid.omega_m_values.len(),
            "pole_cells": grid.pole_cells.len(),
            "normalized": grid.normalized,
        }),
    ))
}

fn run_line_cut(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let tp = transmission_params(config)?;
    let cuts = config
        .deltas
        .par_iter()
        .map(|&d| line_cut(&tp, d, omega_range(config), config.omega.n))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&["delta", "omega", "s21_norm"]);
    for (d, cut) in config.deltas.iter().zip(&cuts) {
        for (w, v) in cut {
            table.push(vec![num(*d), num(*w), num(*v)]);
        }
    }
    Ok((table, json!({ "deltas": config.deltas, "points_per_cut": config.omega.n })))
}

fn run_gap_map(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let t = &config.sweep;
    let gm = config.sweep_y.as_ref().expect("validated");
    let map = gap_map_with(
        &config.params.at_resonance(),
        (t.lo.to_radians(), t.hi.to_radians()),
        t.n,
        (internal(config, gm.knob, gm.lo), internal(config, gm.knob, gm.hi)),
        gm.n,
        config.tolerances.epsilon_real,
    )?;
    let thetas = csv_axis(config, t);
    let gammas = csv_axis(config, gm);
    let mut table = CsvTable::new(&["theta", "gamma", "delta_omega"]);
    let mut nonzero = 0usize;
    let mut best = (0.0f64, f64::NAN, f64::NAN);
    for (ig, g) in gammas.iter().enumerate() {
        for (it, th) in thetas.iter().enumerate() {
            let d = map.delta_omega[ig][it];
            nonzero += usize::from(d > 0.0);
            if d > best.0 {
                best = (d, *th, *g);
            }
            table.push(vec![num(*th), num(*g), num(d)]);
        }
    }
    Ok((
        table,
        json!({
            "cells": thetas.len() * gammas.len(),
            "nonzero_cells": nonzero,
            "max_delta_omega": best.0,
            "max_at_theta_deg": best.1,
            "max_at_gamma": best.2,
        }),
    ))
}

fn run_critical_gamma(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let s = &config.sweep;
    let spec = CriticalGammaSpec {
        omega_m_lo: internal(config, s.knob, s.lo),
        omega_m_hi: internal(config, s.knob, s.hi),
        n_points: s.n,
        gamma_tol: config.tolerances.gamma_tol,
        gamma_max: config.gamma_max,
        epsilon_real: config.tolerances.epsilon_real,
    };
    let p = critical_gamma(&config.params, &spec)?;
    let mut table = CsvTable::new(&["theta", "p"]);
    table.push(vec![num(config.theta_deg), num(p)]);
    Ok((table, json!({ "theta_deg": config.theta_deg, "p": p })))
}

/// Random valid parameter set: frequencies in [20, 30], γ in [0, 2], θ in [0, 2π).
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let wc1 = rng.gen_range(20.0..30.0);
    let wc2 = rng.gen_range(20.0..30.0);
    let wm = rng.gen_range(20.0..30.0);
    let gamma = rng.gen_range(0.0..2.0);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    SystemParams::unit_coupling(wc1, wc2, wm, gamma, theta).expect("sampled in the valid domain")
}

struct VerifyRow {
    residual_rel: f64,
    charpoly_imag_rel: f64,
    conjugate_mismatch_rel: f64,
    permutation_eta_rel: f64,
}

/// Largest distance from a conjugated eigenvalue to its nearest partner,
/// relative to max(1, |λ|).
fn conjugate_mismatch(eigs: &[Complex64; 4]) -> f64 {
    eigs.iter()
        .map(|z| {
            let c = z.conj();
            let nearest = eigs.iter().map(|w| (c - w).norm()).fold(f64::INFINITY, f64::min);
            nearest / z.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn verify_one(p: &SystemParams) -> crate::Result<VerifyRow> {
    let h = build_hamiltonian(p);
    let norm = h.frobenius_norm();
    let eta = intertwining_operator(&h)?;
    let residual_rel = pseudo_hermiticity_residual(&h, &eta)? / norm;
    let permutation_eta_rel = pseudo_hermiticity_residual(&h, &build_eta(p.theta()))? / norm;
    let coeffs = characteristic_polynomial(&h);
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let charpoly_imag_rel = coeffs.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale;
    let spectrum = eigenvalues(&h)?;
    Ok(VerifyRow {
        residual_rel,
        charpoly_imag_rel,
        conjugate_mismatch_rel: conjugate_mismatch(spectrum.eigenvalues()),
        permutation_eta_rel,
    })
}

fn run_verify(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples: Vec<SystemParams> = (0..config.trials).map(|_| random_params(&mut rng)).collect();
    let rows = samples.par_iter().map(verify_one).collect::<crate::Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&["trial", "residual_rel", "charpoly_imag_rel", "conjugate_mismatch_rel"]);
    for (i, r) in rows.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            num(r.residual_rel),
            num(r.charpoly_imag_rel),
            num(r.conjugate_mismatch_rel),
        ]);
    }
    let max = |f: fn(&VerifyRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max_residual = max(|r| r.residual_rel);
    Ok((
        table,
        json!({
            "trials": config.trials,
            "seed": config.seed,
            "max_residual_rel": max_residual,
            "max_charpoly_imag_rel": max(|r| r.charpoly_imag_rel),
            "max_conjugate_mismatch_rel": max(|r| r.conjugate_mismatch_rel),
            "min_permutation_eta_residual_rel": rows.iter().map(|r| r.permutation_eta_rel).fold(f64::INFINITY, f64::min),
            "certified": max_residual < 1e-10,
        }),
    ))
}

fn compute(config: &RunConfig) -> crate::Result<(CsvTable, Value)> {
    match config.command {
        Command::Spectrum => run_spectrum(config),
        Command::PhaseDiagram => run_phase_diagram(config),
        Command::Transmission => run_transmission(config),
        Command::LineCut => run_line_cut(config),
        Command::GapMap => run_gap_map(config),
        Command::CriticalGamma => run_critical_gamma(config),
        Command::Verify => run_verify(config),
    }
}

fn manifest(config: &RunConfig, config_source: &str, threads: usize, csv: &str, results: Value, wall: f64) -> Value {
    let p = &config.params;
    let finished = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command,
        "config_source": config_source,
        "parameters": {
            "omega_c1": p.omega_c1(),
            "omega_c2": p.omega_c2(),
            "omega_m": p.omega_m(),
            "gamma": p.gamma(),
            "g": p.g(),
            "g_input": config.g_input,
            "g_hz": config.g_hz,
            "theta_deg": config.theta_deg,
            "theta_rad": p.theta(),
            "beta": config.beta,
            "units": "frequencies, gamma and beta in units of g",
        },
        "config": config,
        "tolerances": config.tolerances,
        "threads": threads,
        "outputs": [csv],
        "results": results,
        "wall_time_s": wall,
        "finished_unix_s": finished,
    })
}

/// Runs the configured computation and writes `<command>.csv` and
/// `manifest.json` into the output directory.
pub fn execute(config: &RunConfig, config_source: &str) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let threads = resolve_threads(config.threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {threads} worker threads: {e}")))?;
    let (table, results) = pool.install(|| compute(config)).map_err(|source| CliError::Compute {
        context: config_source.to_string(),
        command: config.command,
        source,
    })?;
    let wall = start.elapsed().as_secs_f64();

    let io = |path: &std::path::Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(&config.out_dir).map_err(io(&config.out_dir))?;
    let csv_name = config.command.csv_name();
    let csv_path = config.out_dir.join(&csv_name);
    table.write(&csv_path)?;
    let manifest_path = config.out_dir.join("manifest.json");
    let doc = manifest(config, config_source, threads, &csv_name, results.clone(), wall);
    let mut text = serde_json::to_string_pretty(&doc).expect("manifest is plain JSON");
    text.push('\n');
    fs::write(&manifest_path, text).map_err(io(&manifest_path))?;
    Ok(RunSummary {
        data_files: vec![csv_path],
        manifest: manifest_path,
        results,
    })
}
