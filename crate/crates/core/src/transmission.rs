//! Forward transmission S21 from input-output theory.
//!
//! Both cavities leak into two shared baths at the same rate β. Eliminating
//! the magnons and cavities from the frequency-domain Langevin equations leaves
//! a closed form in the magnon detunings E = ω − ω_m + iγ and F = ω − ω_m − iγ
//! (all in units of g):
//!
//! ```text
//! S21 = iβ · ((2 − 2cos θ)/F − 2ω + ω_c1 + ω_c2) / f(E, F)
//! f   = Π_k (ω − ω_ck + iβ − 1/E − 1/F) − (iβ − 1/E − cos θ/F)² − (sin θ/F)²
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{linspace, SystemParams};

pub const DEFAULT_BETA: f64 = 0.1;

/// Denominators below this magnitude are treated as poles.
pub const POLE_TOL: f64 = 1e-14;

/// Map cells on (or numerically at) a pole are clamped to this value.
pub const POLE_CEILING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionParams {
    pub system: SystemParams,
    beta: f64,
}

impl TransmissionParams {
    pub fn new(system: SystemParams, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { system, beta })
    }

    /// Leakage rate in units of g.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn with_system(&self, system: SystemParams) -> Self {
        Self { system, ..*self }
    }
}

/// Closed-form S21 at probe frequency `omega` (same units as the system
/// frequencies).
pub fn s21(tp: &TransmissionParams, omega: f64) -> Result<Complex64> {
    let p = &tp.system;
    let g = p.g();
    let w = omega / g;
    let (wc1, wc2, wm, gamma) = (p.omega_c1() / g, p.omega_c2() / g, p.omega_m() / g, p.gamma() / g);
    let (cos, sin) = (p.theta().cos(), p.theta().sin());
    let i = Complex64::i();
    let ib = i * tp.beta;

    let e = Complex64::new(w - wm, gamma);
    let f_det = Complex64::new(w - wm, -gamma);
    if e.norm() < POLE_TOL || f_det.norm() < POLE_TOL {
        return Err(Error::PoleAtInput { omega });
    }
    let (inv_e, inv_f) = (e.inv(), f_det.inv());
    let diag = |wc: f64| Complex64::new(w - wc, 0.0) + ib - inv_e - inv_f;
    let cross = ib - inv_e - inv_f * cos;
    let twist = inv_f * sin;
    let denom = diag(wc1) * diag(wc2) - cross * cross - twist * twist;
    if denom.norm() < POLE_TOL {
        return Err(Error::PoleAtInput { omega });
    }
    let numer = (inv_f * (2.0 - 2.0 * cos) + (-2.0 * w + wc1 + wc2)) * ib;
    Ok(numer / denom)
}

/// |S21| over (ω_m, ω); `magnitude[i_omega_m][i_omega]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmissionGrid {
    pub omega_values: Vec<f64>,
    pub omega_m_values: Vec<f64>,
    pub magnitude: Vec<Vec<f64>>,
    pub normalized: bool,
    /// (i_omega_m, i_omega) of cells clamped at [`POLE_CEILING`].
    pub pole_cells: Vec<(usize, usize)>,
}

impl TransmissionGrid {
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.omega_m_values.iter().enumerate().flat_map(move |(im, &wm)| {
            self.omega_values
                .iter()
                .enumerate()
                .map(move |(iw, &w)| (wm, w, self.magnitude[im][iw]))
        })
    }
}

/// |S21|, clamped to [`POLE_CEILING`]; the flag marks a clamped pole.
fn clamped_magnitude(tp: &TransmissionParams, omega: f64) -> (f64, bool) {
    match s21(tp, omega) {
        Ok(z) => {
            let m = z.norm();
            if m.is_finite() && m < POLE_CEILING {
                (m, false)
            } else {
                (POLE_CEILING, true)
            }
        }
        Err(_) => (POLE_CEILING, true),
    }
}

/// Divides a column by its maximum so the peak is exactly 1.
fn normalize_column(col: &mut [f64]) {
    let max = col.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        col.iter_mut().for_each(|v| *v /= max);
    }
}

fn check_range(name: &str, range: (f64, f64), n: usize) -> Result<()> {
    if n < 2 || !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::InvalidSweep(format!(
            "{name} range [{}, {}] with n = {n} is invalid",
            range.0, range.1
        )));
    }
    Ok(())
}

pub fn transmission_map(
    tp: &TransmissionParams,
    omega_range: (f64, f64),
    n_omega: usize,
    omega_m_range: (f64, f64),
    n_omega_m: usize,
    normalize: bool,
) -> Result<TransmissionGrid> {
    check_range("omega", omega_range, n_omega)?;
    check_range("omega_m", omega_m_range, n_omega_m)?;
    let omega_values = linspace(omega_range.0, omega_range.1, n_omega);
    let omega_m_values = linspace(omega_m_range.0, omega_m_range.1, n_omega_m);

    let columns = omega_m_values
        .par_iter()
        .map(|&wm| {
            let at = tp.with_system(tp.system.with(crate::params::Knob::OmegaM, wm)?);
            let (mut col, poles): (Vec<f64>, Vec<bool>) =
                omega_values.iter().map(|&w| clamped_magnitude(&at, w)).unzip();
            if normalize {
                normalize_column(&mut col);
            }
            Ok((col, poles))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut magnitude = Vec::with_capacity(n_omega_m);
    let mut pole_cells = Vec::new();
    for (im, (col, poles)) in columns.into_iter().enumerate() {
        pole_cells.extend(poles.iter().enumerate().filter(|(_, &p)| p).map(|(iw, _)| (im, iw)));
        magnitude.push(col);
    }
    Ok(TransmissionGrid {
        omega_values,
        omega_m_values,
        magnitude,
        normalized: normalize,
        pole_cells,
    })
}

/// Normalized |S21|(ω) at detuning Δ, i.e. ω_m = ω_c + Δ·g.
pub fn line_cut(tp: &TransmissionParams, delta: f64, omega_range: (f64, f64), n: usize) -> Result<Vec<(f64, f64)>> {
    check_range("omega", omega_range, n)?;
    let p = &tp.system;
    let at = tp.with_system(p.with(crate::params::Knob::OmegaM, p.omega_c() + delta * p.g())?);
    let omegas = linspace(omega_range.0, omega_range.1, n);
    let mut mags: Vec<f64> = omegas.iter().map(|&w| clamped_magnitude(&at, w).0).collect();
    normalize_column(&mut mags);
    Ok(omegas.into_iter().zip(mags).collect())
}
