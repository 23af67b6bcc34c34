//! Real/complex phase structure over one- and two-parameter sweeps.
//!
//! Every grid cell is classified independently, so plane scans parallelize
//! freely and produce identical output for any worker count. Line scans refine
//! each classification change by bisection to locate the exceptional point.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::params::{linspace, Knob, SystemParams};
use crate::spectral::{eigenvalues_with, Classification, EPSILON_REAL};

/// Default ω_m window and grid used for line scans and `critical_gamma`.
pub const DEFAULT_OMEGA_M_RANGE: (f64, f64) = (20.0, 30.0);
pub const DEFAULT_LINE_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub epsilon_real: f64,
    /// EP brackets are bisected down to `bracket_rel · (hi − lo)`.
    pub bracket_rel: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            epsilon_real: EPSILON_REAL,
            bracket_rel: 1e-6,
        }
    }
}

/// Classification of `base` with `knob` set to `value`.
pub fn classify_at(base: &SystemParams, knob: Knob, value: f64, epsilon_real: f64) -> Result<Classification> {
    let p = base.with(knob, value)?;
    Ok(eigenvalues_with(&build_hamiltonian(&p), epsilon_real)?.classification())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineScanResult {
    pub knob: Knob,
    pub parameter_values: Vec<f64>,
    pub classifications: Vec<Classification>,
    pub transition_count: usize,
    /// Refined EP positions, one per classification change.
    pub ep_locations: Vec<f64>,
    /// Final bisection bracket around each EP.
    pub ep_brackets: Vec<(f64, f64)>,
}

impl LineScanResult {
    pub fn has_real_point(&self) -> bool {
        self.classifications.iter().any(|c| c.is_real())
    }
}

pub fn scan_line(base: &SystemParams, knob: Knob, lo: f64, hi: f64, n: usize) -> Result<LineScanResult> {
    scan_line_with(base, knob, lo, hi, n, &ScanOptions::default())
}

pub fn scan_line_with(
    base: &SystemParams,
    knob: Knob,
    lo: f64,
    hi: f64,
    n: usize,
    opts: &ScanOptions,
) -> Result<LineScanResult> {
    if n < 3 {
        return Err(Error::InvalidSweep(format!("line scan needs n >= 3, got {n}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidSweep(format!("line scan needs finite lo < hi, got [{lo}, {hi}]")));
    }
    let values = linspace(lo, hi, n);
    let classifications = values
        .par_iter()
        .map(|&v| classify_at(base, knob, v, opts.epsilon_real))
        .collect::<Result<Vec<_>>>()?;

    let width = opts.bracket_rel * (hi - lo);
    let mut ep_locations = Vec::new();
    let mut ep_brackets = Vec::new();
    for i in 0..n - 1 {
        if classifications[i] == classifications[i + 1] {
            continue;
        }
        let left_class = classifications[i];
        let (mut a, mut b) = (values[i], values[i + 1]);
        while b - a > width {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if classify_at(base, knob, mid, opts.epsilon_real)? == left_class {
                a = mid;
            } else {
                b = mid;
            }
        }
        ep_brackets.push((a, b));
        ep_locations.push(0.5 * (a + b));
    }
    Ok(LineScanResult {
        knob,
        transition_count: ep_locations.len(),
        parameter_values: values,
        classifications,
        ep_locations,
        ep_brackets,
    })
}

/// One swept axis of a plane scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSpec {
    pub knob: Knob,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn new(knob: Knob, lo: f64, hi: f64, n: usize) -> Self {
        Self { knob, lo, hi, n }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSweep(format!("axis {} needs n >= 2, got {}", self.knob, self.n)));
        }
        if !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "axis {} has invalid range [{}, {}]",
                self.knob, self.lo, self.hi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub knob: Knob,
    pub values: Vec<f64>,
}

/// Classification over a 2-D grid; `classification[iy][ix]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagramGrid {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub classification: Vec<Vec<Classification>>,
}

impl PhaseDiagramGrid {
    pub fn get(&self, ix: usize, iy: usize) -> Classification {
        self.classification[iy][ix]
    }

    /// Cells in row-major order (y outer, x inner).
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, Classification)> + '_ {
        self.y_axis.values.iter().enumerate().flat_map(move |(iy, &y)| {
            self.x_axis
                .values
                .iter()
                .enumerate()
                .map(move |(ix, &x)| (x, y, self.classification[iy][ix]))
        })
    }
}

/// Evaluates `f` over a row-major grid in parallel, preserving grid order.
fn grid_map<T, F>(xs: &[f64], ys: &[f64], f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(f64, f64) -> Result<T> + Sync,
{
    let nx = xs.len();
    let flat = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| f(xs[k % nx], ys[k / nx]))
        .collect::<Result<Vec<T>>>()?;
    let mut rows = Vec::with_capacity(ys.len());
    let mut it = flat.into_iter();
    for _ in 0..ys.len() {
        rows.push(it.by_ref().take(nx).collect());
    }
    Ok(rows)
}

pub fn scan_plane(base: &SystemParams, x: &AxisSpec, y: &AxisSpec) -> Result<PhaseDiagramGrid> {
    scan_plane_with(base, x, y, &ScanOptions::default())
}

pub fn scan_plane_with(
    base: &SystemParams,
    x: &AxisSpec,
    y: &AxisSpec,
    opts: &ScanOptions,
) -> Result<PhaseDiagramGrid> {
    x.validate()?;
    y.validate()?;
    if x.knob == y.knob {
        return Err(Error::InvalidSweep(format!("both axes sweep {}", x.knob)));
    }
    let xs = x.values();
    let ys = y.values();
    let classification = grid_map(&xs, &ys, |xv, yv| {
        let p = base.with(x.knob, xv)?.with(y.knob, yv)?;
        Ok(eigenvalues_with(&build_hamiltonian(&p), opts.epsilon_real)?.classification())
    })?;
    Ok(PhaseDiagramGrid {
        x_axis: Axis { knob: x.knob, values: xs },
        y_axis: Axis { knob: y.knob, values: ys },
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalGammaSpec {
    pub omega_m_lo: f64,
    pub omega_m_hi: f64,
    pub n_points: usize,
    /// Final bisection bracket width in γ/g.
    pub gamma_tol: f64,
    /// Upper limit when searching for a γ with no real point.
    pub gamma_max: f64,
    pub epsilon_real: f64,
}

impl Default for CriticalGammaSpec {
    fn default() -> Self {
        Self {
            omega_m_lo: DEFAULT_OMEGA_M_RANGE.0,
            omega_m_hi: DEFAULT_OMEGA_M_RANGE.1,
            n_points: DEFAULT_LINE_POINTS,
            gamma_tol: 1e-4,
            gamma_max: 64.0,
            epsilon_real: EPSILON_REAL,
        }
    }
}

/// True when the ω_m line at this γ holds at least one all-real point.
pub fn line_has_real_point(base: &SystemParams, gamma: f64, spec: &CriticalGammaSpec) -> Result<bool> {
    let at_gamma = base.with(Knob::Gamma, gamma)?;
    for wm in linspace(spec.omega_m_lo, spec.omega_m_hi, spec.n_points) {
        if classify_at(&at_gamma, Knob::OmegaM, wm, spec.epsilon_real)?.is_real() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The largest γ (to within `gamma_tol`) whose ω_m line still contains an
/// all-real point. Uses `base` for everything except γ and ω_m.
pub fn critical_gamma(base: &SystemParams, spec: &CriticalGammaSpec) -> Result<f64> {
    if !(spec.omega_m_lo < spec.omega_m_hi) || spec.n_points < 2 || !(spec.gamma_tol > 0.0) {
        return Err(Error::InvalidSweep("critical_gamma needs lo < hi, n >= 2, tol > 0".into()));
    }
    if !line_has_real_point(base, 0.0, spec)? {
        return Err(Error::NoRealRegion);
    }
    let mut lo = 0.0;
    let mut hi = 2.0 * base.g();
    while line_has_real_point(base, hi, spec)? {
        lo = hi;
        hi *= 2.0;
        if hi > spec.gamma_max {
            return Err(Error::InvalidSweep(format!(
                "real points persist beyond gamma_max = {}",
                spec.gamma_max
            )));
        }
    }
    while hi - lo > spec.gamma_tol {
        let mid = 0.5 * (lo + hi);
        if line_has_real_point(base, mid, spec)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_resonant(p: &SystemParams) -> Result<()> {
    let wc = p.omega_c();
    if (p.omega_m() - wc).abs() > 1e-9 * wc.abs().max(1.0) {
        return Err(Error::InvalidParams(format!(
            "resonance gap needs omega_m = omega_c = {wc}, got {}",
            p.omega_m()
        )));
    }
    Ok(())
}

/// Splitting of the inner (2nd and 3rd) eigenvalues at ω_m = ω_c; zero when
/// the spectrum is complex.
pub fn resonance_gap(p: &SystemParams) -> Result<f64> {
    resonance_gap_with(p, EPSILON_REAL)
}

pub fn resonance_gap_with(p: &SystemParams, epsilon_real: f64) -> Result<f64> {
    check_resonant(p)?;
    let s = eigenvalues_with(&build_hamiltonian(p), epsilon_real)?;
    if !s.is_real() {
        return Ok(0.0);
    }
    let e = s.eigenvalues();
    Ok((e[2].re - e[1].re).max(0.0))
}

/// Resonance gap over (θ, γ); `delta_omega[i_gamma][i_theta]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapMap {
    pub theta_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub delta_omega: Vec<Vec<f64>>,
}

impl GapMap {
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.gamma_values.iter().enumerate().flat_map(move |(ig, &g)| {
            self.theta_values
                .iter()
                .enumerate()
                .map(move |(it, &t)| (t, g, self.delta_omega[ig][it]))
        })
    }
}

/// θ and γ axes for a gap map; θ in radians.
pub fn gap_map(
    base: &SystemParams,
    theta: (f64, f64),
    n_theta: usize,
    gamma: (f64, f64),
    n_gamma: usize,
) -> Result<GapMap> {
    gap_map_with(base, theta, n_theta, gamma, n_gamma, EPSILON_REAL)
}

pub fn gap_map_with(
    base: &SystemParams,
    theta: (f64, f64),
    n_theta: usize,
    gamma: (f64, f64),
    n_gamma: usize,
    epsilon_real: f64,
) -> Result<GapMap> {
    check_resonant(base)?;
    AxisSpec::new(Knob::Theta, theta.0, theta.1, n_theta).validate()?;
    AxisSpec::new(Knob::Gamma, gamma.0, gamma.1, n_gamma).validate()?;
    let theta_values = linspace(theta.0, theta.1, n_theta);
    let gamma_values = linspace(gamma.0, gamma.1, n_gamma);
    let delta_omega = grid_map(&theta_values, &gamma_values, |t, g| {
        let p = base.with(Knob::Theta, t)?.with(Knob::Gamma, g)?;
        resonance_gap_with(&p, epsilon_real)
    })?;
    Ok(GapMap {
        theta_values,
        gamma_values,
        delta_omega,
    })
}
