//! Eigenvalue spectra of the 4×4 model, real/complex classification, EP
//! proximity, and branch tracking across parameter sweeps.
//!
//! Eigenvalues are the roots of det(ω I − H). The characteristic polynomial
//! is formed on a trace-centred copy of H so its coefficients stay O(g⁴)
//! instead of O(ω⁴), then rooted with Durand–Kerner and polished by Newton.
//! No eigenvectors are computed; exceptional points are located purely by
//! eigenvalue coalescence.

mod branches;
pub mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::characteristic_polynomial;
use crate::matrix::{ComplexMatrix4, DIM};
use roots::{coefficient_scale, quartic_roots, RootOptions};

pub use branches::{sweep_points, track_branches, BranchSweep};

/// Default threshold on |Im λ| (units of g) below which an eigenvalue is real.
pub const EPSILON_REAL: f64 = 1e-7;

/// Polished roots closer than this are snapped onto an exact conjugate pair.
pub const SYMMETRIZE_TOL: f64 = 1e-9;

/// Imaginary coefficient noise below this (relative) is dropped before rooting.
pub const REAL_COEFFICIENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    #[serde(rename = "real")]
    AllReal,
    Complex,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::AllReal => "real",
            Classification::Complex => "complex",
        }
    }

    pub fn is_real(self) -> bool {
        self == Classification::AllReal
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Classification::AllReal),
            "complex" => Ok(Classification::Complex),
            other => Err(Error::InvalidParams(format!("unknown classification `{other}`"))),
        }
    }
}

/// Four eigenvalues sorted by (Re, Im), with their classification and the
/// minimum pairwise distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    eigenvalues: [Complex64; DIM],
    classification: Classification,
    coalescence: f64,
}

fn order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl Spectrum {
    pub fn new(mut eigenvalues: [Complex64; DIM], epsilon_real: f64) -> Self {
        eigenvalues.sort_by(order);
        Self {
            classification: classify_spectrum(&eigenvalues, epsilon_real),
            coalescence: coalescence_measure(&eigenvalues),
            eigenvalues,
        }
    }

    pub fn eigenvalues(&self) -> &[Complex64; DIM] {
        &self.eigenvalues
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn is_real(&self) -> bool {
        self.classification.is_real()
    }

    pub fn coalescence(&self) -> f64 {
        self.coalescence
    }

    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of `h` with the default reality threshold.
pub fn eigenvalues(h: &ComplexMatrix4) -> Result<Spectrum> {
    eigenvalues_with(h, EPSILON_REAL)
}

pub fn eigenvalues_with(h: &ComplexMatrix4, epsilon_real: f64) -> Result<Spectrum> {
    let roots = eigenvalue_roots(h)?;
    Ok(Spectrum::new(roots, epsilon_real))
}

/// Unsorted polished roots of det(ω I − H), after conjugate-pair snapping.
fn eigenvalue_roots(h: &ComplexMatrix4) -> Result<[Complex64; DIM]> {
    if !h.is_finite() {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    let shift = h.trace() / DIM as f64;
    let mut coeffs = characteristic_polynomial(&h.shifted(shift));
    let scale = coefficient_scale(&coeffs);
    let imag = coeffs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag <= REAL_COEFFICIENT_TOL * scale {
        coeffs.iter_mut().for_each(|z| z.im = 0.0);
    }
    let mut roots = quartic_roots(&coeffs, &RootOptions::default())?;
    symmetrize_pairs(&mut roots);
    Ok(roots.map(|z| z + shift))
}

/// Snaps near-coincident roots sitting on the real axis onto an exact
/// conjugate pair (shared real part, mirrored imaginary parts).
fn symmetrize_pairs(roots: &mut [Complex64; DIM]) {
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let (a, b) = (roots[i], roots[j]);
            let tol = SYMMETRIZE_TOL * a.norm().max(b.norm()).max(1.0);
            if (a - b).norm() < tol && (0.5 * (a.im + b.im)).abs() < tol {
                let re = 0.5 * (a.re + b.re);
                let im = 0.5 * (a.im - b.im).abs();
                roots[i] = Complex64::new(re, -im);
                roots[j] = Complex64::new(re, im);
            }
        }
    }
}

/// `AllReal` iff every |Im λ| is below `epsilon_real`.
pub fn classify_spectrum(eigs: &[Complex64; DIM], epsilon_real: f64) -> Classification {
    debug_assert!(epsilon_real > 0.0);
    if eigs.iter().all(|z| z.im.abs() < epsilon_real) {
        Classification::AllReal
    } else {
        Classification::Complex
    }
}

/// Minimum pairwise distance |λ_i − λ_j|; zero at an exact coalescence.
pub fn coalescence_measure(eigs: &[Complex64; DIM]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            best = best.min((eigs[i] - eigs[j]).norm());
        }
    }
    best
}
