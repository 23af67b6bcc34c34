use itertools::Itertools;
use num_complex::Complex64;

use super::eigenvalues;
use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::matrix::DIM;
use crate::params::{linspace, Knob, SystemParams};

/// Eigenvalue branches along a one-knob sweep. `branches[b][i]` is branch `b`
/// at `parameter_values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSweep {
    pub knob: Knob,
    pub parameter_values: Vec<f64>,
    pub branches: [Vec<Complex64>; DIM],
}

impl BranchSweep {
    pub fn len(&self) -> usize {
        self.parameter_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_values.is_empty()
    }

    /// The four branch values at sweep index `i`.
    pub fn at(&self, i: usize) -> [Complex64; DIM] {
        std::array::from_fn(|b| self.branches[b][i])
    }
}

/// `n` copies of `base` with `knob` stepped uniformly over `[lo, hi]`.
pub fn sweep_points(base: &SystemParams, knob: Knob, lo: f64, hi: f64, n: usize) -> Result<Vec<SystemParams>> {
    linspace(lo, hi, n).into_iter().map(|v| base.with(knob, v)).collect()
}

fn sweep_knob(points: &[SystemParams]) -> Result<Knob> {
    let mut knob = None;
    for pair in points.windows(2) {
        let diff = pair[0].differing_knobs(&pair[1]);
        match diff.as_slice() {
            [] => {}
            [k] => match knob {
                None => knob = Some(*k),
                Some(prev) if prev == *k => {}
                Some(prev) => {
                    return Err(Error::InvalidSweep(format!("sweep changes both {prev} and {k}")));
                }
            },
            many => {
                let ids: Vec<_> = many.iter().map(|k| k.id()).collect();
                return Err(Error::InvalidSweep(format!(
                    "consecutive points differ in {}",
                    ids.join(", ")
                )));
            }
        }
    }
    Ok(knob.unwrap_or(Knob::OmegaM))
}

/// Follows eigenvalue branches through a sweep.
///
/// The first point uses the sorted spectrum order. At every later point the
/// new eigenvalues are assigned by the permutation minimizing the total
/// complex-plane displacement from the previous point, searched exhaustively
/// over all 4! candidates (earliest candidate wins ties).
pub fn track_branches(points: &[SystemParams]) -> Result<BranchSweep> {
    if points.len() < 2 {
        return Err(Error::InvalidSweep(format!("need at least 2 points, got {}", points.len())));
    }
    let knob = sweep_knob(points)?;
    let permutations: Vec<Vec<usize>> = (0..DIM).permutations(DIM).collect();

    let mut branches: [Vec<Complex64>; DIM] = std::array::from_fn(|_| Vec::with_capacity(points.len()));
    let mut prev = *eigenvalues(&build_hamiltonian(&points[0]))?.eigenvalues();
    for (b, z) in prev.iter().enumerate() {
        branches[b].push(*z);
    }
    for p in &points[1..] {
        let next = *eigenvalues(&build_hamiltonian(p))?.eigenvalues();
        let mut best = (f64::INFINITY, &permutations[0]);
        for perm in &permutations {
            let cost: f64 = (0..DIM).map(|b| (next[perm[b]] - prev[b]).norm()).sum();
            if cost < best.0 {
                best = (cost, perm);
            }
        }
        let assigned: [Complex64; DIM] = std::array::from_fn(|b| next[best.1[b]]);
        for (b, z) in assigned.iter().enumerate() {
            branches[b].push(*z);
        }
        prev = assigned;
    }
    Ok(BranchSweep {
        knob,
        parameter_values: points.iter().map(|p| p.get(knob)).collect(),
        branches,
    })
}
