//! Spectral physics of a pseudo-Hermitian system of two cavity modes and two
//! magnon modes with balanced gain and loss and a tunable coupling phase.
//!
//! The crate builds the 4×4 model Hamiltonian, finds its eigenvalues as the
//! roots of the characteristic polynomial, classifies parameter space into
//! real and complex (symmetry-broken) domains separated by exceptional points,
//! and evaluates the microwave transmission S21.

pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod matrix;
pub mod params;
pub mod phase_diagram;
pub mod spectral;
pub mod transmission;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix4;
pub use params::{Knob, SystemParams};
pub use spectral::{Classification, Spectrum};
