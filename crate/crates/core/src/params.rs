//! Physical parameters of the two-cavity/two-magnon model.
//!
//! All frequencies and the gain/loss magnitude are dimensionless numbers in
//! units of the coupling strength `g`. [`SystemParams::normalized`] rescales a
//! parameter set given in raw units so that `g = 1`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six knobs of the model: two cavity frequencies, the shared magnon
/// frequency, balanced gain/loss `gamma`, coupling `g` and loop phase `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    omega_c1: f64,
    omega_c2: f64,
    omega_m: f64,
    gamma: f64,
    g: f64,
    theta: f64,
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl SystemParams {
    pub fn new(
        omega_c1: f64,
        omega_c2: f64,
        omega_m: f64,
        gamma: f64,
        g: f64,
        theta: f64,
    ) -> Result<Self> {
        let fields = [
            ("omega_c1", omega_c1),
            ("omega_c2", omega_c2),
            ("omega_m", omega_m),
            ("gamma", gamma),
            ("g", g),
            ("theta", theta),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if g <= 0.0 {
            return Err(Error::InvalidParams(format!("g must be > 0, got {g}")));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self {
            omega_c1,
            omega_c2,
            omega_m,
            gamma,
            g,
            theta: normalize_angle(theta),
        })
    }

    /// Parameters in units of `g` (g = 1).
    pub fn unit_coupling(
        omega_c1: f64,
        omega_c2: f64,
        omega_m: f64,
        gamma: f64,
        theta: f64,
    ) -> Result<Self> {
        Self::new(omega_c1, omega_c2, omega_m, gamma, 1.0, theta)
    }

    /// The configuration used throughout the figures: ω_c1 = 24, ω_c2 = 26.
    pub fn reference(omega_m: f64, gamma: f64, theta: f64) -> Result<Self> {
        Self::unit_coupling(24.0, 26.0, omega_m, gamma, theta)
    }

    /// Rescales every frequency and `gamma` by `1/g` and sets `g = 1`.
    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.g;
        Self {
            omega_c1: self.omega_c1 * s,
            omega_c2: self.omega_c2 * s,
            omega_m: self.omega_m * s,
            gamma: self.gamma * s,
            g: 1.0,
            theta: self.theta,
        }
    }

    pub fn omega_c1(&self) -> f64 {
        self.omega_c1
    }

    pub fn omega_c2(&self) -> f64 {
        self.omega_c2
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Loop phase in radians, in `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Mean cavity frequency (ω_c1 + ω_c2) / 2.
    pub fn omega_c(&self) -> f64 {
        0.5 * (self.omega_c2 + self.omega_c1)
    }

    /// Half the cavity splitting (ω_c2 − ω_c1) / 2.
    pub fn delta_c(&self) -> f64 {
        0.5 * (self.omega_c2 - self.omega_c1)
    }

    /// Magnon detuning from the mean cavity frequency, in units of `g`.
    pub fn detuning(&self) -> f64 {
        (self.omega_m - self.omega_c()) / self.g
    }

    pub fn get(&self, knob: Knob) -> f64 {
        match knob {
            Knob::OmegaC1 => self.omega_c1,
            Knob::OmegaC2 => self.omega_c2,
            Knob::OmegaM => self.omega_m,
            Knob::Gamma => self.gamma,
            Knob::G => self.g,
            Knob::Theta => self.theta,
        }
    }

    /// Returns a copy with one knob replaced, re-validating the result.
    pub fn with(&self, knob: Knob, value: f64) -> Result<Self> {
        let mut p = *self;
        match knob {
            Knob::OmegaC1 => p.omega_c1 = value,
            Knob::OmegaC2 => p.omega_c2 = value,
            Knob::OmegaM => p.omega_m = value,
            Knob::Gamma => p.gamma = value,
            Knob::G => p.g = value,
            Knob::Theta => p.theta = value,
        }
        Self::new(p.omega_c1, p.omega_c2, p.omega_m, p.gamma, p.g, p.theta)
    }

    /// Same parameters with ω_m placed at the mean cavity frequency.
    pub fn at_resonance(&self) -> Self {
        Self {
            omega_m: self.omega_c(),
            ..*self
        }
    }

    /// Knobs whose values differ between `self` and `other`.
    pub fn differing_knobs(&self, other: &Self) -> Vec<Knob> {
        Knob::ALL
            .iter()
            .copied()
            .filter(|&k| self.get(k) != other.get(k))
            .collect()
    }
}

/// Identifies one of the six scalar parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    OmegaC1,
    OmegaC2,
    OmegaM,
    Gamma,
    G,
    Theta,
}

impl Knob {
    pub const ALL: [Knob; 6] = [
        Knob::OmegaC1,
        Knob::OmegaC2,
        Knob::OmegaM,
        Knob::Gamma,
        Knob::G,
        Knob::Theta,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Knob::OmegaC1 => "omega_c1",
            Knob::OmegaC2 => "omega_c2",
            Knob::OmegaM => "omega_m",
            Knob::Gamma => "gamma",
            Knob::G => "g",
            Knob::Theta => "theta",
        }
    }
}

impl fmt::Display for Knob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Knob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Knob::ALL
            .iter()
            .copied()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown knob `{s}`")))
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
