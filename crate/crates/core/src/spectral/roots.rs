//! Roots of a complex quartic: Durand–Kerner simultaneous iteration followed
//! by a per-root Newton polish.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEGREE: usize = 4;

/// Quartic coefficients c0..c4 in ascending powers.
pub type Quartic = [Complex64; DEGREE + 1];

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_sweeps: usize,
    /// Durand–Kerner stops once every correction is below this (relative).
    pub sweep_tol: f64,
    pub max_newton: usize,
    /// Target |p(λ)| / max|c_k| for the Newton polish.
    pub polish_tol: f64,
    /// A root whose relative residual stays above this is a failure.
    pub accept_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 500,
            sweep_tol: 1e-15,
            max_newton: 50,
            polish_tol: 1e-12,
            accept_tol: 1e-8,
        }
    }
}

/// Horner evaluation of p and p′.
pub fn eval_with_derivative(c: &Quartic, z: Complex64) -> (Complex64, Complex64) {
    let mut p = c[DEGREE];
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..DEGREE).rev() {
        dp = dp * z + p;
        p = p * z + c[k];
    }
    (p, dp)
}

pub fn eval(c: &Quartic, z: Complex64) -> Complex64 {
    eval_with_derivative(c, z).0
}

/// Largest coefficient magnitude, the scale for residual tolerances.
pub fn coefficient_scale(c: &Quartic) -> f64 {
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Fujiwara's bound on the root moduli of a monic polynomial.
fn root_radius(monic: &Quartic) -> f64 {
    let mut bound: f64 = 0.0;
    for k in 1..=DEGREE {
        let mut a = monic[DEGREE - k].norm();
        if k == DEGREE {
            a *= 0.5;
        }
        bound = bound.max(a.powf(1.0 / k as f64));
    }
    2.0 * bound
}

fn durand_kerner(monic: &Quartic, opts: &RootOptions) -> [Complex64; DEGREE] {
    let radius = root_radius(monic).max(1e-3);
    // rotated start points avoid symmetric stagnation on real polynomials
    let mut z: [Complex64; DEGREE] = std::array::from_fn(|k| {
        let angle = std::f64::consts::TAU * k as f64 / DEGREE as f64 + 0.4;
        Complex64::from_polar(radius, angle)
    });
    for _ in 0..opts.max_sweeps {
        let mut max_step: f64 = 0.0;
        for i in 0..DEGREE {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..DEGREE {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge apart and keep going
                z[i] += Complex64::new(1e-10, 1e-10) * radius;
                max_step = f64::INFINITY;
                continue;
            }
            let step = eval(monic, z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step <= opts.sweep_tol {
            break;
        }
    }
    z
}

fn newton_polish(c: &Quartic, z0: Complex64, scale: f64, opts: &RootOptions) -> (Complex64, f64) {
    let mut z = z0;
    let mut residual = eval(c, z).norm();
    for _ in 0..opts.max_newton {
        if residual <= opts.polish_tol * scale {
            break;
        }
        let (p, dp) = eval_with_derivative(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let r = eval(c, candidate).norm();
        if !(r < residual) {
            break;
        }
        z = candidate;
        residual = r;
    }
    (z, residual)
}

/// The four roots of `c`, each polished until |p(λ)| < polish_tol·scale or the
/// Newton step stops improving.
pub fn quartic_roots(c: &Quartic, opts: &RootOptions) -> Result<[Complex64; DEGREE]> {
    let lead = c[DEGREE];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParams("leading coefficient is zero".into()));
    }
    let monic: Quartic = std::array::from_fn(|k| c[k] / lead);
    let scale = coefficient_scale(&monic);
    let mut roots = durand_kerner(&monic, opts);
    for (index, root) in roots.iter_mut().enumerate() {
        let (z, residual) = newton_polish(&monic, *root, scale, opts);
        let relative = residual / scale;
        if !(relative <= opts.accept_tol) {
            return Err(Error::ConvergenceFailure { index, residual: relative });
        }
        *root = z;
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(r: [Complex64; 4]) -> Quartic {
        // expand Π(z − r_i)
        let mut p = [c(0.0, 0.0); 5];
        p[0] = c(1.0, 0.0);
        for (deg, root) in r.iter().enumerate() {
            for k in (0..=deg + 1).rev() {
                let lower = if k > 0 { p[k - 1] } else { c(0.0, 0.0) };
                p[k] = lower - *root * p[k];
            }
        }
        p
    }

    fn sorted(mut r: [Complex64; 4]) -> [Complex64; 4] {
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        r
    }

    #[test]
    fn recovers_distinct_roots() {
        let want = [c(-1.5, 0.0), c(0.25, -2.0), c(0.25, 2.0), c(3.0, 0.0)];
        let got = sorted(quartic_roots(&from_roots(want), &RootOptions::default()).unwrap());
        for (g, w) in got.iter().zip(sorted(want)) {
            assert!((g - w).norm() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn handles_double_root() {
        let want = [c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let got = sorted(quartic_roots(&from_roots(want), &RootOptions::default()).unwrap());
        for (g, w) in got.iter().zip(sorted(want)) {
            assert!((g - w).norm() < 1e-7, "{g} vs {w}");
        }
    }

    #[test]
    fn quadruple_root_at_origin() {
        let p = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let got = quartic_roots(&p, &RootOptions::default()).unwrap();
        for g in got {
            assert!(g.norm() < 1e-3, "{g}");
        }
    }

    #[test]
    fn zero_leading_coefficient_is_an_error() {
        let p = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(quartic_roots(&p, &RootOptions::default()).is_err());
    }

    #[test]
    fn starved_iteration_reports_failure() {
        let want = [c(-1.5, 0.0), c(0.25, -2.0), c(0.25, 2.0), c(3.0, 0.0)];
        let opts = RootOptions { max_sweeps: 1, max_newton: 0, ..RootOptions::default() };
        let err = quartic_roots(&from_roots(want), &opts).unwrap_err();
        assert!(matches!(err, Error::ConvergenceFailure { .. }));
    }
}
