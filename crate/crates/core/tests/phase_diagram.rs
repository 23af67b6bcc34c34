mod common;

use std::f64::consts::PI;

use magnon_ep_lab::hamiltonian::build_hamiltonian;
use magnon_ep_lab::params::{linspace, Knob};
use magnon_ep_lab::phase_diagram::{
    classify_at, critical_gamma, gap_map, line_has_real_point, resonance_gap, scan_line, scan_plane, AxisSpec,
    CriticalGammaSpec,
};
use magnon_ep_lab::spectral::{eigenvalues, EPSILON_REAL};
use magnon_ep_lab::{Classification, SystemParams};

use common::dense_eigenvalues;

/// θ positions of the two boundaries at γ/g = 0.5, ω_m = ω_c, from the first
/// verified run.
const THETA_EP1: f64 = 0.5053576987226215;
const THETA_EP2: f64 = 5.777827608456965;
/// P(θ = 45°), from the first verified run.
const P_45: f64 = 1.521331787109375;

fn resonant(gamma: f64, theta: f64) -> SystemParams {
    SystemParams::reference(25.0, gamma, theta).unwrap()
}

fn count(theta: f64, gamma: f64) -> usize {
    scan_line(&resonant(gamma, theta), Knob::OmegaM, 20.0, 30.0, 2001).unwrap().transition_count
}

#[test]
fn transition_counts() {
    assert_eq!(count(0.0, 0.5), 4);
    assert_eq!(count(0.0, 1.0), 4);
    assert_eq!(count(0.0, 1.46), 4);
    assert_eq!(count(0.0, 1.6), 0);
    assert_eq!(count(PI / 4.0, 0.5), 2);
    assert_eq!(count(PI / 4.0, 1.4), 4);
    assert_eq!(count(PI / 2.0, 0.5), 2);
}

#[test]
fn ep_brackets_reclassify_on_either_side() {
    for (theta, gamma) in [(0.0, 0.5), (0.0, 1.0), (PI / 4.0, 1.4), (PI / 2.0, 0.5)] {
        let base = resonant(gamma, theta);
        let scan = scan_line(&base, Knob::OmegaM, 20.0, 30.0, 2001).unwrap();
        assert_eq!(scan.ep_locations.len(), scan.transition_count);
        for (k, &(a, b)) in scan.ep_brackets.iter().enumerate() {
            assert!(b - a <= 10.0 * 1e-6 + 1e-12);
            let ep = scan.ep_locations[k];
            assert!(a <= ep && ep <= b);
            let ca = classify_at(&base, Knob::OmegaM, a, EPSILON_REAL).unwrap();
            let cb = classify_at(&base, Knob::OmegaM, b, EPSILON_REAL).unwrap();
            assert_ne!(ca, cb, "bracket {k} at theta {theta}, gamma {gamma}");
            // strictly between the grid points that first showed the change
            let step = 10.0 / 2000.0;
            let cell = ((ep - 20.0) / step).floor();
            assert!(ep > 20.0 + cell * step && ep < 20.0 + (cell + 1.0) * step);
        }
    }
}

#[test]
fn transition_parity_on_closed_theta_loop() {
    for gamma in [0.2, 0.5, 1.0, 1.4] {
        let s = scan_line(&resonant(gamma, 0.0), Knob::Theta, 0.0, 2.0 * PI, 721).unwrap();
        assert_eq!(s.classifications.first(), s.classifications.last());
        assert_eq!(s.transition_count % 2, 0, "gamma {gamma}");
    }
}

#[test]
fn theta_mirror_symmetry_is_exact() {
    let base = resonant(0.0, 0.0);
    let x = AxisSpec::new(Knob::Theta, 0.0, 2.0 * PI, 73);
    let y = AxisSpec::new(Knob::Gamma, 0.0, 2.0, 41);
    let grid = scan_plane(&base, &x, &y).unwrap();
    for iy in 0..41 {
        for ix in 0..73 {
            let theta = grid.x_axis.values[ix];
            let mirrored = classify_at(
                &base.with(Knob::Gamma, grid.y_axis.values[iy]).unwrap(),
                Knob::Theta,
                2.0 * PI - theta,
                EPSILON_REAL,
            )
            .unwrap();
            assert_eq!(grid.get(ix, iy), mirrored, "theta {theta}");
            assert_eq!(grid.get(ix, iy), grid.get(72 - ix, iy));
        }
    }
}

#[test]
fn hermitian_row_is_real() {
    let x = AxisSpec::new(Knob::OmegaM, 20.0, 30.0, 201);
    let y = AxisSpec::new(Knob::Gamma, 0.0, 2.0, 21);
    let grid = scan_plane(&resonant(0.0, 0.0), &x, &y).unwrap();
    assert!((0..201).all(|ix| grid.get(ix, 0) == Classification::AllReal));
    // the top row lies above P
    assert!((0..201).all(|ix| grid.get(ix, 20) == Classification::Complex));
}

#[test]
fn monotone_containment_ladder() {
    let spec = CriticalGammaSpec::default();
    let base = resonant(0.0, 0.0);
    let ladder: Vec<f64> = (0..=30).rev().map(|k| k as f64 * 0.05).collect();
    let mut seen_real = false;
    for g in ladder {
        let real = line_has_real_point(&base, g, &spec).unwrap();
        assert!(!seen_real || real, "containment broken at gamma {g}");
        seen_real |= real;
    }
    assert!(seen_real);
}

#[test]
fn plane_scan_is_thread_count_independent() {
    let base = resonant(0.5, 0.0);
    let x = AxisSpec::new(Knob::OmegaM, 20.0, 30.0, 61);
    let y = AxisSpec::new(Knob::Gamma, 0.0, 2.0, 37);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| scan_plane(&base, &x, &y).unwrap())
    };
    assert_eq!(run(1), run(4));
    let gaps = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| gap_map(&base.at_resonance(), (0.0, 2.0 * PI), 37, (0.0, 1.5), 16).unwrap())
    };
    let (a, b) = (gaps(1), gaps(3));
    for (ra, rb) in a.delta_omega.iter().zip(&b.delta_omega) {
        for (x, y) in ra.iter().zip(rb) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn critical_gamma_postcondition() {
    let spec = CriticalGammaSpec::default();
    for theta in [0.0, PI / 4.0] {
        let base = resonant(0.0, theta);
        let p = critical_gamma(&base, &spec).unwrap();
        assert!(line_has_real_point(&base, p - spec.gamma_tol, &spec).unwrap());
        assert!(!line_has_real_point(&base, p + spec.gamma_tol, &spec).unwrap());
    }
}

#[test]
fn critical_gamma_regression_at_45_degrees() {
    let spec = CriticalGammaSpec::default();
    let p0 = critical_gamma(&resonant(0.0, 0.0), &spec).unwrap();
    let p45 = critical_gamma(&resonant(0.0, PI / 4.0), &spec).unwrap();
    assert!((1.45..=1.49).contains(&p0));
    assert!((p45 - P_45).abs() < 1e-12, "{p45}");
    assert!((p45 - p0).abs() > spec.gamma_tol);
}

#[test]
fn theta_boundaries_at_resonance_regression() {
    let s = scan_line(&resonant(0.5, 0.0), Knob::Theta, 0.0, 2.0 * PI, 2001).unwrap();
    assert_eq!(s.transition_count, 2);
    assert!((s.ep_locations[0] - THETA_EP1).abs() < 1e-9);
    assert!((s.ep_locations[1] - THETA_EP2).abs() < 1e-9);
    assert!((s.ep_locations[0] + s.ep_locations[1] - 2.0 * PI).abs() < 1e-5);
}

#[test]
fn gap_phase_law() {
    let gap = |theta: f64| resonance_gap(&resonant(0.5, theta)).unwrap();
    for t in linspace(0.0, THETA_EP1 - 1e-3, 50) {
        assert_eq!(gap(t), 0.0);
    }
    let rising: Vec<f64> = linspace(THETA_EP1 + 1e-5, PI, 400).into_iter().map(gap).collect();
    assert!(rising.windows(2).all(|w| w[1] > w[0]));
    let mut x = 0.0;
    while x <= PI {
        assert!((gap(PI - x) - gap(PI + x)).abs() < 1e-8, "x = {x}");
        x += 0.01;
    }
    assert!(gap(PI) > gap(PI - 0.01) && gap(PI) > gap(PI + 0.01));
}

#[test]
fn resonance_gap_examples() {
    assert_eq!(resonance_gap(&resonant(0.5, 0.0)).unwrap(), 0.0);
    let degenerate = SystemParams::unit_coupling(25.0, 25.0, 25.0, 0.0, 0.0).unwrap();
    assert!(resonance_gap(&degenerate).unwrap() < 1e-7);
    let g45 = resonance_gap(&resonant(0.5, PI / 4.0)).unwrap();
    let g90 = resonance_gap(&resonant(0.5, PI / 2.0)).unwrap();
    assert!(g45 > 0.0 && g90 > g45);
    assert!(resonance_gap(&SystemParams::reference(25.5, 0.5, PI / 4.0).unwrap()).is_err());
}

#[test]
fn hermitian_gap_row_against_dense_scan() {
    for theta in linspace(0.0, 2.0 * PI, 361) {
        let p = resonant(0.0, theta);
        let gap = resonance_gap(&p).unwrap();
        let mut re: Vec<f64> = dense_eigenvalues(&build_hamiltonian(&p)).iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((gap - (re[2] - re[1])).abs() < 1e-9);
        if (theta.cos() - 1.0).abs() > 1e-9 {
            assert!(gap > 0.0, "theta {theta}");
        } else {
            assert!(gap < 1e-6);
        }
    }
}

#[test]
fn gap_rows_peak_at_pi() {
    let map = gap_map(&resonant(0.0, 0.0), (0.0, 2.0 * PI), 181, (0.0, 1.5), 16).unwrap();
    for (ig, row) in map.delta_omega.iter().enumerate() {
        let max = row.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        assert_eq!(row[90], max, "gamma {}", map.gamma_values[ig]);
    }
}

#[test]
fn gap_zero_set_matches_complex_set_off_the_hermitian_row() {
    let base = resonant(0.0, 0.0);
    let (nt, ng) = (91, 71);
    // γ nodes at odd hundredths miss both γ = 0 and the exact EP at γ = g
    let map = gap_map(&base, (0.0, 2.0 * PI), nt, (0.01, 1.41), ng).unwrap();
    let grid = scan_plane(
        &base,
        &AxisSpec::new(Knob::Theta, 0.0, 2.0 * PI, nt),
        &AxisSpec::new(Knob::Gamma, 0.01, 1.41, ng),
    )
    .unwrap();
    for iy in 0..ng {
        for ix in 0..nt {
            assert_eq!(map.delta_omega[iy][ix] == 0.0, grid.get(ix, iy) == Classification::Complex);
        }
    }
}

#[test]
fn canonical_grid_disagrees_only_at_exact_degeneracies() {
    // A node sitting exactly on a degeneracy has a real spectrum and a zero
    // gap at once: the Hermitian diabolic points (γ = 0, θ = 0 and 2π) and
    // the exceptional point at θ = 60°, γ = g.
    let base = resonant(0.0, 0.0);
    let map = gap_map(&base, (0.0, 2.0 * PI), 181, (0.0, 1.4), 141).unwrap();
    let grid = scan_plane(
        &base,
        &AxisSpec::new(Knob::Theta, 0.0, 2.0 * PI, 181),
        &AxisSpec::new(Knob::Gamma, 0.0, 1.4, 141),
    )
    .unwrap();
    let mismatches: Vec<(usize, usize)> = (0..141)
        .flat_map(|iy| (0..181).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| (map.delta_omega[iy][ix] == 0.0) != (grid.get(ix, iy) == Classification::Complex))
        .collect();
    assert!(mismatches.contains(&(0, 0)) && mismatches.contains(&(180, 0)));
    assert!(mismatches.contains(&(30, 100)));
    for &(ix, iy) in &mismatches {
        let p = base
            .with(Knob::Theta, map.theta_values[ix])
            .unwrap()
            .with(Knob::Gamma, map.gamma_values[iy])
            .unwrap();
        let s = eigenvalues(&build_hamiltonian(&p)).unwrap();
        assert!(s.is_real() && s.coalescence() < 1e-7, "cell ({ix}, {iy})");
    }
}
