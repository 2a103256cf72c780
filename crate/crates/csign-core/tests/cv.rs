mod common;

use common::{c, displacement_expm, state_densities, transfer_series, PolarQuadrature, SplitMix};
use csign_core::cv::{
    average_fidelity, displacement_matrix_element, dual_rail_fidelity, optimize_dual_rail_gain, optimize_gain, quality,
    success_probability, transfer_matrix_element, InputState,
};
use csign_core::special::Radius;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn transfer_element_matches_series() {
    let beta = c(1.0, 1.0);
    let closed = transfer_matrix_element(0, 2, 0.9, beta);
    let series = transfer_series(0, 2, 0.9, beta, 60);
    assert!((closed - series).norm() < 1e-10, "{closed} vs {series}");
    for (k, l) in [(1, 1), (1, 3), (2, 4), (0, 0)] {
        let b = c(0.4, -0.7);
        let a = transfer_matrix_element(k, l, 0.6, b);
        let s = transfer_series(k as usize, l as usize, 0.6, b, 60);
        assert!((a - s).norm() < 1e-10, "({k},{l})");
    }
    // lower triangle of the series vanishes too
    assert!(transfer_series(3, 1, 0.6, c(0.4, -0.7), 60).norm() < 1e-10);
}

#[test]
fn displacement_element_matches_expm() {
    let gamma = c(0.0, 0.7);
    let m = displacement_expm(gamma, 40);
    let closed = displacement_matrix_element(3, 1, gamma);
    assert!((closed - m[(3, 1)]).norm() < 1e-10);
    for k in 0..8 {
        for r in 0..8 {
            let g = c(-0.45, 0.3);
            let m = displacement_expm(g, 40);
            assert!((displacement_matrix_element(k, r, g) - m[(k as usize, r as usize)]).norm() < 1e-10);
        }
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let mut rng = SplitMix(20_240_611);
    let quads: Vec<(f64, PolarQuadrature)> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&b| (b, PolarQuadrature::standard(b)))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = rng.state(3);
        let state = InputState::new(psi.clone()).unwrap();
        for q in [0.5, 0.9] {
            for g in [q, 1.0] {
                for (b, quad) in &quads {
                    let sums = quad.integrate_many(|beta| {
                        let (p, fp) = state_densities(&psi, q, g, beta);
                        vec![c(p, 0.0), c(fp, 0.0)]
                    });
                    let r = Radius::Finite(*b);
                    let p = success_probability(&state, q, r).unwrap();
                    let f = average_fidelity(&state, q, g, r).unwrap();
                    worst = worst.max((p - sums[0].re).abs()).max((f.raw - sums[1].re).abs());
                }
            }
        }
    }
    assert!(worst < 1e-5, "max deviation {worst}");
}

#[test]
fn unconditioned_loss_channel_against_quadrature() {
    let q = 0.9;
    let quad = PolarQuadrature::standard(14.0);
    for n in 0..3usize {
        let mut psi = vec![c(0.0, 0.0); n + 1];
        psi[n] = c(1.0, 0.0);
        let num = quad.integrate(|b| c(state_densities(&psi, q, q, b).1, 0.0)).re;
        let closed = average_fidelity(&InputState::fock(n), q, q, Radius::Infinite)
            .unwrap()
            .raw;
        let want = q.powi(2 * n as i32);
        assert!((closed - want).abs() < 1e-9);
        assert!((num - want).abs() < 1e-6, "n={n} quadrature {num}");
    }
}

#[test]
fn quality_grows_with_radius() {
    let q = 0.9;
    for n in 0..3 {
        let s = InputState::fock(n);
        let mut prev = 0.0;
        for i in 1..=10 {
            let b = 0.5 * i as f64;
            let qv = quality(&s, q, q, Radius::Finite(b)).unwrap();
            assert!(qv >= prev - 1e-15, "n={n} B={b}");
            prev = qv;
        }
        let tiny = quality(&s, q, q, Radius::Finite(1e-6)).unwrap();
        assert!(tiny < 1e-10);
    }
}

#[test]
fn fock_two_is_worst_case() {
    for i in 1..20 {
        let q = i as f64 / 20.0;
        let f: Vec<f64> = (0..3)
            .map(|n| {
                average_fidelity(&InputState::fock(n), q, q, Radius::Infinite)
                    .unwrap()
                    .conditional
            })
            .collect();
        assert!(f[2] <= f[1] && f[1] <= f[0]);
    }
}

#[test]
fn gain_optimization_examples() {
    let r = Radius::Infinite;
    let (g0, _) = optimize_gain(&InputState::fock(0), 0.7, r).unwrap();
    assert!((g0 - 0.7).abs() < 1e-5);
    let (g1, _) = optimize_gain(&InputState::fock(1), 0.9, r).unwrap();
    assert!(g1 > 0.9 && g1 < 1.0, "g1 = {g1}");
    let two = InputState::fock(2);
    let (_, f2) = optimize_gain(&two, 0.9, r).unwrap();
    for g in [0.9, 1.0] {
        assert!(f2 >= average_fidelity(&two, 0.9, g, r).unwrap().conditional);
    }
}

#[test]
fn dual_rail_gain_law() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let qubits = [
        (c(1.0, 0.0), c(0.0, 0.0)),
        (c(h, 0.0), c(0.0, h)),
        (c(0.6, 0.0), c(0.8, 0.0)),
        (c(0.0, 0.0), c(1.0, 0.0)),
    ];
    for q in [0.8, 0.85, 0.9, 0.95] {
        let gs: Vec<f64> = qubits
            .iter()
            .map(|&(a, b)| optimize_dual_rail_gain(a, b, q).unwrap().0)
            .collect();
        for g in &gs {
            assert!((g - (0.6 + 0.4 * q)).abs() < 0.03);
            assert!((g - gs[0]).abs() < 1e-3);
        }
        // product approximation F(|0⟩)·F(|1⟩)
        let g = gs[0];
        let exact = dual_rail_fidelity(c(h, 0.0), c(h, 0.0), q, g).unwrap();
        let f0 = average_fidelity(&InputState::fock(0), q, g, Radius::Infinite)
            .unwrap()
            .raw;
        let f1 = average_fidelity(&InputState::fock(1), q, g, Radius::Infinite)
            .unwrap()
            .raw;
        assert!((exact - f0 * f1).abs() < 0.02, "q={q}: {exact} vs {}", f0 * f1);
    }
}

proptest! {
    #[test]
    fn transfer_phase_structure(k in 0u32..5, l in 0u32..5, q in 0.05f64..0.95, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let beta = c(re, im);
        prop_assume!(beta.norm() > 1e-3);
        let t = transfer_matrix_element(k, l, q, beta);
        prop_assume!(t.norm() > 1e-12);
        let expect = Complex64::from_polar(1.0, (k as f64 - l as f64) * beta.arg());
        prop_assert!((t / t.norm() - expect).norm() < 1e-9);
    }

    #[test]
    fn displacement_hermiticity(k in 0u32..10, r in 0u32..10, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let g = c(re, im);
        let a = displacement_matrix_element(k, r, g);
        let b = displacement_matrix_element(r, k, -g).conj();
        prop_assert!((a - b).norm() < 1e-12);
        if a.norm() > 1e-12 && g.norm() > 1e-3 {
            let ph = a / a.norm() * Complex64::from_polar(1.0, -(k as f64 - r as f64) * g.arg());
            prop_assert!((ph.im).abs() < 1e-9);
        }
    }

    #[test]
    fn probability_is_monotone_in_radius(q in 0.0f64..0.99, b in 0.01f64..6.0, seed in 0u64..1000) {
        let mut rng = SplitMix(seed);
        let s = InputState::new(rng.state(3)).unwrap();
        let p1 = success_probability(&s, q, Radius::Finite(b)).unwrap();
        let p2 = success_probability(&s, q, Radius::Finite(b * 1.1)).unwrap();
        prop_assert!((0.0..=1.0).contains(&p1));
        prop_assert!(p2 >= p1 - 1e-14);
    }
}
