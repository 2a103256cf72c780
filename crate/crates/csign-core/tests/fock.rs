mod common;

use common::{c, CMatrix, SplitMix};
use csign_core::fock::{
    beam_splitter, dilate_contraction, embed, fock_basis, heralded_gate_coefficients, klm_nss_coefficient,
    klm_nss_setup, output_amplitude, unitarity_deviation, CsignCircuit, OccupationVector,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::HashMap;

fn random_unitary(rng: &mut SplitMix, m: usize) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| rng.complex());
    let h = (&a + a.adjoint()) * c(0.0, 1.5);
    h.exp()
}

/// Expands ∏_k (Σ_l U_kl a_l†)^{n_k} |0⟩ photon by photon and reads off
/// every output occupation.
fn creation_expansion(u: &CMatrix, input: &[u32]) -> HashMap<Vec<u32>, Complex64> {
    let m = u.nrows();
    let sources: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| std::iter::repeat(k).take(n as usize))
        .collect();
    let mut terms: HashMap<Vec<u32>, Complex64> = HashMap::new();
    terms.insert(vec![0; m], c(1.0, 0.0));
    for &k in &sources {
        let mut next: HashMap<Vec<u32>, Complex64> = HashMap::new();
        for (occ, amp) in &terms {
            for l in 0..m {
                let mut o = occ.clone();
                o[l] += 1;
                *next.entry(o).or_insert(c(0.0, 0.0)) += amp * u[(k, l)];
            }
        }
        terms = next;
    }
    let fact = |v: &[u32]| v.iter().map(|&n| (1..=n).product::<u32>() as f64).product::<f64>();
    let norm_in = fact(input).sqrt();
    terms
        .into_iter()
        .map(|(occ, a)| {
            let s = fact(&occ).sqrt();
            (occ, a * s / norm_in)
        })
        .collect()
}

#[test]
fn amplitudes_match_creation_operator_expansion() {
    let mut rng = SplitMix(13);
    for (m, n) in [(2, 3), (3, 3), (4, 4), (5, 2)] {
        let u = random_unitary(&mut rng, m);
        for input in fock_basis(m, n) {
            let oracle = creation_expansion(&u, input.counts());
            for output in fock_basis(m, n) {
                let got = output_amplitude(&u, &input, &output).unwrap();
                let want = oracle.get(output.counts()).copied().unwrap_or(c(0.0, 0.0));
                assert!(
                    (got - want).norm() < 1e-12,
                    "{:?} -> {:?}",
                    input.counts(),
                    output.counts()
                );
            }
        }
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let bs = beam_splitter(2, 0, 1);
    let one_one = OccupationVector::new(vec![1, 1]);
    assert!(output_amplitude(&bs, &one_one, &one_one).unwrap().norm() < 1e-14);
    let two_zero = OccupationVector::new(vec![2, 0]);
    assert!((output_amplitude(&bs, &one_one, &two_zero).unwrap().norm_sqr() - 0.5).abs() < 1e-14);
}

#[test]
fn mismatched_photon_numbers_rejected() {
    let u = CMatrix::identity(2, 2);
    let a = OccupationVector::new(vec![1, 0]);
    let b = OccupationVector::new(vec![1, 1]);
    assert!(output_amplitude(&u, &a, &b).is_err());
    assert!(output_amplitude(&u, &OccupationVector::new(vec![1]), &OccupationVector::new(vec![1])).is_err());
}

#[test]
fn nss_coefficients_closed_form() {
    let setup = klm_nss_setup();
    let alpha = heralded_gate_coefficients(&setup, 6).unwrap();
    let s2 = 2f64.sqrt();
    for (n, a) in alpha.iter().enumerate() {
        let want = 0.5 * (1.0 - s2).powi(n as i32) * (1.0 - (2.0 + s2) * n as f64);
        assert!((a - c(want, 0.0)).norm() < 1e-10, "n={n}: {a} vs {want}");
        assert!((klm_nss_coefficient(n as u32) - want).abs() < 1e-14);
    }
    // ½, ½, −½ on |0⟩, |1⟩, |2⟩
    assert!((alpha[0].re - 0.5).abs() < 1e-10);
    assert!((alpha[1].re - 0.5).abs() < 1e-10);
    assert!((alpha[2].re + 0.5).abs() < 1e-10);
}

#[test]
fn csign_truth_table() {
    let circuit = CsignCircuit::new();
    assert!(unitarity_deviation(circuit.unitary()) < 1e-12);
    let amps = circuit.logical_amplitudes().unwrap();
    for (i, row) in amps.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            let want = if i != j {
                0.0
            } else if i == 3 {
                -0.25
            } else {
                0.25
            };
            assert!((a - c(want, 0.0)).norm() < 1e-10, "({i},{j}) = {a}");
        }
    }
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        assert!((circuit.success_probability(a, b).unwrap() - 1.0 / 16.0).abs() < 1e-10);
    }
}

#[test]
fn embedded_blocks_stay_unitary() {
    let mut rng = SplitMix(3);
    let small = random_unitary(&mut rng, 3);
    let big = embed(&small, 6, &[4, 1, 2]);
    assert!(unitarity_deviation(&big) < 1e-12);
    assert_eq!(big[(0, 0)], c(1.0, 0.0));
    assert_eq!(big[(4, 1)], small[(0, 1)]);
}

#[test]
fn non_contraction_rejected() {
    let v = CMatrix::identity(2, 2) * c(1.5, 0.0);
    assert!(dilate_contraction(&v).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), m in 2usize..5, n in 1u32..5) {
        let mut rng = SplitMix(seed);
        let u = random_unitary(&mut rng, m);
        let basis = fock_basis(m, n);
        let input = &basis[(seed as usize) % basis.len()];
        let total: f64 = basis
            .iter()
            .map(|out| output_amplitude(&u, input, out).unwrap().norm_sqr())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dilation_is_unitary(seed in any::<u64>(), d in 1usize..7, shrink in 0.0f64..1.0) {
        let mut rng = SplitMix(seed);
        let a = CMatrix::from_fn(d, d, |_, _| rng.complex());
        let norm = a.clone().singular_values().max();
        let v = &a * c(shrink / norm, 0.0);
        let u = dilate_contraction(&v).unwrap();
        prop_assert!(unitarity_deviation(&u) < 1e-10);
        prop_assert!((u.view((0, 0), (d, d)) - &v).norm() < 1e-12);
    }
}
