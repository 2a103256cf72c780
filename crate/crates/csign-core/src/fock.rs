//! Multimode Fock-state amplitudes through linear interferometers.
//!
//! Unitaries act on creation operators as a_k† → Σ_l U[k, l] a_l†, so row k
//! is the input mode. Cascaded stages compose left to right: first stage U1,
//! then U2, gives U1·U2.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{log_factorial, permanent, MAX_PERMANENT_DIM};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on ‖U†U − I‖_max for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Inserts `n` photons at position `mode`, shifting later modes up.
    pub fn with_inserted(&self, mode: usize, n: u32) -> Self {
        let mut c = self.0.clone();
        c.insert(mode, n);
        Self(c)
    }

    fn ln_norm_factor(&self) -> f64 {
        self.0.iter().map(|&c| log_factorial(c as u64)).sum()
    }

    /// Mode index repeated once per photon.
    fn expanded(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(i).take(c as usize))
            .collect()
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("⟩")
    }
}

/// All occupation vectors with `photons` photons in `modes` modes, in
/// lexicographically decreasing order.
pub fn fock_basis(modes: usize, photons: u32) -> Vec<OccupationVector> {
    fn rec(modes: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<OccupationVector>) {
        if cur.len() + 1 == modes {
            cur.push(left);
            out.push(OccupationVector(cur.clone()));
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(modes, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(OccupationVector(Vec::new()));
        }
        return out;
    }
    rec(modes, photons, &mut Vec::with_capacity(modes), &mut out);
    out
}

pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// ⟨out| Û |in⟩ = perm(U_sub) / √(∏ in_i! ∏ out_j!).
pub fn output_amplitude(u: &CMatrix, input: &OccupationVector, output: &OccupationVector) -> Result<Complex64> {
    let m = u.nrows();
    for occ in [input, output] {
        if occ.modes() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: occ.modes(),
            });
        }
    }
    let (n_in, n_out) = (input.total(), output.total());
    if n_in != n_out {
        return Err(Error::PhotonMismatch {
            input: n_in,
            output: n_out,
        });
    }
    if n_in as usize > MAX_PERMANENT_DIM {
        return Err(Error::DimensionExceeded {
            dim: n_in as usize,
            max: MAX_PERMANENT_DIM,
        });
    }
    let rows = input.expanded();
    let cols = output.expanded();
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]);
    let p = permanent(&sub)?;
    let norm = (-0.5 * (input.ln_norm_factor() + output.ln_norm_factor())).exp();
    Ok(p * norm)
}

/// Interferometer plus ancilla preparation and herald pattern defining a
/// conditional single-mode gate.
#[derive(Debug, Clone)]
pub struct HeraldedGateSetup {
    unitary: CMatrix,
    ancilla_in: OccupationVector,
    herald_out: OccupationVector,
    signal_mode: usize,
}

impl HeraldedGateSetup {
    /// Signal on mode 0; ancilla and herald patterns cover modes 1.. in order.
    pub fn new(unitary: CMatrix, ancilla_in: OccupationVector, herald_out: OccupationVector) -> Result<Self> {
        Self::with_signal_mode(unitary, ancilla_in, herald_out, 0)
    }

    pub fn with_signal_mode(
        unitary: CMatrix,
        ancilla_in: OccupationVector,
        herald_out: OccupationVector,
        signal_mode: usize,
    ) -> Result<Self> {
        let m = unitary.nrows();
        if unitary.ncols() != m {
            return Err(Error::NotSquare {
                rows: m,
                cols: unitary.ncols(),
            });
        }
        if m == 0 || signal_mode >= m {
            return Err(crate::error::invalid(format!(
                "signal mode {signal_mode} outside a {m}-mode setup"
            )));
        }
        for occ in [&ancilla_in, &herald_out] {
            if occ.modes() + 1 != m {
                return Err(Error::ModeMismatch {
                    expected: m - 1,
                    got: occ.modes(),
                });
            }
        }
        if ancilla_in.total() != herald_out.total() {
            return Err(Error::PhotonMismatch {
                input: ancilla_in.total(),
                output: herald_out.total(),
            });
        }
        let deviation = unitarity_deviation(&unitary);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            unitary,
            ancilla_in,
            herald_out,
            signal_mode,
        })
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn ancilla_in(&self) -> &OccupationVector {
        &self.ancilla_in
    }

    pub fn herald_out(&self) -> &OccupationVector {
        &self.herald_out
    }

    pub fn signal_mode(&self) -> usize {
        self.signal_mode
    }
}

/// α_n = ⟨n, herald| Û |n, ancilla⟩ for n = 0..=n_max.
pub fn heralded_gate_coefficients(setup: &HeraldedGateSetup, n_max: u32) -> Result<Vec<Complex64>> {
    let anc = setup.ancilla_in.total();
    if (n_max + anc) as usize > MAX_PERMANENT_DIM {
        return Err(Error::DimensionExceeded {
            dim: (n_max + anc) as usize,
            max: MAX_PERMANENT_DIM,
        });
    }
    (0..=n_max)
        .map(|n| {
            let input = setup.ancilla_in.with_inserted(setup.signal_mode, n);
            let output = setup.herald_out.with_inserted(setup.signal_mode, n);
            output_amplitude(&setup.unitary, &input, &output)
        })
        .collect()
}

/// Embeds the contraction `v` (‖v‖₂ ≤ 1) as the upper-left block of a unitary
/// of twice its size.
pub fn dilate_contraction(v: &CMatrix) -> Result<CMatrix> {
    let d = v.nrows();
    if v.ncols() != d {
        return Err(Error::NotSquare {
            rows: d,
            cols: v.ncols(),
        });
    }
    let svd = v.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let norm = sigma.iter().cloned().fold(0.0, f64::max);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction { norm });
    }
    let w = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let defect = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        sigma.iter().map(|s| Complex64::new((1.0 - s * s).max(0.0).sqrt(), 0.0)),
    ));
    // (I − v v†)^{1/2} and (I − v† v)^{1/2}
    let d_left = w * &defect * w.adjoint();
    let d_right = v_t.adjoint() * &defect * v_t;

    let mut u = CMatrix::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(v);
    u.view_mut((0, d), (d, d)).copy_from(&d_left);
    u.view_mut((d, 0), (d, d)).copy_from(&d_right);
    u.view_mut((d, d), (d, d)).copy_from(&(-v.adjoint()));

    for j in d..2 * d {
        let col = u.column(j);
        if let Some(first) = col.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = first.conj() / first.norm();
            for i in 0..2 * d {
                u[(i, j)] *= phase;
            }
        }
    }
    Ok(u)
}

/// The three-mode NSS interferometer (signal, one-photon ancilla, vacuum ancilla).
pub fn klm_nss_unitary() -> CMatrix {
    let s2 = 2f64.sqrt();
    let a = 1.0 - s2;
    let b = -(2f64.powf(-0.25));
    let c = (3.0 / s2 - 2.0).sqrt();
    let e = 1.0 / s2 - 0.5;
    let f = s2 - 0.5;
    let r = [a, b, c, b, 0.5, e, c, e, f];
    CMatrix::from_iterator(3, 3, r.iter().map(|&x| Complex64::new(x, 0.0))).transpose()
}

/// NSS gate: one photon into mode 1, vacuum into mode 2, herald (1, 0).
pub fn klm_nss_setup() -> HeraldedGateSetup {
    HeraldedGateSetup::new(
        klm_nss_unitary(),
        OccupationVector::new(vec![1, 0]),
        OccupationVector::new(vec![1, 0]),
    )
    .expect("the NSS matrix is unitary")
}

/// Closed-form NSS coefficient ½(1−√2)^n [1 − (2+√2) n].
pub fn klm_nss_coefficient(n: u32) -> f64 {
    let s2 = 2f64.sqrt();
    0.5 * (1.0 - s2).powi(n as i32) * (1.0 - (2.0 + s2) * n as f64)
}

/// Embeds a k×k unitary acting on the listed modes into an identity on `modes`.
pub fn embed(small: &CMatrix, modes: usize, targets: &[usize]) -> CMatrix {
    let mut u = CMatrix::identity(modes, modes);
    for &t in targets {
        u[(t, t)] = Complex64::new(0.0, 0.0);
    }
    for (a, &i) in targets.iter().enumerate() {
        for (b, &j) in targets.iter().enumerate() {
            u[(i, j)] = small[(a, b)];
        }
    }
    u
}

/// 50:50 beam splitter [[1, 1], [1, −1]]/√2 between modes i and j.
pub fn beam_splitter(modes: usize, i: usize, j: usize) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    );
    embed(&bs, modes, &[i, j])
}

/// The linear-optics CSIGN gate built from two NSS gates between two 50:50
/// beam splitters.
///
/// Mode layout: 0 and 1 carry the logical-one rails of qubits A and B, 2 and
/// 3 their logical-zero rails, 4–5 and 6–7 the ancillas of the NSS gates on
/// modes 0 and 1.
#[derive(Debug, Clone)]
pub struct CsignCircuit {
    unitary: CMatrix,
}

impl CsignCircuit {
    pub const MODES: usize = 8;

    pub fn new() -> Self {
        let nss = klm_nss_unitary();
        let bs = beam_splitter(Self::MODES, 0, 1);
        let nss_a = embed(&nss, Self::MODES, &[0, 4, 5]);
        let nss_b = embed(&nss, Self::MODES, &[1, 6, 7]);
        Self {
            unitary: &bs * nss_a * nss_b * &bs,
        }
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// Occupation of all eight modes for logical input (a, b), ancillas
    /// prepared as |1,0⟩ per NSS gate.
    pub fn logical_occupation(a: bool, b: bool) -> OccupationVector {
        OccupationVector::new(vec![a as u32, b as u32, !a as u32, !b as u32, 1, 0, 1, 0])
    }

    /// Heralded amplitude matrix between logical basis states, indexed by
    /// 2a + b for input (rows) and output (columns).
    pub fn logical_amplitudes(&self) -> Result<[[Complex64; 4]; 4]> {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            let input = Self::logical_occupation(i & 2 != 0, i & 1 != 0);
            for (j, cell) in m[i].iter_mut().enumerate() {
                let output = Self::logical_occupation(j & 2 != 0, j & 1 != 0);
                *cell = output_amplitude(&self.unitary, &input, &output)?;
            }
        }
        Ok(m)
    }

    /// Probability that both heralds fire and the output is in the logical
    /// subspace, for a logical basis input.
    pub fn success_probability(&self, a: bool, b: bool) -> Result<f64> {
        let amps = self.logical_amplitudes()?;
        let i = 2 * a as usize + b as usize;
        Ok(amps[i].iter().map(|z| z.norm_sqr()).sum())
    }
}

impl Default for CsignCircuit {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < tol
    }

    #[test]
    fn nss_matrix_is_unitary() {
        assert!(unitarity_deviation(&klm_nss_unitary()) < 1e-14);
    }

    #[test]
    fn nss_coefficients() {
        let a = heralded_gate_coefficients(&klm_nss_setup(), 6).unwrap();
        assert!(close(a[0], 0.5, 1e-12));
        assert!(close(a[1], 0.5, 1e-12));
        assert!(close(a[2], -0.5, 1e-12));
        assert!(close(a[3], 0.328427, 1e-6));
        for (n, z) in a.iter().enumerate() {
            assert!(close(*z, klm_nss_coefficient(n as u32), 1e-12));
        }
    }

    #[test]
    fn hong_ou_mandel() {
        let bs = beam_splitter(2, 0, 1);
        let one_one = OccupationVector::new(vec![1, 1]);
        assert!(output_amplitude(&bs, &one_one, &one_one).unwrap().norm() < 1e-15);
    }

    #[test]
    fn mismatch_errors() {
        let id = CMatrix::identity(2, 2);
        let r = output_amplitude(&id, &vec![1, 0].into(), &vec![1, 1].into());
        assert!(matches!(r, Err(Error::PhotonMismatch { input: 1, output: 2 })));
        let bad = CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        let r = HeraldedGateSetup::new(bad, vec![0].into(), vec![0].into());
        assert!(matches!(r, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn basis_size() {
        // C(n + m − 1, n)
        assert_eq!(fock_basis(4, 3).len(), 20);
        assert_eq!(fock_basis(1, 5), vec![OccupationVector::new(vec![5])]);
    }

    #[test]
    fn dilation_of_scalar() {
        let v = CMatrix::from_element(1, 1, Complex64::new(0.5, 0.0));
        let u = dilate_contraction(&v).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        assert!((u[(0, 1)].norm() - s3).abs() < 1e-12);
        assert!((u[(1, 0)].norm() - s3).abs() < 1e-12);
        assert!((u[(1, 1)].norm() - 0.5).abs() < 1e-12);
        assert!(unitarity_deviation(&u) < 1e-12);
        let too_big = CMatrix::from_element(1, 1, Complex64::new(1.5, 0.0));
        assert!(matches!(
            dilate_contraction(&too_big),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn csign_truth_table() {
        let c = CsignCircuit::new();
        let amps = c.logical_amplitudes().unwrap();
        for (i, row) in amps.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let expect = match (i == j, i) {
                    (false, _) => 0.0,
                    (true, 3) => -0.25,
                    (true, _) => 0.25,
                };
                assert!(close(*z, expect, 1e-12), "({i},{j}) = {z}");
            }
        }
        assert!((c.success_probability(true, true).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    }
}
