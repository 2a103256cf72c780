//! Independent reference computations used only by tests: polar
//! Gauss-Legendre quadrature, brute-force permanents, matrix-exponential
//! displacements and direct integrands for the teleportation densities.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let step = pn / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// ∫_{|β| ≤ radius} f(β) d²β with `nr` radial and `nt` angular Gauss-Legendre nodes.
pub struct PolarQuadrature {
    nodes: Vec<(Complex64, f64)>,
}

impl PolarQuadrature {
    pub fn new(radius: f64, nr: usize, nt: usize) -> Self {
        let (xr, wr) = gauss_legendre(nr);
        let (xt, wt) = gauss_legendre(nt);
        let mut nodes = Vec::with_capacity(nr * nt);
        for (r0, rw) in xr.iter().zip(&wr) {
            let r = 0.5 * radius * (r0 + 1.0);
            for (t0, tw) in xt.iter().zip(&wt) {
                let th = PI * (t0 + 1.0);
                let w = rw * 0.5 * radius * tw * PI * r;
                nodes.push((Complex64::from_polar(r, th), w));
            }
        }
        Self { nodes }
    }

    pub fn standard(radius: f64) -> Self {
        Self::new(radius, 200, 128)
    }

    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().map(|&(b, w)| f(b) * w).sum()
    }

    pub fn integrate_many<F: FnMut(Complex64) -> Vec<Complex64>>(&self, mut f: F) -> Vec<Complex64> {
        let mut acc: Vec<Complex64> = Vec::new();
        for &(b, w) in &self.nodes {
            let v = f(b);
            if acc.is_empty() {
                acc = vec![c(0.0, 0.0); v.len()];
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x * w;
            }
        }
        acc
    }
}

/// Permanent as the plain sum over all permutations.
pub fn brute_force_permanent(m: &CMatrix) -> Complex64 {
    fn rec(m: &CMatrix, row: usize, used: &mut Vec<bool>) -> Complex64 {
        if row == m.nrows() {
            return c(1.0, 0.0);
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..m.ncols() {
            if !used[j] {
                used[j] = true;
                acc += m[(row, j)] * rec(m, row + 1, used);
                used[j] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.ncols()])
}

pub fn annihilation(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// exp(γa† − γ*a) on a `dim`-level truncation.
pub fn displacement_expm(gamma: Complex64, dim: usize) -> CMatrix {
    let a = annihilation(dim);
    let gen = a.adjoint() * gamma - &a * gamma.conj();
    gen.exp()
}

/// exp[(−1)^{n̂+1}(γa† + γ*a)] on a `dim`-level truncation.
pub fn f_deformed_expm(gamma: Complex64, dim: usize) -> CMatrix {
    let a = annihilation(dim);
    let parity = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            c(if i % 2 == 1 { 1.0 } else { -1.0 }, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let gen = parity * (a.adjoint() * gamma + &a * gamma.conj());
    gen.exp()
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        0.0
    } else {
        fact(n) / (fact(k) * fact(n - k))
    }
}

/// ⟨k|D(γ)|r⟩ by the finite sum over t (valid for all k, r).
pub fn displacement_sum(k: u32, r: u32, gamma: Complex64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for t in 0..=k.min(r) {
        acc += gamma.powu(k - t) * (-gamma.conj()).powu(r - t) * (binom(k, t) / fact(r - t));
    }
    acc * ((fact(r) / fact(k)).sqrt() * (-0.5 * gamma.norm_sqr()).exp())
}

/// ⟨k| √((1−q²)/π)·D(qβ) q^{n̂} D(−β) |l⟩ by explicit truncated products.
pub fn transfer_series(k: usize, l: usize, q: f64, beta: Complex64, dim: usize) -> Complex64 {
    let dq = displacement_expm(beta * q, dim);
    let dm = displacement_expm(-beta, dim);
    let mut acc = c(0.0, 0.0);
    for n in 0..dim {
        acc += dq[(k, n)] * q.powi(n as i32) * dm[(n, l)];
    }
    acc * ((1.0 - q * q) / PI).sqrt()
}

/// Transfer matrix with the closed-form elements of the library under test,
/// up to `dim` levels.
pub fn transfer_matrix(q: f64, beta: Complex64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |k, l| {
        csign_core::cv::transfer_matrix_element(k as u32, l as u32, q, beta)
    })
}

/// (p(β), f(β)·p(β)) for state teleportation of `psi` with gain g.
pub fn state_densities(psi: &[Complex64], q: f64, g: f64, beta: Complex64) -> (f64, f64) {
    let dim = psi.len();
    let t = transfer_matrix(q, beta, dim);
    let v = &t * nalgebra::DVector::from_column_slice(psi);
    let p = v.norm_squared();
    // fidelity overlap ⟨ψ|D(γ)|v⟩, with the output truncated where ψ has support
    let gamma = beta * (g - q);
    let mut ov = c(0.0, 0.0);
    for (k, ck) in psi.iter().enumerate() {
        for (r, vr) in v.iter().enumerate() {
            ov += ck.conj() * displacement_sum(k as u32, r as u32, gamma) * vr;
        }
    }
    (p, ov.norm_sqr())
}

/// Minimal deterministic generator for oracle test inputs.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn complex(&mut self) -> Complex64 {
        c(2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0)
    }

    pub fn state(&mut self, levels: usize) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..levels).map(|_| self.complex()).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect()
    }
}
