//! Generalized nonlinear sign gates NSS_d: coefficients matching the
//! self-Kerr phases up to |d⟩, ancilla amplitudes λ, the structured
//! contraction matrix and its success-probability optimization.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{dilate_contraction, CMatrix, HeraldedGateSetup, OccupationVector};
use crate::special::{binomial, factorial, self_kerr_sign};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Signal self-transmission (−1)^{d+1}·tan(π/(4d)).
pub fn v11_of(d: u32) -> f64 {
    let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
    sign * (PI / (4.0 * d as f64)).tan()
}

/// β_k / alpha0 for k = 0..d−1; real for every d.
pub fn normalized_betas(d: u32) -> Vec<f64> {
    let v11 = v11_of(d);
    (0..d as u64)
        .map(|k| {
            (0..=k)
                .map(|l| binomial(k, l as i64) * v11.powi(l as i32) * self_kerr_sign(k + l))
                .sum()
        })
        .collect()
}

/// β_k = alpha0·Σ_l C(k,l)·v11^l·U_SK(k+l), k = 0..d−1.
pub fn beta_coefficients(d: u32, alpha0: Complex64) -> Vec<Complex64> {
    normalized_betas(d).into_iter().map(|b| alpha0 * b).collect()
}

/// α_n = Σ_k C(n,k)·v11^{n−k}·β_k for n = 0..=n_max.
pub fn alpha_from_betas(v11: f64, betas: &[Complex64], n_max: u32) -> Vec<Complex64> {
    (0..=n_max as u64)
        .map(|n| {
            betas
                .iter()
                .enumerate()
                .take_while(|(k, _)| *k as u64 <= n)
                .map(|(k, b)| b * (binomial(n, k as i64) * v11.powi((n - k as u64) as i32)))
                .sum()
        })
        .collect()
}

/// Gate coefficients normalized to alpha0 = 1: ᾱ_n for n = 0..=n_max.
/// Valid for any d, including those without a synthesized matrix.
pub fn normalized_alphas(d: u32, n_max: u32) -> Vec<f64> {
    let betas: Vec<Complex64> = normalized_betas(d)
        .into_iter()
        .map(|b| Complex64::new(b, 0.0))
        .collect();
    alpha_from_betas(v11_of(d), &betas, n_max)
        .into_iter()
        .map(|a| a.re)
        .collect()
}

/// The gate action on |n⟩ as the explicit double sum over (k, l), scaled by alpha0.
pub fn nssd_double_sum(d: u32, alpha0: Complex64, n: u32) -> Complex64 {
    let v11 = v11_of(d);
    let n = n as u64;
    let mut acc = 0.0;
    for k in 0..d as u64 {
        for l in 0..=k {
            acc += binomial(n, k as i64)
                * binomial(k, l as i64)
                * v11.powi((n as i64 - k as i64 + l as i64) as i32)
                * self_kerr_sign(k + l);
        }
    }
    alpha0 * acc
}

/// e_0..e_m of the given values.
pub fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![ZERO; values.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + e[k - 1] * v;
        }
    }
    e
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        let (na, nb) = (a.norm(), b.norm());
        if (na - nb).abs() <= 1e-9 * na.max(nb).max(1.0) {
            a.arg().total_cmp(&b.arg())
        } else {
            nb.total_cmp(&na)
        }
    });
}

fn polish(coeffs: &[f64], z0: Complex64) -> Complex64 {
    // Newton on the monic polynomial with the given coefficients (highest first)
    let mut z = z0;
    for _ in 0..50 {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = ZERO;
        for &c in coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Ancilla amplitudes λ_1..λ_{d−1} whose elementary symmetric polynomials
/// reproduce β_k/(k!·alpha0); sorted by decreasing magnitude, ties by phase.
pub fn solve_lambdas(d: u32, alpha0: Complex64) -> Result<Vec<Complex64>> {
    if d < 2 {
        return Err(invalid(format!("NSS_d needs d ≥ 2, got {d}")));
    }
    if alpha0.norm() == 0.0 {
        return Err(invalid("alpha0 must be nonzero"));
    }
    let betas = beta_coefficients(d, alpha0);
    let m = (d - 1) as usize;
    let e: Vec<Complex64> = (0..=m).map(|k| betas[k] / (alpha0 * factorial(k as u64))).collect();
    if e.iter().any(|z| z.im.abs() > 1e-12 * z.norm().max(1.0)) {
        return Err(invalid("symmetric coefficients are not real"));
    }
    // z^m − e1 z^{m−1} + e2 z^{m−2} − …
    let coeffs: Vec<f64> = (1..=m).map(|k| if k % 2 == 1 { -e[k].re } else { e[k].re }).collect();
    let companion = DMatrix::from_fn(m, m, |i, j| {
        if i == 0 {
            -coeffs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|z| polish(&coeffs, *z))
        .collect();
    sort_roots(&mut roots);

    let rebuilt = elementary_symmetric(&roots);
    let residual = (1..=m)
        .map(|k| (rebuilt[k] - e[k]).norm() / e[k].norm().max(1.0))
        .fold(0.0, f64::max);
    if !(residual <= 1e-8) {
        return Err(Error::RootFinding { residual });
    }
    Ok(roots)
}

/// Structured d×d contraction. The largest root sits in the alpha0-scaled
/// bottom-left slot; the remaining roots fill rows 1..d−2 in order.
pub fn assemble_vmat(d: u32, alpha0: Complex64, x: f64, lambdas: &[Complex64]) -> CMatrix {
    let d = d as usize;
    assert!(lambdas.len() + 1 == d, "need d − 1 roots");
    let xc = Complex64::new(x, 0.0);
    let mut v = CMatrix::zeros(d, d);
    v[(0, 0)] = Complex64::new(v11_of(d as u32), 0.0);
    for j in 1..d {
        v[(0, j)] = xc;
    }
    for i in 1..d - 1 {
        v[(i, 0)] = lambdas[i];
        v[(i, i)] = xc;
    }
    v[(d - 1, 0)] = alpha0 * lambdas[0] / x.powi(d as i32 - 1);
    v[(d - 1, d - 1)] = alpha0 / x.powi(d as i32 - 2);
    v
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Logarithmic scan of the tuning parameter x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XScan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refine: bool,
}

impl Default for XScan {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1.0,
            points: 200,
            refine: true,
        }
    }
}

impl XScan {
    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        let (a, b) = (lo.ln(), hi.ln());
        (0..n).map(move |i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
    }

    /// (x, ‖v(x)‖₂) minimizing the norm for fixed alpha0.
    fn best_x(&self, d: u32, alpha0: Complex64, lambdas: &[Complex64]) -> (f64, f64) {
        let eval = |x: f64| spectral_norm(&assemble_vmat(d, alpha0, x, lambdas));
        let xs: Vec<f64> = Self::grid(self.lo, self.hi, self.points).collect();
        let (mut bi, mut bn) = (0usize, f64::INFINITY);
        for (i, &x) in xs.iter().enumerate() {
            let n = eval(x);
            if n < bn {
                bi = i;
                bn = n;
            }
        }
        let mut best = (xs[bi], bn);
        if self.refine {
            let lo = xs[bi.saturating_sub(1)];
            let hi = xs[(bi + 1).min(xs.len() - 1)];
            for x in Self::grid(lo, hi, self.points) {
                let n = eval(x);
                if n < best.1 {
                    best = (x, n);
                }
            }
        }
        best
    }
}

/// Complete description of a synthesized NSS_d gate.
#[derive(Debug, Clone, PartialEq)]
pub struct NssdSpec {
    pub d: u32,
    pub alpha0: Complex64,
    pub v11: f64,
    pub betas: Vec<Complex64>,
    pub lambdas: Vec<Complex64>,
    pub x: f64,
    pub vmat: CMatrix,
}

impl NssdSpec {
    pub fn build(d: u32, alpha0: Complex64, x: f64) -> Result<Self> {
        let lambdas = solve_lambdas(d, alpha0)?;
        let vmat = assemble_vmat(d, alpha0, x, &lambdas);
        Ok(Self {
            d,
            alpha0,
            v11: v11_of(d),
            betas: beta_coefficients(d, alpha0),
            lambdas,
            x,
            vmat,
        })
    }

    pub fn success_probability(&self) -> f64 {
        self.alpha0.norm_sqr()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.vmat)
    }

    /// Checks every structural invariant; returns a description of the first
    /// violation.
    pub fn validate(&self) -> Result<()> {
        let d = self.d as usize;
        let fail = |m: String| Err(invalid(m));
        if self.betas.len() != d || self.lambdas.len() + 1 != d || self.vmat.nrows() != d {
            return fail("inconsistent sizes".into());
        }
        if self.betas[0] != self.alpha0 {
            return fail("beta_0 differs from alpha0".into());
        }
        if (self.v11 - v11_of(self.d)).abs() > 1e-12 {
            return fail(format!("v11 = {} is not the tangent solution", self.v11));
        }
        let e = elementary_symmetric(&self.lambdas);
        for k in 0..d {
            let b = self.alpha0 * factorial(k as u64) * e[k];
            if (b - self.betas[k]).norm() > 1e-9 {
                return fail(format!("beta_{k} does not match the roots"));
            }
        }
        let norm = self.spectral_norm();
        if norm > 1.0 + 1e-10 {
            return Err(Error::NotContraction { norm });
        }
        Ok(())
    }

    /// The unitary dilation as a heralded gate: one photon into each of
    /// modes 1..d−1, vacuum elsewhere, the same pattern as herald.
    pub fn heralded_setup(&self) -> Result<HeraldedGateSetup> {
        let u = dilate_contraction(&self.vmat)?;
        let d = self.d as usize;
        let pattern: Vec<u32> = (1..2 * d).map(|m| (m < d) as u32).collect();
        HeraldedGateSetup::new(
            u,
            OccupationVector::new(pattern.clone()),
            OccupationVector::new(pattern),
        )
    }

    /// Structured text record: one `key = value` per line, complex values as
    /// "re im", matrix entries row-major.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let c = |z: Complex64| format!("{:e} {:e}", z.re, z.im);
        let _ = writeln!(s, "d = {}", self.d);
        let _ = writeln!(s, "alpha0 = {}", c(self.alpha0));
        let _ = writeln!(s, "v11 = {:e}", self.v11);
        for (i, l) in self.lambdas.iter().enumerate() {
            let _ = writeln!(s, "lambda[{}] = {}", i + 1, c(*l));
        }
        let _ = writeln!(s, "x = {:e}", self.x);
        for i in 0..self.vmat.nrows() {
            for j in 0..self.vmat.ncols() {
                let _ = writeln!(s, "vmat[{i}][{j}] = {}", c(self.vmat[(i, j)]));
            }
        }
        let _ = writeln!(s, "p_d = {:e}", self.success_probability());
        s
    }

    /// Parses a record produced by [`NssdSpec::to_record`].
    pub fn from_record(text: &str) -> Result<Self> {
        let mut d = None;
        let mut alpha0 = None;
        let mut x = None;
        let mut lambdas = Vec::new();
        let mut entries = Vec::new();
        let parse_f = |v: &str| -> Result<f64> { v.trim().parse().map_err(|_| invalid(format!("bad number '{v}'"))) };
        let parse_c = |v: &str| -> Result<Complex64> {
            let mut it = v.split_whitespace();
            let re = parse_f(it.next().unwrap_or(""))?;
            let im = parse_f(it.next().unwrap_or(""))?;
            Ok(Complex64::new(re, im))
        };
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("malformed line '{line}'")))?;
            let key = key.trim();
            match key {
                "d" => d = Some(parse_f(value)? as u32),
                "alpha0" => alpha0 = Some(parse_c(value)?),
                "x" => x = Some(parse_f(value)?),
                "v11" | "p_d" => {}
                k if k.starts_with("lambda[") => lambdas.push(parse_c(value)?),
                k if k.starts_with("vmat[") => entries.push(parse_c(value)?),
                k => return Err(invalid(format!("unknown key '{k}'"))),
            }
        }
        let (d, alpha0, x) = match (d, alpha0, x) {
            (Some(d), Some(a), Some(x)) => (d, a, x),
            _ => return Err(invalid("record lacks d, alpha0 or x")),
        };
        let n = d as usize;
        if entries.len() != n * n || lambdas.len() + 1 != n {
            return Err(invalid("record has the wrong number of entries"));
        }
        Ok(Self {
            d,
            alpha0,
            v11: v11_of(d),
            betas: beta_coefficients(d, alpha0),
            lambdas,
            x,
            vmat: CMatrix::from_row_slice(n, n, &entries),
        })
    }
}

/// α_n for the spec's gate, n = 0..=n_max.
pub fn alpha_coefficients(spec: &NssdSpec, n_max: u32) -> Vec<Complex64> {
    alpha_from_betas(spec.v11, &spec.betas, n_max)
}

/// Largest p_d = alpha0² (alpha0 real positive) for which some x gives a
/// contraction, found by bisection in log alpha0 to relative tolerance `tol`
/// on p_d.
pub fn max_success_probability(d: u32, scan: XScan, tol: f64) -> Result<(f64, NssdSpec)> {
    if !(2..=7).contains(&d) {
        return Err(invalid(format!("synthesis supports 2 ≤ d ≤ 7, got {d}")));
    }
    if !(scan.lo > 0.0 && scan.hi > scan.lo && scan.points >= 2) {
        return Err(invalid("x scan needs 0 < lo < hi and at least 2 points"));
    }
    // the roots do not depend on alpha0
    let lambdas = solve_lambdas(d, Complex64::new(1.0, 0.0))?;
    let probe = |a: f64| {
        let a0 = Complex64::new(a, 0.0);
        let (x, norm) = scan.best_x(d, a0, &lambdas);
        (norm <= 1.0).then_some(x)
    };

    const SMALLEST: f64 = 1e-8;
    let (mut lo, mut lo_x) = match probe(SMALLEST) {
        Some(x) => (SMALLEST, x),
        None => return Err(Error::NoFeasiblePoint { alpha0: SMALLEST }),
    };
    let mut hi = 1.0;
    if let Some(x) = probe(hi) {
        lo = hi;
        lo_x = x;
    }
    while hi / lo > 1.0 && (hi * hi) / (lo * lo) - 1.0 > tol {
        let mid = (lo * hi).sqrt();
        match probe(mid) {
            Some(x) => {
                lo = mid;
                lo_x = x;
            }
            None => hi = mid,
        }
    }
    let spec = NssdSpec::build(d, Complex64::new(lo, 0.0), lo_x)?;
    Ok((lo * lo, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v11_values() {
        assert!((v11_of(2) - (1.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((v11_of(1) - 1.0).abs() < 1e-15);
        assert!((v11_of(3) - (2.0 - 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn d2_matches_klm() {
        let a0 = Complex64::new(0.5, 0.0);
        let b = beta_coefficients(2, a0);
        assert_eq!(b[0], a0);
        assert!((b[1] - a0 * 2f64.sqrt()).norm() < 1e-14);
        let alphas = alpha_from_betas(v11_of(2), &b, 6);
        for (n, a) in alphas.iter().enumerate() {
            let expect = crate::fock::klm_nss_coefficient(n as u32);
            assert!((a.re - expect).abs() < 1e-12 && a.im.abs() < 1e-15);
        }
        let l = solve_lambdas(2, a0).unwrap();
        assert!((l[0] - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn self_kerr_matching() {
        for d in 2..=12 {
            let a = normalized_alphas(d, d + 2);
            for n in 0..=d {
                assert!((a[n as usize] - self_kerr_sign(n as u64)).abs() < 1e-9, "d={d} n={n}");
            }
            assert!(a[d as usize + 1].abs() < 1.0);
        }
    }

    #[test]
    fn d2_vmat_shape() {
        let a0 = Complex64::new(0.5, 0.0);
        let l = solve_lambdas(2, a0).unwrap();
        let v = assemble_vmat(2, a0, 0.7, &l);
        assert!((v[(0, 1)] - Complex64::new(0.7, 0.0)).norm() < 1e-15);
        assert!((v[(1, 0)] - a0 * l[0] / 0.7).norm() < 1e-15);
        assert!((v[(1, 1)] - a0).norm() < 1e-15);
    }

    #[test]
    fn record_round_trip() {
        let spec = NssdSpec::build(3, Complex64::new(0.1, 0.0), 0.4).unwrap();
        let back = NssdSpec::from_record(&spec.to_record()).unwrap();
        assert_eq!(back.d, 3);
        assert!((back.vmat.clone() - spec.vmat.clone()).norm() < 1e-12);
        assert!((back.alpha0 - spec.alpha0).norm() < 1e-15);
    }
}
