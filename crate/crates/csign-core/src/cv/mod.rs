//! Continuous-variable state teleportation with a two-mode squeezed resource:
//! outcome probabilities, average fidelities, quality and gain tuning.

mod dual_rail;
mod elements;

use num_complex::Complex64;

pub use dual_rail::{dual_rail_fidelity, optimize_dual_rail_gain};
pub use elements::{displacement_matrix_element, transfer_matrix_element};

use crate::error::{invalid, Result};
use crate::optimize::golden_section_max;
use crate::special::{binomial, factorial, lower_incomplete_gamma_int, Radius};

/// Upper end of every gain scan.
pub const GAIN_MAX: f64 = 1.2;

/// Squeezing q, gain g, conditioning radius B and a Fock truncation for
/// series-based checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportParams {
    pub q: f64,
    pub g: f64,
    pub radius: Radius,
    pub n_trunc: u32,
}

impl TeleportParams {
    pub fn new(q: f64, g: f64, radius: Radius) -> Result<Self> {
        check_q(q)?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(invalid(format!("gain g = {g} must be finite and nonnegative")));
        }
        if let Radius::Finite(b) = radius {
            if !(b > 0.0) {
                return Err(invalid(format!("radius {b} must be positive")));
            }
        }
        Ok(Self {
            q,
            g,
            radius,
            n_trunc: 60,
        })
    }

    /// The correction residual γ = (g − q)β.
    pub fn gamma(&self, beta: Complex64) -> Complex64 {
        beta * (self.g - self.q)
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if (0.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(invalid(format!("squeezing q = {q} outside [0, 1)")))
    }
}

/// Pure input state with a finite Fock expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    coeffs: Vec<Complex64>,
}

impl InputState {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { coeffs })
    }

    /// Rescales arbitrary amplitudes to unit norm.
    pub fn normalized(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(invalid("zero state"));
        }
        Self::new(coeffs.into_iter().map(|c| c / norm).collect())
    }

    pub fn fock(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_photons(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        if n < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(n as usize).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// Probability that |β| ≤ B.
pub fn success_probability(state: &InputState, q: f64, radius: Radius) -> Result<f64> {
    check_q(q)?;
    let b = match radius {
        Radius::Infinite => return Ok(1.0),
        Radius::Finite(b) => b,
    };
    let s = 1.0 - q * q;
    let x = s * b * b;
    let y2 = (s * b).powi(2);
    let q2 = q * q;
    let mut total = 0.0;
    for (n, c) in state.coeffs.iter().enumerate() {
        let w = c.norm_sqr();
        if w == 0.0 {
            continue;
        }
        // j = 0 contributes exactly 1 to the bracket, absorbed into expm1
        let mut tail = 0.0;
        for j in 1..=n {
            let inner: f64 = (0..=n - j)
                .map(|k| binomial((k + j - 1) as u64, k as i64) * q2.powi(k as i32))
                .sum();
            tail += y2.powi(j as i32) / factorial(j as u64) * inner;
        }
        total += w * (-(-x).exp_m1() - (-x).exp() * tail);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// ∫_{|β|≤B} ⟨k|D(γ)T(β)|n⟩⟨m|T†(β)D†(γ)|l⟩ d²β with l = k − n + m.
pub fn state_block_integral(n: u32, m: u32, k: u32, q: f64, g: f64, radius: Radius) -> f64 {
    let l = k as i64 - n as i64 + m as i64;
    if l < 0 {
        return 0.0;
    }
    let l = l as u32;
    let (nf, mf, kf, lf) = (n as u64, m as u64, k as u64, l as u64);
    let s = 1.0 - q * q;
    let a = s + (g - q) * (g - q);
    let arg = radius.scaled_square(a);
    let pre = (factorial(nf) * factorial(mf) / (factorial(kf) * factorial(lf))).sqrt();
    let mut total = 0.0;
    for u in 0..=(k.min(n) + l.min(m)) {
        let mut comb = 0.0;
        for v in 0..=k.min(n) {
            let w = u as i64 - v as i64;
            if w < 0 || w > l as i64 || (m as i64 - w) < 0 {
                continue;
            }
            comb += binomial(kf, v as i64) * binomial(lf, w)
                / (factorial(nf - v as u64) * factorial((m as i64 - w) as u64));
        }
        if comb == 0.0 {
            continue;
        }
        let t =
            s * q.powi(u as i32) * (g - q).powi((2 * k + m - n - u) as i32) * (1.0 - g * q).powi((n + m - u) as i32)
                / a.powi((m + k - u + 1) as i32);
        total += t * comb * lower_incomplete_gamma_int(k + m - u + 1, arg);
    }
    pre * total
}

/// Raw (probability-weighted) and conditional average fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    pub raw: f64,
    pub conditional: f64,
}

pub fn average_fidelity(state: &InputState, q: f64, g: f64, radius: Radius) -> Result<Fidelity> {
    let p = TeleportParams::new(q, g, radius)?;
    let nmax = state.max_photons() as u32;
    let mut raw = Complex64::new(0.0, 0.0);
    for n in 0..=nmax {
        let cn = state.coeff(n as i64);
        if cn.norm_sqr() == 0.0 {
            continue;
        }
        for m in 0..=nmax {
            let cm = state.coeff(m as i64);
            if cm.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..=nmax {
                let ck = state.coeff(k as i64);
                let cl = state.coeff(k as i64 - n as i64 + m as i64);
                if ck.norm_sqr() == 0.0 || cl.norm_sqr() == 0.0 {
                    continue;
                }
                let block = state_block_integral(n, m, k, p.q, p.g, p.radius);
                raw += cn * cm.conj() * ck.conj() * cl * block;
            }
        }
    }
    let raw = raw.re;
    let prob = success_probability(state, q, radius)?;
    let conditional = if prob > 0.0 { raw / prob } else { 0.0 };
    Ok(Fidelity { raw, conditional })
}

/// Q = P(B)·F(B), which equals the raw fidelity integral.
pub fn quality(state: &InputState, q: f64, g: f64, radius: Radius) -> Result<f64> {
    Ok(average_fidelity(state, q, g, radius)?.raw)
}

/// Gain maximizing the conditional fidelity on [q/2, 1.2]; returns (g, F).
pub fn optimize_gain(state: &InputState, q: f64, radius: Radius) -> Result<(f64, f64)> {
    check_q(q)?;
    let mut err = None;
    let best = golden_section_max(
        |g| match average_fidelity(state, q, g, radius) {
            Ok(f) => f.conditional,
            Err(e) => {
                err = Some(e);
                f64::NEG_INFINITY
            }
        },
        0.5 * q,
        GAIN_MAX,
        1e-6,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}
