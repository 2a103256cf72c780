use num_complex::Complex64;

use crate::special::log_factorial;

/// ⟨k| T_q(β) |l⟩ of the ideal teleportation transfer operator (before the
/// corrective displacement); zero when k > l.
pub fn transfer_matrix_element(k: u32, l: u32, q: f64, beta: Complex64) -> Complex64 {
    if k > l {
        return Complex64::new(0.0, 0.0);
    }
    let s = 1.0 - q * q;
    let d = l - k;
    // C(l,k)·√(k!/l!) = √(l!/k!) / (l−k)!
    let ln_comb = 0.5 * (log_factorial(l as u64) - log_factorial(k as u64)) - log_factorial(d as u64);
    let mag = (s / std::f64::consts::PI).sqrt() * (-0.5 * s * beta.norm_sqr() + ln_comb).exp() * q.powi(k as i32);
    mag * (beta.conj() * s).powu(d)
}

/// Generalized Laguerre polynomial L_n^{(a)}(x) by upward recurrence.
fn laguerre(n: u32, a: u32, x: f64) -> f64 {
    let a = a as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ⟨k| D(γ) |r⟩ for the coherent displacement D(γ) = exp(γa† − γ*a).
pub fn displacement_matrix_element(k: u32, r: u32, gamma: Complex64) -> Complex64 {
    let x = gamma.norm_sqr();
    let (lo, hi) = (k.min(r), k.max(r));
    let ln_pre = 0.5 * (log_factorial(lo as u64) - log_factorial(hi as u64)) - 0.5 * x;
    let lag = laguerre(lo, hi - lo, x);
    let power = if k >= r {
        gamma.powu(k - r)
    } else {
        (-gamma.conj()).powu(r - k)
    };
    power * (ln_pre.exp() * lag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(transfer_matrix_element(3, 2, 0.5, Complex64::new(1.0, 1.0)), z);
        let t = transfer_matrix_element(2, 2, 0.7, z);
        let expect = ((1.0 - 0.49) / std::f64::consts::PI).sqrt() * 0.49;
        assert!((t.re - expect).abs() < 1e-15);
        for k in 0..5 {
            for r in 0..5 {
                let d = displacement_matrix_element(k, r, z);
                assert_eq!(d.re, if k == r { 1.0 } else { 0.0 });
            }
        }
        let g = Complex64::new(0.3, -0.4);
        let d00 = displacement_matrix_element(0, 0, g);
        assert!((d00.re - (-0.125f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn hermiticity() {
        let g = Complex64::new(0.8, -0.35);
        for k in 0..8 {
            for r in 0..8 {
                let a = displacement_matrix_element(k, r, g);
                let b = displacement_matrix_element(r, k, -g).conj();
                assert!((a - b).norm() < 1e-14);
            }
        }
    }
}
