//! Scalar kernels: factorials, binomials, the integer-order lower incomplete
//! gamma function, squeezing units and the conditioning radius.

mod logmag;
mod permanent;

use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub use logmag::{LogMagnitudePhase, LogSum};
pub use permanent::{permanent, MAX_PERMANENT_DIM};

use crate::error::{invalid, Error, Result};

const TABLE_LEN: usize = 1025;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!).
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    // Stirling series for lnΓ(n+1)
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// n! as a float (overflows to infinity past 170).
pub fn factorial(n: u64) -> f64 {
    if n <= 20 {
        (1..=n).product::<u64>() as f64
    } else {
        log_factorial(n).exp()
    }
}

/// C(n, k) as an exact integer when it fits in 128 bits.
pub fn binomial_exact(n: u64, k: i64) -> Option<u128> {
    if k < 0 || k as u64 > n {
        return Some(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(c)
}

/// Binomial coefficient C(n, k); zero outside 0 ≤ k ≤ n.
pub fn binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    if n <= 60 {
        return binomial_exact(n, k).unwrap_or(0) as f64;
    }
    let k = k as u64;
    (log_factorial(n) - log_factorial(k) - log_factorial(n - k))
        .exp()
        .round_if_integral()
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    fn round_if_integral(self) -> f64 {
        // below 2^53 the true value is an integer, so snap to it
        if self < 9.007_199_254_740_992e15 {
            self.round()
        } else {
            self
        }
    }
}

/// ln γ(s, x) for integer s ≥ 1. `x = +∞` gives ln (s−1)! exactly.
pub fn ln_lower_incomplete_gamma_int(s: u32, x: f64) -> f64 {
    assert!(s >= 1, "incomplete gamma order must be positive");
    let ln_gamma_s = log_factorial(s as u64 - 1);
    if x.is_infinite() {
        return ln_gamma_s;
    }
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_gamma_s + ln_regularized_lower_gamma(s, x)
}

/// γ(s, x) = (s−1)!·P(s, x) for integer s ≥ 1. `x = +∞` gives (s−1)! exactly.
pub fn lower_incomplete_gamma_int(s: u32, x: f64) -> f64 {
    if x.is_infinite() {
        return factorial(s as u64 - 1);
    }
    if x <= 0.0 {
        return 0.0;
    }
    if s == 1 {
        return -(-x).exp_m1();
    }
    ln_lower_incomplete_gamma_int(s, x).exp()
}

fn ln_regularized_lower_gamma(s: u32, x: f64) -> f64 {
    let sf = s as f64;
    if x < sf + 1.0 {
        // P = x^s e^{-x} / s! · Σ_k x^k / ((s+1)…(s+k))
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..10_000 {
            term *= x / (sf + k as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sf * x.ln() - x - log_factorial(s as u64) + sum.ln()
    } else {
        // Q = e^{-x} Σ_{j<s} x^j / j!, the Poisson CDF, at most ~1/2 here
        let lnx = x.ln();
        let mut acc = LogSum::new();
        for j in 0..s {
            acc.add_ln(j as f64 * lnx - x - log_factorial(j as u64));
        }
        let q = acc.ln_total().exp();
        (-q).ln_1p()
    }
}

/// Self-Kerr phase exp(iπ m(m−1)/2), which is ±1.
pub fn self_kerr_sign(m: u64) -> f64 {
    if (m % 4) < 2 {
        1.0
    } else {
        -1.0
    }
}

/// Squeezing in dB for the two-mode squeezing parameter q.
pub fn q_to_db(q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(invalid(format!("squeezing q = {q} outside [0, 1)")));
    }
    Ok(20.0 * q.atanh() / LN_10)
}

/// Inverse of [`q_to_db`].
pub fn db_to_q(db: f64) -> Result<f64> {
    if !(db >= 0.0 && db.is_finite()) {
        return Err(invalid(format!("squeezing {db} dB must be finite and nonnegative")));
    }
    Ok((db * LN_10 / 20.0).tanh())
}

/// Conditioning radius on the Bell-measurement outcome |β| ≤ B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn finite(b: f64) -> Result<Self> {
        if b > 0.0 && b.is_finite() {
            Ok(Radius::Finite(b))
        } else {
            Err(invalid(format!("conditioning radius {b} must be positive")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Radius::Infinite)
    }

    /// a·B², or +∞ for the unconditioned case.
    pub fn scaled_square(&self, a: f64) -> f64 {
        match *self {
            Radius::Finite(b) => a * b * b,
            Radius::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(b) => write!(f, "{b}"),
            Radius::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Radius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Radius::Infinite),
            other => {
                let b: f64 = other
                    .parse()
                    .map_err(|_| invalid(format!("cannot parse radius '{s}'")))?;
                Radius::finite(b)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!((log_factorial(10) - 3628800f64.ln()).abs() < 1e-12);
        // table/Stirling seam
        let a = log_factorial(1024);
        let b = log_factorial(1025) - 1025f64.ln();
        assert!((a - b).abs() / a < 1e-13);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(7, -1), 0.0);
        assert_eq!(binomial(7, 8), 0.0);
        assert_eq!(binomial(60, 30), 118264581564861424.0);
        assert_eq!(binomial_exact(60, 30), Some(118264581564861424));
        let big = binomial(100, 50);
        assert!((big / 1.0089134454556419e29 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(lower_incomplete_gamma_int(1, 0.0), 0.0);
        assert!((lower_incomplete_gamma_int(1, 1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert_eq!(lower_incomplete_gamma_int(3, f64::INFINITY), 2.0);
        // γ(3, 2) = 2 − 10 e^{-2}
        let v = lower_incomplete_gamma_int(3, 2.0);
        assert!((v - (2.0 - 10.0 * (-2.0f64).exp())).abs() < 1e-14);
        // both branches agree at the switch point
        let below = lower_incomplete_gamma_int(5, 5.999_999_999);
        let above = lower_incomplete_gamma_int(5, 6.000_000_001);
        assert!((below - above).abs() < 1e-8);
    }

    #[test]
    fn squeezing_units() {
        assert!((q_to_db(0.9).unwrap() - 12.8).abs() < 0.05);
        assert!((q_to_db(0.96).unwrap() - 17.0).abs() < 0.2);
        assert_eq!(q_to_db(0.0).unwrap(), 0.0);
        assert!(q_to_db(1.0).is_err());
        assert!(q_to_db(-0.1).is_err());
    }

    #[test]
    fn radius_parsing() {
        assert_eq!("inf".parse::<Radius>().unwrap(), Radius::Infinite);
        assert_eq!("2.5".parse::<Radius>().unwrap(), Radius::Finite(2.5));
        assert!("0".parse::<Radius>().is_err());
    }
}
