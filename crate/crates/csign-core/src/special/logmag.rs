use std::f64::consts::{PI, TAU};
use std::ops::{Mul, Neg};

use num_complex::Complex64;

/// A complex number stored as (ln|z|, arg z). Zero has `log_magnitude = -∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitudePhase {
    pub log_magnitude: f64,
    pub phase: f64,
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl LogMagnitudePhase {
    pub const ZERO: Self = Self {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: Self = Self {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            Self::new(x.ln(), 0.0)
        } else {
            Self::new((-x).ln(), PI)
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_magnitude, -self.phase)
    }

    /// Integer power; `powi(0)` is one, including for zero.
    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude * n as f64, self.phase * n as f64)
    }

    pub fn scale_ln(self, ln_factor: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.log_magnitude + ln_factor, self.phase)
        }
    }
}

impl Mul for LogMagnitudePhase {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude + rhs.log_magnitude, self.phase + rhs.phase)
    }
}

impl Neg for LogMagnitudePhase {
    type Output = Self;

    fn neg(self) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.log_magnitude, self.phase + PI)
        }
    }
}

/// Accumulates a sum of terms given in log form without overflow.
#[derive(Debug, Clone, Default)]
pub struct LogSum {
    terms: Vec<LogMagnitudePhase>,
}

impl LogSum {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn add(&mut self, t: LogMagnitudePhase) {
        if !t.is_zero() {
            self.terms.push(t);
        }
    }

    /// Adds a positive real term given by its logarithm.
    pub fn add_ln(&mut self, ln_value: f64) {
        self.add(LogMagnitudePhase::new(ln_value, 0.0));
    }

    pub fn total(&self) -> LogMagnitudePhase {
        let max = self
            .terms
            .iter()
            .map(|t| t.log_magnitude)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LogMagnitudePhase::ZERO;
        }
        let s: Complex64 = self
            .terms
            .iter()
            .map(|t| Complex64::from_polar((t.log_magnitude - max).exp(), t.phase))
            .sum();
        LogMagnitudePhase::from_complex(s).scale_ln(max)
    }

    /// ln of the sum, for sums of positive reals.
    pub fn ln_total(&self) -> f64 {
        self.total().log_magnitude
    }
}
