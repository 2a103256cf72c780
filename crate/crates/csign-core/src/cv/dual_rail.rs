use num_complex::Complex64;

use super::{check_q, state_block_integral, GAIN_MAX};
use crate::error::Result;
use crate::optimize::golden_section_max;
use crate::special::Radius;

/// Unconditioned fidelity of teleporting c0|01⟩ + c1|10⟩ through two
/// independent CV channels with common (q, g).
///
/// The two-channel integral factorizes into single-channel blocks; only
/// X = I₀₀₀·I₁₁₁, Y = I₀₁₀ and Z = I₁₁₀·I₀₀₁ survive the phase integration.
pub fn dual_rail_fidelity(c0: Complex64, c1: Complex64, q: f64, g: f64) -> Result<f64> {
    check_q(q)?;
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(crate::error::invalid(format!("qubit norm {norm} differs from 1")));
    }
    let r = Radius::Infinite;
    let block = |n, m, k| state_block_integral(n, m, k, q, g, r);
    let x = block(0, 0, 0) * block(1, 1, 1);
    let y = block(0, 1, 0);
    let z = block(1, 1, 0) * block(0, 0, 1);
    let (a, b) = (c0.norm_sqr(), c1.norm_sqr());
    Ok((a * a + b * b) * x + 2.0 * a * b * (y * y + z))
}

/// Gain maximizing [`dual_rail_fidelity`] on [q/2, 1.2]; returns (g, F).
pub fn optimize_dual_rail_gain(c0: Complex64, c1: Complex64, q: f64) -> Result<(f64, f64)> {
    dual_rail_fidelity(c0, c1, q, q)?;
    Ok(golden_section_max(
        |g| dual_rail_fidelity(c0, c1, q, g).unwrap_or(f64::NEG_INFINITY),
        0.5 * q,
        GAIN_MAX,
        1e-7,
    ))
}
