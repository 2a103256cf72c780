//! Teleportation of the generalized sign gate through a truncated,
//! gate-loaded two-mode squeezed resource with the self-Kerr correction.
//!
//! The transfer element compared against the self-Kerr target is
//!
//! A_{kn}(β) = N·π^{−1/2}·Σ_r q^r·U_SK(r)·ᾱ_r·⟨k|D(gβ)|r⟩⟨r|D(−β)|n⟩,
//!
//! summed over the resource levels r ≤ d + t. Block integrals
//! F_{n,m,k,l} = ∫ A_{kn}·A*_{lm} over the acceptance disk are available
//! through two independent routes: the reference quintuple sum and a radial
//! expansion of each A_{kn} used by the optimizers.

mod blocks;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use blocks::TransferExpansion;

use crate::cv::{check_q, displacement_matrix_element, Fidelity, InputState};
use crate::error::{invalid, Result};
use crate::fock::CMatrix;
use crate::nssd::normalized_alphas;
use crate::optimize::{golden_section_max, grid_then_golden};
use crate::special::{binomial, ln_lower_incomplete_gamma_int, log_factorial, self_kerr_sign, Radius};

/// Largest photon number of a gate input.
pub const MAX_INPUT_PHOTONS: u32 = 2;

const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GateTeleportParams {
    pub d: u32,
    pub t: u32,
    pub q: f64,
    pub g: f64,
    pub radius: Radius,
    /// ᾱ_n = α_n/α_0 for n = 0..=d+t.
    pub alphas: Vec<f64>,
}

impl GateTeleportParams {
    /// Checks |ᾱ_n| = 1 for n ≤ d and |ᾱ_n| < 1 above.
    pub fn new(d: u32, t: u32, q: f64, g: f64, radius: Radius, alphas: Vec<f64>) -> Result<Self> {
        let p = Self::unchecked(d, t, q, g, radius, alphas)?;
        for (n, a) in p.alphas.iter().enumerate() {
            if n as u32 <= d {
                if (a.abs() - 1.0).abs() > UNIT_TOL {
                    return Err(invalid(format!("|alpha_{n}| = {} must be 1", a.abs())));
                }
            } else if a.abs() >= 1.0 {
                return Err(invalid(format!("|alpha_{n}| = {} must be below 1", a.abs())));
            }
        }
        Ok(p)
    }

    /// Resource loaded with the NSS_d gate.
    pub fn nssd(d: u32, t: u32, q: f64, g: f64, radius: Radius) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("gate order d = {d} must be at least 2")));
        }
        Self::new(d, t, q, g, radius, normalized_alphas(d, d + t))
    }

    /// Resource loaded with an exact self-Kerr gate on every retained level.
    pub fn ideal_self_kerr(d: u32, t: u32, q: f64, g: f64, radius: Radius) -> Result<Self> {
        let alphas = (0..=(d + t) as u64).map(self_kerr_sign).collect();
        Self::unchecked(d, t, q, g, radius, alphas)
    }

    fn unchecked(d: u32, t: u32, q: f64, g: f64, radius: Radius, alphas: Vec<f64>) -> Result<Self> {
        check_q(q)?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(invalid(format!("gain g = {g} must be finite and nonnegative")));
        }
        if let Radius::Finite(b) = radius {
            if !(b > 0.0) {
                return Err(invalid(format!("radius {b} must be positive")));
            }
        }
        if alphas.len() != (d + t + 1) as usize {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                d + t + 1,
                alphas.len()
            )));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(invalid("non-finite gate coefficient"));
        }
        Ok(Self {
            d,
            t,
            q,
            g,
            radius,
            alphas,
        })
    }

    /// Same resource with another squeezing and gain.
    pub fn with_tuning(&self, q: f64, g: f64) -> Result<Self> {
        Self::unchecked(self.d, self.t, q, g, self.radius, self.alphas.clone())
    }

    pub fn top_level(&self) -> u32 {
        self.d + self.t
    }

    /// U_SK(r)·ᾱ_r.
    pub fn resource_weights(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .enumerate()
            .map(|(r, a)| self_kerr_sign(r as u64) * a)
            .collect()
    }

    /// ln Σ_r q^{2r}·ᾱ_r².
    pub(crate) fn ln_inverse_norm_sq(&self) -> f64 {
        direct_inverse_norm_sq(self.q, &self.alphas).ln()
    }
}

fn direct_inverse_norm_sq(q: f64, alphas: &[f64]) -> f64 {
    let q2 = q * q;
    let mut w = 1.0;
    let mut total = 0.0;
    for a in alphas {
        total += w * a * a;
        w *= q2;
    }
    total
}

/// Fock indices of one block integral; l = k − n + m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockIntegralKey {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub l: u32,
}

impl BlockIntegralKey {
    pub fn new(n: u32, m: u32, k: u32) -> Result<Self> {
        let l = k as i64 - n as i64 + m as i64;
        if l < 0 {
            return Err(invalid(format!("block ({n},{m},{k}) has negative l = {l}")));
        }
        Ok(Self { n, m, k, l: l as u32 })
    }

    /// Key with the roles of the two transfer elements exchanged; its block
    /// is the complex conjugate.
    pub fn swapped(self) -> Self {
        Self {
            n: self.m,
            m: self.n,
            k: self.l,
            l: self.k,
        }
    }
}

/// N_{d,t} from the closed geometric part plus the suppressed tail.
pub fn resource_normalization(d: u32, t: u32, q: f64, alphas: &[f64]) -> f64 {
    assert!(alphas.len() > (d + t) as usize, "need coefficients up to d + t");
    let q2 = q * q;
    let head = (1.0 - q2.powi(d as i32 + 1)) / (1.0 - q2);
    let tail: f64 = (1..=t)
        .map(|n| q2.powi((d + n) as i32) * alphas[(d + n) as usize].powi(2))
        .sum();
    1.0 / (head + tail).sqrt()
}

/// C(γ) = U_SK·D(γ)·U_SK† on `n_trunc` levels.
pub fn f_deformed_displacement_matrix(gamma: Complex64, n_trunc: usize) -> CMatrix {
    CMatrix::from_fn(n_trunc, n_trunc, |k, r| {
        displacement_matrix_element(k as u32, r as u32, gamma) * (self_kerr_sign(k as u64) * self_kerr_sign(r as u64))
    })
}

fn check_input(input: &InputState) -> Result<()> {
    if input.max_photons() as u32 > MAX_INPUT_PHOTONS {
        return Err(invalid(format!(
            "gate input carries up to {} photons, at most {MAX_INPUT_PHOTONS} allowed",
            input.max_photons()
        )));
    }
    Ok(())
}

/// Probability that |β| ≤ B for an input of at most two photons.
pub fn gate_success_probability(params: &GateTeleportParams, input: &InputState) -> Result<f64> {
    check_input(input)?;
    let b = match params.radius {
        Radius::Infinite => return Ok(1.0),
        Radius::Finite(b) => b,
    };
    let mut total = 0.0;
    for (n, c) in input.coeffs().iter().enumerate() {
        let w = c.norm_sqr();
        if w > 0.0 {
            total += w * level_success_probability(params, n as u32, b);
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// N²·Σ_r q^{2r}ᾱ_r²·(1/π)∫_{|β|≤B} |⟨r|D(β)|n⟩|² d²β.
fn level_success_probability(p: &GateTeleportParams, n: u32, b: f64) -> f64 {
    let x = b * b;
    let q2 = p.q * p.q;
    let ln_norm2 = -p.ln_inverse_norm_sq();
    let mut total = 0.0;
    let mut weight = 1.0;
    for (r, a) in p.alphas.iter().enumerate() {
        let r = r as u32;
        let wr = weight * a * a;
        weight *= q2;
        if wr == 0.0 {
            continue;
        }
        // (r!/n!)·Σ_{t,t'} C(n,t)C(n,t')(−1)^{t+t'}/((r−t)!(r−t')!)·γ(n+r−t−t'+1, B²)
        let mut inner = 0.0;
        for t in 0..=n.min(r) {
            for tp in 0..=n.min(r) {
                let ln_mag = log_factorial(r as u64) - log_factorial(n as u64)
                    + binomial(n as u64, t as i64).ln()
                    + binomial(n as u64, tp as i64).ln()
                    - log_factorial((r - t) as u64)
                    - log_factorial((r - tp) as u64)
                    + ln_lower_incomplete_gamma_int(n + r - t - tp + 1, x);
                let v = ln_mag.exp();
                inner += if (t + tp) % 2 == 1 { -v } else { v };
            }
        }
        total += wr * inner;
    }
    total * ln_norm2.exp()
}

/// Evaluation route for block integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockRoute {
    /// Quintuple sum over resource levels and binomial indices.
    #[default]
    Reference,
    /// Radial polynomial expansion of the transfer elements.
    Expansion,
}

/// F_{n,m,k,l} by the reference quintuple sum.
pub fn block_integral(key: BlockIntegralKey, params: &GateTeleportParams) -> Result<Complex64> {
    if key.l as i64 != key.k as i64 - key.n as i64 + key.m as i64 {
        return Err(invalid("block key violates l = k − n + m"));
    }
    Ok(blocks::reference_block(key, params))
}

/// Block values for one parameter set, computed once per key.
struct BlockSource<'a> {
    params: &'a GateTeleportParams,
    expansion: Option<TransferExpansion>,
}

impl<'a> BlockSource<'a> {
    fn new(params: &'a GateTeleportParams, route: BlockRoute) -> Self {
        let expansion = match route {
            BlockRoute::Reference => None,
            BlockRoute::Expansion => Some(TransferExpansion::new(params, MAX_INPUT_PHOTONS)),
        };
        Self { params, expansion }
    }

    fn block(&self, key: BlockIntegralKey) -> Complex64 {
        match &self.expansion {
            Some(e) => e.block(key),
            None => blocks::reference_block(key, self.params),
        }
    }
}

pub fn gate_fidelity(params: &GateTeleportParams, input: &InputState) -> Result<Fidelity> {
    gate_fidelity_via(params, input, BlockRoute::Reference)
}

/// Raw fidelity Σ c_n c_m* c_k* c_l F_{n,m,k,l} against the self-Kerr
/// target, and the same divided by the success probability.
pub fn gate_fidelity_via(params: &GateTeleportParams, input: &InputState, route: BlockRoute) -> Result<Fidelity> {
    check_input(input)?;
    let source = BlockSource::new(params, route);
    let nmax = input.max_photons() as u32;
    let mut raw = Complex64::new(0.0, 0.0);
    for n in 0..=nmax {
        let cn = input.coeff(n as i64);
        for m in 0..=nmax {
            let cm = input.coeff(m as i64);
            for k in 0..=nmax {
                let ck = input.coeff(k as i64);
                let cl = input.coeff(k as i64 - n as i64 + m as i64);
                let coef = cn * cm.conj() * ck.conj() * cl;
                if coef.norm_sqr() == 0.0 {
                    continue;
                }
                raw += coef * source.block(BlockIntegralKey::new(n, m, k)?);
            }
        }
    }
    let raw = raw.re;
    let prob = gate_success_probability(params, input)?;
    let conditional = if prob > 0.0 { raw / prob } else { 0.0 };
    Ok(Fidelity { raw, conditional })
}

/// The six blocks entering the worst-case CSIGN fidelity.
pub const CSIGN_KEYS: [BlockIntegralKey; 6] = [
    BlockIntegralKey { n: 0, m: 0, k: 0, l: 0 },
    BlockIntegralKey { n: 2, m: 2, k: 2, l: 2 },
    BlockIntegralKey { n: 0, m: 0, k: 2, l: 2 },
    BlockIntegralKey { n: 2, m: 2, k: 0, l: 0 },
    BlockIntegralKey { n: 0, m: 2, k: 0, l: 2 },
    BlockIntegralKey { n: 2, m: 0, k: 2, l: 0 },
];

pub fn csign_worst_case_fidelity(params: &GateTeleportParams) -> Result<f64> {
    csign_worst_case_fidelity_via(params, BlockRoute::Reference)
}

/// Fidelity for the |1̄1̄⟩ input, whose two teleported modes carry
/// (|0,2⟩ − |2,0⟩)/√2. Conditioned on both outcomes inside the disk when
/// the radius is finite.
pub fn csign_worst_case_fidelity_via(params: &GateTeleportParams, route: BlockRoute) -> Result<f64> {
    let source = BlockSource::new(params, route);
    let f: Vec<f64> = CSIGN_KEYS.iter().map(|&k| source.block(k).re).collect();
    let raw = 0.5 * (f[0] * f[1] + f[2] * f[3] + f[4] * f[5]);
    if params.radius.is_infinite() {
        return Ok(raw);
    }
    let p0 = gate_success_probability(params, &InputState::fock(0))?;
    let p2 = gate_success_probability(params, &InputState::fock(2))?;
    let joint = p0 * p2;
    Ok(if joint > 0.0 { raw / joint } else { 0.0 })
}

/// One point of an optimized CSIGN curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsignPoint {
    pub q: f64,
    pub g_opt: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsignCurve {
    pub d: u32,
    pub t: u32,
    pub points: Vec<CsignPoint>,
    /// Maximum over q, refined between the grid neighbors of the best node.
    pub best: CsignPoint,
}

/// Coarse gain grid preceding the golden-section refinement.
fn gain_grid() -> Vec<f64> {
    (0..=18).map(|i| 0.3 + 0.05 * i as f64).collect()
}

const GAIN_TOL: f64 = 1e-6;

/// Gain maximizing the worst-case CSIGN fidelity at squeezing q.
pub fn optimize_csign_gain(base: &GateTeleportParams, q: f64) -> Result<CsignPoint> {
    check_q(q)?;
    let mut err = None;
    let (g, f) = grid_then_golden(
        |g| match base
            .with_tuning(q, g)
            .and_then(|p| csign_worst_case_fidelity_via(&p, BlockRoute::Expansion))
        {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::NEG_INFINITY
            }
        },
        &gain_grid(),
        GAIN_TOL,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(CsignPoint {
            q,
            g_opt: g,
            fidelity: f,
        }),
    }
}

/// Unconditioned CSIGN curve over `q_grid` with NSS_d resources.
pub fn optimize_csign(d: u32, t: u32, q_grid: &[f64]) -> Result<CsignCurve> {
    optimize_csign_with(d, t, q_grid, Radius::Infinite)
}

pub fn optimize_csign_with(d: u32, t: u32, q_grid: &[f64], radius: Radius) -> Result<CsignCurve> {
    if q_grid.is_empty() {
        return Err(invalid("empty squeezing grid"));
    }
    let base = GateTeleportParams::nssd(d, t, q_grid[0], q_grid[0], radius)?;
    #[cfg(feature = "parallel")]
    let points: Vec<CsignPoint> = q_grid
        .par_iter()
        .map(|&q| optimize_csign_gain(&base, q))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let points: Vec<CsignPoint> = q_grid
        .iter()
        .map(|&q| optimize_csign_gain(&base, q))
        .collect::<Result<_>>()?;

    let best_idx = points
        .iter()
        .enumerate()
        .fold(0, |bi, (i, p)| if p.fidelity > points[bi].fidelity { i } else { bi });
    let lo = q_grid[best_idx.saturating_sub(1)];
    let hi = q_grid[(best_idx + 1).min(q_grid.len() - 1)];
    let mut best = points[best_idx];
    if hi > lo {
        let mut refined = best;
        golden_section_max(
            |q| match optimize_csign_gain(&base, q) {
                Ok(p) => {
                    if p.fidelity > refined.fidelity {
                        refined = p;
                    }
                    p.fidelity
                }
                Err(_) => f64::NEG_INFINITY,
            },
            lo,
            hi,
            1e-6,
        );
        best = refined;
    }
    Ok(CsignCurve { d, t, points, best })
}

/// Best (q, g) for teleporting one input through the NSS_d resource.
pub fn optimize_gate_fidelity(d: u32, t: u32, input: &InputState, q_grid: &[f64]) -> Result<CsignPoint> {
    check_input(input)?;
    if q_grid.is_empty() {
        return Err(invalid("empty squeezing grid"));
    }
    let base = GateTeleportParams::nssd(d, t, q_grid[0], q_grid[0], Radius::Infinite)?;
    let at = |q: f64| -> CsignPoint {
        let (g, f) = grid_then_golden(
            |g| {
                base.with_tuning(q, g)
                    .and_then(|p| gate_fidelity_via(&p, input, BlockRoute::Expansion))
                    .map(|f| f.conditional)
                    .unwrap_or(f64::NEG_INFINITY)
            },
            &gain_grid(),
            GAIN_TOL,
        );
        CsignPoint {
            q,
            g_opt: g,
            fidelity: f,
        }
    };
    let mut best = CsignPoint {
        q: f64::NAN,
        g_opt: f64::NAN,
        fidelity: f64::NEG_INFINITY,
    };
    grid_then_golden(
        |q| {
            let p = at(q);
            if p.fidelity > best.fidelity {
                best = p;
            }
            p.fidelity
        },
        q_grid,
        1e-6,
    );
    Ok(best)
}

/// Sources needed for CSIGN success probability `p_target` when each of the
/// two resources succeeds with `p_d` per attempt of d sources.
pub fn cv_cost(d: u32, p_target: f64, p_d: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&p_target) {
        return Err(invalid(format!("target probability {p_target} outside [0, 1)")));
    }
    if !(p_d > 0.0 && p_d <= 1.0) {
        return Err(invalid(format!("gate success probability {p_d} outside (0, 1]")));
    }
    if p_target == 0.0 {
        return Ok(0);
    }
    if p_d == 1.0 {
        return Ok(2 * d as u64);
    }
    let n = 2.0 * d as f64 * (-p_target.sqrt()).ln_1p() / (-p_d).ln_1p();
    Ok(n.ceil() as u64)
}

/// Per-attempt gate success probability assumed for cost estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSuccessModel {
    /// p_d = 1/d².
    InverseSquare,
    Fixed(f64),
}

impl GateSuccessModel {
    pub fn probability(&self, d: u32) -> f64 {
        match *self {
            Self::InverseSquare => 1.0 / (d as f64 * d as f64),
            Self::Fixed(p) => p,
        }
    }
}

/// Gate orders of the cost table.
pub const TABLE_ORDERS: [u32; 6] = [2, 5, 10, 20, 50, 100];
/// CSIGN success targets of the cost table.
pub const TABLE_TARGETS: [f64; 6] = [0.1, 0.5, 0.75, 0.9, 0.99, 0.999];

/// Source counts in table notation: integers below 10³, then k with one
/// decimal below 10⁵, whole k below 10⁶ and M with one decimal.
pub fn display_count(n: u64) -> String {
    let x = n as f64;
    if n < 1_000 {
        n.to_string()
    } else if n < 100_000 {
        format!("{:.1}k", x / 1e3)
    } else if n < 1_000_000 {
        format!("{:.0}k", x / 1e3)
    } else {
        format!("{:.1}M", x / 1e6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_limits() {
        let alphas = vec![1.0, 1.0, -1.0, 0.3, -0.2];
        let geometric: f64 = (0..=2).map(|n| 0.81f64.powi(n)).sum();
        let n0 = resource_normalization(2, 0, 0.9, &alphas);
        assert!((1.0 / (n0 * n0) - geometric).abs() < 1e-12);
        assert_eq!(resource_normalization(2, 2, 0.0, &alphas), 1.0);
        let n2 = resource_normalization(2, 2, 0.9, &alphas);
        assert!((1.0 / (n2 * n2) - direct_inverse_norm_sq(0.9, &alphas)).abs() < 1e-12);
    }

    #[test]
    fn f_deformed_identity_at_origin() {
        let c = f_deformed_displacement_matrix(Complex64::new(0.0, 0.0), 6);
        assert!((c - CMatrix::identity(6, 6)).norm() < 1e-15);
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cv_cost(2, 0.1, 0.25).unwrap(), 6);
        assert_eq!(display_count(cv_cost(10, 0.5, 0.01).unwrap()), "2.4k");
        assert_eq!(cv_cost(7, 0.0, 0.3).unwrap(), 0);
        assert!(cv_cost(2, 1.0, 0.25).is_err());
        assert!(cv_cost(2, 0.5, 0.0).is_err());
    }

    #[test]
    fn display_notation() {
        assert_eq!(display_count(757), "757");
        assert_eq!(display_count(15_125), "15.1k");
        assert_eq!(display_count(121_459), "121k");
        assert_eq!(display_count(2_455_772), "2.5M");
    }

    #[test]
    fn key_validation() {
        assert!(BlockIntegralKey::new(2, 0, 1).is_err());
        let k = BlockIntegralKey::new(1, 2, 0).unwrap();
        assert_eq!(k.l, 1);
        assert_eq!(k.swapped().swapped(), k);
    }

    #[test]
    fn params_reject_unsuppressed_tail() {
        let r = Radius::Infinite;
        assert!(GateTeleportParams::new(2, 1, 0.5, 0.5, r, vec![1.0, 1.0, -1.0, 1.0]).is_err());
        assert!(GateTeleportParams::new(2, 1, 0.5, 0.5, r, vec![1.0, 0.9, -1.0, 0.1]).is_err());
        assert!(GateTeleportParams::new(2, 1, 0.5, 0.5, r, vec![1.0, 1.0]).is_err());
        assert!(GateTeleportParams::nssd(2, 2, 0.9, 0.9, r).is_ok());
        assert!(GateTeleportParams::nssd(100, 2, 0.9, 0.9, r).is_ok());
    }
}
