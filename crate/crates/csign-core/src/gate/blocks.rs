use num_complex::Complex64;

use super::{BlockIntegralKey, GateTeleportParams};
use crate::special::{binomial, ln_lower_incomplete_gamma_int, log_factorial};

/// Signed real stored as (ln|x|, negative?).
#[derive(Debug, Clone, Copy)]
struct LnSigned {
    ln: f64,
    negative: bool,
}

/// Sum of signed reals given in log form, shifted by the largest magnitude.
#[derive(Debug, Clone, Default)]
struct SignedLogSum {
    terms: Vec<LnSigned>,
}

impl SignedLogSum {
    fn add(&mut self, ln: f64, negative: bool) {
        if ln > f64::NEG_INFINITY {
            self.terms.push(LnSigned { ln, negative });
        }
    }

    fn total(&self) -> f64 {
        let t = self.ln_total();
        let x = t.ln.exp();
        if t.negative {
            -x
        } else {
            x
        }
    }

    fn ln_total(&self) -> LnSigned {
        let max = self.terms.iter().map(|t| t.ln).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LnSigned {
                ln: f64::NEG_INFINITY,
                negative: false,
            };
        }
        let s: f64 = self
            .terms
            .iter()
            .map(|t| {
                let x = (t.ln - max).exp();
                if t.negative {
                    -x
                } else {
                    x
                }
            })
            .sum();
        LnSigned {
            ln: s.abs().ln() + max,
            negative: s < 0.0,
        }
    }
}

/// ln x^e with the convention 0^0 = 1; None when the power vanishes.
fn ln_pow(ln_x: f64, e: u32) -> Option<f64> {
    if e == 0 {
        Some(0.0)
    } else if ln_x == f64::NEG_INFINITY {
        None
    } else {
        Some(e as f64 * ln_x)
    }
}

/// Table of ln γ(s, x) for s = 1..=s_max.
fn ln_gamma_table(s_max: u32, x: f64) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; s_max as usize + 1];
    for (s, v) in out.iter_mut().enumerate().skip(1) {
        *v = ln_lower_incomplete_gamma_int(s as u32, x);
    }
    out
}

/// Quintuple sum over (r, s, u, v) and the two inner binomial sums, with
/// every term accumulated in log form. Exact in exact arithmetic; costs
/// O((d+t)²) terms with up to 25 (u, v) pairs each.
pub(super) fn reference_block(key: BlockIntegralKey, p: &GateTeleportParams) -> Complex64 {
    let BlockIntegralKey { n, m, k, l } = key;
    let top = p.top_level();
    let a = 1.0 + p.g * p.g;
    let ln_q = p.q.ln();
    let ln_g = p.g.ln();
    let ln_a = a.ln();
    let s_max = 2 * top + m + k + 1;
    let gammas = ln_gamma_table(s_max, p.radius.scaled_square(a));
    let weights = p.resource_weights();
    let ln_norm2 = -p.ln_inverse_norm_sq();
    let ln_idx =
        0.5 * (log_factorial(n as u64) + log_factorial(m as u64) + log_factorial(k as u64) + log_factorial(l as u64));

    let mut acc = SignedLogSum::default();
    for r in 0..=top {
        let wr = weights[r as usize];
        let Some(ln_qr) = ln_pow(ln_q, r) else { continue };
        if wr == 0.0 {
            continue;
        }
        for s in 0..=top {
            let ws = weights[s as usize];
            let Some(ln_qs) = ln_pow(ln_q, s) else { continue };
            if ws == 0.0 {
                continue;
            }
            let ln_pre =
                ln_qr + ln_qs + (wr * ws).abs().ln() - log_factorial(r as u64) - log_factorial(s as u64) - ln_idx;
            let pre_negative = wr * ws < 0.0;
            for u in 0..=(n.min(r) + m.min(s)) {
                let sw = inner_sum(n, m, r, s, u);
                if sw == 0.0 {
                    continue;
                }
                for v in 0..=(k.min(r) + l.min(s)) {
                    let sz = inner_sum(k, l, r, s, v);
                    if sz == 0.0 {
                        continue;
                    }
                    let Some(ln_gp) = ln_pow(ln_g, r + s + k + l - 2 * v) else {
                        continue;
                    };
                    let order = r + s + m + k - u - v + 1;
                    let ln_term = ln_pre + ln_gp - order as f64 * ln_a + gammas[order as usize] + (sw * sz).abs().ln();
                    let negative = pre_negative ^ (sw * sz < 0.0);
                    acc.add(ln_term, negative);
                }
            }
        }
    }
    Complex64::new(acc.total() * ln_norm2.exp(), 0.0)
}

/// r!·s!·Σ_w C(a,w)·C(b,u−w)·(−1)^u / ((r−w)!·(s−u+w)!), a moderate-size real.
fn inner_sum(a: u32, b: u32, r: u32, s: u32, u: u32) -> f64 {
    let mut total = 0.0;
    for w in 0..=a.min(r) {
        if w > u || u - w > b || u - w > s {
            continue;
        }
        let rest = s + w - u;
        let falling_r: f64 = ((r - w + 1)..=r).map(|x| x as f64).product();
        let falling_s: f64 = ((rest + 1)..=s).map(|x| x as f64).product();
        total += binomial(a as u64, w as i64) * binomial(b as u64, (u - w) as i64) * falling_r * falling_s;
    }
    if u % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Radial expansion of one transfer element,
/// A_{kn}(β) = e^{−(1+g²)|β|²/2}·β^{k−n}·Σ_j c_j |β|^{2j} (β* powers when n > k),
/// with the resource normalization folded into the coefficients.
#[derive(Debug, Clone)]
struct RadialSeries {
    offset: u32,
    coeffs: Vec<LnSigned>,
}

impl RadialSeries {
    fn new(k: u32, n: u32, p: &GateTeleportParams) -> Self {
        let top = p.top_level();
        let ln_q = p.q.ln();
        let ln_g = p.g.ln();
        let weights = p.resource_weights();
        let base = k.min(n);
        let ln_pre = 0.5 * (log_factorial(n as u64) - log_factorial(k as u64) - p.ln_inverse_norm_sq())
            - 0.5 * std::f64::consts::PI.ln();
        let mut sums = vec![SignedLogSum::default(); (top + base + 1) as usize];
        for r in 0..=top {
            let wr = weights[r as usize];
            let Some(ln_qr) = ln_pow(ln_q, r) else { continue };
            if wr == 0.0 {
                continue;
            }
            for t in 0..=k.min(r) {
                let Some(ln_gp) = ln_pow(ln_g, k + r - 2 * t) else {
                    continue;
                };
                for tp in 0..=n.min(r) {
                    let ln_mag = ln_pre
                        + ln_qr
                        + wr.abs().ln()
                        + ln_gp
                        + binomial(k as u64, t as i64).ln()
                        + binomial(r as u64, tp as i64).ln()
                        - log_factorial((r - t) as u64)
                        - log_factorial((n - tp) as u64);
                    let negative = (wr < 0.0) ^ ((t + tp) % 2 == 1);
                    let j = r + base - t - tp;
                    sums[j as usize].add(ln_mag, negative);
                }
            }
        }
        let coeffs = sums.iter().map(SignedLogSum::ln_total).collect();
        Self {
            offset: k.abs_diff(n),
            coeffs,
        }
    }

    fn value(&self, beta: Complex64, g: f64) -> Complex64 {
        let rho = beta.norm_sqr();
        let ln_rho = rho.ln();
        let mut acc = SignedLogSum::default();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j == 0 {
                acc.add(c.ln, c.negative);
            } else if rho > 0.0 {
                acc.add(c.ln + j as f64 * ln_rho, c.negative);
            }
        }
        Complex64::new(acc.total() * (-0.5 * (1.0 + g * g) * rho).exp(), 0.0)
    }
}

/// Transfer-element expansions for all input and output levels up to a
/// maximum photon number; block integrals then reduce to one radial
/// incomplete-gamma sum per coefficient pair.
#[derive(Debug, Clone)]
pub struct TransferExpansion {
    max_level: u32,
    g: f64,
    ln_gammas: Vec<f64>,
    ln_a: f64,
    series: Vec<RadialSeries>,
}

impl TransferExpansion {
    pub fn new(params: &GateTeleportParams, max_level: u32) -> Self {
        let mut series = Vec::with_capacity(((max_level + 1) * (max_level + 1)) as usize);
        for k in 0..=max_level {
            for n in 0..=max_level {
                series.push(RadialSeries::new(k, n, params));
            }
        }
        let a = 1.0 + params.g * params.g;
        let s_max = 2 * (params.top_level() + 2 * max_level) + 1;
        Self {
            max_level,
            g: params.g,
            ln_gammas: ln_gamma_table(s_max, params.radius.scaled_square(a)),
            ln_a: a.ln(),
            series,
        }
    }

    fn series(&self, k: u32, n: u32) -> &RadialSeries {
        &self.series[(k * (self.max_level + 1) + n) as usize]
    }

    /// ⟨k|Ã(β)|n⟩ for the gate transfer operator after the correction,
    /// compared against the self-Kerr target.
    pub fn element(&self, k: u32, n: u32, beta: Complex64) -> Complex64 {
        let s = self.series(k, n);
        let radial = s.value(beta, self.g);
        let phase = if k >= n {
            beta.powu(k - n)
        } else {
            beta.conj().powu(n - k)
        };
        radial * phase
    }

    pub fn block(&self, key: BlockIntegralKey) -> Complex64 {
        let BlockIntegralKey { n, m, k, l } = key;
        assert!(
            n.max(m).max(k).max(l) <= self.max_level,
            "block index exceeds expansion level"
        );
        let left = self.series(k, n);
        let right = self.series(l, m);
        let mut acc = SignedLogSum::default();
        for (i, ci) in left.coeffs.iter().enumerate() {
            if ci.ln == f64::NEG_INFINITY {
                continue;
            }
            for (j, cj) in right.coeffs.iter().enumerate() {
                if cj.ln == f64::NEG_INFINITY {
                    continue;
                }
                let order = left.offset as usize + i + j + 1;
                let ln_term = ci.ln + cj.ln + self.ln_gammas[order] - order as f64 * self.ln_a;
                acc.add(ln_term, ci.negative ^ cj.negative);
            }
        }
        Complex64::new(acc.total() * std::f64::consts::PI, 0.0)
    }
}
