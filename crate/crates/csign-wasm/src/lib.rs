//! Browser bindings for three interactive plots: the optimized CSIGN
//! fidelity against squeezing, the conditioning trade-off of state
//! teleportation, and the discrete-variable resource-state curve.

use csign_core::cv::{average_fidelity, success_probability, InputState};
use csign_core::dv::{simulate_res_state_curve, Route};
use csign_core::gate::optimize_csign;
use csign_core::special::{q_to_db, Radius};
use wasm_bindgen::prelude::*;

fn js(e: csign_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn linspace(lo: f64, hi: f64, points: u32) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Flat rows of (q, dB, g_opt, F_worst) for the NSS_d-loaded CSIGN gate.
#[wasm_bindgen]
pub fn csign_curve(d: u32, q_lo: f64, q_hi: f64, points: u32) -> Result<Vec<f64>, JsError> {
    let curve = optimize_csign(d, 2, &linspace(q_lo, q_hi, points)).map_err(js)?;
    let mut out = Vec::with_capacity(4 * curve.points.len());
    for p in &curve.points {
        out.extend([p.q, q_to_db(p.q).map_err(js)?, p.g_opt, p.fidelity]);
    }
    Ok(out)
}

/// Flat rows of (B, P, F, Q) for teleporting |n⟩ with acceptance radius B.
#[wasm_bindgen]
pub fn teleport_tradeoff(n: u32, q: f64, g: f64, b_max: f64, points: u32) -> Result<Vec<f64>, JsError> {
    let state = InputState::fock(n as usize);
    let mut out = Vec::new();
    for b in linspace(b_max / points.max(2) as f64, b_max, points) {
        let r = Radius::finite(b).map_err(js)?;
        let p = success_probability(&state, q, r).map_err(js)?;
        let f = average_fidelity(&state, q, g, r).map_err(js)?;
        out.extend([b, p, f.conditional, f.raw]);
    }
    Ok(out)
}

/// Flat rows of (sources, success probability, stderr) for one DV route.
#[wasm_bindgen]
pub fn res_state_curve(
    route: &str,
    trials: u32,
    seed: u32,
    max_sources: u32,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    let route: Route = route.parse().map_err(js)?;
    let grid: Vec<u64> = linspace(0.0, max_sources as f64, points)
        .iter()
        .map(|x| x.round() as u64)
        .collect();
    let curve = simulate_res_state_curve(route, &grid, trials as u64, seed as u64).map_err(js)?;
    Ok(curve
        .samples
        .iter()
        .flat_map(|s| [s.n_sources as f64, s.success_prob, s.stderr])
        .collect())
}
