//! GHZ ancilla hierarchy for boosted Bell measurements.
//!
//! The ancilla set for success probability 1 − 2^{−N} is one Bell pair and
//! one GHZ_{2^k} for k = 2..N−1 (member k is GHZ_{2^k}). All members are
//! grown from GHZ₃ factories by a balanced doubling tree: two level-L states
//! of 2^L + 2 qubits join into one level-(L+1) state. The first state that
//! reaches a level is taken out as the member it can host, after measuring
//! away surplus qubits; later states at that level keep doubling. A member
//! GHZ_{2^k} needs the lowest level with at least 2^k qubits: level 0 for the
//! Bell pair, level 1 for GHZ₄ and level k beyond that.

use super::{bernoulli, map_trials, CurveSample, PhotonLedger, ResourceCurve, RngStream, ADVANCED_BM, GHZ3_FACTORY};
use crate::error::invalid;
use crate::Result;

/// Tree level whose states host ancilla member `k` (k ≥ 1).
pub fn ancilla_member_level(k: u32) -> u32 {
    match k {
        0 | 1 => 0,
        2 => 1,
        k => k,
    }
}

fn level_size(level: u32) -> u64 {
    (1u64 << level) + 2
}

fn member_at_level(level: u32) -> Option<u32> {
    match level {
        0 => Some(1),
        1 => Some(2),
        2 => None,
        l => Some(l),
    }
}

/// Outcome of growing `members` ancilla members in one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GriceTrial {
    /// Sources consumed when member k + 1 became available.
    pub completion: Vec<u64>,
    pub ledger: PhotonLedger,
}

impl GriceTrial {
    /// Number of leading members available with `n` sources.
    pub fn members_within(&self, n: u64) -> usize {
        self.completion.iter().take_while(|&&c| c <= n).count()
    }
}

/// Runs the photon stream until members 1..=members all exist.
pub fn grice_trial(members: u32, stream: RngStream) -> GriceTrial {
    let mut rng = stream.rng();
    let mut ledger = PhotonLedger::default();
    let mut completion = vec![0u64; members as usize];
    if members == 0 {
        return GriceTrial { completion, ledger };
    }
    let top = ancilla_member_level(members);
    let mut done = vec![false; members as usize + 1];
    let mut held: Vec<Option<u64>> = vec![None; top as usize + 1];
    let mut remaining = members;
    let mut cost = 0u64;
    while remaining > 0 {
        cost += ledger.herald(GHZ3_FACTORY, 3, &mut rng);
        let (mut level, mut size) = (0u32, 3u64);
        loop {
            if let Some(k) = member_at_level(level).filter(|&k| k <= members && !done[k as usize]) {
                done[k as usize] = true;
                completion[k as usize - 1] = cost;
                ledger.trim(size - (1u64 << k));
                remaining -= 1;
                break;
            }
            if level >= top {
                ledger.discard(size);
                break;
            }
            match held[level as usize].take() {
                None => {
                    held[level as usize] = Some(size);
                    break;
                }
                Some(other) => {
                    let extra = ADVANCED_BM.photons_per_attempt as u64;
                    cost += extra;
                    let ok = bernoulli(ADVANCED_BM.success_prob, &mut rng);
                    let out = other + size - 2;
                    ledger.join(other, size, extra, ok.then_some(out));
                    if !ok {
                        break;
                    }
                    debug_assert_eq!(out, level_size(level + 1));
                    level += 1;
                    size = out;
                }
            }
        }
    }
    for s in held.into_iter().flatten() {
        ledger.discard(s);
    }
    GriceTrial { completion, ledger }
}

/// Rough photon count for the ancillas of level N, valid for N > 3.
pub fn grice_cost_estimate(n: u32) -> Result<f64> {
    if n <= 3 {
        return Err(invalid(format!("cost estimate needs N > 3, got {n}")));
    }
    Ok(200.0 * (8.0f64 / 3.0).powi(n as i32 - 1))
}

fn p_bm(members: usize) -> f64 {
    1.0 - 0.5f64.powi(members as i32 + 1)
}

/// Mean achieved p_BM against sources for target level N. With fewer than
/// N − 1 leading members the measurement runs at the level they support.
pub fn simulate_grice_cost(n: u32, n_sources_grid: &[u64], trials: u64, master_seed: u64) -> Result<ResourceCurve> {
    if n == 0 || trials == 0 {
        return Err(invalid("N ≥ 1 and at least one trial are required"));
    }
    let runs = map_trials(trials, |i| grice_trial(n - 1, RngStream::new(master_seed, i)));
    let t = trials as f64;
    let samples = n_sources_grid
        .iter()
        .map(|&s| {
            let (sum, sum2) = runs.iter().fold((0.0, 0.0), |(a, b), r| {
                let p = p_bm(r.members_within(s));
                (a + p, b + p * p)
            });
            let mean = sum / t;
            let var = (sum2 / t - mean * mean).max(0.0);
            CurveSample {
                n_sources: s,
                success_prob: mean,
                stderr: (var / t).sqrt(),
            }
        })
        .collect();
    Ok(ResourceCurve {
        samples,
        trials,
        master_seed,
    })
}

/// Smallest source count at which the mean p_BM reaches 1 − 2^{−N}, with
/// `headroom` members beyond the target grown so the mean can cross it.
pub fn grice_source_count(n: u32, headroom: u32, trials: u64, master_seed: u64) -> Result<Option<u64>> {
    if n == 0 || trials == 0 {
        return Err(invalid("N ≥ 1 and at least one trial are required"));
    }
    let members = n - 1 + headroom;
    let runs = map_trials(trials, |i| grice_trial(members, RngStream::new(master_seed, i)));
    let target = p_bm(n as usize - 1);
    // each completed member k adds 2^{−(k+1)} to the trial's p_BM
    let mut events: Vec<(u64, f64)> = runs
        .iter()
        .flat_map(|r| {
            r.completion
                .iter()
                .enumerate()
                .map(|(k, &c)| (c, 0.5f64.powi(k as i32 + 2)))
        })
        .collect();
    events.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut sum = 0.5 * trials as f64;
    let goal = target * trials as f64;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0;
        while i < events.len() && events[i].0 == at {
            sum += events[i].1;
            i += 1;
        }
        if sum >= goal * (1.0 - 1e-15) {
            return Ok(Some(at));
        }
    }
    Ok(None)
}

/// Mean sources until the full ancilla set for level N exists.
pub fn mean_ancilla_cost(n: u32, trials: u64, master_seed: u64) -> Result<f64> {
    if n < 2 || trials == 0 {
        return Err(invalid("N ≥ 2 and at least one trial are required"));
    }
    let costs = map_trials(trials, |i| {
        *grice_trial(n - 1, RngStream::new(master_seed, i))
            .completion
            .last()
            .unwrap()
    });
    Ok(costs.iter().map(|&c| c as f64).sum::<f64>() / trials as f64)
}
