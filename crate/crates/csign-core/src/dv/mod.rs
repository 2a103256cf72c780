//! Resource accounting for the discrete-variable route: heralded Bell and
//! GHZ₃ factories, the Knill CSIGN application, cluster-style joining with
//! standard or boosted Bell measurements, and the GHZ ancilla hierarchy that
//! lifts the Bell-measurement success probability to 1 − 2^{−N}.
//!
//! Every trial is a photon stream: factories are fired one attempt at a time
//! and successes are paired as soon as two are available, so no intermediate
//! state waits for a partner that is never produced. A trial records the
//! number of sources consumed when its goal is first met; a curve at `n`
//! sources is the fraction (or mean reward) over trials with cost ≤ `n`.

mod grice;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::invalid;
use crate::Result;

pub use grice::{
    ancilla_member_level, grice_cost_estimate, grice_source_count, grice_trial, mean_ancilla_cost, simulate_grice_cost,
    GriceTrial,
};

/// Heralded source: `photons_per_attempt` single photons, success with `success_prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorySpec {
    pub photons_per_attempt: u32,
    pub success_prob: f64,
}

impl FactorySpec {
    pub fn new(photons_per_attempt: u32, success_prob: f64) -> Result<Self> {
        if !(success_prob > 0.0 && success_prob <= 1.0) {
            return Err(invalid(format!(
                "factory success probability {success_prob} outside (0, 1]"
            )));
        }
        Ok(Self {
            photons_per_attempt,
            success_prob,
        })
    }

    /// Mean photons per success.
    pub fn expected_cost(&self) -> f64 {
        self.photons_per_attempt as f64 / self.success_prob
    }

    /// Number of attempts up to and including the first success.
    pub fn attempts(&self, rng: &mut ChaCha8Rng) -> u64 {
        geometric(self.success_prob, rng)
    }
}

/// Bell pair from four photons.
pub const BELL_FACTORY: FactorySpec = FactorySpec {
    photons_per_attempt: 4,
    success_prob: 3.0 / 16.0,
};

/// GHZ₃ from six photons.
pub const GHZ3_FACTORY: FactorySpec = FactorySpec {
    photons_per_attempt: 6,
    success_prob: 1.0 / 32.0,
};

/// Knill's heralded CSIGN on the two halves of two Bell pairs, two ancilla photons.
pub const KNILL_CSIGN: FactorySpec = FactorySpec {
    photons_per_attempt: 2,
    success_prob: 2.0 / 27.0,
};

/// Linear-optics Bell measurement without ancillas.
pub const STANDARD_BM: FactorySpec = FactorySpec {
    photons_per_attempt: 0,
    success_prob: 0.5,
};

/// Bell measurement boosted by four ancilla photons.
pub const ADVANCED_BM: FactorySpec = FactorySpec {
    photons_per_attempt: 4,
    success_prob: 0.75,
};

/// Ways to herald the two-qubit resource state used for CSIGN gate teleportation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Two Bell pairs entangled by the heralded CSIGN.
    Knill,
    /// Two GHZ₃ joined by a standard Bell measurement.
    ClusterStd,
    /// Two GHZ₃ joined by the boosted Bell measurement.
    ClusterAdv,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Knill, Route::ClusterStd, Route::ClusterAdv];

    pub fn name(self) -> &'static str {
        match self {
            Route::Knill => "knill",
            Route::ClusterStd => "cluster_std",
            Route::ClusterAdv => "cluster_adv",
        }
    }

    fn join(self) -> FactorySpec {
        match self {
            Route::Knill => KNILL_CSIGN,
            Route::ClusterStd => STANDARD_BM,
            Route::ClusterAdv => ADVANCED_BM,
        }
    }

    fn input(self) -> FactorySpec {
        match self {
            Route::Knill => BELL_FACTORY,
            Route::ClusterStd | Route::ClusterAdv => GHZ3_FACTORY,
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knill" => Ok(Route::Knill),
            "cluster_std" | "cluster-std" => Ok(Route::ClusterStd),
            "cluster_adv" | "cluster-adv" => Ok(Route::ClusterAdv),
            other => Err(invalid(format!("unknown route '{other}'"))),
        }
    }
}

/// Mean photons per heralded resource state under ideal multiplexing:
/// each join attempt needs two fresh inputs plus the join's own photons.
pub fn expected_cost_res_state(route: Route) -> f64 {
    let join = route.join();
    (2.0 * route.input().expected_cost() + join.photons_per_attempt as f64) / join.success_prob
}

/// Independent random stream for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Number of Bernoulli(p) trials up to the first success, by inversion.
pub fn geometric(p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    ((u.ln() / (1.0 - p).ln()).floor() as u64) + 1
}

fn bernoulli(p: f64, rng: &mut ChaCha8Rng) -> bool {
    rng.random::<f64>() < p
}

/// Photon accounting for a single trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhotonLedger {
    pub injected: u64,
    /// Photons carried by states that exist at the end of the trial.
    pub surviving: u64,
    /// Photons absorbed by heralding detectors and Bell measurements.
    pub detected: u64,
    /// Photons in states destroyed by failed joins or discarded unused.
    pub lost: u64,
}

impl PhotonLedger {
    pub fn balanced(&self) -> bool {
        self.injected == self.surviving + self.detected + self.lost
    }

    /// Runs a factory to its first success; returns the photon cost and
    /// leaves `qubits` photons carried by the heralded state.
    fn herald(&mut self, factory: FactorySpec, qubits: u64, rng: &mut ChaCha8Rng) -> u64 {
        let cost = factory.attempts(rng) * factory.photons_per_attempt as u64;
        self.injected += cost;
        self.detected += cost - qubits;
        self.surviving += qubits;
        cost
    }

    /// Two states of `a` and `b` photons meet in a join that uses `extra`
    /// ancillas and leaves `out` photons on success.
    fn join(&mut self, a: u64, b: u64, extra: u64, out: Option<u64>) {
        self.injected += extra;
        self.surviving -= a + b;
        match out {
            Some(o) => {
                self.surviving += o;
                self.detected += a + b + extra - o;
            }
            None => self.lost += a + b + extra,
        }
    }

    fn discard(&mut self, photons: u64) {
        self.surviving -= photons;
        self.lost += photons;
    }

    fn trim(&mut self, photons: u64) {
        self.surviving -= photons;
        self.detected += photons;
    }
}

/// Size after joining GHZ_j and GHZ_k with a Bell measurement; `None`
/// when the measurement fails and both inputs are destroyed.
pub fn ghz_join(size_j: u32, size_k: u32, bm_success: bool) -> Result<Option<u32>> {
    if size_j < 2 || size_k < 2 {
        return Err(invalid(format!(
            "GHZ sizes must be at least 2, got ({size_j}, {size_k})"
        )));
    }
    Ok(bm_success.then(|| size_j + size_k - 2))
}

/// Sources consumed by one trial until the first resource state, with its ledger.
pub fn res_state_trial(route: Route, stream: RngStream) -> (u64, PhotonLedger) {
    let mut rng = stream.rng();
    let mut ledger = PhotonLedger::default();
    let join = route.join();
    let qubits = match route {
        Route::Knill => 2,
        Route::ClusterStd | Route::ClusterAdv => 3,
    };
    let mut cost = 0;
    loop {
        cost += ledger.herald(route.input(), qubits, &mut rng);
        cost += ledger.herald(route.input(), qubits, &mut rng);
        cost += join.photons_per_attempt as u64;
        let ok = bernoulli(join.success_prob, &mut rng);
        let out = match route {
            Route::Knill => 2 * qubits,
            Route::ClusterStd | Route::ClusterAdv => 2 * qubits - 2,
        };
        ledger.join(qubits, qubits, join.photons_per_attempt as u64, ok.then_some(out));
        if ok {
            return (cost, ledger);
        }
    }
}

/// One (sources, success probability, standard error) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub n_sources: u64,
    pub success_prob: f64,
    pub stderr: f64,
}

/// Success probability against the number of single-photon sources.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceCurve {
    pub samples: Vec<CurveSample>,
    pub trials: u64,
    pub master_seed: u64,
}

impl ResourceCurve {
    /// Fraction of trials with cost ≤ n, for every n in the grid.
    fn from_costs(costs: &[u64], grid: &[u64], master_seed: u64) -> Self {
        let mut sorted = costs.to_vec();
        sorted.sort_unstable();
        let t = sorted.len() as f64;
        let samples = grid
            .iter()
            .map(|&n| {
                let hits = sorted.partition_point(|&c| c <= n) as f64;
                let p = hits / t;
                CurveSample {
                    n_sources: n,
                    success_prob: p,
                    stderr: (p * (1.0 - p) / t).sqrt(),
                }
            })
            .collect();
        Self {
            samples,
            trials: costs.len() as u64,
            master_seed,
        }
    }
}

pub(crate) fn map_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(f).collect()
    }
}

/// Per-trial costs with stream ids 0..trials.
pub fn res_state_costs(route: Route, trials: u64, master_seed: u64) -> Vec<u64> {
    map_trials(trials, |i| res_state_trial(route, RngStream::new(master_seed, i)).0)
}

pub fn simulate_res_state_curve(
    route: Route,
    n_sources_grid: &[u64],
    trials: u64,
    master_seed: u64,
) -> Result<ResourceCurve> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let costs = res_state_costs(route, trials, master_seed);
    Ok(ResourceCurve::from_costs(&costs, n_sources_grid, master_seed))
}

/// Smallest source count at which the empirical success fraction reaches `target`.
pub fn sources_for_success(route: Route, target: f64, trials: u64, master_seed: u64) -> Result<u64> {
    if !(target > 0.0 && target <= 1.0) || trials == 0 {
        return Err(invalid(format!("target {target} outside (0, 1] or no trials")));
    }
    let mut costs = res_state_costs(route, trials, master_seed);
    costs.sort_unstable();
    let idx = ((target * trials as f64).ceil() as usize).max(1) - 1;
    Ok(costs[idx])
}

/// Quality of the DV gate: the heralded resource times both teleportations.
pub fn dv_quality(p_resource: f64, p_bm: f64) -> Result<f64> {
    for (name, p) in [("p_resource", p_resource), ("p_bm", p_bm)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("{name} = {p} outside [0, 1]")));
        }
    }
    Ok(p_resource * p_bm * p_bm)
}

/// Log-spaced integer grid from `lo` to `hi` with `points` entries, deduplicated.
pub fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    let (a, b) = ((lo.max(1)) as f64, hi as f64);
    let mut v: Vec<u64> = (0..points)
        .map(|i| {
            let t = if points > 1 {
                i as f64 / (points - 1) as f64
            } else {
                0.0
            };
            (a * (b / a).powf(t)).round() as u64
        })
        .collect();
    if lo == 0 {
        v.insert(0, 0);
    }
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_costs() {
        assert!((expected_cost_res_state(Route::Knill) - 603.0).abs() < 1e-9);
        assert!((expected_cost_res_state(Route::ClusterStd) - 768.0).abs() < 1e-9);
        assert!((expected_cost_res_state(Route::ClusterAdv) - 1552.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn join_sizes() {
        assert_eq!(ghz_join(3, 3, true).unwrap(), Some(4));
        assert_eq!(ghz_join(2, 2, true).unwrap(), Some(2));
        assert_eq!(ghz_join(5, 3, false).unwrap(), None);
        assert!(ghz_join(1, 3, true).is_err());
    }

    #[test]
    fn quality_values() {
        assert_eq!(dv_quality(1.0, 0.5).unwrap(), 0.25);
        assert_eq!(dv_quality(1.0, 0.75).unwrap(), 0.5625);
        assert_eq!(dv_quality(0.0, 0.3).unwrap(), 0.0);
        assert!(dv_quality(1.2, 0.5).is_err());
    }

    #[test]
    fn geometric_mean() {
        let mut rng = RngStream::new(7, 0).rng();
        let n = 200_000;
        let m: f64 = (0..n).map(|_| geometric(0.25, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((m - 4.0).abs() < 0.05);
    }
}
