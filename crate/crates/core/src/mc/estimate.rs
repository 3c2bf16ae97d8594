//! Monte Carlo estimation with a worker-count-independent reduction.
//!
//! Rounds are cut into fixed blocks of [`BLOCK`] consecutive indices. Each block
//! is accumulated sequentially and blocks are merged in index order, so the
//! floating-point result depends only on `(scenario, n, seed)`.

use serde::Serialize;

use crate::boost::{BoostProfile, FeeMode};
use crate::error::Result;
use crate::latency::LatencyStrategy;
use crate::model::Delay;

use super::exec::{map_indices, Execution};
use super::rng::RoundRng;
use super::sim::{check_fee_mode, simulate_batch_round, simulate_boost_round, simulate_investment_round};

pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Batch { delta: Delay },
    Boost { profile: BoostProfile, fee_mode: FeeMode },
    Investment { strategy: LatencyStrategy },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Revenue,
    Welfare,
    Misallocation,
    PaymentFast,
    PaymentSlow,
    LatencyGap,
}

const RACE_METRICS: [Metric; 5] = [
    Metric::Revenue,
    Metric::Welfare,
    Metric::Misallocation,
    Metric::PaymentFast,
    Metric::PaymentSlow,
];
const INVESTMENT_METRICS: [Metric; 1] = [Metric::LatencyGap];

/// Observations recorded per round; unused slots stay zero.
const SLOTS: usize = 5;

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Revenue => "revenue",
            Metric::Welfare => "welfare",
            Metric::Misallocation => "misallocation",
            Metric::PaymentFast => "payment_fast",
            Metric::PaymentSlow => "payment_slow",
            Metric::LatencyGap => "latency_gap",
        }
    }
}

impl Scenario {
    pub fn batch(delta: Delay) -> Self {
        Scenario::Batch { delta }
    }

    /// Rejects exact fees when an equilibrium boost would reach `g`.
    pub fn boost(profile: BoostProfile, fee_mode: FeeMode) -> Result<Self> {
        check_fee_mode(&profile, fee_mode)?;
        Ok(Scenario::Boost { profile, fee_mode })
    }

    pub fn investment(strategy: LatencyStrategy) -> Self {
        Scenario::Investment { strategy }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scenario::Batch { .. } => "batch",
            Scenario::Boost { .. } => "boost",
            Scenario::Investment { .. } => "investment",
        }
    }

    pub fn metrics(&self) -> &'static [Metric] {
        match self {
            Scenario::Investment { .. } => &INVESTMENT_METRICS,
            _ => &RACE_METRICS,
        }
    }

    /// Per-round values in [`Self::metrics`] order, plus the tie flag.
    pub fn observe(&self, draw: &super::rng::RoundDraw) -> Observation {
        let race = |o: super::sim::RoundOutcome| Observation {
            values: [
                o.revenue,
                o.welfare,
                if o.misallocated() { 1.0 } else { 0.0 },
                o.payment_fast,
                o.payment_slow,
            ],
            tie: o.tie,
        };
        match self {
            Scenario::Batch { delta } => race(simulate_batch_round(*delta, draw)),
            Scenario::Boost { profile, fee_mode } => race(simulate_boost_round(profile, *fee_mode, draw)),
            Scenario::Investment { strategy } => {
                let o = simulate_investment_round(strategy, draw);
                Observation {
                    values: [o.gap, 0.0, 0.0, 0.0, 0.0],
                    tie: false,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub values: [f64; SLOTS],
    pub tie: bool,
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pairwise combination of two disjoint samples.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation over `√n`; zero for fewer than two samples.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl EstimateResult {
    /// `|mean - target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    /// Standard errors between the estimate and `target`.
    pub fn z(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target) / self.stderr
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioEstimate {
    pub scenario: &'static str,
    pub n: u64,
    pub seed: u64,
    pub ties: u64,
    pub estimates: Vec<EstimateResult>,
}

impl ScenarioEstimate {
    pub fn get(&self, metric: Metric) -> Option<&EstimateResult> {
        self.estimates.iter().find(|e| e.metric == metric.name())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    stats: [RunningStats; SLOTS],
    ties: u64,
}

fn block_count(n: u64) -> usize {
    usize::try_from(n.div_ceil(BLOCK)).expect("round count fits in memory addressing")
}

fn block_range(b: usize, n: u64) -> (u64, u64) {
    let start = b as u64 * BLOCK;
    (start, (start + BLOCK).min(n))
}

fn run_block(scenario: &Scenario, b: usize, n: u64, seed: u64) -> BlockStats {
    let (start, end) = block_range(b, n);
    let mut rng = RoundRng::at(seed, start);
    let mut acc = BlockStats::default();
    for _ in start..end {
        let obs = scenario.observe(&rng.next_draw());
        for (s, x) in acc.stats.iter_mut().zip(obs.values) {
            s.push(x);
        }
        acc.ties += u64::from(obs.tie);
    }
    acc
}

/// Estimates every metric of `scenario` over rounds `0..n` of stream `seed`.
pub fn estimate_scenario(scenario: &Scenario, n: u64, seed: u64, exec: Execution) -> ScenarioEstimate {
    assert!(n >= 1, "need at least one round");
    let blocks = map_indices(block_count(n), exec, |b| run_block(scenario, b, n, seed));
    let mut total = BlockStats::default();
    for b in &blocks {
        for (t, s) in total.stats.iter_mut().zip(&b.stats) {
            t.merge(s);
        }
        total.ties += b.ties;
    }
    let estimates = scenario
        .metrics()
        .iter()
        .zip(&total.stats)
        .map(|(m, s)| EstimateResult {
            metric: m.name().to_string(),
            mean: s.mean(),
            stderr: s.stderr(),
            n,
            seed,
        })
        .collect();
    ScenarioEstimate {
        scenario: scenario.label(),
        n,
        seed,
        ties: total.ties,
        estimates,
    }
}

/// Single-metric estimate using the default execution.
///
/// # Panics
/// If `metric` is not produced by `scenario` or `n == 0`.
pub fn estimate(scenario: &Scenario, metric: Metric, n: u64, seed: u64) -> EstimateResult {
    estimate_with(scenario, metric, n, seed, Execution::default())
}

pub fn estimate_with(scenario: &Scenario, metric: Metric, n: u64, seed: u64, exec: Execution) -> EstimateResult {
    estimate_scenario(scenario, n, seed, exec)
        .get(metric)
        .unwrap_or_else(|| panic!("{} is not a {} metric", metric.name(), scenario.label()))
        .clone()
}

/// Per-round observations for rounds `0..n`, in round order.
pub fn observations(scenario: &Scenario, n: u64, seed: u64, exec: Execution) -> Vec<Observation> {
    map_indices(block_count(n), exec, |b| {
        let (start, end) = block_range(b, n);
        let mut rng = RoundRng::at(seed, start);
        (start..end).map(|_| scenario.observe(&rng.next_draw())).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}
