//! Monte Carlo estimates checked against closed forms on a fixed parameter grid.

use serde::Serialize;

use crate::boost::{BoostProfile, FeeMode, Pricing};
use crate::compare::{boost_payment_split, expected_revenue, expected_welfare, misallocation_probability, Mechanism};
use crate::error::Result;
use crate::latency::{inverse_delay_gap_closed_form, LatencyStrategy};
use crate::model::{BoostParams, Delay, LatencyCostModel};

use super::estimate::{estimate_scenario, Metric, Scenario};
use super::exec::Execution;

/// Allowed distance from the closed form, in standard errors.
pub const Z_TOL: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub deltas: Vec<f64>,
    /// `g/c` at `c = 1`.
    pub ratios: Vec<f64>,
    /// `c` in `C(Δ) = c/Δ`.
    pub costs: Vec<f64>,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            deltas: vec![0.0, 0.1, 0.25],
            ratios: vec![1.0, 4.0, 10.0],
            costs: vec![0.001, 0.01],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    /// Scenario, parameters and metric, e.g. `boost[g/c=4,delta=0.1].revenue`.
    pub name: String,
    pub target: f64,
    pub mean: f64,
    pub stderr: f64,
    pub z: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.z.abs() <= Z_TOL
    }
}

fn push_checks(out: &mut Vec<OracleCheck>, label: String, scenario: &Scenario, targets: &[(Metric, f64)], n: u64, seed: u64, exec: Execution) {
    let est = estimate_scenario(scenario, n, seed, exec);
    for &(metric, target) in targets {
        let e = est.get(metric).expect("metric produced by scenario");
        out.push(OracleCheck {
            name: format!("{label}.{}", metric.name()),
            target,
            mean: e.mean,
            stderr: e.stderr,
            z: e.z(target),
        });
    }
}

/// Runs every scenario on `grid` with `n` rounds from stream `seed`.
pub fn oracle_checks(grid: &OracleGrid, n: u64, seed: u64, exec: Execution) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    let unit = BoostParams::new(1.0, 1.0)?;
    for &d in &grid.deltas {
        let delta = Delay::new(d)?;
        push_checks(
            &mut out,
            format!("batch[delta={d}]"),
            &Scenario::batch(delta),
            &[
                (Metric::Revenue, expected_revenue(Mechanism::Batch, delta, &unit)),
                (Metric::Welfare, expected_welfare(Mechanism::Batch, delta, &unit)),
                (Metric::Misallocation, misallocation_probability(Mechanism::Batch, delta, &unit)),
            ],
            n,
            seed,
            exec,
        );
    }
    for &ratio in &grid.ratios {
        let params = BoostParams::new(ratio, 1.0)?;
        for &d in &grid.deltas {
            let delta = Delay::new(d)?;
            let (fast, slow) = boost_payment_split(delta, &params)?;
            let scenario = Scenario::boost(BoostProfile::new(params, delta, Pricing::AllPay), FeeMode::Linear)?;
            push_checks(
                &mut out,
                format!("boost[g/c={ratio},delta={d}]"),
                &scenario,
                &[
                    (Metric::Revenue, expected_revenue(Mechanism::Boost, delta, &params)),
                    (Metric::Welfare, expected_welfare(Mechanism::Boost, delta, &params)),
                    (Metric::Misallocation, misallocation_probability(Mechanism::Boost, delta, &params)),
                    (Metric::PaymentFast, fast),
                    (Metric::PaymentSlow, slow),
                ],
                n,
                seed,
                exec,
            );
        }
    }
    for &c in &grid.costs {
        let strategy = LatencyStrategy::build(LatencyCostModel::inverse_delay(c)?)?;
        push_checks(
            &mut out,
            format!("investment[c={c}]"),
            &Scenario::investment(strategy),
            &[(Metric::LatencyGap, inverse_delay_gap_closed_form(c))],
            n,
            seed,
            exec,
        );
    }
    Ok(out)
}
