//! Deterministic best-response checks on value grids using analytic utilities.
//!
//! A gain is the best utility over a deviation grid minus the equilibrium
//! utility at the same point. Threshold points and the literal own-uncertainty
//! reading of the all-pay batch bid are measured but carry no tolerance.

use serde::Serialize;

use crate::batch::{utility_unchecked as batch_utility, BatchVariant, BidFunction, EquilibriumBidder};
use crate::boost::{utility_unchecked as boost_utility, BoostProfile, Pricing, Role};
use crate::error::Result;
use crate::latency::LatencyStrategy;
use crate::model::{BoostParams, Delay, LatencyCostModel};

use super::exec::{map_indices, Execution};

/// Tolerance for equilibrium gains at interior grid points.
pub const GAIN_TOL: f64 = 1e-9;
/// Tolerance for the investment indifference and deviation checks.
pub const PROFIT_TOL: f64 = 1e-6;

/// Which own-inclusion weight the batch deviator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnInclusion {
    /// The weight under which the variant's bid is derived.
    Equilibrium,
    /// Own inclusion equal to the rival's.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchGrid {
    pub values: Vec<f64>,
    pub inclusion: Vec<f64>,
    /// Deviation bids, evenly spaced over `[0, 1]`.
    pub bids: usize,
}

impl Default for BatchGrid {
    fn default() -> Self {
        let mut inclusion = step_grid(0.05, 0.95, 0.05);
        inclusion.push(1.0);
        Self {
            values: step_grid(0.05, 0.95, 0.05),
            inclusion,
            bids: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostGrid {
    /// `g/c` ratios, evaluated at `c = 1`.
    pub ratios: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Values `u + step, u + 2 step, ...` up to `max_value`.
    pub step: f64,
    pub max_value: f64,
    /// Deviation boosts, evenly spaced over `[0, g)`.
    pub boosts: usize,
}

impl Default for BoostGrid {
    fn default() -> Self {
        Self {
            ratios: vec![1.0, 4.0, 10.0],
            deltas: vec![0.0, 0.1, 0.25],
            step: 0.05,
            max_value: 0.95,
            boosts: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvestmentGrid {
    /// `c` in `C(Δ) = c/Δ`.
    pub costs: Vec<f64>,
    pub points: usize,
}

impl Default for InvestmentGrid {
    fn default() -> Self {
        Self {
            costs: vec![0.001, 0.01, 0.05],
            points: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuditSpec {
    Batch {
        variant: BatchVariant,
        own: OwnInclusion,
        grid: BatchGrid,
    },
    /// Interior values above the participation threshold.
    Boost { pricing: Pricing, role: Role, grid: BoostGrid },
    /// All-pay boost at `v = u` exactly, for `Δ > 0`.
    BoostThreshold { role: Role, grid: BoostGrid },
    /// Max minus min profit over the equilibrium support.
    InvestmentSpread(InvestmentGrid),
    /// Best off-support profit minus on-support profit.
    InvestmentDeviation(InvestmentGrid),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditGain {
    pub max_gain: f64,
    /// Grid point attaining the maximum.
    pub at: String,
}

impl AuditGain {
    fn none() -> Self {
        Self {
            max_gain: f64::NEG_INFINITY,
            at: String::new(),
        }
    }

    fn fold(self, other: Self) -> Self {
        // Ties keep the earlier point so the result is order-deterministic.
        if other.max_gain > self.max_gain {
            other
        } else {
            self
        }
    }
}

fn step_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| from + step * i as f64).collect()
}

fn max_over<T: Sync, F>(points: &[T], exec: Execution, f: F) -> AuditGain
where
    F: Fn(&T) -> AuditGain + Sync + Send,
{
    map_indices(points.len(), exec, |i| f(&points[i]))
        .into_iter()
        .fold(AuditGain::none(), AuditGain::fold)
}

/// Gain of the best grid bid over the equilibrium bid for a batch bidder.
pub fn batch_gain(variant: BatchVariant, own: OwnInclusion, v: f64, t: f64, bids: usize) -> Result<f64> {
    let opp = EquilibriumBidder::new(variant, t)?;
    let t_own = match own {
        OwnInclusion::Equilibrium => variant.equilibrium_own_inclusion(t),
        OwnInclusion::Symmetric => t,
    };
    let eq = batch_utility(variant, v, opp.bid(v), t_own, t, &opp);
    let best = (0..bids)
        .map(|i| batch_utility(variant, v, i as f64 / (bids - 1) as f64, t_own, t, &opp))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best - eq)
}

/// Gain of the best grid boost over the equilibrium boost.
pub fn boost_gain(profile: &BoostProfile, role: Role, v: f64, boosts: usize) -> f64 {
    let eq = boost_utility(profile, role, v, profile.strategy(role).boost(v));
    let g = profile.params().g();
    let best = (0..boosts)
        .map(|k| boost_utility(profile, role, v, g * k as f64 / boosts as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    best - eq
}

fn boost_profiles(grid: &BoostGrid, pricing: Pricing) -> Result<Vec<(f64, f64, BoostProfile)>> {
    let mut out = Vec::new();
    for &ratio in &grid.ratios {
        for &d in &grid.deltas {
            let profile = BoostProfile::new(BoostParams::new(ratio, 1.0)?, Delay::new(d)?, pricing);
            out.push((ratio, d, profile));
        }
    }
    Ok(out)
}

fn investment_strategies(grid: &InvestmentGrid) -> Result<Vec<(f64, LatencyStrategy)>> {
    grid.costs
        .iter()
        .map(|&c| Ok((c, LatencyStrategy::build(LatencyCostModel::inverse_delay(c)?)?)))
        .collect()
}

pub fn best_response_audit(spec: &AuditSpec, exec: Execution) -> Result<AuditGain> {
    match spec {
        AuditSpec::Batch { variant, own, grid } => {
            let points: Vec<(f64, f64)> = grid
                .values
                .iter()
                .flat_map(|&v| grid.inclusion.iter().map(move |&t| (v, t)))
                .collect();
            let gains = map_indices(points.len(), exec, |i| {
                let (v, t) = points[i];
                batch_gain(*variant, *own, v, t, grid.bids).map(|g| AuditGain {
                    max_gain: g,
                    at: format!("v={v:.2} T={t:.2}"),
                })
            });
            gains
                .into_iter()
                .try_fold(AuditGain::none(), |acc, g| Ok(acc.fold(g?)))
        }
        AuditSpec::Boost { pricing, role, grid } => {
            let mut points = Vec::new();
            for (ratio, d, profile) in boost_profiles(grid, *pricing)? {
                let u = profile.strategy(*role).threshold();
                let mut k = 1;
                while u + grid.step * k as f64 <= grid.max_value + 1e-12 {
                    points.push((ratio, d, profile, u + grid.step * k as f64));
                    k += 1;
                }
            }
            Ok(max_over(&points, exec, |&(ratio, d, ref profile, v)| AuditGain {
                max_gain: boost_gain(profile, *role, v, grid.boosts),
                at: format!("g/c={ratio} delta={d} v={v:.4}"),
            }))
        }
        AuditSpec::BoostThreshold { role, grid } => {
            let points: Vec<_> = boost_profiles(grid, Pricing::AllPay)?
                .into_iter()
                .filter(|&(_, d, ref p)| d > 0.0 && p.strategy(*role).threshold() <= 1.0)
                .collect();
            Ok(max_over(&points, exec, |&(ratio, d, ref profile)| {
                let u = profile.strategy(*role).threshold();
                AuditGain {
                    max_gain: boost_gain(profile, *role, u, grid.boosts),
                    at: format!("g/c={ratio} delta={d} v=u={u:.4}"),
                }
            }))
        }
        AuditSpec::InvestmentSpread(grid) => {
            let mut out = AuditGain::none();
            for (c, s) in investment_strategies(grid)? {
                out = out.fold(AuditGain {
                    max_gain: investment_spread(&s, grid.points)?,
                    at: format!("c={c}"),
                });
            }
            Ok(out)
        }
        AuditSpec::InvestmentDeviation(grid) => {
            let mut out = AuditGain::none();
            for (c, s) in investment_strategies(grid)? {
                let mut g = investment_deviation_gain(&s, grid.points)?;
                g.at = format!("c={c} {}", g.at);
                out = out.fold(g);
            }
            Ok(out)
        }
    }
}

/// Max minus min of the expected profit over `points` evenly spaced support delays.
pub fn investment_spread(strategy: &LatencyStrategy, points: usize) -> Result<f64> {
    let (lo, hi) = strategy.support();
    let profits = support_grid(lo, hi, points)
        .into_iter()
        .map(|d| strategy.expected_profit(d))
        .collect::<Result<Vec<_>>>()?;
    let max = profits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = profits.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Best profit at `points` delays on each side of the support, minus the
/// on-support profit. Delays outside the cost model's domain are skipped.
pub fn investment_deviation_gain(strategy: &LatencyStrategy, points: usize) -> Result<AuditGain> {
    let (lo, hi) = strategy.support();
    let (dom_lo, dom_hi) = strategy.cost().domain();
    let on = strategy.expected_profit(hi)?;
    let below = (1..points).map(|k| lo * k as f64 / points as f64);
    let above = (1..=points).map(|k| hi + (1.0 - hi) * k as f64 / points as f64);
    let mut out = AuditGain {
        max_gain: 0.0,
        at: "support".into(),
    };
    for d in below.chain(above).filter(|d| (dom_lo..=dom_hi).contains(d)) {
        out = out.fold(AuditGain {
            max_gain: strategy.expected_profit(d)? - on,
            at: format!("delay={d:.4}"),
        });
    }
    Ok(out)
}

fn support_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditLine {
    pub name: &'static str,
    pub max_gain: f64,
    pub at: String,
    /// `None` for measured-only lines.
    pub tolerance: Option<f64>,
}

impl AuditLine {
    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.max_gain <= tol)
    }
}

/// Every audit on its documented grid, in a fixed order.
pub fn standard_audits(exec: Execution) -> Result<Vec<AuditLine>> {
    let batch = |variant, own| AuditSpec::Batch {
        variant,
        own,
        grid: BatchGrid::default(),
    };
    let boost = |pricing, role| AuditSpec::Boost {
        pricing,
        role,
        grid: BoostGrid::default(),
    };
    let threshold = |role| AuditSpec::BoostThreshold {
        role,
        grid: BoostGrid::default(),
    };
    let specs: Vec<(&'static str, AuditSpec, Option<f64>)> = vec![
        (
            "batch_winner_pay_opponent_uncertain",
            batch(BatchVariant::WinnerPayOpponentUncertain, OwnInclusion::Equilibrium),
            Some(GAIN_TOL),
        ),
        (
            "batch_winner_pay_joint_uncertain",
            batch(BatchVariant::WinnerPayJointUncertain, OwnInclusion::Equilibrium),
            Some(GAIN_TOL),
        ),
        ("batch_all_pay", batch(BatchVariant::AllPay, OwnInclusion::Equilibrium), Some(GAIN_TOL)),
        ("batch_all_pay_own_uncertain", batch(BatchVariant::AllPay, OwnInclusion::Symmetric), None),
        ("boost_all_pay_fast", boost(Pricing::AllPay, Role::Fast), Some(GAIN_TOL)),
        ("boost_all_pay_slow", boost(Pricing::AllPay, Role::Slow), Some(GAIN_TOL)),
        ("boost_first_price_fast", boost(Pricing::FirstPrice, Role::Fast), Some(GAIN_TOL)),
        ("boost_first_price_slow", boost(Pricing::FirstPrice, Role::Slow), Some(GAIN_TOL)),
        ("boost_all_pay_threshold_fast", threshold(Role::Fast), None),
        ("boost_all_pay_threshold_slow", threshold(Role::Slow), None),
        (
            "investment_profit_spread",
            AuditSpec::InvestmentSpread(InvestmentGrid::default()),
            Some(PROFIT_TOL),
        ),
        (
            "investment_off_support_gain",
            AuditSpec::InvestmentDeviation(InvestmentGrid::default()),
            Some(PROFIT_TOL),
        ),
    ];
    specs
        .into_iter()
        .map(|(name, spec, tolerance)| {
            let gain = best_response_audit(&spec, exec)?;
            Ok(AuditLine {
                name,
                max_gain: gain.max_gain,
                at: gain.at,
                tolerance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_match_documentation() {
        let b = BatchGrid::default();
        assert_eq!(b.values.len(), 19);
        assert_eq!(b.inclusion.len(), 20);
        assert!((b.values[18] - 0.95).abs() < 1e-12);
        assert_eq!(step_grid(0.0, 0.1, 0.05).len(), 3);
    }

    #[test]
    fn small_batch_audit_certifies() {
        let spec = AuditSpec::Batch {
            variant: BatchVariant::WinnerPayOpponentUncertain,
            own: OwnInclusion::Equilibrium,
            grid: BatchGrid {
                values: vec![0.3, 0.7],
                inclusion: vec![0.25, 0.5, 0.75, 1.0],
                bids: 1000,
            },
        };
        let g = best_response_audit(&spec, Execution::Sequential).unwrap();
        assert!(g.max_gain <= GAIN_TOL, "{g:?}");
        // The equilibrium bid is itself feasible, so gains are never very negative.
        assert!(g.max_gain > -1e-3);
    }

    #[test]
    fn threshold_audit_reports_half_u_squared() {
        let grid = BoostGrid {
            ratios: vec![1.0],
            deltas: vec![0.25],
            ..BoostGrid::default()
        };
        let g = best_response_audit(
            &AuditSpec::BoostThreshold {
                role: Role::Slow,
                grid,
            },
            Execution::Sequential,
        )
        .unwrap();
        assert!((g.max_gain - 0.125).abs() < 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let spec = AuditSpec::Boost {
            pricing: Pricing::AllPay,
            role: Role::Slow,
            grid: BoostGrid::default(),
        };
        assert_eq!(
            best_response_audit(&spec, Execution::Sequential).unwrap(),
            best_response_audit(&spec, Execution::Parallel).unwrap()
        );
    }
}
