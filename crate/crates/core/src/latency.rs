//! Ex-ante latency investment before a batch auction.
//!
//! Both bidders buy a delay `Δ` at cost `C(Δ)` before knowing values or arrival
//! times. The symmetric equilibrium is a mixed strategy with CDF
//! `σ(Δ) = 3/2 + 3 C'(Δ)` on the support where `C'` runs from `-1/2` to `-1/6`.

use crate::error::{Error, Result};
use crate::model::{CostOrder, Delay, LatencyCostModel};
use crate::numerics::{bisect, integrate};

const ROOT_FLOOR: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-12;

/// Slope of `C` at the lower and upper support endpoints.
pub const SLOPE_AT_LOWER: f64 = -0.5;
pub const SLOPE_AT_UPPER: f64 = -1.0 / 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStrategy {
    cost: LatencyCostModel,
    lower: f64,
    upper: f64,
}

impl LatencyStrategy {
    /// Solves for the equilibrium support of `cost`.
    pub fn build(cost: LatencyCostModel) -> Result<Self> {
        let (lower, upper) = match cost {
            LatencyCostModel::InverseDelay { c } => ((2.0 * c).sqrt(), (6.0 * c).sqrt()),
            LatencyCostModel::Custom(_) => {
                let (dom_lo, dom_hi) = cost.domain();
                let lo = dom_lo.max(ROOT_FLOOR);
                let hi = dom_hi.min(1.0);
                let root = |target: f64, which: &str| {
                    bisect(|d| cost.eval_unchecked(d, CostOrder::First) - target, lo, hi, ROOT_TOL).map_err(|e| {
                        Error::IncompatibleCost(format!(
                            "no delay in [{lo}, {hi}] with C' = {target} for the {which} support endpoint \
                             (C' + {} ranges over [{}, {}])",
                            -target, e.f_lo, e.f_hi
                        ))
                    })
                };
                (root(SLOPE_AT_LOWER, "lower")?, root(SLOPE_AT_UPPER, "upper")?)
            }
        };
        if upper > 1.0 {
            return Err(Error::IncompatibleCost(format!(
                "upper support endpoint {upper} exceeds the batch length"
            )));
        }
        Ok(Self { cost, lower, upper })
    }

    pub fn cost(&self) -> &LatencyCostModel {
        &self.cost
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// `σ(Δ)`, clamped to 0 below and 1 above the support.
    pub fn cdf(&self, delta: f64) -> f64 {
        if delta <= self.lower {
            0.0
        } else if delta >= self.upper {
            1.0
        } else {
            (1.5 + 3.0 * self.cost.eval_unchecked(delta, CostOrder::First)).clamp(0.0, 1.0)
        }
    }

    /// Inverse-CDF sample: the delay with `σ(Δ) = u`.
    pub fn sample(&self, u: f64) -> Delay {
        let u = u.clamp(0.0, 1.0);
        let d = match self.cost {
            LatencyCostModel::InverseDelay { c } => (3.0 * c / (1.5 - u)).sqrt(),
            LatencyCostModel::Custom(_) => {
                bisect(|d| self.cdf(d) - u, self.lower, self.upper, 1e-14).unwrap_or(if u < 0.5 {
                    self.lower
                } else {
                    self.upper
                })
            }
        };
        Delay::new(d.clamp(self.lower, self.upper)).expect("support lies inside [0, 1]")
    }

    /// Profit of investing in delay `own` when the rival plays this strategy:
    /// `∫_own^1 (1/2 - σ(Δ)/3) dΔ - C(own)`.
    pub fn expected_profit(&self, own: f64) -> Result<f64> {
        if !(own > 0.0 && own <= 1.0) {
            return Err(Error::Domain {
                what: "own delay",
                value: own,
                domain: "(0, 1]",
            });
        }
        let cost = self.cost.value(own)?;
        let gross = integrate(
            |d| 0.5 - self.cdf(d) / 3.0,
            own,
            1.0,
            &[self.lower, self.upper],
            1e-13,
            0.0,
        );
        Ok(gross.value - cost)
    }

    /// `E[|Δ₂ - Δ₁|] = ∫ 6Δ C''(Δ) (2 + 6 C'(Δ)) dΔ` over the support.
    pub fn expected_latency_gap(&self) -> f64 {
        let integrand = |d: f64| {
            6.0 * d
                * self.cost.eval_unchecked(d, CostOrder::Second)
                * (2.0 + 6.0 * self.cost.eval_unchecked(d, CostOrder::First))
        };
        integrate(integrand, self.lower, self.upper, &[], 1e-15, 1e-12).value
    }

    /// Whether the zero-profit property should hold exactly: `C(1) = 0` and the
    /// support reaches the end of the batch.
    pub fn zero_profit_expected(&self) -> bool {
        (self.upper - 1.0).abs() <= 1e-9 && self.cost.value(1.0).map(|c| c.abs() <= 1e-12).unwrap_or(false)
    }
}

/// `build_strategy(cost)`.
pub fn build_strategy(cost: LatencyCostModel) -> Result<LatencyStrategy> {
    LatencyStrategy::build(cost)
}

/// `E[|Δ₂ - Δ₁|]` for `C(Δ) = c/Δ` from the antiderivative `-24c/Δ + 24c²/Δ³`:
/// `(12/√2 - 20/√6) √c`.
pub fn inverse_delay_gap_closed_form(c: f64) -> f64 {
    (12.0 / 2f64.sqrt() - 20.0 / 6f64.sqrt()) * c.sqrt()
}
