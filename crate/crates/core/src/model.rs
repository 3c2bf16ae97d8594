//! Shared domain types: valuations, batch-relative times, inclusion curves,
//! latency cost models and time-boost parameters.
//!
//! Every type here is immutable once constructed; constructors validate.

use crate::error::{check_unit, Error, Result};
use crate::numerics::MonotoneCubic;

/// A bidder's value for having its transaction ordered first. Lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Valuation(f64);

impl Valuation {
    pub fn new(v: f64) -> Result<Self> {
        check_unit("valuation", v).map(Self)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Arrival time of an opportunity inside the normalised batch window `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BatchTime(f64);

impl BatchTime {
    pub fn new(tau: f64) -> Result<Self> {
        check_unit("batch time", tau).map(Self)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A message delay, or a realised latency difference between two bidders,
/// measured in batch lengths. Lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Delay(f64);

impl Delay {
    pub fn new(delta: f64) -> Result<Self> {
        check_unit("delay", delta).map(Self)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Probability `T(τ)` that a bid sent at batch time `τ` lands in the current batch.
///
/// `1 - T` is a CDF on `[0, 1]`: `T(0) = 1`, `T(1) = 0`, non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub enum InclusionCurve {
    /// `T(τ) = 1 - τ`.
    Linear,
    /// Step curve: included iff `τ <= 1 - delay`. Requires `delay` in `(0, 1]`.
    Deterministic { delay: f64 },
    /// Linear interpolation through `(τ, T)` knots spanning `(0, 1)` to `(1, 0)`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl InclusionCurve {
    pub fn deterministic(delay: f64) -> Result<Self> {
        if delay > 0.0 && delay <= 1.0 {
            Ok(Self::Deterministic { delay })
        } else {
            Err(Error::InvalidCurve(format!(
                "deterministic delay must lie in (0, 1], got {delay}"
            )))
        }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidCurve(msg.to_string()));
        if knots.len() < 2 {
            return bad("piecewise-linear curve needs at least two knots");
        }
        if knots.first() != Some(&(0.0, 1.0)) || knots.last() != Some(&(1.0, 0.0)) {
            return bad("knots must start at [0, 1] and end at [1, 0]");
        }
        if knots.iter().any(|&(_, t)| !(0.0..=1.0).contains(&t)) {
            return bad("inclusion probabilities must lie in [0, 1]");
        }
        for w in knots.windows(2) {
            if w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less) {
                return bad("knot times must be strictly increasing");
            }
            if w[1].1 > w[0].1 {
                return bad("inclusion probability must be non-increasing");
            }
        }
        Ok(Self::PiecewiseLinear { knots })
    }

    /// `T(τ)`.
    pub fn probability(&self, tau: BatchTime) -> f64 {
        let tau = tau.get();
        match self {
            Self::Linear => 1.0 - tau,
            Self::Deterministic { delay } => {
                if tau <= 1.0 - delay {
                    1.0
                } else {
                    0.0
                }
            }
            Self::PiecewiseLinear { knots } => {
                let k = knots.partition_point(|&(x, _)| x <= tau);
                if k >= knots.len() {
                    return knots[knots.len() - 1].1;
                }
                let (x0, y0) = knots[k - 1];
                let (x1, y1) = knots[k];
                y0 + (y1 - y0) * (tau - x0) / (x1 - x0)
            }
        }
    }
}

/// `inclusion_probability(curve, τ)` with the time validated.
pub fn inclusion_probability(curve: &InclusionCurve, tau: f64) -> Result<f64> {
    Ok(curve.probability(BatchTime::new(tau)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostOrder {
    Value,
    First,
    Second,
}

/// Cost `C(Δ)` of reaching message delay `Δ`.
///
/// Valid models are strictly decreasing and convex with `C(Δ) → ∞` as `Δ → 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LatencyCostModel {
    /// `C(Δ) = c / Δ`.
    InverseDelay { c: f64 },
    Custom(TabulatedCost),
}

impl LatencyCostModel {
    pub fn inverse_delay(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Self::InverseDelay { c })
        } else {
            Err(Error::InvalidCost(format!("inverse-delay scale must be > 0, got {c}")))
        }
    }

    /// Range of delays on which the model can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::InverseDelay { .. } => (0.0, f64::INFINITY),
            Self::Custom(t) => t.domain(),
        }
    }

    pub fn eval(&self, delta: f64, order: CostOrder) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(delta > 0.0 && delta >= lo && delta <= hi) {
            return Err(Error::Domain {
                what: "cost delay",
                value: delta,
                domain: "(0, max tabulated delay]",
            });
        }
        Ok(self.eval_unchecked(delta, order))
    }

    pub fn value(&self, delta: f64) -> Result<f64> {
        self.eval(delta, CostOrder::Value)
    }

    pub fn first(&self, delta: f64) -> Result<f64> {
        self.eval(delta, CostOrder::First)
    }

    pub fn second(&self, delta: f64) -> Result<f64> {
        self.eval(delta, CostOrder::Second)
    }

    pub(crate) fn eval_unchecked(&self, delta: f64, order: CostOrder) -> f64 {
        match (self, order) {
            (Self::InverseDelay { c }, CostOrder::Value) => c / delta,
            (Self::InverseDelay { c }, CostOrder::First) => -c / (delta * delta),
            (Self::InverseDelay { c }, CostOrder::Second) => 2.0 * c / (delta * delta * delta),
            (Self::Custom(t), CostOrder::Value) => t.value.value(delta),
            (Self::Custom(t), CostOrder::First) => t.first.value(delta),
            (Self::Custom(t), CostOrder::Second) => t.second.value(delta),
        }
    }
}

/// `cost_eval(model, Δ, order)`.
pub fn cost_eval(model: &LatencyCostModel, delta: f64, order: CostOrder) -> Result<f64> {
    model.eval(delta, order)
}

/// A cost function given as `C`, `C'` and `C''` on a grid.
///
/// Between knots `C` is a monotone cubic Hermite using the tabulated `C'` as
/// knot slopes, `C'` likewise uses `C''`, and `C''` is a monotone PCHIP. Each
/// interpolant stays monotone between knots, so decreasing `C`, non-decreasing
/// `C'` and non-negative `C''` survive interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCost {
    grid: Vec<f64>,
    value: MonotoneCubic,
    first: MonotoneCubic,
    second: MonotoneCubic,
}

impl TabulatedCost {
    pub fn new(grid: Vec<f64>, value: Vec<f64>, first: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCost(msg));
        let n = grid.len();
        if n < 2 {
            return bad("tabulated cost needs at least two grid points".into());
        }
        if value.len() != n || first.len() != n || second.len() != n {
            return bad(format!(
                "grid, value, first and second must have equal length ({n}, {}, {}, {})",
                value.len(),
                first.len(),
                second.len()
            ));
        }
        if grid.iter().chain(&value).chain(&first).chain(&second).any(|x| !x.is_finite()) {
            return bad("tabulated entries must be finite".into());
        }
        if grid[0] <= 0.0 {
            return bad("grid must lie in (0, inf)".into());
        }
        for k in 0..n - 1 {
            if grid[k] >= grid[k + 1] {
                return bad(format!("grid not strictly increasing at index {}", k + 1));
            }
            if value[k] <= value[k + 1] {
                return bad(format!("C not strictly decreasing at index {}", k + 1));
            }
            if first[k] > first[k + 1] {
                return bad(format!("C' decreasing at index {} (C not convex)", k + 1));
            }
            // Convexity also pins each secant between the neighbouring slopes.
            let secant = (value[k + 1] - value[k]) / (grid[k + 1] - grid[k]);
            let slack = 1e-9 * secant.abs().max(1.0);
            if secant < first[k] - slack || secant > first[k + 1] + slack {
                return bad(format!(
                    "secant {secant} on [{}, {}] outside [C'(a), C'(b)]",
                    grid[k],
                    grid[k + 1]
                ));
            }
        }
        if first.iter().any(|&d| d >= 0.0) {
            return bad("C' must be negative".into());
        }
        if second.iter().any(|&d| d < 0.0) {
            return bad("C'' must be non-negative".into());
        }
        Ok(Self {
            value: MonotoneCubic::new(grid.clone(), value, Some(first.clone())),
            first: MonotoneCubic::new(grid.clone(), first, Some(second.clone())),
            second: MonotoneCubic::new(grid.clone(), second, None),
            grid,
        })
    }

    /// Tabulates a closed-form model on `grid`.
    pub fn from_fn<F, G, H>(grid: Vec<f64>, c: F, c1: G, c2: H) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
        H: Fn(f64) -> f64,
    {
        let v = grid.iter().map(|&x| c(x)).collect();
        let d1 = grid.iter().map(|&x| c1(x)).collect();
        let d2 = grid.iter().map(|&x| c2(x)).collect();
        Self::new(grid, v, d1, d2)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

/// Time-boost parameters: maximal boost `g` and fee scale `c`, with `g >= c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    g: f64,
    c: f64,
}

impl BoostParams {
    pub fn new(g: f64, c: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::BoostParams("require g > 0"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::BoostParams("require c > 0"));
        }
        if g < c {
            return Err(Error::BoostParams("require g ≥ c"));
        }
        Ok(Self { g, c })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Linearised marginal cost of boost, `c / g`.
    pub fn marginal_cost(&self) -> f64 {
        self.c / self.g
    }
}
