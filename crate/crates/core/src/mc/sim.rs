//! Single simulated races.
//!
//! Batch rounds use the full-information comparison model: the slow bidder
//! lands in the batch unless `τ > 1 - Δ`; a sole bidder wins with a zero bid,
//! otherwise both bid `v/2`. Boost rounds play the equilibrium boost rules.

use serde::Serialize;

use crate::boost::{boost_to_fee, BoostProfile, FeeMode, Pricing};
use crate::error::{Error, Result};
use crate::latency::LatencyStrategy;
use crate::model::Delay;

use super::rng::RoundDraw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Fast,
    Slow,
    /// No execution. Cannot arise under the current rules.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub winner: Winner,
    pub welfare: f64,
    pub revenue: f64,
    pub payment_fast: f64,
    pub payment_slow: f64,
    /// Batch inclusion; always true in boost rounds.
    pub included_fast: bool,
    pub included_slow: bool,
    pub v_fast: f64,
    pub v_slow: f64,
    pub tau: f64,
    /// Outcome was decided by the tie coin.
    pub tie: bool,
}

impl RoundOutcome {
    /// The lower-valued bidder won.
    pub fn misallocated(&self) -> bool {
        match self.winner {
            Winner::Fast => self.v_fast < self.v_slow,
            Winner::Slow => self.v_slow < self.v_fast,
            Winner::None => false,
        }
    }

    fn settle(
        winner: Winner,
        (payment_fast, payment_slow): (f64, f64),
        (included_fast, included_slow): (bool, bool),
        draw: &RoundDraw,
        tie: bool,
    ) -> Self {
        let welfare = match winner {
            Winner::Fast => draw.v_fast,
            Winner::Slow => draw.v_slow,
            Winner::None => 0.0,
        };
        Self {
            winner,
            welfare,
            revenue: payment_fast + payment_slow,
            payment_fast,
            payment_slow,
            included_fast,
            included_slow,
            v_fast: draw.v_fast,
            v_slow: draw.v_slow,
            tau: draw.tau,
            tie,
        }
    }
}

/// Higher score wins; exact equality goes to the coin.
fn order(score_fast: f64, score_slow: f64, draw: &RoundDraw) -> (Winner, bool) {
    if score_fast > score_slow {
        (Winner::Fast, false)
    } else if score_slow > score_fast {
        (Winner::Slow, false)
    } else if draw.fast_wins_tie() {
        (Winner::Fast, true)
    } else {
        (Winner::Slow, true)
    }
}

pub fn simulate_batch_round(delta: Delay, draw: &RoundDraw) -> RoundOutcome {
    let slow_misses = draw.tau > 1.0 - delta.get();
    if slow_misses {
        return RoundOutcome::settle(Winner::Fast, (0.0, 0.0), (true, false), draw, false);
    }
    let (winner, tie) = order(draw.v_fast, draw.v_slow, draw);
    let payments = match winner {
        Winner::Fast => (draw.v_fast / 2.0, 0.0),
        _ => (0.0, draw.v_slow / 2.0),
    };
    RoundOutcome::settle(winner, payments, (true, true), draw, tie)
}

/// Largest boost either bidder plays at `profile`.
pub fn max_equilibrium_boost(profile: &BoostProfile) -> f64 {
    profile.slow.boost(1.0).max(profile.fast.boost(1.0))
}

/// Exact fees need every boost played to stay below `g`.
pub fn check_fee_mode(profile: &BoostProfile, fee_mode: FeeMode) -> Result<()> {
    let max = max_equilibrium_boost(profile);
    if fee_mode == FeeMode::Exact && max >= profile.params().g() {
        return Err(Error::BoostParams(
            "exact fees need every equilibrium boost below g (g/(2c) + delta/2 < g)",
        ));
    }
    Ok(())
}

/// Assumes `fee_mode` was accepted by [`check_fee_mode`] for `profile`.
pub fn simulate_boost_round(profile: &BoostProfile, fee_mode: FeeMode, draw: &RoundDraw) -> RoundOutcome {
    let params = profile.params();
    let pi_fast = profile.fast.boost(draw.v_fast);
    let pi_slow = profile.slow.boost(draw.v_slow);
    let (winner, tie) = order(pi_fast + profile.delta(), pi_slow, draw);
    let fee = |pi: f64| boost_to_fee(pi, params, fee_mode).expect("boost within fee domain");
    let (fee_fast, fee_slow) = (fee(pi_fast), fee(pi_slow));
    let payments = match (profile.pricing(), winner) {
        (Pricing::AllPay, _) => (fee_fast, fee_slow),
        (Pricing::FirstPrice, Winner::Fast) => (fee_fast, 0.0),
        (Pricing::FirstPrice, _) => (0.0, fee_slow),
    };
    RoundOutcome::settle(winner, payments, (true, true), draw, tie)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvestmentOutcome {
    pub delay_1: f64,
    pub delay_2: f64,
    pub gap: f64,
}

/// Both bidders draw delays from `strategy` using the first two uniforms.
pub fn simulate_investment_round(strategy: &LatencyStrategy, draw: &RoundDraw) -> InvestmentOutcome {
    let d1 = strategy.sample(draw.v_fast).get();
    let d2 = strategy.sample(draw.v_slow).get();
    InvestmentOutcome {
        delay_1: d1,
        delay_2: d2,
        gap: (d2 - d1).abs(),
    }
}
