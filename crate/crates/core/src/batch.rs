//! Equilibrium bidding in a two-bidder batch auction whose participants may
//! miss the current batch.
//!
//! Valuations are i.i.d. uniform on `[0, 1]`. A bid lands in the current batch
//! with probability `T`, taken from an [`InclusionCurve`] at the arrival time.
//! Three payment/information variants are covered:
//!
//! * winner-pay, bidder knows its own bid is in, rival lands with prob. `T`;
//! * winner-pay, both own and rival inclusion uncertain;
//! * all-pay, bidder knows its own bid is in (see [`BatchVariant::AllPay`]).

use crate::error::{check_unit, Error, Result};
use crate::model::{BatchTime, InclusionCurve, Valuation};
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BatchVariant {
    /// First price; own inclusion known, rival included with probability `T`.
    WinnerPayOpponentUncertain,
    /// First price; own and rival inclusion both uncertain.
    WinnerPayJointUncertain,
    /// All-pay: `b(v) = T v² / 2`.
    ///
    /// That bid solves the all-pay problem for a bidder who conditions on its
    /// own bid being in the batch (own inclusion weight 1). With own inclusion
    /// uncertain at the same `T` the symmetric equilibrium is
    /// `(T² + (1-T)²) v² / 2` instead, which coincides only at `T ∈ {1/2, 1}`.
    AllPay,
}

impl BatchVariant {
    pub const ALL: [BatchVariant; 3] = [
        BatchVariant::WinnerPayOpponentUncertain,
        BatchVariant::WinnerPayJointUncertain,
        BatchVariant::AllPay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WinnerPayOpponentUncertain => "winner_pay_opponent_uncertain",
            Self::WinnerPayJointUncertain => "winner_pay_joint_uncertain",
            Self::AllPay => "all_pay",
        }
    }

    /// Own inclusion probability under which [`equilibrium_bid`] is a best
    /// response when the rival is included with probability `t`.
    pub fn equilibrium_own_inclusion(self, t: f64) -> f64 {
        match self {
            Self::WinnerPayJointUncertain => t,
            Self::WinnerPayOpponentUncertain | Self::AllPay => 1.0,
        }
    }

    /// Bid shading term `k` in `b(v) = v² / (2 (v + k))` for the winner-pay variants.
    fn shading(self, t: f64) -> Option<f64> {
        match self {
            Self::WinnerPayOpponentUncertain => Some((1.0 - t) / t),
            Self::WinnerPayJointUncertain => {
                let s = 1.0 - t;
                Some(t * s / (t * t + s * s))
            }
            Self::AllPay => None,
        }
    }
}

/// Symmetric equilibrium bid for value `v` when both bidders share inclusion probability `t`.
///
/// Returns [`Error::Excluded`] for the opponent-uncertain variant at `t = 0`, where
/// the bidder is not in the current batch and its shading term diverges.
pub fn equilibrium_bid(variant: BatchVariant, v: Valuation, t: f64) -> Result<f64> {
    let t = check_unit("inclusion probability", t)?;
    if variant == BatchVariant::WinnerPayOpponentUncertain && t == 0.0 {
        return Err(Error::Excluded(t));
    }
    Ok(bid_unchecked(variant, v.get(), t))
}

fn bid_unchecked(variant: BatchVariant, v: f64, t: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    match variant.shading(t) {
        Some(k) => v * v / (2.0 * (v + k)),
        None => 0.5 * t * v * v,
    }
}

/// Interim payoff `Π(τ) = 1/2 - T(τ)/3` of the opponent-uncertain equilibrium.
pub fn interim_payoff(tau: BatchTime, curve: &InclusionCurve) -> f64 {
    0.5 - curve.probability(tau) / 3.0
}

/// A rival bid function over uniform valuations, as seen by a deviating bidder.
pub trait BidFunction: Sync {
    fn bid(&self, v: f64) -> f64;

    /// `Pr[b >= bid(v_opp)]` for `v_opp ~ U[0, 1]`: 0 below the rival's range, 1 above it.
    fn win_probability(&self, b: f64) -> f64 {
        if b < self.bid(0.0) {
            return 0.0;
        }
        if b >= self.bid(1.0) {
            return 1.0;
        }
        bisect(|v| self.bid(v) - b, 0.0, 1.0, 1e-15).unwrap_or(1.0)
    }
}

/// The closed-form symmetric equilibrium played by the rival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumBidder {
    variant: BatchVariant,
    t: f64,
}

impl EquilibriumBidder {
    pub fn new(variant: BatchVariant, t: f64) -> Result<Self> {
        let t = check_unit("inclusion probability", t)?;
        if t == 0.0 {
            // All three bid functions are flat (or undefined) at T = 0 and have no inverse.
            return Err(Error::Excluded(t));
        }
        Ok(Self { variant, t })
    }
}

impl BidFunction for EquilibriumBidder {
    fn bid(&self, v: f64) -> f64 {
        bid_unchecked(self.variant, v, self.t)
    }

    fn win_probability(&self, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        // Closed-form inverse of b = v² / (2 (v + k)) or b = t v² / 2.
        let v = match self.variant.shading(self.t) {
            Some(k) => b + (b * b + 2.0 * b * k).sqrt(),
            None => (2.0 * b / self.t).sqrt(),
        };
        v.min(1.0)
    }
}

/// An arbitrary rival bid function, checked strictly increasing on a grid at construction.
pub struct MonotoneBid<F> {
    f: F,
}

impl<F: Fn(f64) -> f64 + Sync> MonotoneBid<F> {
    pub fn new(f: F) -> Result<Self> {
        const STEPS: usize = 1000;
        let mut prev = f(0.0);
        for i in 1..=STEPS {
            let v = i as f64 / STEPS as f64;
            let b = f(v);
            if !(b > prev) {
                return Err(Error::NonMonotoneStrategy(format!(
                    "bid({v}) = {b} does not exceed bid at previous grid point {prev}"
                )));
            }
            prev = b;
        }
        Ok(Self { f })
    }
}

impl<F: Fn(f64) -> f64 + Sync> BidFunction for MonotoneBid<F> {
    fn bid(&self, v: f64) -> f64 {
        (self.f)(v)
    }
}

/// Expected utility of bidding `bid` with value `v` against `opponent`, with
/// own and rival inclusion probabilities `t_own`, `t_opp`.
///
/// The opponent-uncertain variant ignores `t_own` (own inclusion is known).
pub fn expected_utility(
    variant: BatchVariant,
    v: Valuation,
    bid: f64,
    t_own: f64,
    t_opp: f64,
    opponent: &impl BidFunction,
) -> Result<f64> {
    let t_own = check_unit("own inclusion probability", t_own)?;
    let t_opp = check_unit("rival inclusion probability", t_opp)?;
    Ok(utility_unchecked(variant, v.get(), bid, t_own, t_opp, opponent))
}

pub(crate) fn utility_unchecked(
    variant: BatchVariant,
    v: f64,
    bid: f64,
    t_own: f64,
    t_opp: f64,
    opponent: &impl BidFunction,
) -> f64 {
    let p = opponent.win_probability(bid);
    let (contested, uncontested) = match variant {
        BatchVariant::WinnerPayOpponentUncertain => (t_opp, 1.0 - t_opp),
        BatchVariant::WinnerPayJointUncertain | BatchVariant::AllPay => (
            t_own * t_opp + (1.0 - t_own) * (1.0 - t_opp),
            t_own * (1.0 - t_opp),
        ),
    };
    let win = contested * p + uncontested;
    match variant {
        BatchVariant::AllPay => v * win - bid,
        _ => (v - bid) * win,
    }
}
