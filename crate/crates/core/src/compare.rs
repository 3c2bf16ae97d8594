//! Closed-form comparison of the batch auction and time boost at a realised
//! latency difference `Δ`.
//!
//! Batch model: the slower bidder misses the batch with probability `Δ`, in
//! which case the faster bidder wins with a zero bid; otherwise both play the
//! standard first-price equilibrium. Time-boost model: all-pay equilibrium with
//! a head start, linear fees.

use serde::Serialize;

use crate::boost::{threshold, Pricing};
use crate::error::{Error, Result};
use crate::model::{BoostParams, Delay};

/// Surplus when the higher-value bidder always wins, `E[max(v₁, v₂)]`.
pub const FIRST_BEST_WELFARE: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Batch,
    Boost,
}

fn boost_u(delta: Delay, params: &BoostParams) -> f64 {
    threshold(params, delta.get(), Pricing::AllPay)
}

/// Probability that the higher-value bidder loses: `Δ/2` batch, `(c/g) Δ/2` boost.
pub fn misallocation_probability(mechanism: Mechanism, delta: Delay, params: &BoostParams) -> f64 {
    match mechanism {
        Mechanism::Batch => delta.get() / 2.0,
        Mechanism::Boost => params.marginal_cost() * delta.get() / 2.0,
    }
}

/// Shortfall from first-best welfare: `Δ/6` batch, `u³/6` boost.
pub fn welfare_gap(mechanism: Mechanism, delta: Delay, params: &BoostParams) -> f64 {
    match mechanism {
        Mechanism::Batch => delta.get() / 6.0,
        Mechanism::Boost => boost_u(delta, params).powi(3) / 6.0,
    }
}

pub fn expected_welfare(mechanism: Mechanism, delta: Delay, params: &BoostParams) -> f64 {
    FIRST_BEST_WELFARE - welfare_gap(mechanism, delta, params)
}

/// `(1 - Δ)/3` batch, `(1 - u³)/3` boost.
pub fn expected_revenue(mechanism: Mechanism, delta: Delay, params: &BoostParams) -> f64 {
    match mechanism {
        Mechanism::Batch => (1.0 - delta.get()) / 3.0,
        Mechanism::Boost => (1.0 - boost_u(delta, params).powi(3)) / 3.0,
    }
}

/// Expected time-boost payments `(fast, slow)`.
pub fn boost_payment_split(delta: Delay, params: &BoostParams) -> Result<(f64, f64)> {
    let u = boost_u(delta, params);
    if u > 1.0 {
        return Err(Error::DegenerateParticipation(u));
    }
    let (u2, u3) = (u * u, u * u * u);
    Ok((1.0 / 6.0 - u2 / 2.0 + u3 / 3.0, 1.0 / 6.0 + u2 / 2.0 - 2.0 * u3 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MechanismMetrics {
    pub misallocation_prob: f64,
    pub welfare: f64,
    pub welfare_gap: f64,
    pub revenue: f64,
}

/// Which design does at least as well on each criterion, from the closed-form
/// conditions `c/g <= 1` (allocation) and `c/g <= Δ^{-1/3}` (welfare, revenue).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub boost_allocates_better: bool,
    pub boost_welfare_better: bool,
    pub boost_revenue_better: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub delta: f64,
    pub g: f64,
    pub c: f64,
    pub u: f64,
    pub batch: MechanismMetrics,
    pub boost: MechanismMetrics,
    pub payment_fast: f64,
    pub payment_slow: f64,
    pub dominance: Dominance,
    pub note: &'static str,
}

pub const BATCH_NORMALISATION_NOTE: &str =
    "batch length is normalised to 1 while the maximal boost g may exceed 1; \
     more batches per unit time scale the batch misallocation, welfare gap and revenue loss up";

fn metrics(mechanism: Mechanism, delta: Delay, params: &BoostParams) -> MechanismMetrics {
    MechanismMetrics {
        misallocation_prob: misallocation_probability(mechanism, delta, params),
        welfare: expected_welfare(mechanism, delta, params),
        welfare_gap: welfare_gap(mechanism, delta, params),
        revenue: expected_revenue(mechanism, delta, params),
    }
}

pub fn compare(delta: Delay, params: &BoostParams) -> Result<ComparisonReport> {
    let (payment_fast, payment_slow) = boost_payment_split(delta, params)?;
    let ratio = params.marginal_cost();
    let d = delta.get();
    let welfare_bound = if d == 0.0 { f64::INFINITY } else { d.cbrt().recip() };
    Ok(ComparisonReport {
        delta: d,
        g: params.g(),
        c: params.c(),
        u: boost_u(delta, params),
        batch: metrics(Mechanism::Batch, delta, params),
        boost: metrics(Mechanism::Boost, delta, params),
        payment_fast,
        payment_slow,
        dominance: Dominance {
            boost_allocates_better: ratio <= 1.0,
            boost_welfare_better: ratio <= welfare_bound,
            boost_revenue_better: ratio <= welfare_bound,
        },
        note: BATCH_NORMALISATION_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(g: f64, c: f64) -> BoostParams {
        BoostParams::new(g, c).unwrap()
    }

    fn d(x: f64) -> Delay {
        Delay::new(x).unwrap()
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn misallocation_examples() {
        let any = p(1.0, 1.0);
        assert!((misallocation_probability(Mechanism::Batch, d(0.2), &any) - 0.1).abs() < TOL);
        assert!((misallocation_probability(Mechanism::Boost, d(0.2), &p(4.0, 1.0)) - 0.025).abs() < TOL);
        for m in [Mechanism::Batch, Mechanism::Boost] {
            assert_eq!(misallocation_probability(m, d(0.0), &any), 0.0);
        }
    }

    #[test]
    fn welfare_examples() {
        let any = p(1.0, 1.0);
        assert!((expected_welfare(Mechanism::Batch, d(0.2), &any) - (2.0 / 3.0 - 0.2 / 6.0)).abs() < TOL);
        assert!((expected_welfare(Mechanism::Boost, d(0.25), &any) - (2.0 / 3.0 - 0.125 / 6.0)).abs() < TOL);
        for m in [Mechanism::Batch, Mechanism::Boost] {
            assert!((expected_welfare(m, d(0.0), &any) - 2.0 / 3.0).abs() < TOL);
        }
    }

    #[test]
    fn revenue_examples() {
        let any = p(1.0, 1.0);
        assert!((expected_revenue(Mechanism::Batch, d(0.2), &any) - 0.8 / 3.0).abs() < TOL);
        assert!((expected_revenue(Mechanism::Boost, d(0.25), &any) - 0.875 / 3.0).abs() < TOL);
        for m in [Mechanism::Batch, Mechanism::Boost] {
            assert!((expected_revenue(m, d(0.0), &any) - 1.0 / 3.0).abs() < TOL);
        }
    }

    #[test]
    fn payment_split_examples() {
        let (f, s) = boost_payment_split(d(0.25), &p(1.0, 1.0)).unwrap();
        assert!((f - 1.0 / 12.0).abs() < TOL);
        assert!((s - 5.0 / 24.0).abs() < TOL);
        assert!((f + s - 0.875 / 3.0).abs() < TOL);
        let (f, s) = boost_payment_split(d(0.0), &p(4.0, 1.0)).unwrap();
        assert!((f - 1.0 / 6.0).abs() < TOL && (s - 1.0 / 6.0).abs() < TOL);
    }

    #[test]
    fn payment_split_sums_to_revenue() {
        for (g, c) in [(1.0, 1.0), (4.0, 1.0), (10.0, 3.0)] {
            for i in 0..20 {
                let delta = d(i as f64 / 19.0);
                let (f, s) = boost_payment_split(delta, &p(g, c)).unwrap();
                assert!((f + s - expected_revenue(Mechanism::Boost, delta, &p(g, c))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compare_examples() {
        let r = compare(d(0.2), &p(4.0, 1.0)).unwrap();
        assert!(r.dominance.boost_allocates_better && r.dominance.boost_welfare_better && r.dominance.boost_revenue_better);
        assert!(r.boost.misallocation_prob < r.batch.misallocation_prob);
        assert!(r.boost.revenue > r.batch.revenue);

        let r = compare(d(0.0), &p(3.0, 1.0)).unwrap();
        assert_eq!(r.batch.welfare_gap, 0.0);
        assert_eq!(r.boost.welfare_gap, 0.0);
        assert!((r.batch.revenue - 1.0 / 3.0).abs() < TOL && (r.boost.revenue - 1.0 / 3.0).abs() < TOL);

        let params = p(1.0, 1.0);
        let r = compare(d(0.25), &params).unwrap();
        assert!((r.u - 0.5).abs() < TOL);
        assert_eq!(r.boost.revenue, expected_revenue(Mechanism::Boost, d(0.25), &params));
        assert_eq!(r.boost.welfare, expected_welfare(Mechanism::Boost, d(0.25), &params));
        assert_eq!((r.payment_fast, r.payment_slow), boost_payment_split(d(0.25), &params).unwrap());
    }

    proptest! {
        #[test]
        fn comparison_invariants(delta in 0.0f64..=1.0, c in 0.01f64..5.0, ratio in 1.0f64..20.0, step in 0.0f64..0.5) {
            let params = p(c * ratio, c);
            let dl = d(delta);
            let r = compare(dl, &params).unwrap();
            for m in [r.batch, r.boost] {
                prop_assert!((m.welfare + m.welfare_gap - 2.0 / 3.0).abs() < 1e-15);
                prop_assert!(m.revenue <= m.welfare);
                prop_assert!((0.0..=0.5).contains(&m.misallocation_prob));
                prop_assert!((0.5 - 1e-15..=2.0 / 3.0 + 1e-15).contains(&m.welfare));
                prop_assert!((0.0..=1.0 / 3.0 + 1e-15).contains(&m.revenue));
            }
            prop_assert!((r.boost.misallocation_prob - params.marginal_cost() * r.batch.misallocation_prob).abs() < 1e-15);
            prop_assert!(r.boost.misallocation_prob <= r.batch.misallocation_prob);
            let d2 = d((delta + step).min(1.0));
            for m in [Mechanism::Batch, Mechanism::Boost] {
                prop_assert!(expected_revenue(m, d2, &params) <= expected_revenue(m, dl, &params));
                prop_assert!(expected_welfare(m, d2, &params) <= expected_welfare(m, dl, &params));
            }
        }
    }
}
