//! Time-boost ordering: transactions are ranked by `π - t`, where the boost `π`
//! is bought with a fee `F` through `π = gF / (F + c)`.
//!
//! Equilibrium strategies assume the linearised fee `F ≈ cπ/g`, a realised
//! latency difference `Δ` known to both bidders, and i.i.d. uniform values. The
//! fast bidder enjoys a head start of `Δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoostParams, Delay, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Fast,
    Slow,
}

impl Role {
    pub fn other(self) -> Self {
        match self {
            Role::Fast => Role::Slow,
            Role::Slow => Role::Fast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pricing {
    /// Both bidders pay their fee whatever the ordering.
    AllPay,
    /// Only the bidder ordered first pays.
    FirstPrice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeeMode {
    /// `F = cπ / (g - π)`.
    Exact,
    /// `F = cπ / g`.
    Linear,
}

/// `π = gF / (F + c)`.
pub fn fee_to_boost(fee: f64, params: &BoostParams) -> Result<f64> {
    if !(fee >= 0.0) {
        return Err(Error::Domain {
            what: "fee",
            value: fee,
            domain: "[0, inf)",
        });
    }
    if fee.is_infinite() {
        return Ok(params.g());
    }
    Ok(params.g() * fee / (fee + params.c()))
}

/// Fee that buys boost `pi`.
pub fn boost_to_fee(pi: f64, params: &BoostParams, mode: FeeMode) -> Result<f64> {
    let (g, c) = (params.g(), params.c());
    match mode {
        FeeMode::Exact if (0.0..g).contains(&pi) => Ok(c * pi / (g - pi)),
        FeeMode::Exact => Err(Error::Domain {
            what: "boost (exact fee)",
            value: pi,
            domain: "[0, g)",
        }),
        FeeMode::Linear if pi >= 0.0 => Ok(c * pi / g),
        FeeMode::Linear => Err(Error::Domain {
            what: "boost (linear fee)",
            value: pi,
            domain: "[0, inf)",
        }),
    }
}

/// Ordering score; higher is earlier.
pub fn score(pi: f64, t: f64) -> f64 {
    pi - t
}

/// One bidder's equilibrium boost rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostStrategy {
    params: BoostParams,
    delta: f64,
    role: Role,
    pricing: Pricing,
}

impl BoostStrategy {
    pub fn new(params: BoostParams, delta: Delay, role: Role, pricing: Pricing) -> Self {
        Self {
            params,
            delta: delta.get(),
            role,
            pricing,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Participation threshold `u`: `√(cΔ/g)` all-pay, `cΔ/g` first price.
    pub fn threshold(&self) -> f64 {
        threshold(&self.params, self.delta, self.pricing)
    }

    /// Boost shift relative to the symmetric strategy: `-Δ/2` fast, `+Δ/2` slow.
    fn shift(&self) -> f64 {
        match self.role {
            Role::Fast => -0.5 * self.delta,
            Role::Slow => 0.5 * self.delta,
        }
    }

    /// Symmetric (`Δ = 0`) boost for value `v`.
    fn base(&self, v: f64) -> f64 {
        let k = self.params.g() / (2.0 * self.params.c());
        match self.pricing {
            Pricing::AllPay => k * v * v,
            Pricing::FirstPrice => k * v,
        }
    }

    /// Inverse of [`Self::base`].
    fn base_inverse(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        let k = self.params.g() / (2.0 * self.params.c());
        match self.pricing {
            Pricing::AllPay => (y / k).sqrt(),
            Pricing::FirstPrice => y / k,
        }
    }

    pub fn boost(&self, v: f64) -> f64 {
        let u = self.threshold();
        if v < u {
            0.0
        } else if v == u {
            // Exact threshold boosts: fast 0, slow Δ (keeps the tie with the
            // rival's zero-boost atom exact).
            match self.role {
                Role::Fast => 0.0,
                Role::Slow => self.delta,
            }
        } else {
            (self.base(v) + self.shift()).max(0.0)
        }
    }

    /// Probability that this bidder's boost is below `x`, counting exact ties as one half.
    pub fn tie_split_cdf(&self, x: f64) -> f64 {
        let u = self.threshold().min(1.0);
        let atom = if x > 0.0 {
            u
        } else if x == 0.0 {
            0.5 * u
        } else {
            0.0
        };
        let continuous = (self.base_inverse(x - self.shift()).clamp(u, 1.0) - u).max(0.0);
        atom + continuous
    }
}

pub fn threshold(params: &BoostParams, delta: f64, pricing: Pricing) -> f64 {
    let r = params.marginal_cost() * delta;
    match pricing {
        Pricing::AllPay => r.sqrt(),
        Pricing::FirstPrice => r,
    }
}

/// `equilibrium_boost(strategy, v)`.
pub fn equilibrium_boost(strategy: &BoostStrategy, v: Valuation) -> f64 {
    strategy.boost(v.get())
}

/// Both bidders' equilibrium strategies for one `(params, Δ, pricing)` context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostProfile {
    pub fast: BoostStrategy,
    pub slow: BoostStrategy,
}

impl BoostProfile {
    pub fn new(params: BoostParams, delta: Delay, pricing: Pricing) -> Self {
        Self {
            fast: BoostStrategy::new(params, delta, Role::Fast, pricing),
            slow: BoostStrategy::new(params, delta, Role::Slow, pricing),
        }
    }

    pub fn strategy(&self, role: Role) -> &BoostStrategy {
        match role {
            Role::Fast => &self.fast,
            Role::Slow => &self.slow,
        }
    }

    pub fn delta(&self) -> f64 {
        self.fast.delta
    }

    pub fn params(&self) -> &BoostParams {
        &self.fast.params
    }

    pub fn pricing(&self) -> Pricing {
        self.fast.pricing
    }

    /// Probability that `role` bidding `pi` is ordered first against the rival's equilibrium.
    pub fn win_probability(&self, role: Role, pi: f64) -> f64 {
        let head_start = match role {
            Role::Fast => self.delta(),
            Role::Slow => -self.delta(),
        };
        self.strategy(role.other()).tie_split_cdf(pi + head_start)
    }
}

/// Expected utility (linear fees) of `role` with value `v` bidding boost `pi`
/// while the rival plays its equilibrium strategy.
pub fn expected_utility_boost(profile: &BoostProfile, role: Role, v: Valuation, pi: f64) -> f64 {
    utility_unchecked(profile, role, v.get(), pi)
}

pub(crate) fn utility_unchecked(profile: &BoostProfile, role: Role, v: f64, pi: f64) -> f64 {
    let win = profile.win_probability(role, pi);
    let fee = profile.params().marginal_cost() * pi;
    match profile.pricing() {
        Pricing::AllPay => v * win - fee,
        Pricing::FirstPrice => (v - fee) * win,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, c: f64) -> BoostParams {
        BoostParams::new(g, c).unwrap()
    }

    fn delay(d: f64) -> Delay {
        Delay::new(d).unwrap()
    }

    fn val(v: f64) -> Valuation {
        Valuation::new(v).unwrap()
    }

    #[test]
    fn fee_boost_examples() {
        let p = params(10.0, 1.0);
        assert_eq!(fee_to_boost(0.0, &p), Ok(0.0));
        assert!((fee_to_boost(1.0, &p).unwrap() - 5.0).abs() < 1e-15);
        assert!((fee_to_boost(3.0, &p).unwrap() - 7.5).abs() < 1e-15);
        assert!(fee_to_boost(-1.0, &p).is_err());

        assert!((boost_to_fee(5.0, &p, FeeMode::Exact).unwrap() - 1.0).abs() < 1e-15);
        assert!((boost_to_fee(5.0, &p, FeeMode::Linear).unwrap() - 0.5).abs() < 1e-15);
        for m in [FeeMode::Exact, FeeMode::Linear] {
            assert_eq!(boost_to_fee(0.0, &p, m), Ok(0.0));
        }
        assert!(boost_to_fee(10.0, &p, FeeMode::Exact).is_err());
        assert!(boost_to_fee(12.0, &p, FeeMode::Linear).is_ok());
    }

    #[test]
    fn exact_fee_roundtrip_on_log_grid() {
        let p = params(10.0, 1.0);
        for i in 0..=90 {
            let fee = 10f64.powf(-6.0 + 9.0 * i as f64 / 90.0);
            let back = boost_to_fee(fee_to_boost(fee, &p).unwrap(), &p, FeeMode::Exact).unwrap();
            assert!((back - fee).abs() <= 1e-12 * fee.max(1.0), "fee {fee}: {back}");
        }
    }

    #[test]
    fn boost_concave_increasing_in_fee() {
        let p = params(4.0, 1.0);
        let pts: Vec<f64> = (0..100).map(|i| fee_to_boost(0.1 * i as f64, &p).unwrap()).collect();
        for w in pts.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - w[1] < w[1] - w[0]);
            assert!(w[2] < p.g());
        }
    }

    #[test]
    fn linear_fee_error_bounded() {
        for (g, c) in [(10.0, 1.0), (4.0, 1.0), (1.0, 1.0)] {
            let p = params(g, c);
            for i in 1..=100 {
                let pi = g / 10.0 * i as f64 / 100.0;
                let exact = boost_to_fee(pi, &p, FeeMode::Exact).unwrap();
                let lin = boost_to_fee(pi, &p, FeeMode::Linear).unwrap();
                assert!((exact - lin).abs() / lin <= 0.12);
            }
        }
    }

    #[test]
    fn score_examples() {
        assert!((score(0.0, 0.3) + 0.3).abs() < 1e-15);
        assert!((score(0.5, 0.3) - 0.2).abs() < 1e-15);
        let (t, d) = (0.4, 0.25);
        assert!(score(0.3, t) > score(0.5, t + d));
        assert!(score(0.3, t) < score(0.6, t + d));
    }

    #[test]
    fn strategy_examples() {
        let all_pay = BoostProfile::new(params(1.0, 1.0), delay(0.25), Pricing::AllPay);
        assert!(equilibrium_boost(&all_pay.fast, val(0.5)).abs() < 1e-15);
        assert!((equilibrium_boost(&all_pay.slow, val(0.5)) - 0.25).abs() < 1e-15);

        let sym = BoostProfile::new(params(1.0, 1.0), delay(0.0), Pricing::AllPay);
        assert!((equilibrium_boost(&sym.fast, val(0.6)) - 0.18).abs() < 1e-15);
        assert!((equilibrium_boost(&sym.slow, val(0.6)) - 0.18).abs() < 1e-15);

        let fp = BoostProfile::new(params(2.0, 1.0), delay(0.2), Pricing::FirstPrice);
        assert!((equilibrium_boost(&fp.slow, val(0.5)) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn below_threshold_bids_zero() {
        for pricing in [Pricing::AllPay, Pricing::FirstPrice] {
            let prof = BoostProfile::new(params(1.0, 1.0), delay(0.25), pricing);
            let u = prof.fast.threshold();
            for role in [Role::Fast, Role::Slow] {
                assert_eq!(prof.strategy(role).boost(u * 0.99), 0.0);
                assert!(prof.strategy(role).boost((u + 0.01).min(1.0)) > 0.0);
            }
        }
    }

    #[test]
    fn head_start_split_evenly() {
        for pricing in [Pricing::AllPay, Pricing::FirstPrice] {
            for (g, d) in [(1.0, 0.1), (4.0, 0.25), (10.0, 1.0)] {
                let prof = BoostProfile::new(params(g, 1.0), delay(d), pricing);
                let u = prof.fast.threshold();
                for i in 1..=20 {
                    let v = u + (1.0 - u) * i as f64 / 20.0;
                    assert!((prof.slow.boost(v) - prof.fast.boost(v) - d).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn threshold_increasing_in_cost_and_delay() {
        for pricing in [Pricing::AllPay, Pricing::FirstPrice] {
            let mut prev = 0.0;
            for g in [10.0, 4.0, 2.0, 1.0] {
                let u = threshold(&params(g, 1.0), 0.25, pricing);
                assert!(u > prev);
                prev = u;
            }
            let mut prev = 0.0;
            for d in [0.05, 0.1, 0.25, 0.5] {
                let u = threshold(&params(4.0, 1.0), d, pricing);
                assert!(u > prev);
                prev = u;
            }
        }
    }

    #[test]
    fn win_probability_against_atom() {
        let prof = BoostProfile::new(params(1.0, 1.0), delay(0.25), Pricing::AllPay);
        // Fast bidder with zero boost beats every non-participating slow bidder.
        assert!((prof.win_probability(Role::Fast, 0.0) - 0.5).abs() < 1e-15);
        // Slow bidder needs boost Δ to tie the fast bidder's atom; ties split.
        assert_eq!(prof.win_probability(Role::Slow, 0.2), 0.0);
        assert!((prof.win_probability(Role::Slow, 0.25) - 0.25).abs() < 1e-15);
        assert!((prof.win_probability(Role::Slow, 0.25 + 1e-12) - 0.5).abs() < 1e-9);
    }

    fn grid_gain(prof: &BoostProfile, role: Role, v: f64) -> f64 {
        let eq = utility_unchecked(prof, role, v, prof.strategy(role).boost(v));
        let g = prof.params().g();
        (0..1000).map(|k| utility_unchecked(prof, role, v, g * k as f64 / 1000.0)).fold(f64::MIN, f64::max) - eq
    }

    #[test]
    fn all_pay_strategies_are_grid_best_responses() {
        for g in [1.0, 4.0, 10.0] {
            for d in [0.0, 0.1, 0.25] {
                let prof = BoostProfile::new(params(g, 1.0), delay(d), Pricing::AllPay);
                let u = prof.fast.threshold();
                for role in [Role::Fast, Role::Slow] {
                    for i in 1..=19 {
                        let v = 0.05 * i as f64;
                        if (v - u).abs() < 1e-6 {
                            continue;
                        }
                        let gain = grid_gain(&prof, role, v);
                        assert!(gain <= 1e-9, "g={g} d={d} {role:?} v={v}: {gain}");
                    }
                }
            }
        }
    }

    #[test]
    fn slow_threshold_gain_is_half_u_squared() {
        let prof = BoostProfile::new(params(1.0, 1.0), delay(0.25), Pricing::AllPay);
        let u = prof.slow.threshold();
        let gain = grid_gain(&prof, Role::Slow, u);
        assert!((gain - u * u / 2.0).abs() < 1e-12, "{gain}");
    }

    #[test]
    fn first_price_head_start_strategies_leave_gain() {
        // Best response to the rival's head-start strategy shifts the own bid by
        // h/4 rather than h/2 in fee units (h = cΔ/g), worth h²/8.
        let prof = BoostProfile::new(params(1.0, 1.0), delay(0.25), Pricing::FirstPrice);
        let h: f64 = 0.25;
        for role in [Role::Fast, Role::Slow] {
            let gain = grid_gain(&prof, role, 0.6);
            assert!((gain - h * h / 8.0).abs() < 1e-5, "{role:?}: {gain}");
        }
        let sym = BoostProfile::new(params(1.0, 1.0), delay(0.0), Pricing::FirstPrice);
        assert!(grid_gain(&sym, Role::Fast, 0.6) <= 1e-9);
    }
}
