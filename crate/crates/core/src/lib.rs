//! Equilibrium bidding, latency investment and Monte Carlo comparison of two
//! transaction-sequencing designs: sealed-bid batch auctions and time boost.
//!
//! All models use two bidders with i.i.d. uniform valuations on `[0, 1]`.

pub mod batch;
pub mod boost;
pub mod cli;
pub mod compare;
pub mod error;
pub mod latency;
pub mod mc;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};
pub use model::{
    cost_eval, inclusion_probability, BatchTime, BoostParams, CostOrder, Delay, InclusionCurve, LatencyCostModel,
    TabulatedCost, Valuation,
};
