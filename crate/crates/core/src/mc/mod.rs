//! Monte Carlo simulation and equilibrium audits.

pub mod audit;
pub mod estimate;
pub mod exec;
pub mod oracle;
pub mod rng;
pub mod sim;

pub use audit::{
    best_response_audit, investment_deviation_gain, investment_spread, standard_audits, AuditGain, AuditLine, AuditSpec,
};
pub use estimate::{estimate, estimate_scenario, estimate_with, EstimateResult, Metric, Scenario, ScenarioEstimate};
pub use exec::{with_threads, Execution};
pub use oracle::{oracle_checks, OracleCheck, OracleGrid};
pub use rng::{round_draw, RoundDraw, RoundRng};
pub use sim::{simulate_batch_round, simulate_boost_round, simulate_investment_round, RoundOutcome, Winner};
