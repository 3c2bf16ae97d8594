//! Run configuration: JSON schema, defaults and validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boost::{BoostProfile, FeeMode, Pricing};
use crate::error::{Error, Result};
use crate::latency::LatencyStrategy;
use crate::mc::sim::check_fee_mode;
use crate::model::{BoostParams, Delay, InclusionCurve, LatencyCostModel, TabulatedCost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Batch,
    Boost,
    Latency,
    Compare,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Batch => "batch",
            Command::Boost => "boost",
            Command::Latency => "latency",
            Command::Compare => "compare",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    /// `C(Δ) = c/Δ`.
    Inverse { c: f64 },
    /// Tabulated `C`, `C'`, `C''` on an increasing grid.
    Custom {
        grid: Vec<f64>,
        value: Vec<f64>,
        first: Vec<f64>,
        second: Vec<f64>,
    },
}

impl CostSpec {
    pub fn model(&self) -> Result<LatencyCostModel> {
        match self {
            CostSpec::Inverse { c } => LatencyCostModel::inverse_delay(*c),
            CostSpec::Custom {
                grid,
                value,
                first,
                second,
            } => Ok(LatencyCostModel::Custom(TabulatedCost::new(
                grid.clone(),
                value.clone(),
                first.clone(),
                second.clone(),
            )?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Linear,
    Deterministic { delay: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl CurveSpec {
    pub fn curve(&self) -> Result<InclusionCurve> {
        match self {
            CurveSpec::Linear => Ok(InclusionCurve::Linear),
            CurveSpec::Deterministic { delay } => InclusionCurve::deterministic(*delay),
            CurveSpec::PiecewiseLinear { knots } => InclusionCurve::piecewise_linear(knots.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "McConfig::default_n")]
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

impl McConfig {
    fn default_n() -> u64 {
        1_000_000
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n: Self::default_n(),
            seed: 0,
        }
    }
}

/// Sweep grids; empty means the command's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub taus: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default = "default_pricing")]
    pub pricing: Pricing,
    #[serde(default = "default_fee_mode")]
    pub fee_mode: FeeMode,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: Output,
}

fn default_pricing() -> Pricing {
    Pricing::AllPay
}

fn default_fee_mode() -> FeeMode {
    FeeMode::Linear
}

impl RunConfig {
    /// A config with every optional key at its default.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            g: None,
            c: None,
            delta: None,
            cost: None,
            curve: None,
            pricing: default_pricing(),
            fee_mode: default_fee_mode(),
            mc: McConfig::default(),
            grids: Grids::default(),
            output: Output::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    fn require(&self, key: &str, value: Option<f64>) -> Result<f64> {
        value.ok_or_else(|| Error::config(key, format!("required by the {} command", self.command.name())))
    }

    pub fn boost_params(&self) -> Result<BoostParams> {
        BoostParams::new(self.require("g", self.g)?, self.require("c", self.c)?)
    }

    pub fn delta_value(&self) -> Result<f64> {
        let d = self.require("delta", self.delta)?;
        unit_key("delta", d)
    }

    pub fn cost_model(&self) -> Result<LatencyCostModel> {
        self.cost
            .as_ref()
            .ok_or_else(|| Error::config("cost", format!("required by the {} command", self.command.name())))?
            .model()
    }

    pub fn curve(&self) -> Result<InclusionCurve> {
        self.curve.as_ref().map_or(Ok(InclusionCurve::Linear), CurveSpec::curve)
    }

    /// Checks every input the command will use, before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.mc.n == 0 {
            return Err(Error::config("mc.n", "must be at least 1"));
        }
        for (key, grid) in [("grids.values", &self.grids.values), ("grids.taus", &self.grids.taus)] {
            for &x in grid {
                unit_key(key, x)?;
            }
        }
        for &d in &self.grids.deltas {
            unit_key("grids.deltas", d)?;
        }
        if let Some(d) = self.delta {
            unit_key("delta", d)?;
        }
        match self.command {
            Command::Batch => {
                self.curve()?;
            }
            Command::Boost => {
                let delta = Delay::new(self.delta_value()?)?;
                let profile = BoostProfile::new(self.boost_params()?, delta, self.pricing);
                check_fee_mode(&profile, self.fee_mode)?;
            }
            Command::Latency => {
                LatencyStrategy::build(self.cost_model()?)?;
                if self.grids.deltas.contains(&0.0) {
                    return Err(Error::config("grids.deltas", "latency profits need delays in (0, 1]"));
                }
            }
            Command::Compare => {
                let params = self.boost_params()?;
                if self.delta.is_none() && self.grids.deltas.is_empty() {
                    return Err(Error::config("delta", "compare needs delta or grids.deltas"));
                }
                for &d in self.delta.iter().chain(&self.grids.deltas) {
                    check_fee_mode(&BoostProfile::new(params, Delay::new(d)?, Pricing::AllPay), self.fee_mode)?;
                }
            }
            Command::Verify => {}
        }
        Ok(())
    }
}

fn unit_key(key: &str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::config(key, format!("{x} is outside [0, 1]")))
    }
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::config("document", e.to_string()))?;
    config.validate()?;
    Ok(config)
}
