//! Machine-readable command output. Every document carries a `schema` tag
//! and deserializes back into the same type, so scripts can rely on it.

use serde::{Deserialize, Serialize};

use ahp_core::consistency::ConsistencyReport;
use ahp_core::evaluate::NodeEvaluation;
use ahp_core::store::IncompleteNode;
use ahp_core::synthesis::{LeafWeight, SensitivityScan, SynthesisResult};

pub const VALIDATE_SCHEMA: &str = "ahp.validate/v1";
pub const WEIGHTS_SCHEMA: &str = "ahp.weights/v1";
pub const CHECK_SCHEMA: &str = "ahp.check/v1";
pub const RANK_SCHEMA: &str = "ahp.rank/v1";
pub const SENSITIVITY_SCHEMA: &str = "ahp.sensitivity/v1";
pub const RI_SCHEMA: &str = "ahp.ri/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateOutput {
    pub schema: String,
    pub valid: bool,
    pub defects: Vec<String>,
    pub incomplete: Vec<IncompleteNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeOutput {
    pub member_names: Vec<String>,
    #[serde(flatten)]
    pub evaluation: NodeEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsOutput {
    pub schema: String,
    pub method: String,
    pub cr_threshold: f64,
    pub consistent: bool,
    pub nodes: Vec<NodeOutput>,
    pub global_weights: Vec<LeafWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub node: String,
    pub report: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOutput {
    pub schema: String,
    pub cr_threshold: f64,
    pub consistent: bool,
    pub nodes: Vec<CheckEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankOutput {
    pub schema: String,
    pub consistent: bool,
    /// Top alternative; `None` only if the top is tied.
    pub most_suitable: Option<String>,
    pub result: SynthesisResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityOutput {
    pub schema: String,
    pub steps: usize,
    pub scan: SensitivityScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiOutput {
    pub schema: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub estimate: f64,
    pub table: f64,
    pub difference: f64,
}
