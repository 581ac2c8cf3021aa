//! Analytic hierarchy process engine.
//!
//! A decision goal is decomposed into a tree of criteria; the children of
//! every node are compared pairwise on Saaty's 1–9 scale, local priorities
//! are derived from each reciprocal judgment matrix, checked for consistency,
//! and multiplied down the tree into global leaf weights. Alternatives are
//! compared at every leaf and scored against the goal.
//!
//! - [`model`]: hierarchy, scale and judgment storage
//! - [`priority`]: eigenvector and geometric-mean priority derivation
//! - [`consistency`]: CI / RI / CR and revision suggestions
//! - [`synthesis`]: global weights, scores, ranking, sensitivity sweeps
//! - [`store`]: `.ahp.json` documents and CSV/JSON export
//! - [`evaluate`]: runs a whole document through the engine

pub mod consistency;
pub mod evaluate;
pub mod model;
pub mod priority;
pub mod store;
pub mod synthesis;

pub use consistency::{check_consistency, estimate_random_index, suggest_revision, ConsistencyReport};
pub use evaluate::{evaluate, Evaluation, EvaluationError, EvaluationOptions};
pub use model::{build_matrix, scale_lookup, validate_hierarchy, DecisionHierarchy, JudgmentMatrix, JudgmentSet};
pub use priority::{derive, DerivationSettings, Method, PriorityVector};
pub use store::{load_model, save_model, ModelDocument};
pub use synthesis::{global_weights, rank, score_alternatives, sensitivity_scan, SynthesisResult, WeightedModel};
