//! Runs a model document through the engine: builds every judgment matrix,
//! derives local priorities and checks their consistency.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{report_for, ConsistencyError, ConsistencyReport};
use crate::model::{build_matrix, JudgmentMatrix, JudgmentSet, ModelError};
use crate::priority::{derive, derive_geometric_mean, DerivationSettings, PriorityError, PriorityVector};
use crate::store::{IncompleteNode, ModelDocument};
use crate::synthesis::WeightedModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluationError {
    #[error("incomplete model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Incomplete(Vec<IncompleteNode>),
    #[error("node {node:?}: {source}")]
    Judgments { node: String, source: ModelError },
    #[error("node {node:?}: {source}")]
    Priority { node: String, source: PriorityError },
    #[error("node {node:?}: {source}")]
    Consistency { node: String, source: ConsistencyError },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationOptions {
    pub settings: DerivationSettings,
    pub cr_threshold: f64,
    /// Also evaluate the alternative comparisons at every leaf.
    pub include_alternatives: bool,
}

impl EvaluationOptions {
    pub fn from_document(doc: &ModelDocument) -> Self {
        Self { settings: doc.settings.derivation(), cr_threshold: doc.settings.cr_threshold, include_alternatives: true }
    }
}

/// Outcome for one comparison node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEvaluation {
    pub node: String,
    pub members: Vec<String>,
    pub compares_alternatives: bool,
    pub weights: Vec<f64>,
    /// Row-geometric-mean weights, reported as a cross-check of `weights`.
    pub geometric_mean: Vec<f64>,
    pub report: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub model: WeightedModel,
    pub nodes: Vec<NodeEvaluation>,
}

impl Evaluation {
    pub fn all_consistent(&self) -> bool {
        self.nodes.iter().all(|n| n.report.consistent)
    }

    pub fn inconsistent(&self) -> impl Iterator<Item = &NodeEvaluation> {
        self.nodes.iter().filter(|n| !n.report.consistent)
    }

    pub fn node(&self, id: &str) -> Option<&NodeEvaluation> {
        self.nodes.iter().find(|n| n.node == id)
    }
}

/// Derives and checks one judgment set of dimension `n`.
pub fn evaluate_set(
    set: &JudgmentSet,
    n: usize,
    settings: &DerivationSettings,
    cr_threshold: f64,
) -> Result<(PriorityVector, PriorityVector, ConsistencyReport), EvaluationError> {
    let node = || set.node_id.clone();
    let m: JudgmentMatrix = if n == 1 {
        JudgmentMatrix::singleton()
    } else {
        build_matrix(set, n).map_err(|source| EvaluationError::Judgments { node: node(), source })?
    };
    let d = derive(&m, settings).map_err(|source| EvaluationError::Priority { node: node(), source })?;
    let report =
        report_for(&m, &d, cr_threshold).map_err(|source| EvaluationError::Consistency { node: node(), source })?;
    Ok((d.weights, derive_geometric_mean(&m), report))
}

pub fn evaluate(doc: &ModelDocument, opts: &EvaluationOptions) -> Result<Evaluation, EvaluationError> {
    let incomplete = doc.incomplete_nodes(opts.include_alternatives);
    if !incomplete.is_empty() {
        return Err(EvaluationError::Incomplete(incomplete));
    }
    let mut local = BTreeMap::new();
    let mut nodes = Vec::new();
    let empty = JudgmentSet::default();
    for c in doc.hierarchy.comparison_nodes() {
        if c.compares_alternatives && !opts.include_alternatives {
            continue;
        }
        let set = match doc.judgments.get(c.id) {
            Some(s) => s.clone(),
            None => JudgmentSet { node_id: c.id.to_string(), ..empty.clone() },
        };
        let (weights, geo, report) = evaluate_set(&set, c.members.len(), &opts.settings, opts.cr_threshold)?;
        nodes.push(NodeEvaluation {
            node: c.id.to_string(),
            members: c.members.iter().map(|s| s.to_string()).collect(),
            compares_alternatives: c.compares_alternatives,
            weights: weights.weights().to_vec(),
            geometric_mean: geo.weights().to_vec(),
            report,
        });
        local.insert(c.id.to_string(), weights);
    }
    Ok(Evaluation { model: WeightedModel::new(doc.hierarchy.clone(), local, opts.settings), nodes })
}
