//! Global weight synthesis, alternative scoring, ranking and sensitivity sweeps.
//!
//! A leaf's global weight is the product of local weights along its
//! root-to-leaf path. An alternative's score is the global-weight-weighted
//! sum of its local priority at every leaf.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CriterionNode, DecisionHierarchy, GOAL_ID};
use crate::priority::{DerivationSettings, PriorityError, PriorityVector};

/// Scores closer than this are reported as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("no local priority vector for node {0:?}")]
    MissingLocal(String),
    #[error("no alternative priority vector for leaf {0:?}")]
    MissingAlternatives(String),
    #[error("node {node:?} has {expected} members but its priority vector has length {found}")]
    LengthMismatch { node: String, expected: usize, found: usize },
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {0:?} is an only child; its local weight is pinned at 1")]
    OnlyChild(String),
    #[error("sensitivity weight must lie strictly inside (0, 1), got {0}")]
    WeightOutOfRange(f64),
    #[error("a sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error(transparent)]
    Priority(#[from] PriorityError),
}

/// A hierarchy with a local priority vector for every comparison node.
///
/// `local` is keyed by `GOAL_ID` for the root criteria, by node id for other
/// non-leaf criteria, and by leaf id for the alternative priorities at that leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedModel {
    pub hierarchy: DecisionHierarchy,
    pub local: BTreeMap<String, PriorityVector>,
    pub settings: DerivationSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafWeight {
    pub id: String,
    pub name: String,
    /// Names of the ancestor criteria, outermost first.
    pub parents: Vec<String>,
    pub global_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeScore {
    pub id: String,
    pub name: String,
    pub score: f64,
    /// 1-based position in the ranking.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    /// Leaves in declaration order.
    pub leaves: Vec<LeafWeight>,
    /// Alternatives in declaration order.
    pub alternatives: Vec<AlternativeScore>,
    /// Alternative ids, best first.
    pub ranking: Vec<String>,
    /// Groups of alternative ids whose scores are tied, each in declaration order.
    pub ties: Vec<Vec<String>>,
}

impl SynthesisResult {
    pub fn global_weight(&self, leaf_id: &str) -> Option<f64> {
        self.leaves.iter().find(|l| l.id == leaf_id).map(|l| l.global_weight)
    }

    pub fn score(&self, alternative_id: &str) -> Option<f64> {
        self.alternatives.iter().find(|a| a.id == alternative_id).map(|a| a.score)
    }

    pub fn global_leaf_weights(&self) -> IndexMap<String, f64> {
        self.leaves.iter().map(|l| (l.id.clone(), l.global_weight)).collect()
    }

    pub fn alternative_scores(&self) -> IndexMap<String, f64> {
        self.alternatives.iter().map(|a| (a.id.clone(), a.score)).collect()
    }

    pub fn top(&self) -> Option<&str> {
        self.ranking.first().map(String::as_str)
    }
}

impl WeightedModel {
    pub fn new(
        hierarchy: DecisionHierarchy,
        local: BTreeMap<String, PriorityVector>,
        settings: DerivationSettings,
    ) -> Self {
        Self { hierarchy, local, settings }
    }

    /// Local weights of `children` under `parent`; a single child always weighs 1.
    fn child_weights(&self, parent: &str, children: &[CriterionNode]) -> Result<Vec<f64>, SynthesisError> {
        if children.len() == 1 {
            return Ok(vec![1.0]);
        }
        let v = self.local.get(parent).ok_or_else(|| SynthesisError::MissingLocal(parent.to_string()))?;
        if v.len() != children.len() {
            return Err(SynthesisError::LengthMismatch {
                node: parent.to_string(),
                expected: children.len(),
                found: v.len(),
            });
        }
        Ok(v.weights().to_vec())
    }

    fn leaf_weights(&self) -> Result<Vec<LeafWeight>, SynthesisError> {
        fn walk(
            wm: &WeightedModel,
            parent: &str,
            nodes: &[CriterionNode],
            acc: f64,
            names: &mut Vec<String>,
            out: &mut Vec<LeafWeight>,
        ) -> Result<(), SynthesisError> {
            let weights = wm.child_weights(parent, nodes)?;
            for (node, w) in nodes.iter().zip(weights) {
                if node.is_leaf() {
                    out.push(LeafWeight {
                        id: node.id.clone(),
                        name: node.name.clone(),
                        parents: names.clone(),
                        global_weight: acc * w,
                    });
                } else {
                    names.push(node.name.clone());
                    walk(wm, &node.id, &node.children, acc * w, names, out)?;
                    names.pop();
                }
            }
            Ok(())
        }
        let mut out = Vec::new();
        walk(self, GOAL_ID, &self.hierarchy.criteria, 1.0, &mut Vec::new(), &mut out)?;
        Ok(out)
    }
}

/// Global weight of every leaf, in declaration order.
pub fn global_weights(wm: &WeightedModel) -> Result<IndexMap<String, f64>, SynthesisError> {
    Ok(wm.leaf_weights()?.into_iter().map(|l| (l.id, l.global_weight)).collect())
}

/// Leaf weights with their parent path, in declaration order.
pub fn leaf_weights(wm: &WeightedModel) -> Result<Vec<LeafWeight>, SynthesisError> {
    wm.leaf_weights()
}

pub fn score_alternatives(wm: &WeightedModel) -> Result<SynthesisResult, SynthesisError> {
    let leaves = wm.leaf_weights()?;
    let alts = &wm.hierarchy.alternatives;
    let mut scores = vec![0.0; alts.len()];
    for leaf in &leaves {
        let v = wm.local.get(&leaf.id).ok_or_else(|| SynthesisError::MissingAlternatives(leaf.id.clone()))?;
        if v.len() != alts.len() {
            return Err(SynthesisError::LengthMismatch {
                node: leaf.id.clone(),
                expected: alts.len(),
                found: v.len(),
            });
        }
        for (s, w) in scores.iter_mut().zip(v.weights()) {
            *s += leaf.global_weight * w;
        }
    }
    let alternatives = alts
        .iter()
        .zip(&scores)
        .map(|(a, &score)| AlternativeScore { id: a.id.clone(), name: a.name.clone(), score, rank: 0 })
        .collect();
    let mut result = SynthesisResult { leaves, alternatives, ranking: Vec::new(), ties: Vec::new() };
    apply_ranking(&mut result);
    Ok(result)
}

/// Orders alternatives by descending score; tied scores keep declaration order.
fn ranked_groups(alternatives: &[AlternativeScore]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..alternatives.len()).collect();
    order.sort_by(|&a, &b| alternatives[b].score.total_cmp(&alternatives[a].score).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if (alternatives[*g.last().unwrap()].score - alternatives[idx].score).abs() <= TIE_EPSILON => {
                g.push(idx)
            }
            _ => groups.push(vec![idx]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

fn apply_ranking(result: &mut SynthesisResult) {
    let groups = ranked_groups(&result.alternatives);
    result.ranking.clear();
    result.ties.clear();
    let mut pos = 0;
    for g in groups {
        for &idx in &g {
            pos += 1;
            result.alternatives[idx].rank = pos;
            result.ranking.push(result.alternatives[idx].id.clone());
        }
        if g.len() > 1 {
            result.ties.push(g.iter().map(|&i| result.alternatives[i].id.clone()).collect());
        }
    }
}

/// Alternative ids, best first; ties are broken by declaration order.
pub fn rank(result: &SynthesisResult) -> Vec<String> {
    ranked_groups(&result.alternatives)
        .into_iter()
        .flatten()
        .map(|i| result.alternatives[i].id.clone())
        .collect()
}

/// Varies one criterion's local weight; its siblings absorb the rest proportionally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityQuery {
    pub target_node: String,
    pub new_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub weight: f64,
    pub scores: IndexMap<String, f64>,
    pub ranking: Vec<String>,
}

/// Weight at which the top-ranked alternative changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reversal {
    /// Crossing point of the two alternatives' (affine) score lines.
    pub weight: f64,
    /// Sweep points bracketing the change.
    pub lower: f64,
    pub upper: f64,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityScan {
    pub target_node: String,
    pub parent: String,
    pub current_weight: f64,
    pub points: Vec<SweepPoint>,
    pub reversals: Vec<Reversal>,
}

/// Current local weight of a criterion, and where it sits in its parent's vector.
fn locate(wm: &WeightedModel, target: &str) -> Result<(String, usize, f64), SynthesisError> {
    let h = &wm.hierarchy;
    let (parent, idx) = h.parent_of(target).ok_or_else(|| SynthesisError::UnknownNode(target.to_string()))?;
    let siblings = h.children_of(parent).expect("parent exists");
    if siblings.len() < 2 {
        return Err(SynthesisError::OnlyChild(target.to_string()));
    }
    let current = wm.child_weights(parent, siblings)?[idx];
    Ok((parent.to_string(), idx, current))
}

/// The model with `target`'s local weight set to `weight`, siblings rescaled by
/// `(1 - weight) / (1 - current)`.
pub fn perturb(wm: &WeightedModel, target: &str, weight: f64) -> Result<WeightedModel, SynthesisError> {
    if !(weight > 0.0 && weight < 1.0) {
        return Err(SynthesisError::WeightOutOfRange(weight));
    }
    let (parent, idx, current) = locate(wm, target)?;
    let factor = (1.0 - weight) / (1.0 - current);
    let old = &wm.local[&parent];
    let weights = old
        .weights()
        .iter()
        .enumerate()
        .map(|(k, &w)| if k == idx { weight } else { w * factor })
        .collect();
    let mut out = wm.clone();
    out.local.insert(parent, PriorityVector::new(weights)?);
    Ok(out)
}

/// `steps` evenly spaced interior points with the one nearest `pinned` replaced by it.
fn sweep_grid(steps: usize, pinned: f64) -> Vec<f64> {
    let h = 1.0 / (steps as f64 + 1.0);
    let mut grid: Vec<f64> = (1..=steps).map(|k| k as f64 * h).collect();
    let nearest = grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - pinned).abs().total_cmp(&(b.1 - pinned).abs()))
        .map(|(k, _)| k)
        .expect("steps >= 2");
    grid[nearest] = pinned;
    grid
}

pub fn sensitivity_scan(
    wm: &WeightedModel,
    q: &SensitivityQuery,
    steps: usize,
) -> Result<SensitivityScan, SynthesisError> {
    if steps < 2 {
        return Err(SynthesisError::TooFewSteps(steps));
    }
    if !(q.new_weight > 0.0 && q.new_weight < 1.0) {
        return Err(SynthesisError::WeightOutOfRange(q.new_weight));
    }
    let (parent, _, current) = locate(wm, &q.target_node)?;
    // fail fast on an incomplete model before fanning out
    score_alternatives(wm)?;

    let points = sweep_grid(steps, q.new_weight)
        .into_par_iter()
        .map(|w| {
            let r = score_alternatives(&perturb(wm, &q.target_node, w)?)?;
            Ok(SweepPoint { weight: w, scores: r.alternative_scores(), ranking: r.ranking })
        })
        .collect::<Result<Vec<_>, SynthesisError>>()?;

    let mut reversals = Vec::new();
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (from, to) = (&a.ranking[0], &b.ranking[0]);
        if from != to {
            let da = a.scores[from] - a.scores[to];
            let db = b.scores[from] - b.scores[to];
            let t = if da == db { 0.5 } else { da / (da - db) };
            reversals.push(Reversal {
                weight: a.weight + (b.weight - a.weight) * t.clamp(0.0, 1.0),
                lower: a.weight,
                upper: b.weight,
                from: from.clone(),
                to: to.clone(),
            });
        }
    }
    Ok(SensitivityScan { target_node: q.target_node.clone(), parent, current_weight: current, points, reversals })
}
