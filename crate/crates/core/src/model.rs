//! Decision hierarchy, the Saaty judgment scale, and reciprocal judgment storage.
//!
//! Judgments are only ever held as upper-triangle pair lists (`JudgmentSet`);
//! a full `JudgmentMatrix` is produced from them on demand, so the lower
//! triangle is always the exact reciprocal of the upper one.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Node id under which the comparisons of the root criteria are stored.
pub const GOAL_ID: &str = "goal";

/// Smallest and largest values on the Saaty scale.
pub const SCALE_MIN: f64 = 1.0 / 9.0;
pub const SCALE_MAX: f64 = 9.0;

/// Tolerance used when accepting a decimal as a canonical scale value.
pub const CANONICAL_EPSILON: f64 = 1e-9;

/// Tolerance for the reciprocity check on externally supplied matrices.
pub const RECIPROCITY_EPSILON: f64 = 1e-12;

const LABELS: [&str; 9] = [
    "equal importance",
    "equal to moderate importance",
    "moderate importance",
    "moderate to strong importance",
    "strong importance",
    "strong to very strong importance",
    "very strong importance",
    "very strong to extreme importance",
    "extreme importance",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown importance label {label:?}; valid labels are: {}", valid.join(", "))]
    UnknownLabel { label: String, valid: Vec<&'static str> },
    #[error("intensity {0} is not on the 1..=9 scale")]
    BadIntensity(u8),
    #[error("value {0} is outside the Saaty scale [1/9, 9]")]
    OutOfRange(f64),
    #[error("value {0} is not one of the 17 canonical Saaty values")]
    NonCanonical(f64),
    #[error("cannot parse {0:?} as a Saaty value")]
    Unparsable(String),
    #[error("missing judgment for pair ({i}, {j})")]
    MissingPair { i: usize, j: usize },
    #[error("duplicate judgment for pair ({i}, {j})")]
    DuplicatePair { i: usize, j: usize },
    #[error("pair ({i}, {j}) is out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("pair ({i}, {j}) is not in the upper triangle (need i < j)")]
    NotUpperTriangle { i: usize, j: usize },
    #[error("invalid judgment matrix: {0}")]
    InvalidMatrix(String),
}

/// One value of Saaty's fundamental scale: an intensity 1..=9 or its reciprocal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SaatyJudgment {
    intensity: u8,
    inverted: bool,
}

impl SaatyJudgment {
    pub const EQUAL: SaatyJudgment = SaatyJudgment { intensity: 1, inverted: false };

    pub fn new(intensity: u8, inverted: bool) -> Result<Self, ModelError> {
        if !(1..=9).contains(&intensity) {
            return Err(ModelError::BadIntensity(intensity));
        }
        Ok(Self { intensity, inverted: inverted && intensity != 1 })
    }

    /// All 17 canonical values in ascending order, 1/9 through 9.
    pub fn canonical() -> impl Iterator<Item = SaatyJudgment> {
        (2..=9u8)
            .rev()
            .map(|k| SaatyJudgment { intensity: k, inverted: true })
            .chain((1..=9u8).map(|k| SaatyJudgment { intensity: k, inverted: false }))
    }

    pub fn intensity(self) -> u8 {
        self.intensity
    }

    pub fn is_inverted(self) -> bool {
        self.inverted
    }

    pub fn value(self) -> f64 {
        if self.inverted {
            1.0 / f64::from(self.intensity)
        } else {
            f64::from(self.intensity)
        }
    }

    pub fn reciprocal(self) -> Self {
        Self::new(self.intensity, !self.inverted).expect("intensity already validated")
    }

    /// Linguistic label of the underlying intensity.
    pub fn label(self) -> &'static str {
        LABELS[usize::from(self.intensity) - 1]
    }

    /// Accepts a decimal only when it lies within `CANONICAL_EPSILON` of a canonical value.
    pub fn from_value(value: f64) -> Result<Self, ModelError> {
        if !value.is_finite() || value <= 0.0 {
            return Err(ModelError::OutOfRange(value));
        }
        if !(SCALE_MIN - CANONICAL_EPSILON..=SCALE_MAX + CANONICAL_EPSILON).contains(&value) {
            return Err(ModelError::OutOfRange(value));
        }
        Self::canonical()
            .find(|c| (c.value() - value).abs() <= CANONICAL_EPSILON)
            .ok_or(ModelError::NonCanonical(value))
    }

    /// Canonical value closest to `ratio` in log space; the scale ends clamp.
    pub fn nearest(ratio: f64) -> Self {
        let target = ratio.ln();
        let mut best = Self::EQUAL;
        let mut best_dist = f64::INFINITY;
        for c in Self::canonical() {
            let d = (c.value().ln() - target).abs();
            if d < best_dist {
                best = c;
                best_dist = d;
            }
        }
        best
    }
}

impl Default for SaatyJudgment {
    fn default() -> Self {
        Self::EQUAL
    }
}

impl fmt::Display for SaatyJudgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "1/{}", self.intensity)
        } else {
            write!(f, "{}", self.intensity)
        }
    }
}

impl FromStr for SaatyJudgment {
    type Err = ModelError;

    /// Accepts `"k"`, `"1/k"` or a decimal within `CANONICAL_EPSILON` of a canonical value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| ModelError::Unparsable(s.into()))?;
            let den: f64 = den.trim().parse().map_err(|_| ModelError::Unparsable(s.into()))?;
            if den == 0.0 {
                return Err(ModelError::Unparsable(s.into()));
            }
            return Self::from_value(num / den);
        }
        let v: f64 = s.parse().map_err(|_| ModelError::Unparsable(s.into()))?;
        Self::from_value(v)
    }
}

impl Serialize for SaatyJudgment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SaatyJudgment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => SaatyJudgment::from_value(v),
            Raw::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// The nine linguistic labels, ordered by intensity.
pub fn scale_labels() -> &'static [&'static str] {
    &LABELS
}

/// Maps a linguistic label to its scale value, or to the reciprocal when `inverted`.
pub fn scale_lookup(label: &str, inverted: bool) -> Result<SaatyJudgment, ModelError> {
    let wanted = label.trim().to_lowercase();
    let pos = LABELS
        .iter()
        .position(|l| *l == wanted)
        .ok_or_else(|| ModelError::UnknownLabel { label: label.to_string(), valid: LABELS.to_vec() })?;
    SaatyJudgment::new(pos as u8 + 1, inverted)
}

/// A single upper-triangle judgment: child `i` compared with child `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub i: usize,
    pub j: usize,
    pub value: SaatyJudgment,
}

impl Judgment {
    pub fn new(i: usize, j: usize, value: SaatyJudgment) -> Self {
        Self { i, j, value }
    }
}

/// Pairwise judgments over the children of one node (or over the alternatives at a leaf).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JudgmentSet {
    pub node_id: String,
    pub entries: Vec<Judgment>,
}

impl JudgmentSet {
    pub fn new(node_id: impl Into<String>, mut entries: Vec<Judgment>) -> Self {
        entries.sort_by_key(|e| (e.i, e.j));
        Self { node_id: node_id.into(), entries }
    }

    /// Builds a set from `(i, j, value)` triples, rejecting non-canonical values.
    pub fn from_values(
        node_id: impl Into<String>,
        pairs: &[(usize, usize, f64)],
    ) -> Result<Self, ModelError> {
        let entries = pairs
            .iter()
            .map(|&(i, j, v)| Ok(Judgment::new(i, j, SaatyJudgment::from_value(v)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(Self::new(node_id, entries))
    }

    /// Checks pair shape against dimension `n`: i < j < n, no duplicates.
    pub fn check_pairs(&self, n: usize) -> Result<(), ModelError> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if e.i >= e.j {
                return Err(ModelError::NotUpperTriangle { i: e.i, j: e.j });
            }
            if e.j >= n {
                return Err(ModelError::IndexOutOfRange { i: e.i, j: e.j, n });
            }
            if !seen.insert((e.i, e.j)) {
                return Err(ModelError::DuplicatePair { i: e.i, j: e.j });
            }
        }
        Ok(())
    }

    pub fn missing_pairs(&self, n: usize) -> Vec<(usize, usize)> {
        let present: HashSet<(usize, usize)> = self.entries.iter().map(|e| (e.i, e.j)).collect();
        upper_pairs(n).filter(|p| !present.contains(p)).collect()
    }

    pub fn is_complete(&self, n: usize) -> bool {
        self.check_pairs(n).is_ok() && self.missing_pairs(n).is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<SaatyJudgment> {
        self.entries.iter().find(|e| e.i == i && e.j == j).map(|e| e.value)
    }

    /// Replaces (or inserts) the judgment for pair `(i, j)`, keeping entries sorted.
    pub fn set(&mut self, i: usize, j: usize, value: SaatyJudgment) {
        match self.entries.iter_mut().find(|e| e.i == i && e.j == j) {
            Some(e) => e.value = value,
            None => {
                self.entries.push(Judgment::new(i, j, value));
                self.entries.sort_by_key(|e| (e.i, e.j));
            }
        }
    }
}

/// Upper-triangle index pairs of an `n`×`n` matrix in row-major order.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Positive reciprocal comparison matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentMatrix {
    n: usize,
    data: Vec<f64>,
}

impl JudgmentMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// The 1×1 matrix of a single-child node.
    pub fn singleton() -> Self {
        Self { n: 1, data: vec![1.0] }
    }

    /// Validates an explicit matrix: unit diagonal, reciprocity, scale range.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError::InvalidMatrix("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(ModelError::InvalidMatrix("matrix is not square".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let m = Self { n, data };
        for i in 0..n {
            if m.get(i, i) != 1.0 {
                return Err(ModelError::InvalidMatrix(format!("diagonal entry ({i}, {i}) is not 1")));
            }
            for j in 0..n {
                let a = m.get(i, j);
                if !a.is_finite() || a <= 0.0 {
                    return Err(ModelError::InvalidMatrix(format!("entry ({i}, {j}) is not positive")));
                }
                if a < SCALE_MIN * (1.0 - CANONICAL_EPSILON) || a > SCALE_MAX * (1.0 + CANONICAL_EPSILON) {
                    return Err(ModelError::OutOfRange(a));
                }
                if (a * m.get(j, i) - 1.0).abs() > RECIPROCITY_EPSILON {
                    return Err(ModelError::InvalidMatrix(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not reciprocal"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// The perfectly consistent matrix `a[i][j] = w[i] / w[j]`.
    pub fn from_weights(weights: &[f64]) -> Result<Self, ModelError> {
        let n = weights.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { weights[i] / weights[j] }).collect())
            .collect();
        Self::from_rows(rows)
    }

    /// Simultaneous row/column permutation: result[a][b] = self[perm[a]][perm[b]].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must match dimension");
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = self.get(perm[a], perm[b]);
            }
        }
        Self { n, data }
    }

    /// Copy with the pair `(i, j)` replaced by `value` and `(j, i)` by its reciprocal.
    pub fn with_entry(&self, i: usize, j: usize, value: f64) -> Self {
        let mut m = self.clone();
        m.data[i * self.n + j] = value;
        m.data[j * self.n + i] = 1.0 / value;
        m
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum()).collect()
    }
}

/// Expands a complete judgment set into its reciprocal matrix.
pub fn build_matrix(set: &JudgmentSet, n: usize) -> Result<JudgmentMatrix, ModelError> {
    set.check_pairs(n)?;
    if let Some(&(i, j)) = set.missing_pairs(n).first() {
        return Err(ModelError::MissingPair { i, j });
    }
    let mut data = vec![1.0; n * n];
    for e in &set.entries {
        let v = e.value;
        if !(SCALE_MIN..=SCALE_MAX).contains(&v.value()) {
            return Err(ModelError::OutOfRange(v.value()));
        }
        data[e.i * n + e.j] = v.value();
        data[e.j * n + e.i] = v.reciprocal().value();
    }
    Ok(JudgmentMatrix { n, data })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionNode {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub children: Vec<CriterionNode>,
}

impl CriterionNode {
    pub fn leaf(id: impl Into<String>, name: impl Into<String>) -> Self {
        Self { id: id.into(), name: name.into(), children: Vec::new() }
    }

    pub fn branch(id: impl Into<String>, name: impl Into<String>, children: Vec<CriterionNode>) -> Self {
        Self { id: id.into(), name: name.into(), children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alternative {
    pub id: String,
    pub name: String,
}

impl Alternative {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        Self { id: id.into(), name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionHierarchy {
    pub goal: String,
    pub criteria: Vec<CriterionNode>,
    pub alternatives: Vec<Alternative>,
}

/// A structural problem found by [`validate_hierarchy`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HierarchyDefect {
    DuplicateId { id: String },
    Cycle { id: String },
    ReservedId { id: String },
    EmptyId { path: String },
    TooFewAlternatives { count: usize },
    NoLeafCriteria,
}

impl fmt::Display for HierarchyDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateId { id } => write!(f, "duplicate id {id:?}"),
            Self::Cycle { id } => write!(f, "id {id:?} repeats one of its own ancestors"),
            Self::ReservedId { id } => write!(f, "id {id:?} is reserved for the goal"),
            Self::EmptyId { path } => write!(f, "empty id at {path}"),
            Self::TooFewAlternatives { count } => {
                write!(f, "need at least 2 alternatives, found {count}")
            }
            Self::NoLeafCriteria => write!(f, "hierarchy has no leaf criteria"),
        }
    }
}

/// Node whose children are compared pairwise, with the size of that comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonNode<'a> {
    pub id: &'a str,
    /// Child ids, or alternative ids when `id` is a leaf.
    pub members: Vec<&'a str>,
    pub compares_alternatives: bool,
}

impl DecisionHierarchy {
    pub fn new(goal: impl Into<String>, criteria: Vec<CriterionNode>, alternatives: Vec<Alternative>) -> Self {
        Self { goal: goal.into(), criteria, alternatives }
    }

    /// Leaves in depth-first declaration order.
    pub fn leaves(&self) -> Vec<&CriterionNode> {
        let mut out = Vec::new();
        fn walk<'a>(nodes: &'a [CriterionNode], out: &mut Vec<&'a CriterionNode>) {
            for n in nodes {
                if n.is_leaf() {
                    out.push(n);
                } else {
                    walk(&n.children, out);
                }
            }
        }
        walk(&self.criteria, &mut out);
        out
    }

    pub fn find(&self, id: &str) -> Option<&CriterionNode> {
        fn walk<'a>(nodes: &'a [CriterionNode], id: &str) -> Option<&'a CriterionNode> {
            nodes.iter().find_map(|n| if n.id == id { Some(n) } else { walk(&n.children, id) })
        }
        walk(&self.criteria, id)
    }

    /// Children of `id`, where `GOAL_ID` names the root criteria.
    pub fn children_of(&self, id: &str) -> Option<&[CriterionNode]> {
        if id == GOAL_ID {
            Some(&self.criteria)
        } else {
            self.find(id).map(|n| n.children.as_slice())
        }
    }

    /// Ancestor chain from the root down to `id`, inclusive of `id`.
    pub fn path_to(&self, id: &str) -> Option<Vec<&CriterionNode>> {
        fn walk<'a>(nodes: &'a [CriterionNode], id: &str, path: &mut Vec<&'a CriterionNode>) -> bool {
            for n in nodes {
                path.push(n);
                if n.id == id || walk(&n.children, id, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = Vec::new();
        walk(&self.criteria, id, &mut path).then_some(path)
    }

    /// Parent id of a criterion (`GOAL_ID` for root criteria) and its index among siblings.
    pub fn parent_of(&self, id: &str) -> Option<(&str, usize)> {
        let path = self.path_to(id)?;
        let parent = if path.len() >= 2 { path[path.len() - 2].id.as_str() } else { GOAL_ID };
        let siblings = self.children_of(parent)?;
        let idx = siblings.iter().position(|c| c.id == id)?;
        Some((parent, idx))
    }

    /// Every node that owns a judgment set: the goal, each non-leaf criterion, and each leaf.
    pub fn comparison_nodes(&self) -> Vec<ComparisonNode<'_>> {
        let mut out = vec![ComparisonNode {
            id: GOAL_ID,
            members: self.criteria.iter().map(|c| c.id.as_str()).collect(),
            compares_alternatives: false,
        }];
        let alts: Vec<&str> = self.alternatives.iter().map(|a| a.id.as_str()).collect();
        fn walk<'a>(nodes: &'a [CriterionNode], alts: &[&'a str], out: &mut Vec<ComparisonNode<'a>>) {
            for n in nodes {
                if n.is_leaf() {
                    out.push(ComparisonNode { id: &n.id, members: alts.to_vec(), compares_alternatives: true });
                } else {
                    out.push(ComparisonNode {
                        id: &n.id,
                        members: n.children.iter().map(|c| c.id.as_str()).collect(),
                        compares_alternatives: false,
                    });
                    walk(&n.children, alts, out);
                }
            }
        }
        walk(&self.criteria, &alts, &mut out);
        out
    }

    /// Number of items compared at `node_id`, if the node exists.
    pub fn comparison_size(&self, node_id: &str) -> Option<usize> {
        if node_id == GOAL_ID {
            return Some(self.criteria.len());
        }
        let node = self.find(node_id)?;
        Some(if node.is_leaf() { self.alternatives.len() } else { node.children.len() })
    }
}

/// Lists structural defects in declaration order; an empty list means the hierarchy is valid.
pub fn validate_hierarchy(h: &DecisionHierarchy) -> Vec<HierarchyDefect> {
    let mut defects = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();

    fn walk<'a>(
        nodes: &'a [CriterionNode],
        ancestors: &mut Vec<&'a str>,
        seen: &mut HashSet<&'a str>,
        defects: &mut Vec<HierarchyDefect>,
    ) {
        for (k, n) in nodes.iter().enumerate() {
            check_id(&n.id, || format!("{}[{k}]", ancestors.join("/")), seen, defects, ancestors);
            ancestors.push(&n.id);
            walk(&n.children, ancestors, seen, defects);
            ancestors.pop();
        }
    }

    fn check_id<'a>(
        id: &'a str,
        path: impl FnOnce() -> String,
        seen: &mut HashSet<&'a str>,
        defects: &mut Vec<HierarchyDefect>,
        ancestors: &[&str],
    ) {
        if id.is_empty() {
            defects.push(HierarchyDefect::EmptyId { path: path() });
        } else if id == GOAL_ID {
            defects.push(HierarchyDefect::ReservedId { id: id.into() });
        } else if ancestors.contains(&id) {
            defects.push(HierarchyDefect::Cycle { id: id.into() });
        } else if !seen.insert(id) {
            defects.push(HierarchyDefect::DuplicateId { id: id.into() });
        }
    }

    walk(&h.criteria, &mut Vec::new(), &mut seen, &mut defects);
    for (k, a) in h.alternatives.iter().enumerate() {
        check_id(&a.id, || format!("alternatives[{k}]"), &mut seen, &mut defects, &[]);
    }
    if h.alternatives.len() < 2 {
        defects.push(HierarchyDefect::TooFewAlternatives { count: h.alternatives.len() });
    }
    if h.criteria.is_empty() {
        defects.push(HierarchyDefect::NoLeafCriteria);
    }
    defects
}
