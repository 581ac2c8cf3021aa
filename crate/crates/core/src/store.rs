//! Versioned `.ahp.json` model documents and result export.
//!
//! Judgments are written only as upper-triangle records whose values are
//! rational strings (`"3"`, `"1/5"`), so reciprocals never pass through a
//! decimal. Output is deterministic: fixed field order, sorted judgment keys,
//! shortest round-trip float formatting, two-space indentation, trailing newline.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::DEFAULT_CR_THRESHOLD;
use crate::model::{
    validate_hierarchy, upper_pairs, Alternative, CriterionNode, DecisionHierarchy, HierarchyDefect, Judgment,
    JudgmentSet, SaatyJudgment,
};
use crate::priority::{DerivationSettings, Method};
use crate::synthesis::SynthesisResult;

pub const FORMAT_VERSION: u32 = 1;
pub const MODEL_EXTENSION: &str = ".ahp.json";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported model version {0} (this build reads version {FORMAT_VERSION})")]
    UnknownVersion(u64),
    #[error("hierarchy defects: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Defects(Vec<HierarchyDefect>),
    #[error("judgment ({i}, {j}) at node {node:?}: {message}")]
    Judgment { node: String, i: usize, j: usize, message: String },
}

impl StoreError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Syntax { .. } => "syntax_error",
            Self::Schema { .. } => "schema_error",
            Self::UnknownVersion(_) => "unknown_version",
            Self::Defects(_) => "hierarchy_defects",
            Self::Judgment { .. } => "invalid_judgment",
        }
    }

    /// Field path the error refers to, when there is one.
    pub fn path(&self) -> Option<String> {
        match self {
            Self::Schema { path, .. } => Some(path.clone()),
            Self::UnknownVersion(_) => Some("version".into()),
            Self::Judgment { node, .. } => Some(format!("judgments.{node}")),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub method: Method,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cr_threshold: f64,
}

impl Default for ModelSettings {
    fn default() -> Self {
        let d = DerivationSettings::default();
        Self {
            method: d.method,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            cr_threshold: DEFAULT_CR_THRESHOLD,
        }
    }
}

impl ModelSettings {
    pub fn derivation(&self) -> DerivationSettings {
        DerivationSettings { method: self.method, tolerance: self.tolerance, max_iterations: self.max_iterations }
    }
}

/// A decision model as persisted: hierarchy, judgments and engine settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub version: u32,
    pub hierarchy: DecisionHierarchy,
    /// Keyed by comparison node id (`GOAL_ID`, a criterion, or a leaf).
    pub judgments: BTreeMap<String, JudgmentSet>,
    pub settings: ModelSettings,
}

/// A comparison node whose judgment set still lacks pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompleteNode {
    pub node: String,
    pub missing: Vec<(usize, usize)>,
}

impl fmt::Display for IncompleteNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.missing.iter().map(|(i, j)| format!("({i}, {j})")).collect();
        write!(f, "node {:?} is missing pairs {}", self.node, pairs.join(", "))
    }
}

impl ModelDocument {
    pub fn new(hierarchy: DecisionHierarchy) -> Self {
        Self { version: FORMAT_VERSION, hierarchy, judgments: BTreeMap::new(), settings: ModelSettings::default() }
    }

    pub fn judgment_set(&self, node: &str) -> Option<&JudgmentSet> {
        self.judgments.get(node)
    }

    /// Incomplete comparison nodes in hierarchy order. With `include_alternatives`
    /// false only the criteria comparisons are checked.
    pub fn incomplete_nodes(&self, include_alternatives: bool) -> Vec<IncompleteNode> {
        self.hierarchy
            .comparison_nodes()
            .into_iter()
            .filter(|c| include_alternatives || !c.compares_alternatives)
            .filter_map(|c| {
                let n = c.members.len();
                let missing = match self.judgments.get(c.id) {
                    Some(set) => set.missing_pairs(n),
                    None => upper_pairs(n).collect(),
                };
                (!missing.is_empty()).then(|| IncompleteNode { node: c.id.to_string(), missing })
            })
            .collect()
    }

    /// Checks a replacement judgment set for `node` against the hierarchy.
    pub fn check_judgments(&self, set: &JudgmentSet) -> Result<(), StoreError> {
        let n = self.hierarchy.comparison_size(&set.node_id).ok_or_else(|| StoreError::Schema {
            path: format!("judgments.{}", set.node_id),
            message: "no such comparison node".into(),
        })?;
        set.check_pairs(n).map_err(|e| {
            let (i, j) = match e {
                crate::model::ModelError::NotUpperTriangle { i, j }
                | crate::model::ModelError::IndexOutOfRange { i, j, .. }
                | crate::model::ModelError::DuplicatePair { i, j } => (i, j),
                _ => (0, 0),
            };
            StoreError::Judgment { node: set.node_id.clone(), i, j, message: e.to_string() }
        })
    }
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum WireValue {
    Str(String),
    Num(f64),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct WireJudgment {
    i: usize,
    j: usize,
    value: WireValue,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSettingsIn {
    method: Option<Method>,
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    cr_threshold: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDocumentIn {
    #[allow(dead_code)]
    version: u64,
    goal: String,
    criteria: Vec<CriterionNode>,
    alternatives: Vec<Alternative>,
    #[serde(default)]
    judgments: BTreeMap<String, Vec<WireJudgment>>,
    settings: Option<WireSettingsIn>,
}

#[derive(Serialize)]
struct WireDocumentOut<'a> {
    version: u32,
    goal: &'a str,
    criteria: &'a [CriterionNode],
    alternatives: &'a [Alternative],
    judgments: BTreeMap<&'a str, Vec<WireJudgment>>,
    settings: &'a ModelSettings,
}

fn syntax(e: serde_json::Error) -> StoreError {
    StoreError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and validates a model document.
pub fn load_model(source: &[u8]) -> Result<ModelDocument, StoreError> {
    let value: serde_json::Value = serde_json::from_slice(source).map_err(syntax)?;
    let version = value.get("version").ok_or_else(|| StoreError::Schema {
        path: "version".into(),
        message: "missing field `version`".into(),
    })?;
    let version = version.as_u64().ok_or_else(|| StoreError::Schema {
        path: "version".into(),
        message: "expected a non-negative integer".into(),
    })?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(StoreError::UnknownVersion(version));
    }

    let wire: WireDocumentIn = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        StoreError::Schema { path, message: e.into_inner().to_string() }
    })?;

    let hierarchy = DecisionHierarchy::new(wire.goal, wire.criteria, wire.alternatives);
    let defects = validate_hierarchy(&hierarchy);
    if !defects.is_empty() {
        return Err(StoreError::Defects(defects));
    }

    let defaults = ModelSettings::default();
    let settings = match wire.settings {
        None => defaults,
        Some(s) => ModelSettings {
            method: s.method.unwrap_or(defaults.method),
            tolerance: s.tolerance.unwrap_or(defaults.tolerance),
            max_iterations: s.max_iterations.unwrap_or(defaults.max_iterations),
            cr_threshold: s.cr_threshold.unwrap_or(defaults.cr_threshold),
        },
    };
    check_settings(&settings)?;

    let mut doc = ModelDocument { version: FORMAT_VERSION, hierarchy, judgments: BTreeMap::new(), settings };
    for (node, records) in wire.judgments {
        let mut entries = Vec::with_capacity(records.len());
        for r in records {
            let parsed = match &r.value {
                WireValue::Str(s) => s.parse::<SaatyJudgment>(),
                WireValue::Num(v) => SaatyJudgment::from_value(*v),
            };
            let value = parsed.map_err(|e| StoreError::Judgment {
                node: node.clone(),
                i: r.i,
                j: r.j,
                message: e.to_string(),
            })?;
            entries.push(Judgment::new(r.i, r.j, value));
        }
        let set = JudgmentSet::new(node.clone(), entries);
        doc.check_judgments(&set)?;
        doc.judgments.insert(node, set);
    }
    Ok(doc)
}

pub fn check_settings(s: &ModelSettings) -> Result<(), StoreError> {
    let bad = |field: &str, message: &str| StoreError::Schema {
        path: format!("settings.{field}"),
        message: message.into(),
    };
    if !(s.tolerance > 0.0) || !s.tolerance.is_finite() {
        return Err(bad("tolerance", "must be a positive number"));
    }
    if s.max_iterations < 1 {
        return Err(bad("max_iterations", "must be at least 1"));
    }
    if !(s.cr_threshold > 0.0) || !s.cr_threshold.is_finite() {
        return Err(bad("cr_threshold", "must be a positive number"));
    }
    Ok(())
}

/// Canonical serialization; identical documents give identical bytes.
pub fn save_model(d: &ModelDocument) -> Vec<u8> {
    let wire = WireDocumentOut {
        version: d.version,
        goal: &d.hierarchy.goal,
        criteria: &d.hierarchy.criteria,
        alternatives: &d.hierarchy.alternatives,
        judgments: d
            .judgments
            .iter()
            .map(|(k, set)| {
                let records = set
                    .entries
                    .iter()
                    .map(|e| WireJudgment { i: e.i, j: e.j, value: WireValue::Str(e.value.to_string()) })
                    .collect();
                (k.as_str(), records)
            })
            .collect(),
        settings: &d.settings,
    };
    let mut out = serde_json::to_vec_pretty(&wire).expect("model documents always serialize");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown export format {other:?} (expected csv or json)")),
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer cannot fail")
}

/// Global leaf weights: `criteria,sub_criteria,global_weight`, one row per leaf.
pub fn export_global_weights_csv(r: &SynthesisResult) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["criteria", "sub_criteria", "global_weight"]).expect("in-memory write");
    for leaf in &r.leaves {
        w.write_record([leaf.parents.join(" / "), leaf.name.clone(), leaf.global_weight.to_string()])
            .expect("in-memory write");
    }
    finish(w)
}

/// Alternative scores: `alternative,score,rank`, best first.
pub fn export_scores_csv(r: &SynthesisResult) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["alternative", "score", "rank"]).expect("in-memory write");
    let mut alts: Vec<_> = r.alternatives.iter().collect();
    alts.sort_by_key(|a| a.rank);
    for a in alts {
        w.write_record([a.name.clone(), a.score.to_string(), a.rank.to_string()]).expect("in-memory write");
    }
    finish(w)
}

/// Both tables; in CSV they are separated by one empty line.
pub fn export_results(r: &SynthesisResult, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Csv => {
            let mut out = export_global_weights_csv(r);
            out.push(b'\n');
            out.extend(export_scores_csv(r));
            out
        }
        ExportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("results always serialize");
            out.push(b'\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "version": 1,
  "goal": "Pick one",
  "criteria": [
    {"id": "cost", "name": "Cost"},
    {"id": "speed", "name": "Speed", "children": []}
  ],
  "alternatives": [{"id": "a", "name": "A"}, {"id": "b", "name": "B"}],
  "judgments": {
    "goal": [{"i": 0, "j": 1, "value": 0.2}],
    "cost": [{"i": 0, "j": 1, "value": "3"}]
  }
}"#;

    #[test]
    fn loads_and_canonicalizes_decimals() {
        let d = load_model(SMALL.as_bytes()).unwrap();
        assert_eq!(d.judgments["goal"].entries[0].value.to_string(), "1/5");
        assert_eq!(d.settings, ModelSettings::default());
        let text = String::from_utf8(save_model(&d)).unwrap();
        assert!(text.contains("\"value\": \"1/5\""));
        assert!(!text.contains("0.2"));
        assert_eq!(load_model(text.as_bytes()).unwrap(), d);
        assert_eq!(save_model(&d), save_model(&d.clone()));
    }

    #[test]
    fn incomplete_nodes_are_listed_in_order() {
        let d = load_model(SMALL.as_bytes()).unwrap();
        assert!(d.incomplete_nodes(false).is_empty());
        assert_eq!(
            d.incomplete_nodes(true),
            vec![IncompleteNode { node: "speed".into(), missing: vec![(0, 1)] }]
        );
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = SMALL.replace("\"version\": 1", "\"version\": 99");
        assert_eq!(load_model(text.as_bytes()), Err(StoreError::UnknownVersion(99)));
    }

    #[test]
    fn out_of_range_value_names_the_pair() {
        let text = SMALL.replace("\"value\": \"3\"", "\"value\": 12");
        match load_model(text.as_bytes()) {
            Err(StoreError::Judgment { node, i, j, message }) => {
                assert_eq!((node.as_str(), i, j), ("cost", 0, 1));
                assert!(message.contains("outside"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = SMALL.replace("\"value\": \"3\"", "\"value\": 2.5");
        assert!(matches!(load_model(text.as_bytes()), Err(StoreError::Judgment { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match load_model(b"{\n  \"version\": 1,\n  oops\n}") {
            Err(StoreError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load_model(b""), Err(StoreError::Syntax { .. })));
    }

    #[test]
    fn schema_errors_carry_path() {
        let text = SMALL.replace("{\"id\": \"b\", \"name\": \"B\"}", "{\"id\": \"b\", \"nam\": \"B\"}");
        match load_model(text.as_bytes()) {
            Err(StoreError::Schema { path, .. }) => assert_eq!(path, "alternatives[1].nam"),
            other => panic!("unexpected {other:?}"),
        }
        let text = SMALL.replace("\"judgments\"", "\"settings\": {\"tolerance\": -1}, \"judgments\"");
        match load_model(text.as_bytes()) {
            Err(StoreError::Schema { path, .. }) => assert_eq!(path, "settings.tolerance"),
            other => panic!("unexpected {other:?}"),
        }
        let text = SMALL.replace("\"cost\": [", "\"nowhere\": [");
        match load_model(text.as_bytes()) {
            Err(StoreError::Schema { path, .. }) => assert_eq!(path, "judgments.nowhere"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_pairs_are_rejected() {
        let text = SMALL.replace("{\"i\": 0, \"j\": 1, \"value\": \"3\"}", "{\"i\": 0, \"j\": 2, \"value\": \"3\"}");
        assert!(matches!(load_model(text.as_bytes()), Err(StoreError::Judgment { i: 0, j: 2, .. })));
        let text = SMALL.replace(
            "{\"i\": 0, \"j\": 1, \"value\": \"3\"}",
            "{\"i\": 0, \"j\": 1, \"value\": \"3\"}, {\"i\": 0, \"j\": 1, \"value\": \"2\"}",
        );
        assert!(matches!(load_model(text.as_bytes()), Err(StoreError::Judgment { i: 0, j: 1, .. })));
    }

    #[test]
    fn defects_are_reported() {
        let text = SMALL.replace("\"id\": \"b\"", "\"id\": \"a\"");
        assert_eq!(
            load_model(text.as_bytes()),
            Err(StoreError::Defects(vec![HierarchyDefect::DuplicateId { id: "a".into() }]))
        );
    }
}
