//! HTTP facade over the AHP engine, served under `/v1/`.
//!
//! Models live in an in-memory session store keyed by an opaque id. Every
//! accepted mutation bumps the model's revision; writers must name the
//! revision they read (`if_revision`) and stale writes get `409 Conflict`.
//! Inconsistent judgments are accepted and flagged, never rejected.

mod error;
pub mod sessions;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use ahp_core::consistency::{estimate_random_index, RandomIndexTable, MAX_DIMENSION};
use ahp_core::evaluate::{evaluate, evaluate_set, EvaluationOptions, NodeEvaluation};
use ahp_core::model::{Judgment, JudgmentSet};
use ahp_core::store::{load_model, save_model, IncompleteNode, ModelDocument};
use ahp_core::synthesis::{sensitivity_scan, score_alternatives, SensitivityQuery};

pub use error::ApiError;
pub use sessions::{ModelSession, SessionStore, UpdateError};

/// Upper bound on Monte-Carlo samples accepted by `/v1/ri`.
pub const MAX_RI_SAMPLES: usize = 10_000_000;
pub const DEFAULT_SWEEP_STEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub data_dir: Option<PathBuf>,
    pub cors: bool,
}

pub type AppState = Arc<SessionStore>;

pub fn router(state: AppState, cors: bool) -> Router {
    let api = Router::new()
        .route("/v1/health", get(health))
        .route("/v1/ri", get(random_index))
        .route("/v1/models", post(create_model))
        .route("/v1/models/{id}", get(get_model))
        .route("/v1/models/{id}/judgments/{node}", put(put_judgments))
        .route("/v1/models/{id}/consistency", get(get_consistency))
        .route("/v1/models/{id}/synthesis", get(get_synthesis))
        .route("/v1/models/{id}/sensitivity", get(get_sensitivity))
        .with_state(state);
    if cors {
        api.layer(CorsLayer::permissive())
    } else {
        api
    }
}

pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let store = match &config.data_dir {
        Some(dir) => SessionStore::open(dir)?,
        None => SessionStore::new(None),
    };
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store), config.cors)).await
}

fn session(state: &SessionStore, id: &str) -> Result<ModelSession, ApiError> {
    state.get(id).ok_or_else(|| ApiError::model_not_found(id))
}

fn document_value(doc: &ModelDocument) -> Value {
    serde_json::from_slice(&save_model(doc)).expect("saved documents are valid JSON")
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

#[derive(Serialize)]
struct Created {
    model_id: String,
    revision: u64,
}

async fn create_model(State(state): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let doc = load_model(&body)?;
    let s = state.insert(doc);
    Ok((StatusCode::CREATED, Json(Created { model_id: s.model_id, revision: s.revision })))
}

async fn get_model(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = session(&state, &id)?;
    Ok(Json(json!({
        "model_id": s.model_id,
        "revision": s.revision,
        "document": document_value(&s.document),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JudgmentsBody {
    if_revision: u64,
    judgments: Vec<Judgment>,
}

#[derive(Serialize)]
struct JudgmentsAccepted {
    model_id: String,
    revision: u64,
    node: String,
    /// Missing pairs; the report and weights are present only when this is empty.
    missing: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    report: Option<ahp_core::ConsistencyReport>,
}

async fn put_judgments(
    State(state): State<AppState>,
    Path((id, node)): Path<(String, String)>,
    body: Bytes,
) -> Result<Json<JudgmentsAccepted>, ApiError> {
    let body: JudgmentsBody = serde_path_to_body(&body)?;
    let current = session(&state, &id)?;
    let n = current.document.hierarchy.comparison_size(&node).ok_or_else(|| {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_node", format!("no comparison node {node:?}"))
    })?;
    let set = JudgmentSet::new(node.clone(), body.judgments);

    let updated = state
        .update(&id, body.if_revision, |doc| {
            doc.check_judgments(&set)?;
            doc.judgments.insert(node.clone(), set.clone());
            Ok::<_, ahp_core::store::StoreError>(())
        })
        .map_err(|e| match e {
            UpdateError::NotFound => ApiError::model_not_found(&id),
            UpdateError::Conflict { current } => ApiError::new(
                StatusCode::CONFLICT,
                "revision_conflict",
                format!("if_revision {} is stale; current revision is {current}", body.if_revision),
            )
            .with_path("if_revision")
            .with_details(json!({ "current_revision": current })),
            UpdateError::Rejected(e) => e.into(),
        })?;

    let missing = set.missing_pairs(n);
    let (weights, report) = if missing.is_empty() {
        let settings = updated.document.settings;
        let (w, _, report) = evaluate_set(&set, n, &settings.derivation(), settings.cr_threshold)?;
        (Some(w.weights().to_vec()), Some(report))
    } else {
        (None, None)
    };
    Ok(Json(JudgmentsAccepted { model_id: id, revision: updated.revision, node, missing, weights, report }))
}

fn serde_path_to_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    T::deserialize(&mut de).map_err(|e| {
        let code = if e.is_syntax() || e.is_eof() { "syntax_error" } else { "schema_error" };
        ApiError::bad_request(code, e.to_string())
    })
}

#[derive(Serialize)]
struct ConsistencyView {
    model_id: String,
    revision: u64,
    nodes: Vec<NodeEvaluation>,
    incomplete: Vec<IncompleteNode>,
}

async fn get_consistency(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ConsistencyView>, ApiError> {
    let s = session(&state, &id)?;
    let doc = &s.document;
    let settings = doc.settings;
    let incomplete = doc.incomplete_nodes(true);
    let mut nodes = Vec::new();
    for c in doc.hierarchy.comparison_nodes() {
        if incomplete.iter().any(|i| i.node == c.id) {
            continue;
        }
        let set = doc.judgments.get(c.id).cloned().unwrap_or_else(|| JudgmentSet::new(c.id, vec![]));
        let (w, geo, report) = evaluate_set(&set, c.members.len(), &settings.derivation(), settings.cr_threshold)?;
        nodes.push(NodeEvaluation {
            node: c.id.to_string(),
            members: c.members.iter().map(|m| m.to_string()).collect(),
            compares_alternatives: c.compares_alternatives,
            weights: w.weights().to_vec(),
            geometric_mean: geo.weights().to_vec(),
            report,
        });
    }
    Ok(Json(ConsistencyView { model_id: s.model_id, revision: s.revision, nodes, incomplete }))
}

#[derive(Serialize)]
struct Warning {
    node: String,
    cr: f64,
    threshold: f64,
    worst_pair: Option<ahp_core::consistency::Revision>,
}

async fn get_synthesis(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = session(&state, &id)?;
    let eval = evaluate(&s.document, &EvaluationOptions::from_document(&s.document))?;
    let result = score_alternatives(&eval.model)?;
    let warnings: Vec<Warning> = eval
        .inconsistent()
        .map(|n| Warning {
            node: n.node.clone(),
            cr: n.report.cr,
            threshold: n.report.threshold,
            worst_pair: n.report.worst_pair,
        })
        .collect();
    Ok(Json(json!({
        "model_id": s.model_id,
        "revision": s.revision,
        "most_suitable": result.top(),
        "result": result,
        "consistency": eval.nodes,
        "warnings": warnings,
    })))
}

fn query_param<T: std::str::FromStr>(
    q: &HashMap<String, String>,
    name: &str,
    default: Option<T>,
) -> Result<T, ApiError> {
    match q.get(name) {
        Some(raw) => raw.parse().map_err(|_| {
            ApiError::bad_request("bad_query", format!("cannot parse query parameter {name}={raw:?}")).with_path(name)
        }),
        None => default.ok_or_else(|| {
            ApiError::bad_request("bad_query", format!("missing query parameter {name}")).with_path(name)
        }),
    }
}

async fn get_sensitivity(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let s = session(&state, &id)?;
    let node: String = query_param(&q, "node", None)?;
    let steps: usize = query_param(&q, "steps", Some(DEFAULT_SWEEP_STEPS))?;
    let eval = evaluate(&s.document, &EvaluationOptions::from_document(&s.document))?;
    let weight = match q.get("weight") {
        Some(_) => query_param(&q, "weight", None)?,
        None => current_weight(&eval.model, &node)?,
    };
    let model = eval.model;
    let query = SensitivityQuery { target_node: node, new_weight: weight };
    let scan = tokio::task::spawn_blocking(move || sensitivity_scan(&model, &query, steps))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(json!({ "model_id": s.model_id, "revision": s.revision, "scan": scan })))
}

/// Local weight of `node` within its sibling set.
fn current_weight(model: &ahp_core::WeightedModel, node: &str) -> Result<f64, ApiError> {
    let h = &model.hierarchy;
    let (parent, idx) = h.parent_of(node).ok_or_else(|| ahp_core::synthesis::SynthesisError::UnknownNode(node.into()))?;
    if h.children_of(parent).map_or(0, <[_]>::len) < 2 {
        return Err(ahp_core::synthesis::SynthesisError::OnlyChild(node.into()).into());
    }
    Ok(model.local[parent].get(idx))
}

async fn random_index(Query(q): Query<HashMap<String, String>>) -> Result<Json<Value>, ApiError> {
    let n: usize = query_param(&q, "n", None)?;
    let samples: usize = query_param(&q, "samples", Some(100_000))?;
    let seed: u64 = query_param(&q, "seed", Some(0))?;
    if !(3..=MAX_DIMENSION).contains(&n) {
        return Err(ApiError::bad_request("bad_query", format!("n must be in 3..={MAX_DIMENSION}")).with_path("n"));
    }
    if samples == 0 || samples > MAX_RI_SAMPLES {
        return Err(
            ApiError::bad_request("bad_query", format!("samples must be in 1..={MAX_RI_SAMPLES}")).with_path("samples")
        );
    }
    let estimate = tokio::task::spawn_blocking(move || estimate_random_index(n, samples, seed))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(|e| ApiError::bad_request("bad_query", e.to_string()))?;
    let table = RandomIndexTable::get(n).expect("n in table range");
    Ok(Json(json!({
        "n": n,
        "samples": samples,
        "seed": seed,
        "estimate": estimate,
        "table": table,
        "difference": estimate - table,
    })))
}
