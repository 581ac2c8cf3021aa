use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::Value;

use ahp_core::evaluate::EvaluationError;
use ahp_core::store::StoreError;
use ahp_core::synthesis::SynthesisError;

/// Error body: `{"error": {"code", "message", "path"?, "details"?}}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), path: None, details: None }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn model_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "model_not_found", format!("no model with id {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a ApiError,
        }
        (self.status, Json(Body { error: &self })).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let mut err = Self::bad_request(e.code(), e.to_string());
        err.path = e.path();
        if let StoreError::Defects(defects) = &e {
            err = err.with_details(defects);
        }
        err
    }
}

impl From<EvaluationError> for ApiError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Incomplete(nodes) => {
                let first = &nodes[0];
                Self::bad_request(
                    "incomplete_model",
                    format!("model is incomplete; first incomplete node is {:?}", first.node),
                )
                .with_path(format!("judgments.{}", first.node))
                .with_details(&nodes)
            }
            EvaluationError::Judgments { ref node, .. } => {
                let path = format!("judgments.{node}");
                Self::bad_request("invalid_judgment", e.to_string()).with_path(path)
            }
            EvaluationError::Priority { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "not_converged", e.to_string())
            }
            EvaluationError::Consistency { .. } => Self::bad_request("unsupported_dimension", e.to_string()),
        }
    }
}

impl From<SynthesisError> for ApiError {
    fn from(e: SynthesisError) -> Self {
        let code = match e {
            SynthesisError::UnknownNode(_) => "unknown_node",
            SynthesisError::OnlyChild(_) => "only_child",
            SynthesisError::WeightOutOfRange(_) => "weight_out_of_range",
            SynthesisError::TooFewSteps(_) => "too_few_steps",
            _ => "synthesis_error",
        };
        Self::bad_request(code, e.to_string())
    }
}
