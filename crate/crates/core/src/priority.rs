//! Local priority derivation from a judgment matrix.
//!
//! The principal eigenvector is found by power iteration from the uniform
//! vector; the row geometric mean is kept alongside as an independent
//! cross-check. Both return weights normalized to sum to one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::JudgmentMatrix;

/// Tolerance on `sum(weights) == 1` for a `PriorityVector`.
pub const SUM_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorityError {
    #[error("power iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64, last_iterate: Vec<f64> },
    #[error("invalid derivation settings: {0}")]
    BadSettings(String),
    #[error("invalid priority vector: {0}")]
    InvalidVector(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Eigenvector,
    GeometricMean,
}

impl std::str::FromStr for Method {
    type Err = PriorityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eigenvector" => Ok(Self::Eigenvector),
            "geometric_mean" | "geometric-mean" => Ok(Self::GeometricMean),
            other => Err(PriorityError::BadSettings(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Eigenvector => "eigenvector",
            Self::GeometricMean => "geometric_mean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivationSettings {
    pub method: Method,
    /// L1 change between successive iterates below which power iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DerivationSettings {
    fn default() -> Self {
        Self { method: Method::Eigenvector, tolerance: 1e-12, max_iterations: 10_000 }
    }
}

impl DerivationSettings {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), PriorityError> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(PriorityError::BadSettings(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_iterations < 1 {
            return Err(PriorityError::BadSettings("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Strictly positive local weights over one sibling set, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriorityVector(Vec<f64>);

impl PriorityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, PriorityError> {
        if weights.is_empty() {
            return Err(PriorityError::InvalidVector("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(PriorityError::InvalidVector(format!("weight {w} is not strictly positive")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_EPSILON {
            return Err(PriorityError::InvalidVector(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Scales positive weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self, PriorityError> {
        let sum: f64 = weights.iter().sum();
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

impl TryFrom<Vec<f64>> for PriorityVector {
    type Error = PriorityError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<PriorityVector> for Vec<f64> {
    fn from(p: PriorityVector) -> Self {
        p.0
    }
}

/// Local weights plus the principal eigenvalue estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub weights: PriorityVector,
    pub lambda_max: f64,
    /// Power-iteration steps taken; zero for the geometric mean.
    pub iterations: usize,
}

/// Mean of the component-wise ratios `(m·w)_i / w_i`.
pub fn lambda_max(m: &JudgmentMatrix, w: &[f64]) -> f64 {
    let mw = m.mul_vec(w);
    mw.iter().zip(w).map(|(a, b)| a / b).sum::<f64>() / w.len() as f64
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Principal eigenvector by power iteration from the uniform vector.
pub fn derive_eigenvector(m: &JudgmentMatrix, s: &DerivationSettings) -> Result<Derivation, PriorityError> {
    s.validate()?;
    let n = m.dim();
    let mut w = vec![1.0 / n as f64; n];
    let mut change = f64::INFINITY;
    for it in 1..=s.max_iterations {
        let mut next = m.mul_vec(&w);
        normalize(&mut next);
        change = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        w = next;
        if change < s.tolerance {
            let lambda = lambda_max(m, &w);
            return Ok(Derivation { weights: PriorityVector::new(w)?, lambda_max: lambda, iterations: it });
        }
    }
    Err(PriorityError::NotConverged { iterations: s.max_iterations, last_change: change, last_iterate: w })
}

/// Normalized row geometric means.
pub fn derive_geometric_mean(m: &JudgmentMatrix) -> PriorityVector {
    let n = m.dim();
    // log-domain mean avoids overflow of the row product for large n
    let mut w: Vec<f64> =
        (0..n).map(|i| (m.row(i).iter().map(|a| a.ln()).sum::<f64>() / n as f64).exp()).collect();
    normalize(&mut w);
    PriorityVector(w)
}

/// Dispatches on `s.method`.
pub fn derive(m: &JudgmentMatrix, s: &DerivationSettings) -> Result<Derivation, PriorityError> {
    match s.method {
        Method::Eigenvector => derive_eigenvector(m, s),
        Method::GeometricMean => {
            s.validate()?;
            let weights = derive_geometric_mean(m);
            let lambda = lambda_max(m, weights.weights());
            Ok(Derivation { weights, lambda_max: lambda, iterations: 0 })
        }
    }
}
