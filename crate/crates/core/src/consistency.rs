//! Consistency index, random index and consistency ratio of judgment matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{JudgmentMatrix, SaatyJudgment};
use crate::priority::{derive, derive_eigenvector, Derivation, DerivationSettings, PriorityError, PriorityVector};

/// Customary acceptance threshold on the consistency ratio.
pub const DEFAULT_CR_THRESHOLD: f64 = 0.10;

/// Largest matrix dimension with a random-index constant.
pub const MAX_DIMENSION: usize = 10;

const RANDOM_INDEX: [f64; MAX_DIMENSION] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49];

// Residuals within this margin count as tied; the earlier pair wins.
const RESIDUAL_TIE_MARGIN: f64 = 1e-9;

// Samples per independently seeded stream in the Monte-Carlo estimator.
const RI_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsistencyError {
    #[error("no random index for dimension {0}; supported range is 1..={MAX_DIMENSION}")]
    UnsupportedDimension(usize),
    #[error("random index estimation needs n in 3..={MAX_DIMENSION}, got {0}")]
    EstimatorDimension(usize),
    #[error("samples must be >= 1")]
    NoSamples,
    #[error("threshold must be > 0, got {0}")]
    BadThreshold(f64),
    #[error(transparent)]
    Priority(#[from] PriorityError),
}

/// Saaty's random index constants for n = 1..=10.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomIndexTable;

impl RandomIndexTable {
    pub fn get(n: usize) -> Option<f64> {
        (1..=MAX_DIMENSION).contains(&n).then(|| RANDOM_INDEX[n - 1])
    }

    pub fn entries() -> impl Iterator<Item = (usize, f64)> {
        RANDOM_INDEX.iter().enumerate().map(|(k, v)| (k + 1, *v))
    }
}

/// Single-pair judgment revision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Revision {
    pub i: usize,
    pub j: usize,
    /// Current value of `a[i][j]`, which need not be canonical for synthetic matrices.
    pub current: f64,
    pub suggested: SaatyJudgment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub n: usize,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub threshold: f64,
    pub consistent: bool,
    pub worst_pair: Option<Revision>,
}

/// Builds a report from an already derived priority vector.
pub fn report_for(
    m: &JudgmentMatrix,
    derivation: &Derivation,
    threshold: f64,
) -> Result<ConsistencyReport, ConsistencyError> {
    if !(threshold > 0.0) {
        return Err(ConsistencyError::BadThreshold(threshold));
    }
    let n = m.dim();
    let ri = RandomIndexTable::get(n).ok_or(ConsistencyError::UnsupportedDimension(n))?;
    let lambda = derivation.lambda_max;
    let (ci, cr) = if n <= 2 {
        (0.0, 0.0)
    } else {
        let ci = (lambda - n as f64) / (n as f64 - 1.0);
        (ci, ci / ri)
    };
    let consistent = cr <= threshold;
    let worst_pair = if consistent { None } else { suggest_revision(m, &derivation.weights) };
    Ok(ConsistencyReport { n, lambda_max: lambda, ci, ri, cr, threshold, consistent, worst_pair })
}

pub fn check_consistency(
    m: &JudgmentMatrix,
    s: &DerivationSettings,
    threshold: f64,
) -> Result<ConsistencyReport, ConsistencyError> {
    if RandomIndexTable::get(m.dim()).is_none() {
        return Err(ConsistencyError::UnsupportedDimension(m.dim()));
    }
    let d = derive(m, s)?;
    report_for(m, &d, threshold)
}

/// Super-diagonal pair with the largest log residual `|ln a[i][j] - ln(w_i/w_j)|`,
/// and the canonical value nearest to `w_i/w_j`. `None` for matrices smaller than 2×2.
pub fn suggest_revision(m: &JudgmentMatrix, w: &PriorityVector) -> Option<Revision> {
    let n = m.dim();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let r = (m.get(i, j).ln() - (w.get(i) / w.get(j)).ln()).abs();
            if best.is_none_or(|(b, _, _)| r > b + RESIDUAL_TIE_MARGIN) {
                best = Some((r, i, j));
            }
        }
    }
    best.map(|(_, i, j)| Revision {
        i,
        j,
        current: m.get(i, j),
        suggested: SaatyJudgment::nearest(w.get(i) / w.get(j)),
    })
}

/// Random reciprocal matrix with super-diagonal entries uniform over the 17 canonical values.
pub fn random_reciprocal_matrix<R: Rng>(n: usize, rng: &mut R) -> JudgmentMatrix {
    let scale: Vec<f64> = SaatyJudgment::canonical().map(|c| c.value()).collect();
    let mut rows = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = scale[rng.gen_range(0..scale.len())];
            rows[i][j] = v;
            rows[j][i] = 1.0 / v;
        }
    }
    JudgmentMatrix::from_rows(rows).expect("canonical entries form a valid matrix")
}

/// Monte-Carlo mean consistency index of random reciprocal matrices.
///
/// Samples are split into fixed-size chunks, each drawn from its own ChaCha
/// stream of `seed`, so the result does not depend on the thread count.
pub fn estimate_random_index(n: usize, samples: usize, seed: u64) -> Result<f64, ConsistencyError> {
    if !(3..=MAX_DIMENSION).contains(&n) {
        return Err(ConsistencyError::EstimatorDimension(n));
    }
    if samples == 0 {
        return Err(ConsistencyError::NoSamples);
    }
    let settings = DerivationSettings::default();
    let chunks = samples.div_ceil(RI_CHUNK);
    let sums = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = RI_CHUNK.min(samples - c * RI_CHUNK);
            let mut sum = 0.0;
            for _ in 0..count {
                let m = random_reciprocal_matrix(n, &mut rng);
                let d = derive_eigenvector(&m, &settings)?;
                sum += (d.lambda_max - n as f64) / (n as f64 - 1.0);
            }
            Ok(sum)
        })
        .collect::<Result<Vec<f64>, PriorityError>>()?;
    Ok(sums.iter().sum::<f64>() / samples as f64)
}
