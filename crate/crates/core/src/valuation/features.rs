use super::FeatureMatrix;
use crate::error::{Error, Result};
use crate::match_data::TeamId;
use crate::trainer::EmbeddingModel;

/// One row per team: winner representation followed by loser representation.
pub fn steve_features(model: &EmbeddingModel, teams: &[TeamId]) -> Result<FeatureMatrix> {
    let width = 2 * model.delta();
    let mut data = Vec::with_capacity(teams.len() * width);
    for &t in teams {
        model.check(t)?;
        data.extend_from_slice(model.phi(t));
        data.extend_from_slice(model.psi(t));
    }
    FeatureMatrix::new(teams.len(), width, data)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// First, second and third quartile.
pub fn quartiles(values: &[f64]) -> Result<[f64; 3]> {
    if values.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "quartile binning needs at least 4 values, got {}",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok([0.25, 0.5, 0.75].map(|q| quantile(&sorted, q)))
}

/// Class of `v` given quartiles: 0 up to and including Q1, 1 up to Q2,
/// 2 up to Q3, 3 above.
pub fn value_class(v: f64, q: &[f64; 3]) -> usize {
    q.iter().position(|&b| v <= b).unwrap_or(3)
}

pub fn quartile_labels(values: &[f64]) -> Result<Vec<usize>> {
    let q = quartiles(values)?;
    Ok(values.iter().map(|&v| value_class(v, &q)).collect())
}
