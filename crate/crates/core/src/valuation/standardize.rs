use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Per-column mean/std scaling fitted on training data. Columns with zero
/// spread are only mean-centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &FeatureMatrix) -> Result<Self> {
        if train.rows() == 0 {
            return Err(Error::InvalidArgument(
                "cannot standardize empty data".into(),
            ));
        }
        let n = train.rows() as f64;
        let cols = train.cols();
        let mut mean = vec![0.0; cols];
        for i in 0..train.rows() {
            mean.iter_mut().zip(train.row(i)).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; cols];
        for i in 0..train.rows() {
            for ((s, v), m) in var.iter_mut().zip(train.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn fit_values(values: &[f64]) -> Result<Self> {
        Self::fit(&FeatureMatrix::new(values.len(), 1, values.to_vec())?)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    fn scale(&self, col: usize) -> f64 {
        if self.std[col] > 0.0 {
            self.std[col]
        } else {
            1.0
        }
    }

    pub fn apply(&self, data: &FeatureMatrix) -> Result<FeatureMatrix> {
        if data.cols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                actual: data.cols(),
            });
        }
        let cols = data.cols();
        let out = data
            .data()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let c = k % cols;
                (v - self.mean[c]) / self.scale(c)
            })
            .collect();
        FeatureMatrix::new(data.rows(), cols, out)
    }

    /// Scales a single-column target vector.
    pub fn apply_values(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .map(|v| (v - self.mean[0]) / self.scale(0))
            .collect()
    }

    pub fn invert_values(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .map(|v| v * self.scale(0) + self.mean[0])
            .collect()
    }
}
