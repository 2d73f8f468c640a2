//! Market-value estimation harness.
//!
//! Team representations are fed to a two-hidden-layer perceptron and scored
//! under 5-fold cross-validation, either as a regression on the value in
//! million EUR or as a classification into value quartiles.

mod cv;
mod features;
mod metrics;
mod mlp;
mod pipeline;
mod standardize;
mod values;

pub use cv::{
    cross_validate, fold_assignment, fold_sizes, CvOptions, EvalReport, FoldResult, MetricSummary,
    NUM_FOLDS,
};
pub use features::{quartile_labels, quartiles, steve_features, value_class};
pub use metrics::{
    classification_metrics, compute_metrics, regression_metrics, ClassificationMetrics,
    MetricRecord, RegressionMetrics,
};
pub use mlp::{Mlp, MlpConfig, NUM_CLASSES};
pub use pipeline::{build_features, evaluate, feature_names, EvalSetup, Representation};
pub use standardize::Standardizer;
pub use values::{load_values, ValueTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(Task::Regression),
            "classification" => Ok(Task::Classification),
            other => Err(Error::InvalidArgument(format!(
                "unknown task {other:?} (expected regression or classification)"
            ))),
        }
    }
}

/// Prediction targets for one task.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Market values in million EUR.
    Values(Vec<f64>),
    /// Class labels in `0..NUM_CLASSES`.
    Classes(Vec<usize>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Values(v) => v.len(),
            Targets::Classes(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Targets::Values(_) => Task::Regression,
            Targets::Classes(_) => Task::Classification,
        }
    }

    pub(crate) fn select(&self, idx: &[usize]) -> Targets {
        match self {
            Targets::Values(v) => Targets::Values(idx.iter().map(|&i| v[i]).collect()),
            Targets::Classes(c) => Targets::Classes(idx.iter().map(|&i| c[i]).collect()),
        }
    }
}

/// Dense row-major matrix of features, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn select(&self, idx: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Same matrix with its rows reordered: row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> FeatureMatrix {
        self.select(perm)
    }
}
