use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Targets;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub rmse: f64,
    pub mae: f64,
    pub median_ae: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub micro_f1: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricRecord {
    Regression(RegressionMetrics),
    Classification(ClassificationMetrics),
}

impl MetricRecord {
    /// `(name, value)` pairs in report order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match self {
            MetricRecord::Regression(r) => {
                vec![("RMSE", r.rmse), ("MAE", r.mae), ("MMAE", r.median_ae)]
            }
            MetricRecord::Classification(c) => {
                vec![("micro-F1", c.micro_f1), ("macro-F1", c.macro_f1)]
            }
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: b,
            actual: a,
        });
    }
    if a == 0 {
        return Err(Error::InvalidArgument(
            "metrics need at least one sample".into(),
        ));
    }
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn regression_metrics(predictions: &[f64], targets: &[f64]) -> Result<RegressionMetrics> {
    check_lengths(predictions.len(), targets.len())?;
    let n = predictions.len() as f64;
    let mut abs: Vec<f64> = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).abs())
        .collect();
    let mse = abs.iter().map(|e| e * e).sum::<f64>() / n;
    let mae = abs.iter().sum::<f64>() / n;
    abs.sort_by(f64::total_cmp);
    Ok(RegressionMetrics {
        rmse: mse.sqrt(),
        mae,
        median_ae: median(&abs),
    })
}

/// Micro-F1 (equal to accuracy for single-label data) and macro-F1 over the
/// classes that occur in either the truth or the predictions.
pub fn classification_metrics(
    predictions: &[usize],
    targets: &[usize],
) -> Result<ClassificationMetrics> {
    check_lengths(predictions.len(), targets.len())?;
    let correct = predictions
        .iter()
        .zip(targets)
        .filter(|(p, t)| p == t)
        .count();
    let micro_f1 = correct as f64 / predictions.len() as f64;

    let classes: BTreeSet<usize> = predictions.iter().chain(targets).copied().collect();
    let f1_sum: f64 = classes
        .iter()
        .map(|&c| {
            let mut tp = 0usize;
            let mut fp = 0usize;
            let mut fn_ = 0usize;
            for (&p, &t) in predictions.iter().zip(targets) {
                match (p == c, t == c) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => {}
                }
            }
            if tp == 0 {
                0.0
            } else {
                2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
            }
        })
        .sum();
    Ok(ClassificationMetrics {
        micro_f1,
        macro_f1: f1_sum / classes.len() as f64,
    })
}

/// Scores predictions against targets of the same kind.
pub fn compute_metrics(predictions: &Targets, targets: &Targets) -> Result<MetricRecord> {
    match (predictions, targets) {
        (Targets::Values(p), Targets::Values(t)) => {
            regression_metrics(p, t).map(MetricRecord::Regression)
        }
        (Targets::Classes(p), Targets::Classes(t)) => {
            classification_metrics(p, t).map(MetricRecord::Classification)
        }
        _ => Err(Error::InvalidArgument(
            "predictions and targets are of different tasks".into(),
        )),
    }
}
