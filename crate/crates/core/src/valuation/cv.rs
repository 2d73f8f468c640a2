use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    compute_metrics, FeatureMatrix, MetricRecord, Mlp, MlpConfig, Standardizer, Targets, Task,
};
use crate::error::{Error, Result};

pub const NUM_FOLDS: usize = 5;

/// Fold sizes for `n` samples; the first `n % 5` folds get one extra sample.
pub fn fold_sizes(n: usize) -> [usize; NUM_FOLDS] {
    std::array::from_fn(|k| n / NUM_FOLDS + usize::from(k < n % NUM_FOLDS))
}

/// Validation indices of each fold after a seeded shuffle.
pub fn fold_assignment(n: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut start = 0;
    fold_sizes(n)
        .iter()
        .map(|&size| {
            let fold = order[start..start + size].to_vec();
            start += size;
            fold
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    /// Standardize input columns per training fold (count-based features).
    pub standardize_features: bool,
    pub seed: u64,
    /// Network settings; the seed is replaced per fold.
    pub mlp: MlpConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub valid_size: usize,
    pub metrics: MetricRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub name: String,
    pub per_fold: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
}

impl MetricSummary {
    fn from_values(name: &str, per_fold: Vec<f64>) -> Self {
        let n = per_fold.len() as f64;
        let mean = per_fold.iter().sum::<f64>() / n;
        let std = (per_fold.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        Self {
            name: name.to_owned(),
            per_fold,
            mean,
            std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub representation: String,
    pub samples: usize,
    pub folds: Vec<FoldResult>,
    pub summary: Vec<MetricSummary>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn metric(&self, name: &str) -> Option<&MetricSummary> {
        self.summary.iter().find(|m| m.name == name)
    }

    /// Representation-by-metric table with `mean ± std` cells. All reports
    /// must share a task.
    pub fn render_table(reports: &[EvalReport]) -> String {
        let Some(first) = reports.first() else {
            return String::new();
        };
        let names: Vec<&str> = first.summary.iter().map(|m| m.name.as_str()).collect();
        let cell = |m: &MetricSummary| format!("{:.3} ± {:.3}", m.mean, m.std);
        let rep_width = reports
            .iter()
            .map(|r| r.representation.chars().count())
            .max()
            .unwrap_or(0)
            .max("representation".len());
        let col_width = reports
            .iter()
            .flat_map(|r| r.summary.iter().map(|m| cell(m).chars().count()))
            .chain(names.iter().map(|n| n.len()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = write!(out, "{:<rep_width$}", "representation");
        for n in &names {
            let _ = write!(out, "  {n:>col_width$}");
        }
        out.push('\n');
        for r in reports {
            let _ = write!(out, "{:<rep_width$}", r.representation);
            for m in &r.summary {
                let c = cell(m);
                let pad = col_width.saturating_sub(c.chars().count());
                let _ = write!(out, "  {}{c}", " ".repeat(pad));
            }
            out.push('\n');
        }
        out
    }
}

/// Seeded 5-fold cross-validation of the network on `features`.
///
/// Regression targets are standardized on each training split and
/// predictions mapped back to the original units before scoring.
pub fn cross_validate(
    features: &FeatureMatrix,
    targets: &Targets,
    opts: &CvOptions,
) -> Result<EvalReport> {
    let n = features.rows();
    if n != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: targets.len(),
        });
    }
    if n < NUM_FOLDS {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least {NUM_FOLDS} samples, got {n}"
        )));
    }
    let folds = fold_assignment(n, opts.seed);
    let mut results = Vec::with_capacity(NUM_FOLDS);
    for (k, valid) in folds.iter().enumerate() {
        let mut in_valid = vec![false; n];
        valid.iter().for_each(|&i| in_valid[i] = true);
        let train: Vec<usize> = (0..n).filter(|&i| !in_valid[i]).collect();

        let mut x_train = features.select(&train);
        let mut x_valid = features.select(valid);
        if opts.standardize_features {
            let scaler = Standardizer::fit(&x_train)?;
            x_train = scaler.apply(&x_train)?;
            x_valid = scaler.apply(&x_valid)?;
        }
        let mlp = MlpConfig {
            seed: opts
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(k as u64 + 1),
            ..opts.mlp.clone()
        };
        let truth = targets.select(valid);
        let predicted = match targets.select(&train) {
            Targets::Values(y) => {
                let scaler = Standardizer::fit_values(&y)?;
                let net = Mlp::fit(&x_train, &Targets::Values(scaler.apply_values(&y)), &mlp)?;
                match net.predict(&x_valid)? {
                    Targets::Values(p) => Targets::Values(scaler.invert_values(&p)),
                    other => other,
                }
            }
            classes => Mlp::fit(&x_train, &classes, &mlp)?.predict(&x_valid)?,
        };
        results.push(FoldResult {
            fold: k + 1,
            train_size: train.len(),
            valid_size: valid.len(),
            metrics: compute_metrics(&predicted, &truth)?,
        });
    }

    let names: Vec<&'static str> = results[0]
        .metrics
        .named()
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    let summary = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let values = results.iter().map(|r| r.metrics.named()[j].1).collect();
            MetricSummary::from_values(name, values)
        })
        .collect();
    Ok(EvalReport {
        task: targets.task(),
        representation: String::new(),
        samples: n,
        folds: results,
        summary,
        notes: Vec::new(),
    })
}
