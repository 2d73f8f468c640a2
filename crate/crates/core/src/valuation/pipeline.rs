use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    cross_validate, quartile_labels, steve_features, CvOptions, EvalReport, FeatureMatrix,
    MlpConfig, Targets, Task, ValueTable,
};
use crate::baseline::{
    cat_feature_names, cat_features, sum_features, RatioMode, SeasonStatsVector,
};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::match_data::{Dataset, TeamId};
use crate::trainer::{train, EmbeddingModel, TrainConfig};

/// Team representation fed to the valuation network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// Learned vectors; `width` is the concatenated size `2 * delta`.
    Steve { width: usize },
    /// Count statistics of the newest season.
    SeasonStats,
    /// Newest `x` seasons concatenated.
    Cat(u32),
    /// Newest `x` seasons summed.
    Sum(u32),
}

impl Representation {
    pub fn is_count_based(self) -> bool {
        !matches!(self, Representation::Steve { .. })
    }

    /// Embedding size needed for a learned representation.
    pub fn delta(self) -> Option<usize> {
        match self {
            Representation::Steve { width } => Some(width / 2),
            _ => None,
        }
    }

    pub fn width(self) -> usize {
        match self {
            Representation::Steve { width } => width,
            Representation::SeasonStats | Representation::Sum(_) => 18,
            Representation::Cat(x) => 18 * x as usize,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Steve { width } => write!(f, "steve-{width}"),
            Representation::SeasonStats => f.write_str("season-stats"),
            Representation::Cat(x) => write!(f, "cat-{x}"),
            Representation::Sum(x) => write!(f, "sum-{x}"),
        }
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "unknown representation {s:?} (expected steve-<even width>, season-stats, cat-<x> or sum-<x>)"
            ))
        };
        if s == "season-stats" {
            return Ok(Representation::SeasonStats);
        }
        let (kind, n) = s.split_once('-').ok_or_else(bad)?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        match kind {
            "steve" if n >= 2 && n.is_multiple_of(2) => Ok(Representation::Steve { width: n as usize }),
            "cat" if n >= 1 => Ok(Representation::Cat(n)),
            "sum" if n >= 1 => Ok(Representation::Sum(n)),
            _ => Err(bad()),
        }
    }
}

/// Column names for exported feature matrices.
pub fn feature_names(rep: Representation) -> Vec<String> {
    match rep {
        Representation::Steve { width } => {
            let delta = width / 2;
            (0..delta)
                .map(|k| format!("phi_{k}"))
                .chain((0..delta).map(|k| format!("psi_{k}")))
                .collect()
        }
        Representation::SeasonStats | Representation::Sum(_) => SeasonStatsVector::feature_names(),
        Representation::Cat(x) => cat_feature_names(x),
    }
}

/// Feature rows for `teams`. Learned representations train a model with
/// `train_cfg` (its `delta` overridden) and return it alongside.
pub fn build_features(
    ds: &Dataset,
    teams: &[TeamId],
    rep: Representation,
    train_cfg: &TrainConfig,
    ratio_mode: RatioMode,
) -> Result<(FeatureMatrix, Option<EmbeddingModel>)> {
    let newest = ds.x_max;
    let rows = |f: &dyn Fn(TeamId) -> Result<Vec<f64>>| -> Result<FeatureMatrix> {
        let rows = teams.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        let mut m = FeatureMatrix::from_rows(&rows)?;
        if rows.is_empty() {
            m = FeatureMatrix::new(0, rep.width(), Vec::new())?;
        }
        Ok(m)
    };
    match rep {
        Representation::Steve { width } => {
            let cfg = TrainConfig {
                delta: width / 2,
                ..train_cfg.clone()
            };
            let model = train(ds, &cfg, |_| {})?;
            Ok((steve_features(&model, teams)?, Some(model)))
        }
        Representation::SeasonStats => Ok((
            rows(&|t| cat_features(&ds.raw, &ds.registry, t, newest, 1))?,
            None,
        )),
        Representation::Cat(x) => Ok((
            rows(&|t| cat_features(&ds.raw, &ds.registry, t, newest, x))?,
            None,
        )),
        Representation::Sum(x) => Ok((
            rows(&|t| {
                Ok(
                    sum_features(&ds.raw, &ds.registry, t, newest, x, ratio_mode)?
                        .0
                        .to_vec(),
                )
            })?,
            None,
        )),
    }
}

/// Everything that parameterizes one valuation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSetup {
    pub representation: Representation,
    pub task: Task,
    /// Root seed; training and fold assignment use derived sub-seeds.
    pub seed: u64,
    pub train: TrainConfig,
    pub mlp: MlpConfig,
    pub ratio_mode: RatioMode,
}

impl EvalSetup {
    pub fn new(representation: Representation, task: Task, seed: u64) -> Self {
        Self {
            representation,
            task,
            seed,
            train: TrainConfig::default(),
            mlp: MlpConfig::default(),
            ratio_mode: RatioMode::default(),
        }
    }
}

/// Runs the full experiment over every team in the dataset.
pub fn evaluate(ds: &Dataset, values: &ValueTable, setup: &EvalSetup) -> Result<EvalReport> {
    let teams: Vec<TeamId> = ds.registry.ids().collect();
    let missing: Vec<String> = ds
        .registry
        .names()
        .iter()
        .filter(|n| values.get(n).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingValues(missing));
    }
    let team_values: Vec<f64> = ds
        .registry
        .names()
        .iter()
        .map(|n| values.get(n).unwrap_or_default())
        .collect();

    let train_cfg = TrainConfig {
        seed: derive_seed(setup.seed, 1),
        ..setup.train.clone()
    };
    let (features, _) = build_features(
        ds,
        &teams,
        setup.representation,
        &train_cfg,
        setup.ratio_mode,
    )?;
    let targets = match setup.task {
        Task::Regression => Targets::Values(team_values),
        Task::Classification => Targets::Classes(quartile_labels(&team_values)?),
    };
    let opts = CvOptions {
        standardize_features: setup.representation.is_count_based(),
        seed: derive_seed(setup.seed, 2),
        mlp: setup.mlp.clone(),
    };
    let mut report = cross_validate(&features, &targets, &opts)?;
    report.representation = setup.representation.to_string();
    report.notes = match setup.task {
        Task::Regression => {
            vec!["MMAE is the mean over folds of the per-fold median absolute error".into()]
        }
        Task::Classification => {
            vec!["quartile classes computed once over all teams before fold assignment".into()]
        }
    };
    if let Representation::Sum(_) = setup.representation {
        report
            .notes
            .push(format!("sum ratio mode: {:?}", setup.ratio_mode));
    }
    Ok(report)
}
