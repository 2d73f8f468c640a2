//! Winner/loser representation learning.
//!
//! Every team owns two unit-norm rows: a winner representation in `phi` and a
//! loser representation in `psi`. A decided match pulls the winner's `phi`
//! row toward the loser's `psi` row; a draw pulls both `phi` rows together.
//! Each term is scaled by `s / x_max` so older seasons count less.
//!
//! Training runs mini-batch Adam over touched rows only and renormalizes
//! exactly those rows after every step.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::match_data::{Dataset, MatchQuad, TeamId, TeamRegistry};

/// Which of the two embedding matrices a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Phi,
    Psi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    phi: Vec<f64>,
    psi: Vec<f64>,
    delta: usize,
    x_max: u32,
    registry: TeamRegistry,
}

impl EmbeddingModel {
    /// Assembles a model from row-major matrices. Rows are taken as given.
    pub fn from_parts(
        registry: TeamRegistry,
        delta: usize,
        x_max: u32,
        phi: Vec<f64>,
        psi: Vec<f64>,
    ) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidConfig("delta must be >= 1".into()));
        }
        if x_max == 0 {
            return Err(Error::InvalidConfig("x_max must be >= 1".into()));
        }
        let expected = registry.len() * delta;
        for actual in [phi.len(), psi.len()] {
            if actual != expected {
                return Err(Error::DimensionMismatch { expected, actual });
            }
        }
        Ok(Self {
            phi,
            psi,
            delta,
            x_max,
            registry,
        })
    }

    /// Replaces the registry and season horizon. The team count must match.
    pub fn bind(mut self, registry: TeamRegistry, x_max: u32) -> Result<Self> {
        if registry.len() != self.num_teams() {
            return Err(Error::DimensionMismatch {
                expected: self.num_teams(),
                actual: registry.len(),
            });
        }
        if x_max == 0 {
            return Err(Error::InvalidConfig("x_max must be >= 1".into()));
        }
        self.registry = registry;
        self.x_max = x_max;
        Ok(self)
    }

    pub fn num_teams(&self) -> usize {
        self.phi.len() / self.delta
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    pub fn registry(&self) -> &TeamRegistry {
        &self.registry
    }

    pub fn check(&self, id: TeamId) -> Result<()> {
        if id.index() < self.num_teams() {
            Ok(())
        } else {
            Err(Error::TeamOutOfRange(id.get() as usize))
        }
    }

    pub fn row(&self, factor: Factor, index: usize) -> &[f64] {
        let range = index * self.delta..(index + 1) * self.delta;
        match factor {
            Factor::Phi => &self.phi[range],
            Factor::Psi => &self.psi[range],
        }
    }

    fn row_mut(&mut self, factor: Factor, index: usize) -> &mut [f64] {
        let range = index * self.delta..(index + 1) * self.delta;
        match factor {
            Factor::Phi => &mut self.phi[range],
            Factor::Psi => &mut self.psi[range],
        }
    }

    /// Winner representation of `id`. Panics on an out-of-range id.
    pub fn phi(&self, id: TeamId) -> &[f64] {
        self.row(Factor::Phi, id.index())
    }

    /// Loser representation of `id`. Panics on an out-of-range id.
    pub fn psi(&self, id: TeamId) -> &[f64] {
        self.row(Factor::Psi, id.index())
    }

    pub fn phi_matrix(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_matrix(&self) -> &[f64] {
        &self.psi
    }

    /// Season weight `s / x_max`.
    pub fn season_weight(&self, season: u32) -> f64 {
        f64::from(season) / f64::from(self.x_max)
    }
}

pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn normalize(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        row.iter_mut().for_each(|v| *v /= norm);
    } else {
        row.fill(0.0);
        row[0] = 1.0;
    }
}

/// Draws both matrices i.i.d. from N(0, 1) and scales each row to unit norm.
///
/// The returned model carries placeholder names `#1..#m` and `x_max = 1`;
/// use [`EmbeddingModel::bind`] to attach a real registry.
pub fn init_model(m: usize, delta: usize, seed: u64) -> Result<EmbeddingModel> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 teams, got {m}"
        )));
    }
    if delta < 1 {
        return Err(Error::InvalidConfig("delta must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<f64> {
        let mut values: Vec<f64> = (0..m * delta)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        values.chunks_mut(delta).for_each(normalize);
        values
    };
    let phi = draw();
    let psi = draw();
    let registry = TeamRegistry::from_names((1..=m).map(|i| format!("#{i}")))?;
    EmbeddingModel::from_parts(registry, delta, 1, phi, psi)
}

/// Weighted loss of a single quadruple.
pub fn sample_loss(model: &EmbeddingModel, q: &MatchQuad) -> Result<f64> {
    model.check(q.a)?;
    model.check(q.b)?;
    check_season(model, q.season)?;
    let target = if q.draw {
        model.phi(q.b)
    } else {
        model.psi(q.b)
    };
    Ok(model.season_weight(q.season) * squared_distance(model.phi(q.a), target))
}

fn check_season(model: &EmbeddingModel, season: u32) -> Result<()> {
    if season == 0 || season > model.x_max {
        return Err(Error::InvalidArgument(format!(
            "season {season} outside 1..={}",
            model.x_max
        )));
    }
    Ok(())
}

/// Sparse gradient: only rows touched by a batch are present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientUpdate {
    rows: BTreeMap<(Factor, usize), Vec<f64>>,
}

impl GradientUpdate {
    pub fn get(&self, factor: Factor, index: usize) -> Option<&[f64]> {
        self.rows.get(&(factor, index)).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Factor, usize, &[f64])> {
        self.rows.iter().map(|(&(f, i), g)| (f, i, g.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn accumulate(&mut self, factor: Factor, index: usize, delta: usize, scale: f64, diff: &[f64]) {
        let entry = self
            .rows
            .entry((factor, index))
            .or_insert_with(|| vec![0.0; delta]);
        entry
            .iter_mut()
            .zip(diff)
            .for_each(|(g, d)| *g += scale * d);
    }
}

/// Batch loss and its analytic gradient.
///
/// The loss is the sum of [`sample_loss`] over the batch plus
/// `weight_decay * ||row||^2` for every distinct row the batch touches.
pub fn batch_gradients(
    model: &EmbeddingModel,
    batch: &[MatchQuad],
    weight_decay: f64,
) -> Result<(f64, GradientUpdate)> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("batch is empty".into()));
    }
    let delta = model.delta;
    let mut grads = GradientUpdate::default();
    let mut loss = 0.0;
    let mut diff = vec![0.0; delta];
    for q in batch {
        model.check(q.a)?;
        model.check(q.b)?;
        check_season(model, q.season)?;
        let w = model.season_weight(q.season);
        let (a, b) = (q.a.index(), q.b.index());
        let other = if q.draw { Factor::Phi } else { Factor::Psi };
        let x = model.row(Factor::Phi, a);
        let y = model.row(other, b);
        let mut dist = 0.0;
        for ((d, xi), yi) in diff.iter_mut().zip(x).zip(y) {
            *d = xi - yi;
            dist += *d * *d;
        }
        loss += w * dist;
        grads.accumulate(Factor::Phi, a, delta, 2.0 * w, &diff);
        grads.accumulate(other, b, delta, -2.0 * w, &diff);
    }
    if weight_decay > 0.0 {
        for (&(factor, index), g) in grads.rows.iter_mut() {
            let row = model.row(factor, index);
            loss += weight_decay * row.iter().map(|v| v * v).sum::<f64>();
            g.iter_mut()
                .zip(row)
                .for_each(|(gi, r)| *gi += 2.0 * weight_decay * r);
        }
    }
    Ok((loss, grads))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub delta: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub seed: u64,
    /// Season horizon used for weighting. `None` takes the dataset's newest
    /// season; an explicit value must not be older than it.
    pub x_max: Option<u32>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            delta: 16,
            batch_size: 128,
            learning_rate: 1e-4,
            epochs: 40,
            weight_decay: 1e-6,
            seed: 7,
            x_max: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.delta < 1 {
            return fail("delta must be >= 1");
        }
        if self.batch_size < 1 {
            return fail("batch_size must be >= 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be >= 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning_rate must be a positive finite number");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return fail("weight_decay must be >= 0");
        }
        if self.x_max == Some(0) {
            return fail("x_max must be >= 1");
        }
        Ok(())
    }
}

/// Adam moments for both matrices. Rows that never receive a gradient keep
/// zero moments and are never stepped.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_phi: Vec<f64>,
    v_phi: Vec<f64>,
    m_psi: Vec<f64>,
    v_psi: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(model: &EmbeddingModel) -> Self {
        let n = model.phi.len();
        Self {
            m_phi: vec![0.0; n],
            v_phi: vec![0.0; n],
            m_psi: vec![0.0; n],
            v_psi: vec![0.0; n],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn timestep(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam step on the rows present in `grads`, each
    /// renormalized to unit length afterwards.
    pub fn step(&mut self, model: &mut EmbeddingModel, grads: &GradientUpdate, learning_rate: f64) {
        self.t += 1;
        let t = self.t as i32;
        let bias1 = 1.0 - self.beta1.powi(t);
        let bias2 = 1.0 - self.beta2.powi(t);
        let delta = model.delta;
        for (factor, index, g) in grads.iter() {
            let range = index * delta..(index + 1) * delta;
            let (m, v) = match factor {
                Factor::Phi => (&mut self.m_phi[range.clone()], &mut self.v_phi[range]),
                Factor::Psi => (&mut self.m_psi[range.clone()], &mut self.v_psi[range]),
            };
            let row = model.row_mut(factor, index);
            for k in 0..delta {
                m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g[k] * g[k];
                let m_hat = m[k] / bias1;
                let v_hat = v[k] / bias2;
                row[k] -= learning_rate * m_hat / (v_hat.sqrt() + self.eps);
            }
            normalize(row);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
}

/// Stateful training loop, exposed so callers can observe individual batches.
#[derive(Debug)]
pub struct Trainer<'a> {
    quads: Vec<MatchQuad>,
    cfg: &'a TrainConfig,
    model: EmbeddingModel,
    adam: AdamState,
    rng: ChaCha8Rng,
    epoch: usize,
}

impl<'a> Trainer<'a> {
    pub fn new(ds: &Dataset, cfg: &'a TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if ds.quads.is_empty() {
            return Err(Error::EmptyInput);
        }
        let x_max = match cfg.x_max {
            Some(x) if x < ds.x_max => {
                return Err(Error::InvalidConfig(format!(
                    "x_max {x} is older than the newest season {}",
                    ds.x_max
                )))
            }
            Some(x) => x,
            None => ds.x_max,
        };
        let model =
            init_model(ds.registry.len(), cfg.delta, cfg.seed)?.bind(ds.registry.clone(), x_max)?;
        for q in &ds.quads {
            model.check(q.a)?;
            model.check(q.b)?;
            check_season(&model, q.season)?;
        }
        let adam = AdamState::new(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1);
        Ok(Self {
            quads: ds.quads.clone(),
            cfg,
            model,
            adam,
            rng,
            epoch: 0,
        })
    }

    pub fn model(&self) -> &EmbeddingModel {
        &self.model
    }

    pub fn into_model(self) -> EmbeddingModel {
        self.model
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    /// Shuffles the dataset with the trainer's generator and splits it into
    /// batches; the last batch may be short.
    pub fn next_epoch_batches(&mut self) -> Vec<Vec<MatchQuad>> {
        self.quads.shuffle(&mut self.rng);
        self.quads
            .chunks(self.cfg.batch_size)
            .map(<[MatchQuad]>::to_vec)
            .collect()
    }

    /// Applies one Adam step for `batch` and returns the batch loss measured
    /// before the step.
    pub fn step(&mut self, batch: &[MatchQuad]) -> Result<f64> {
        let (loss, grads) = batch_gradients(&self.model, batch, self.cfg.weight_decay)?;
        self.adam
            .step(&mut self.model, &grads, self.cfg.learning_rate);
        Ok(loss)
    }

    pub fn run_epoch(&mut self) -> Result<EpochStats> {
        let batches = self.next_epoch_batches();
        let mut total = 0.0;
        for batch in &batches {
            total += self.step(batch)?;
        }
        self.epoch += 1;
        Ok(EpochStats {
            epoch: self.epoch,
            mean_loss: total / self.quads.len() as f64,
        })
    }
}

/// Trains a model from scratch. `progress` receives one record per epoch.
pub fn train(
    ds: &Dataset,
    cfg: &TrainConfig,
    mut progress: impl FnMut(EpochStats),
) -> Result<EmbeddingModel> {
    let mut trainer = Trainer::new(ds, cfg)?;
    for _ in 0..cfg.epochs {
        progress(trainer.run_epoch()?);
    }
    Ok(trainer.into_model())
}
