//! Fully connected network with two ReLU hidden layers (50 and 20 units).
//!
//! Constants follow the usual toolkit defaults: Glorot-uniform init, Adam
//! with lr 1e-3, L2 penalty 1e-4 scaled by the batch size, 200 epochs and
//! batches of `min(200, n)`. Regression uses a linear output with half mean
//! squared error; classification a softmax over [`NUM_CLASSES`] outputs with
//! mean cross-entropy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, Targets, Task};
use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 4;
const HIDDEN: [usize; 2] = [50, 20];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub l2: f64,
    pub epochs: usize,
    pub max_batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            l2: 1e-4,
            epochs: 200,
            max_batch_size: 200,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn hidden_sizes(&self) -> [usize; 2] {
        HIDDEN
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Offset of the `inputs x outputs` row-major weight block.
    w: usize,
    /// Offset of the bias vector.
    b: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    task: Task,
    layers: Vec<Layer>,
    params: Vec<f64>,
}

impl Mlp {
    /// Randomly initialized network for `input_dim` features.
    pub fn new(input_dim: usize, task: Task, seed: u64) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument(
                "network needs at least one input".into(),
            ));
        }
        let output = match task {
            Task::Regression => 1,
            Task::Classification => NUM_CLASSES,
        };
        let sizes = [input_dim, HIDDEN[0], HIDDEN[1], output];
        let mut layers = Vec::with_capacity(3);
        let mut offset = 0;
        for pair in sizes.windows(2) {
            let (inputs, outputs) = (pair[0], pair[1]);
            layers.push(Layer {
                inputs,
                outputs,
                w: offset,
                b: offset + inputs * outputs,
            });
            offset += inputs * outputs + outputs;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; offset];
        for l in &layers {
            let bound = (6.0 / (l.inputs + l.outputs) as f64).sqrt();
            for p in &mut params[l.w..l.b + l.outputs] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(Self {
            task,
            layers,
            params,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                actual: params.len(),
            });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    /// Pre-activations of every layer, row-major `n x outputs` each.
    fn forward(&self, x: &FeatureMatrix) -> Vec<Vec<f64>> {
        let n = x.rows();
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for (k, l) in self.layers.iter().enumerate() {
            let w = &self.params[l.w..l.b];
            let b = &self.params[l.b..l.b + l.outputs];
            let mut z = Vec::with_capacity(n * l.outputs);
            for i in 0..n {
                z.extend_from_slice(b);
                let zi = &mut z[i * l.outputs..];
                let input: &[f64] = if k == 0 {
                    x.row(i)
                } else {
                    &outs[k - 1][i * l.inputs..(i + 1) * l.inputs]
                };
                for (j, &a) in input.iter().enumerate() {
                    let a = if k == 0 { a } else { a.max(0.0) };
                    if a == 0.0 {
                        continue;
                    }
                    for (zo, wv) in zi.iter_mut().zip(&w[j * l.outputs..(j + 1) * l.outputs]) {
                        *zo += a * wv;
                    }
                }
            }
            outs.push(z);
        }
        outs
    }

    fn check_input(&self, x: &FeatureMatrix) -> Result<()> {
        if x.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.cols(),
            });
        }
        Ok(())
    }

    fn check_targets(&self, x: &FeatureMatrix, y: &Targets) -> Result<()> {
        self.check_input(x)?;
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                actual: y.len(),
            });
        }
        if y.task() != self.task {
            return Err(Error::InvalidArgument(
                "targets do not match the network task".into(),
            ));
        }
        if let Targets::Classes(c) = y {
            if let Some(bad) = c.iter().find(|&&c| c >= NUM_CLASSES) {
                return Err(Error::InvalidArgument(format!(
                    "class label {bad} out of range"
                )));
            }
        }
        Ok(())
    }

    /// Penalized loss on `(x, y)` and its gradient with respect to
    /// [`Mlp::params`]. `l2` is divided by the number of samples.
    pub fn loss_and_gradient(
        &self,
        x: &FeatureMatrix,
        y: &Targets,
        l2: f64,
    ) -> Result<(f64, Vec<f64>)> {
        self.check_targets(x, y)?;
        let n = x.rows();
        if n == 0 {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let nf = n as f64;
        let pre = self.forward(x);
        let last = *self.layers.last().expect("three layers");
        let out = &pre[pre.len() - 1];

        let mut loss = 0.0;
        let mut delta = vec![0.0; n * last.outputs];
        match y {
            Targets::Values(t) => {
                for i in 0..n {
                    let e = out[i] - t[i];
                    loss += e * e;
                    delta[i] = e / nf;
                }
                loss /= 2.0 * nf;
            }
            Targets::Classes(c) => {
                for i in 0..n {
                    let z = &out[i * NUM_CLASSES..(i + 1) * NUM_CLASSES];
                    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
                    let log_norm = max + sum.ln();
                    loss -= z[c[i]] - log_norm;
                    for k in 0..NUM_CLASSES {
                        let p = (z[k] - log_norm).exp();
                        delta[i * NUM_CLASSES + k] = (p - f64::from(u8::from(k == c[i]))) / nf;
                    }
                }
                loss /= nf;
            }
        }

        let mut grad = vec![0.0; self.params.len()];
        for (k, l) in self.layers.iter().enumerate().rev() {
            let w = &self.params[l.w..l.b];
            loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>() / nf;
            for (g, wv) in grad[l.w..l.b].iter_mut().zip(w) {
                *g += l2 * wv / nf;
            }
            let mut prev_delta = if k > 0 {
                vec![0.0; n * l.inputs]
            } else {
                Vec::new()
            };
            for i in 0..n {
                let d = &delta[i * l.outputs..(i + 1) * l.outputs];
                for (gb, dv) in grad[l.b..l.b + l.outputs].iter_mut().zip(d) {
                    *gb += dv;
                }
                for j in 0..l.inputs {
                    let a = if k == 0 {
                        x.row(i)[j]
                    } else {
                        pre[k - 1][i * l.inputs + j].max(0.0)
                    };
                    let wrow = &w[j * l.outputs..(j + 1) * l.outputs];
                    if a != 0.0 {
                        let grow = &mut grad[l.w + j * l.outputs..l.w + (j + 1) * l.outputs];
                        for (g, dv) in grow.iter_mut().zip(d) {
                            *g += a * dv;
                        }
                    }
                    if k > 0 && pre[k - 1][i * l.inputs + j] > 0.0 {
                        prev_delta[i * l.inputs + j] =
                            wrow.iter().zip(d).map(|(wv, dv)| wv * dv).sum();
                    }
                }
            }
            delta = prev_delta;
        }
        Ok((loss, grad))
    }

    /// Raw network outputs: the regression value, or class probabilities.
    pub fn predict_raw(&self, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_input(x)?;
        let pre = self.forward(x);
        let out = &pre[pre.len() - 1];
        let width = self.layers.last().expect("three layers").outputs;
        Ok(out
            .chunks(width)
            .map(|z| match self.task {
                Task::Regression => z.to_vec(),
                Task::Classification => {
                    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
                    let s: f64 = e.iter().sum();
                    e.into_iter().map(|v| v / s).collect()
                }
            })
            .collect())
    }

    /// Regression values or argmax classes.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        let raw = self.predict_raw(x)?;
        Ok(match self.task {
            Task::Regression => Targets::Values(raw.into_iter().map(|r| r[0]).collect()),
            Task::Classification => Targets::Classes(
                raw.into_iter()
                    .map(|p| {
                        p.iter()
                            .enumerate()
                            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| {
                                if v > best.1 {
                                    (k, v)
                                } else {
                                    best
                                }
                            })
                            .0
                    })
                    .collect(),
            ),
        })
    }

    /// Trains a fresh network on `(x, y)`.
    pub fn fit(x: &FeatureMatrix, y: &Targets, cfg: &MlpConfig) -> Result<Self> {
        let mut net = Mlp::new(x.cols(), y.task(), cfg.seed)?;
        net.check_targets(x, y)?;
        let n = x.rows();
        if n == 0 {
            return Err(Error::InvalidArgument("no training samples".into()));
        }
        if cfg.epochs == 0 || cfg.max_batch_size == 0 {
            return Err(Error::InvalidConfig(
                "epochs and batch size must be >= 1".into(),
            ));
        }
        let batch = cfg.max_batch_size.min(n);
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1);
        let mut m = vec![0.0; net.params.len()];
        let mut v = vec![0.0; net.params.len()];
        let mut t = 0i32;
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for idx in order.chunks(batch) {
                let (_, g) = net.loss_and_gradient(&x.select(idx), &y.select(idx), cfg.l2)?;
                t += 1;
                let step = cfg.learning_rate * (1.0 - cfg.beta2.powi(t)).sqrt()
                    / (1.0 - cfg.beta1.powi(t));
                for (((p, gi), mi), vi) in net.params.iter_mut().zip(&g).zip(&mut m).zip(&mut v) {
                    *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
                    *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
                    *p -= step * *mi / (vi.sqrt() + cfg.eps);
                }
            }
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{classification_metrics, regression_metrics};

    fn fd_check(task: Task, y: Targets) {
        let x = FeatureMatrix::from_rows(&[
            vec![0.3, -1.2, 0.5],
            vec![1.1, 0.4, -0.7],
            vec![-0.2, 0.9, 1.3],
            vec![0.8, -0.5, -1.0],
            vec![-1.4, 0.1, 0.2],
        ])
        .unwrap();
        let net = Mlp::new(3, task, 11).unwrap();
        let l2 = 1e-2;
        let (_, grad) = net.loss_and_gradient(&x, &y, l2).unwrap();
        let h = 1e-6;
        let mut probe = net.clone();
        let mut worst: f64 = 0.0;
        for k in 0..net.params().len() {
            let mut p = net.params().to_vec();
            p[k] += h;
            probe.set_params(&p).unwrap();
            let up = probe.loss_and_gradient(&x, &y, l2).unwrap().0;
            p[k] -= 2.0 * h;
            probe.set_params(&p).unwrap();
            let down = probe.loss_and_gradient(&x, &y, l2).unwrap().0;
            let numeric = (up - down) / (2.0 * h);
            let denom = grad[k].abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((grad[k] - numeric).abs() / denom);
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn regression_gradient_matches_finite_differences() {
        fd_check(
            Task::Regression,
            Targets::Values(vec![0.5, -1.0, 2.0, 0.0, 1.5]),
        );
    }

    #[test]
    fn classification_gradient_matches_finite_differences() {
        fd_check(Task::Classification, Targets::Classes(vec![0, 3, 1, 2, 1]));
    }

    #[test]
    fn learns_linear_function() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + 2.0 * i as f64 / 199.0).collect();
        let train_idx: Vec<usize> = (0..200).filter(|i| i % 5 != 0).collect();
        let valid_idx: Vec<usize> = (0..200).filter(|i| i % 5 == 0).collect();
        let x = FeatureMatrix::new(200, 1, xs.clone()).unwrap();
        let y = Targets::Values(xs.iter().map(|v| 2.0 * v).collect());
        let net = Mlp::fit(
            &x.select(&train_idx),
            &y.select(&train_idx),
            &MlpConfig::default(),
        )
        .unwrap();
        let Targets::Values(pred) = net.predict(&x.select(&valid_idx)).unwrap() else {
            unreachable!()
        };
        let Targets::Values(truth) = y.select(&valid_idx) else {
            unreachable!()
        };
        let mae = regression_metrics(&pred, &truth).unwrap().mae;
        assert!(mae < 0.1, "validation MAE {mae}");
    }

    #[test]
    fn separates_two_classes() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let side = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![
                    side * (1.0 + (i % 7) as f64 * 0.1),
                    0.3 * ((i % 5) as f64 - 2.0),
                ]
            })
            .collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let y = Targets::Classes(labels.clone());
        let net = Mlp::fit(&x, &y, &MlpConfig::default()).unwrap();
        let Targets::Classes(pred) = net.predict(&x).unwrap() else {
            unreachable!()
        };
        assert_eq!(
            classification_metrics(&pred, &labels).unwrap().micro_f1,
            1.0
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let x =
            FeatureMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0], vec![3.0, -1.0]]).unwrap();
        let y = Targets::Values(vec![1.0, 0.0, 2.0]);
        let cfg = MlpConfig {
            seed: 5,
            epochs: 20,
            ..Default::default()
        };
        assert_eq!(
            Mlp::fit(&x, &y, &cfg).unwrap(),
            Mlp::fit(&x, &y, &cfg).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch() {
        let net = Mlp::new(3, Task::Regression, 0).unwrap();
        let x = FeatureMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(net.predict(&x).is_err());
        let x3 = FeatureMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(net
            .loss_and_gradient(&x3, &Targets::Values(vec![1.0, 2.0]), 0.0)
            .is_err());
        let cnet = Mlp::new(3, Task::Classification, 0).unwrap();
        assert!(cnet
            .loss_and_gradient(&x3, &Targets::Classes(vec![4]), 0.0)
            .is_err());
    }
}
