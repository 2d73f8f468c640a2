//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use teamvec_core::match_data::{to_quads, Competition, Dataset};
use teamvec_core::match_data::{MatchQuad, RawMatch, TeamId, TeamRegistry};

/// Batch objective recomputed from dense row-major matrices.
pub fn reference_batch_loss(
    phi: &[f64],
    psi: &[f64],
    delta: usize,
    x_max: u32,
    batch: &[MatchQuad],
    weight_decay: f64,
) -> f64 {
    let row = |m: &[f64], i: usize| m[i * delta..(i + 1) * delta].to_vec();
    let dist =
        |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum() };
    let mut loss = 0.0;
    let mut touched_phi = std::collections::BTreeSet::new();
    let mut touched_psi = std::collections::BTreeSet::new();
    for q in batch {
        let w = q.season as f64 / x_max as f64;
        let (a, b) = (q.a.index(), q.b.index());
        let d = if q.draw { 1.0 } else { 0.0 };
        loss += w
            * (d * dist(&row(phi, a), &row(phi, b)) + (1.0 - d) * dist(&row(phi, a), &row(psi, b)));
        touched_phi.insert(a);
        if q.draw {
            touched_phi.insert(b);
        } else {
            touched_psi.insert(b);
        }
    }
    for &i in &touched_phi {
        loss += weight_decay * row(phi, i).iter().map(|v| v * v).sum::<f64>();
    }
    for &i in &touched_psi {
        loss += weight_decay * row(psi, i).iter().map(|v| v * v).sum::<f64>();
    }
    loss
}

/// Rows a batch should touch: `(is_psi, index)`.
pub fn touched_rows(batch: &[MatchQuad]) -> std::collections::BTreeSet<(bool, usize)> {
    let mut set = std::collections::BTreeSet::new();
    for q in batch {
        set.insert((false, q.a.index()));
        set.insert((!q.draw, q.b.index()));
    }
    set
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let less = values.iter().filter(|&&v| v < values[i]).count() as f64;
            let equal = values.iter().filter(|&&v| v == values[i]).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn brute_rmse(p: &[f64], t: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += (p[i] - t[i]) * (p[i] - t[i]);
    }
    (s / p.len() as f64).sqrt()
}

pub fn brute_mae(p: &[f64], t: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += (p[i] - t[i]).abs();
    }
    s / p.len() as f64
}

/// Median by rank counting rather than sorting.
pub fn brute_median_ae(p: &[f64], t: &[f64]) -> f64 {
    let e: Vec<f64> = p.iter().zip(t).map(|(a, b)| (a - b).abs()).collect();
    let n = e.len();
    let kth = |k: usize| -> f64 {
        // element with exactly k elements strictly below it (accounting for ties)
        for &v in &e {
            let below = e.iter().filter(|&&w| w < v).count();
            let equal = e.iter().filter(|&&w| w == v).count();
            if below <= k && k < below + equal {
                return v;
            }
        }
        unreachable!()
    };
    if n % 2 == 1 {
        kth(n / 2)
    } else {
        (kth(n / 2 - 1) + kth(n / 2)) / 2.0
    }
}

/// Micro-F1 and macro-F1 from an explicit confusion matrix.
#[allow(clippy::needless_range_loop)]
pub fn brute_f1(pred: &[usize], truth: &[usize]) -> (f64, f64) {
    let k = pred.iter().chain(truth).max().copied().unwrap_or(0) + 1;
    let mut cm = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        cm[t][p] += 1;
    }
    let total: usize = cm.iter().flatten().sum();
    let diag: usize = (0..k).map(|c| cm[c][c]).sum();
    let mut f1s = Vec::new();
    for c in 0..k {
        let row: usize = cm[c].iter().sum();
        let col: usize = (0..k).map(|r| cm[r][c]).sum();
        if row == 0 && col == 0 {
            continue;
        }
        let tp = cm[c][c] as f64;
        let precision = if col == 0 { 0.0 } else { tp / col as f64 };
        let recall = if row == 0 { 0.0 } else { tp / row as f64 };
        f1s.push(if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        });
    }
    (
        diag as f64 / total as f64,
        f1s.iter().sum::<f64>() / f1s.len() as f64,
    )
}

/// Builds a dataset from `(season, home, away, home_goals, away_goals)` rows.
pub fn dataset_from(rows: &[(u32, &str, &str, u32, u32)]) -> Dataset {
    let mut reg = TeamRegistry::new();
    let raw: Vec<RawMatch> = rows
        .iter()
        .map(|&(season, h, a, hg, ag)| RawMatch {
            home: reg.intern(h),
            away: reg.intern(a),
            home_goals: hg,
            away_goals: ag,
            season_label: format!("{}/{}", 2000 + season, 2001 + season),
            season_index: season,
            competition: Competition::NationalLeague,
        })
        .collect();
    to_quads(raw, reg).unwrap()
}

pub fn id(ds: &Dataset, name: &str) -> TeamId {
    ds.registry.id(name).unwrap()
}
