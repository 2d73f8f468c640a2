//! Similarity search and round-robin ranking over a trained model.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::match_data::TeamId;
use crate::trainer::{squared_distance, EmbeddingModel};

/// Squared distance between the winner representations of `a` and `b`.
pub fn winner_distance(model: &EmbeddingModel, a: TeamId, b: TeamId) -> Result<f64> {
    model.check(a)?;
    model.check(b)?;
    Ok(squared_distance(model.phi(a), model.phi(b)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub team: TeamId,
    pub name: String,
    pub distance: f64,
}

fn team_name(model: &EmbeddingModel, id: TeamId) -> &str {
    model.registry().name(id).unwrap_or("")
}

/// The `k` teams closest to `team` in winner space, nearest first. Equal
/// distances are ordered by team name.
pub fn most_similar(model: &EmbeddingModel, team: TeamId, k: usize) -> Result<Vec<Neighbor>> {
    model.check(team)?;
    let m = model.num_teams();
    if k < 1 || k > m - 1 {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={}, got {k}",
            m - 1
        )));
    }
    let query = model.phi(team);
    let mut all: Vec<Neighbor> = model
        .registry()
        .ids()
        .filter(|&id| id != team)
        .map(|id| Neighbor {
            team: id,
            name: team_name(model, id).to_owned(),
            distance: squared_distance(query, model.phi(id)),
        })
        .collect();
    all.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then_with(|| x.name.cmp(&y.name))
    });
    all.truncate(k);
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    AWins,
    BWins,
    Tie,
}

impl Outcome {
    pub fn mirrored(self) -> Self {
        match self {
            Outcome::AWins => Outcome::BWins,
            Outcome::BWins => Outcome::AWins,
            Outcome::Tie => Outcome::Tie,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadToHead {
    /// `||phi_a - psi_b||^2`
    pub alpha_score: f64,
    /// `||phi_b - psi_a||^2`
    pub beta_score: f64,
    pub outcome: Outcome,
}

/// Decides a hypothetical match: `a` wins when `b`'s loser row sits closer to
/// `a`'s winner row than the other way round.
pub fn head_to_head(model: &EmbeddingModel, a: TeamId, b: TeamId) -> Result<HeadToHead> {
    model.check(a)?;
    model.check(b)?;
    if a == b {
        return Err(Error::InvalidArgument("a team cannot play itself".into()));
    }
    let alpha_score = squared_distance(model.phi(a), model.psi(b));
    let beta_score = squared_distance(model.phi(b), model.psi(a));
    let outcome = match alpha_score.partial_cmp(&beta_score) {
        Some(Ordering::Less) => Outcome::AWins,
        Some(Ordering::Greater) => Outcome::BWins,
        _ => Outcome::Tie,
    };
    Ok(HeadToHead {
        alpha_score,
        beta_score,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub team: TeamId,
    pub name: String,
    pub victories: f64,
    pub rank: usize,
}

/// Single round-robin between `teams`; ties award half a victory to each side.
pub fn rank_teams(model: &EmbeddingModel, teams: &[TeamId]) -> Result<Vec<RankingEntry>> {
    if teams.len() < 2 {
        return Err(Error::InvalidArgument(
            "a tournament needs at least 2 teams".into(),
        ));
    }
    let mut seen = HashSet::new();
    for &t in teams {
        model.check(t)?;
        if !seen.insert(t) {
            return Err(Error::InvalidArgument(format!(
                "team {:?} listed twice",
                team_name(model, t)
            )));
        }
    }
    let mut victories = vec![0.0f64; teams.len()];
    for i in 0..teams.len() {
        for j in i + 1..teams.len() {
            match head_to_head(model, teams[i], teams[j])?.outcome {
                Outcome::AWins => victories[i] += 1.0,
                Outcome::BWins => victories[j] += 1.0,
                Outcome::Tie => {
                    victories[i] += 0.5;
                    victories[j] += 0.5;
                }
            }
        }
    }
    let mut entries: Vec<RankingEntry> = teams
        .iter()
        .zip(victories)
        .map(|(&team, victories)| RankingEntry {
            team,
            name: team_name(model, team).to_owned(),
            victories,
            rank: 0,
        })
        .collect();
    entries.sort_by(|x, y| {
        y.victories
            .total_cmp(&x.victories)
            .then_with(|| x.name.cmp(&y.name))
            .then_with(|| x.team.cmp(&y.team))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(entries)
}

/// Aligned plain-text table of neighbors.
pub fn render_neighbors(query: &str, neighbors: &[Neighbor]) -> String {
    let width = neighbors
        .iter()
        .map(|n| n.name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = format!("Most similar to {query}\n");
    let _ = writeln!(out, "{:>4}  {:<width$}  {:>10}", "#", "team", "distance");
    for (i, n) in neighbors.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:<width$}  {:>10.6}",
            i + 1,
            n.name,
            n.distance
        );
    }
    out
}

/// Aligned plain-text ranking table, strongest first.
pub fn render_ranking(entries: &[RankingEntry]) -> String {
    let width = entries
        .iter()
        .map(|e| e.name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:<width$}  {:>9}", "rank", "team", "victories");
    for e in entries {
        let _ = writeln!(out, "{:>4}  {:<width$}  {:>9}", e.rank, e.name, e.victories);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::match_data::TeamRegistry;

    fn model(names: &[&str], phi: &[[f64; 2]], psi: &[[f64; 2]]) -> EmbeddingModel {
        let reg = TeamRegistry::from_names(names.iter().copied()).unwrap();
        EmbeddingModel::from_parts(reg, 2, 1, phi.concat(), psi.concat()).unwrap()
    }

    fn tid(v: u32) -> TeamId {
        TeamId::new(v).unwrap()
    }

    #[test]
    fn winner_distance_hand_values() {
        let m = model(
            &["A", "B"],
            &[[1.0, 0.0], [0.0, 1.0]],
            &[[0.0, 0.0], [0.0, 0.0]],
        );
        assert_eq!(winner_distance(&m, tid(1), tid(1)).unwrap(), 0.0);
        assert_eq!(winner_distance(&m, tid(1), tid(2)).unwrap(), 2.0);
        assert_eq!(winner_distance(&m, tid(2), tid(1)).unwrap(), 2.0);
        assert!(winner_distance(&m, tid(1), tid(3)).is_err());
    }

    #[test]
    fn most_similar_three_teams() {
        let m = model(
            &["A", "B", "C"],
            &[[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]],
            &[[0.0; 2], [0.0; 2], [0.0; 2]],
        );
        let top = most_similar(&m, tid(1), 1).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].name, "B");
        // (1-0.8)^2 + (0-0.6)^2
        assert!((top[0].distance - 0.4).abs() < 1e-12);
        let all = most_similar(&m, tid(1), 2).unwrap();
        assert_eq!(
            all.iter().map(|n| n.name.as_str()).collect::<Vec<_>>(),
            ["B", "C"]
        );
        assert!(most_similar(&m, tid(1), 0).is_err());
        assert!(most_similar(&m, tid(1), 3).is_err());
    }

    #[test]
    fn most_similar_breaks_ties_by_name() {
        let m = model(
            &["Q", "Zeta", "Alpha"],
            &[[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]],
            &[[0.0; 2], [0.0; 2], [0.0; 2]],
        );
        let res = most_similar(&m, tid(1), 2).unwrap();
        assert_eq!(res[0].name, "Alpha");
        assert_eq!(res[1].name, "Zeta");
    }

    #[test]
    fn head_to_head_hand_example() {
        let m = model(
            &["a", "b"],
            &[[1.0, 0.0], [0.0, 1.0]],
            &[[0.0, 1.0], [0.6, 0.8]],
        );
        let h = head_to_head(&m, tid(1), tid(2)).unwrap();
        assert!((h.alpha_score - 0.80).abs() < 1e-12);
        assert_eq!(h.beta_score, 0.0);
        assert_eq!(h.outcome, Outcome::BWins);

        let swapped = head_to_head(&m, tid(2), tid(1)).unwrap();
        assert_eq!(swapped.outcome, Outcome::AWins);
        assert_eq!(swapped.alpha_score, h.beta_score);
        assert_eq!(swapped.beta_score, h.alpha_score);

        assert!(head_to_head(&m, tid(1), tid(1)).is_err());
    }

    #[test]
    fn identical_factors_tie() {
        let m = model(
            &["a", "b"],
            &[[1.0, 0.0], [0.0, 1.0]],
            &[[1.0, 0.0], [0.0, 1.0]],
        );
        let h = head_to_head(&m, tid(1), tid(2)).unwrap();
        assert_eq!(h.outcome, Outcome::Tie);
        let r = rank_teams(&m, &[tid(1), tid(2)]).unwrap();
        assert_eq!(r[0].victories, 0.5);
        assert_eq!(r[1].victories, 0.5);
        assert_eq!(r[0].name, "a");
    }

    #[test]
    fn ranking_two_and_three_teams() {
        // psi rows sit next to the phi row of the team that beats them:
        // A beats B and C, B beats C.
        let m = model(
            &["C", "B", "A"],
            &[[0.0, -1.0], [0.0, 1.0], [1.0, 0.0]],
            &[[0.6, 0.8], [1.0, 0.0], [-1.0, 0.0]],
        );
        let (c, b, a) = (tid(1), tid(2), tid(3));
        let two = rank_teams(&m, &[b, a]).unwrap();
        assert_eq!((two[0].name.as_str(), two[0].victories), ("A", 1.0));
        assert_eq!((two[1].name.as_str(), two[1].victories), ("B", 0.0));

        let three = rank_teams(&m, &[c, a, b]).unwrap();
        let got: Vec<_> = three
            .iter()
            .map(|e| (e.name.as_str(), e.victories, e.rank))
            .collect();
        assert_eq!(got, [("A", 2.0, 1), ("B", 1.0, 2), ("C", 0.0, 3)]);
        assert_eq!(rank_teams(&m, &[b, c, a]).unwrap(), three);
    }

    #[test]
    fn ranking_rejects_bad_lists() {
        let m = model(
            &["a", "b"],
            &[[1.0, 0.0], [0.0, 1.0]],
            &[[1.0, 0.0], [0.0, 1.0]],
        );
        assert!(rank_teams(&m, &[tid(1)]).is_err());
        assert!(rank_teams(&m, &[tid(1), tid(1)]).is_err());
        assert!(rank_teams(&m, &[tid(1), tid(9)]).is_err());
    }
}
