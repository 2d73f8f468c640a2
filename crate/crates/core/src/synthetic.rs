//! Seeded synthetic leagues with planted team strengths.
//!
//! Fixtures come from a [`Schedule`]. A fixture is a draw with probability
//! `draw_rate`; otherwise the home side wins with probability
//! `sigmoid(scale * (s_home - s_away))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use std::io::Write;

use crate::error::{Error, Result};
use crate::match_data::{to_quads, Competition, Dataset, RawMatch, TeamRegistry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// Every pair meets this many times per season, alternating home side.
    RoundRobin { meetings: usize },
    /// This many fixtures per season between uniformly drawn distinct teams.
    Random { matches_per_season: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeagueConfig {
    pub teams: usize,
    pub seasons: u32,
    pub schedule: Schedule,
    pub draw_rate: f64,
    pub scale: f64,
    pub seed: u64,
}

impl Default for LeagueConfig {
    fn default() -> Self {
        Self {
            teams: 20,
            seasons: 5,
            schedule: Schedule::RoundRobin { meetings: 2 },
            draw_rate: 0.1,
            scale: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct League {
    pub dataset: Dataset,
    /// Latent strength per team, indexed like the registry.
    pub strengths: Vec<f64>,
}

/// Zero-padded names so lexical order equals index order.
pub fn team_names(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("Team {i:0width$}")).collect()
}

pub fn season_label(season: u32) -> String {
    let start = 2000 + season;
    format!("{start}/{}", start + 1)
}

fn goals(rng: &mut impl Rng, outcome: std::cmp::Ordering) -> (u32, u32) {
    let low = rng.random_range(0..=2);
    let margin = rng.random_range(1..=3);
    match outcome {
        std::cmp::Ordering::Greater => (low + margin, low),
        std::cmp::Ordering::Less => (low, low + margin),
        std::cmp::Ordering::Equal => (low, low),
    }
}

/// Generates a league with strengths drawn from N(0, 1).
pub fn generate(cfg: &LeagueConfig) -> Result<League> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let strengths: Vec<f64> = (0..cfg.teams)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    generate_with_strengths(cfg, strengths, &mut rng)
}

pub fn generate_with_strengths(
    cfg: &LeagueConfig,
    strengths: Vec<f64>,
    rng: &mut impl Rng,
) -> Result<League> {
    let registry = TeamRegistry::from_names(team_names(strengths.len()))?;
    let ids: Vec<_> = registry.ids().collect();
    let n = ids.len();
    let mut raw = Vec::new();
    for season in 1..=cfg.seasons {
        let fixtures: Vec<(usize, usize)> = match cfg.schedule {
            Schedule::RoundRobin { meetings } => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .flat_map(|(i, j)| {
                    (0..meetings).map(move |k| if k % 2 == 0 { (i, j) } else { (j, i) })
                })
                .collect(),
            Schedule::Random { matches_per_season } => (0..matches_per_season)
                .map(|_| {
                    let h = rng.random_range(0..n);
                    let a = (h + rng.random_range(1..n)) % n;
                    (h, a)
                })
                .collect(),
        };
        for (h, a) in fixtures {
            let outcome = if rng.random_bool(cfg.draw_rate) {
                std::cmp::Ordering::Equal
            } else {
                let p = 1.0 / (1.0 + (-cfg.scale * (strengths[h] - strengths[a])).exp());
                if rng.random_bool(p) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Less
                }
            };
            let (home_goals, away_goals) = goals(rng, outcome);
            raw.push(RawMatch {
                home: ids[h],
                away: ids[a],
                home_goals,
                away_goals,
                season_label: season_label(season),
                season_index: season,
                competition: Competition::NationalLeague,
            });
        }
    }
    Ok(League {
        dataset: to_quads(raw, registry)?,
        strengths,
    })
}

/// Market values that grow exponentially with strength, with multiplicative
/// Gaussian noise of relative size `noise`.
pub fn market_values(strengths: &[f64], noise: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, noise).expect("finite noise");
    strengths
        .iter()
        .map(|s| {
            let base = 100.0 * (0.8 * s).exp();
            (base * (1.0 + jitter.sample(&mut rng))).max(1.0)
        })
        .collect()
}

/// Writes matches in the ingest CSV layout.
pub fn write_matches_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "season_label",
        "competition",
        "home",
        "away",
        "home_goals",
        "away_goals",
    ])
    .map_err(csv_error)?;
    for m in &ds.raw {
        let name = |id| ds.registry.name(id).unwrap_or_default();
        w.write_record([
            m.season_label.as_str(),
            m.competition.as_str(),
            name(m.home),
            name(m.away),
            &m.home_goals.to_string(),
            &m.away_goals.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `team,value` rows with a header.
pub fn write_values_csv<W: Write>(names: &[String], values: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["team", "value"]).map_err(csv_error)?;
    for (name, v) in names.iter().zip(values) {
        w.write_record([name.as_str(), &v.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("{other:?}")),
    }
}
