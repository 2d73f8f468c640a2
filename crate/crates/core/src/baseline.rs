//! Count-based team descriptors used as baselines.
//!
//! A season vector has 18 entries: for each competition group in the order
//! NationalLeague, ChampionsLeague, EuropaLeague the block
//! `(wins, draws, defeats, goals_for, goals_against)`, followed by goals per
//! match overall, per national match and per international match. Ratios with
//! no matches behind them are 0.

use std::ops::{Index, Range};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::match_data::{Competition, RawMatch, TeamId, TeamRegistry};

pub const SEASON_STATS_DIM: usize = 18;

const BLOCK: usize = 5;
const RATIO_OFFSET: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonStatsVector(pub [f64; SEASON_STATS_DIM]);

impl Default for SeasonStatsVector {
    fn default() -> Self {
        SeasonStatsVector([0.0; SEASON_STATS_DIM])
    }
}

impl Index<usize> for SeasonStatsVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl SeasonStatsVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn block_range(competition: Competition) -> Range<usize> {
        let start = competition as usize * BLOCK;
        start..start + BLOCK
    }

    /// `(wins, draws, defeats, goals_for, goals_against)` for one group.
    pub fn block(&self, competition: Competition) -> &[f64] {
        &self.0[Self::block_range(competition)]
    }

    pub fn matches_in(&self, competition: Competition) -> f64 {
        self.block(competition)[..3].iter().sum()
    }

    /// Overwrites the three ratio entries with values derived from the
    /// count blocks.
    pub fn recompute_ratios(&mut self) {
        let national = self.matches_in(Competition::NationalLeague);
        let international = self.matches_in(Competition::ChampionsLeague)
            + self.matches_in(Competition::EuropaLeague);
        let goals = |c: Competition| self.block(c)[3];
        let national_goals = goals(Competition::NationalLeague);
        let international_goals =
            goals(Competition::ChampionsLeague) + goals(Competition::EuropaLeague);
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        self.0[RATIO_OFFSET] = ratio(
            national_goals + international_goals,
            national + international,
        );
        self.0[RATIO_OFFSET + 1] = ratio(national_goals, national);
        self.0[RATIO_OFFSET + 2] = ratio(international_goals, international);
    }

    pub fn feature_names() -> Vec<String> {
        let mut names = Vec::with_capacity(SEASON_STATS_DIM);
        for prefix in ["national", "champions", "europa"] {
            for stat in ["wins", "draws", "defeats", "goals_for", "goals_against"] {
                names.push(format!("{prefix}_{stat}"));
            }
        }
        names.extend(
            [
                "goals_per_match",
                "goals_per_national_match",
                "goals_per_international_match",
            ]
            .map(String::from),
        );
        names
    }
}

/// Season statistics of `team` in season index `season`.
pub fn season_stats(
    raw: &[RawMatch],
    registry: &TeamRegistry,
    team: TeamId,
    season: u32,
) -> Result<SeasonStatsVector> {
    registry.check(team)?;
    if season == 0 {
        return Err(Error::InvalidArgument("season index must be >= 1".into()));
    }
    let mut v = SeasonStatsVector::default();
    for m in raw.iter().filter(|m| m.season_index == season) {
        let (scored, conceded) = if m.home == team {
            (m.home_goals, m.away_goals)
        } else if m.away == team {
            (m.away_goals, m.home_goals)
        } else {
            continue;
        };
        let start = SeasonStatsVector::block_range(m.competition).start;
        let result = match scored.cmp(&conceded) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 2,
        };
        v.0[start + result] += 1.0;
        v.0[start + 3] += f64::from(scored);
        v.0[start + 4] += f64::from(conceded);
    }
    v.recompute_ratios();
    Ok(v)
}

fn window(newest_season: u32, x: u32) -> Result<impl Iterator<Item = u32>> {
    if x < 1 {
        return Err(Error::InvalidArgument("window length must be >= 1".into()));
    }
    if newest_season < x {
        return Err(Error::InvalidArgument(format!(
            "a window of {x} seasons ending at season {newest_season} reaches before season 1"
        )));
    }
    Ok((newest_season + 1 - x..=newest_season).rev())
}

/// Season vectors of the last `x` seasons, newest first, concatenated.
pub fn cat_features(
    raw: &[RawMatch],
    registry: &TeamRegistry,
    team: TeamId,
    newest_season: u32,
    x: u32,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(SEASON_STATS_DIM * x as usize);
    for season in window(newest_season, x)? {
        out.extend_from_slice(season_stats(raw, registry, team, season)?.as_slice());
    }
    Ok(out)
}

/// How [`sum_features`] treats the three ratio entries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioMode {
    /// Ratios are summed like every other entry.
    #[default]
    Sum,
    /// Ratios are recomputed from the summed counts.
    Recompute,
}

/// Elementwise sum of the season vectors of the last `x` seasons.
pub fn sum_features(
    raw: &[RawMatch],
    registry: &TeamRegistry,
    team: TeamId,
    newest_season: u32,
    x: u32,
    mode: RatioMode,
) -> Result<SeasonStatsVector> {
    let mut total = SeasonStatsVector::default();
    for season in window(newest_season, x)? {
        let v = season_stats(raw, registry, team, season)?;
        total.0.iter_mut().zip(v.0).for_each(|(t, s)| *t += s);
    }
    if mode == RatioMode::Recompute {
        total.recompute_ratios();
    }
    Ok(total)
}

/// Column names for CAT-x features, `_s0` marking the newest season.
pub fn cat_feature_names(x: u32) -> Vec<String> {
    let base = SeasonStatsVector::feature_names();
    (0..x)
        .flat_map(|k| base.iter().map(move |n| format!("{n}_s{k}")))
        .collect()
}
