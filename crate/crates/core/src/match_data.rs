//! Match-result ingestion.
//!
//! Raw results arrive as CSV rows with the columns
//! `season_label,competition,home,away,home_goals,away_goals`. Ingestion
//! builds a [`TeamRegistry`] (ids assigned in first-appearance order) and a
//! list of [`RawMatch`] records; [`to_quads`] turns those into the training
//! quadruples consumed by the trainer.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense, 1-based team identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TeamId(u32);

impl TeamId {
    /// Builds an id from its 1-based value. Returns `None` for 0.
    pub fn new(value: u32) -> Option<Self> {
        (value > 0).then_some(TeamId(value))
    }

    pub(crate) fn from_index(index: usize) -> Self {
        TeamId(index as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based row index into embedding matrices.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered set of team names with contiguous ids `1..=m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TeamRegistry {
    names: Vec<String>,
    ids: HashMap<String, TeamId>,
}

impl TeamRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a registry from names in order. Duplicates are rejected.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut registry = Self::new();
        for name in names {
            let name = name.into();
            if registry.ids.contains_key(&name) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate team name {name:?}"
                )));
            }
            registry.intern(&name);
        }
        Ok(registry)
    }

    /// Returns the id for `name`, assigning the next free id on first sight.
    pub fn intern(&mut self, name: &str) -> TeamId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = TeamId::from_index(self.names.len());
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<TeamId> {
        self.ids.get(name).copied()
    }

    /// Like [`TeamRegistry::id`] but reports an unknown name as an error.
    pub fn require(&self, name: &str) -> Result<TeamId> {
        self.id(name)
            .ok_or_else(|| Error::UnknownTeam(name.to_owned()))
    }

    pub fn name(&self, id: TeamId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn check(&self, id: TeamId) -> Result<()> {
        if id.index() < self.names.len() {
            Ok(())
        } else {
            Err(Error::TeamOutOfRange(id.get() as usize))
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ids(&self) -> impl Iterator<Item = TeamId> + '_ {
        (0..self.names.len()).map(TeamId::from_index)
    }
}

/// Competition group a match was played in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Competition {
    NationalLeague,
    ChampionsLeague,
    EuropaLeague,
}

impl Competition {
    pub const ALL: [Competition; 3] = [
        Competition::NationalLeague,
        Competition::ChampionsLeague,
        Competition::EuropaLeague,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Competition::NationalLeague => "NationalLeague",
            Competition::ChampionsLeague => "ChampionsLeague",
            Competition::EuropaLeague => "EuropaLeague",
        }
    }

    pub fn is_international(self) -> bool {
        !matches!(self, Competition::NationalLeague)
    }
}

impl FromStr for Competition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Competition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                format!("unknown competition {s:?} (expected NationalLeague, ChampionsLeague or EuropaLeague)")
            })
    }
}

impl fmt::Display for Competition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One played match with its full score line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMatch {
    pub home: TeamId,
    pub away: TeamId,
    pub home_goals: u32,
    pub away_goals: u32,
    pub season_label: String,
    /// Chronological season index, 1 for the oldest season.
    pub season_index: u32,
    pub competition: Competition,
}

impl RawMatch {
    pub fn is_draw(&self) -> bool {
        self.home_goals == self.away_goals
    }
}

/// Training quadruple `(a, b, s, d)`. When `draw` is false, `a` won.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatchQuad {
    pub a: TeamId,
    pub b: TeamId,
    pub season: u32,
    pub draw: bool,
}

/// Quadruples plus everything needed to interpret them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub quads: Vec<MatchQuad>,
    pub x_max: u32,
    pub registry: TeamRegistry,
    pub raw: Vec<RawMatch>,
    /// Distinct season labels in chronological order; `season_labels[s - 1]`
    /// is the label of season index `s`.
    pub season_labels: Vec<String>,
}

const COLUMNS: [&str; 6] = [
    "season_label",
    "competition",
    "home",
    "away",
    "home_goals",
    "away_goals",
];

/// Parses match rows from CSV.
///
/// Season indices come from the sorted set of distinct season labels, so
/// labels must sort chronologically (e.g. zero-padded `"2018/2019"`).
/// Errors carry the 1-based line number of the offending row.
pub fn ingest_csv<R: Read>(reader: R) -> Result<(TeamRegistry, Vec<RawMatch>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput);
    }
    let mut position = [0usize; 6];
    for (slot, column) in position.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::parse(1, format!("header is missing column {column:?}")))?;
    }

    struct Pending {
        home: TeamId,
        away: TeamId,
        home_goals: u32,
        away_goals: u32,
        season_label: String,
        competition: Competition,
    }

    let mut registry = TeamRegistry::new();
    let mut pending = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let field = |i: usize| &record[position[i]];

        let season_label = field(0);
        if season_label.is_empty() {
            return Err(Error::parse(line, "empty season label"));
        }
        let competition: Competition = field(1).parse().map_err(|m| Error::parse(line, m))?;
        let (home, away) = (field(2), field(3));
        if home.is_empty() || away.is_empty() {
            return Err(Error::parse(line, "empty team name"));
        }
        if home == away {
            return Err(Error::parse(line, format!("team {home:?} plays itself")));
        }
        let goals = |i: usize, what: &str| -> Result<u32> {
            field(i).parse::<u32>().map_err(|_| {
                Error::parse(
                    line,
                    format!("{what} {:?} is not a non-negative integer", field(i)),
                )
            })
        };
        let home_goals = goals(4, "home_goals")?;
        let away_goals = goals(5, "away_goals")?;

        pending.push(Pending {
            home: registry.intern(home),
            away: registry.intern(away),
            home_goals,
            away_goals,
            season_label: season_label.to_owned(),
            competition,
        });
    }
    if pending.is_empty() {
        return Err(Error::EmptyInput);
    }

    let labels: BTreeSet<&str> = pending.iter().map(|p| p.season_label.as_str()).collect();
    let season_of: HashMap<&str, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (*l, i as u32 + 1))
        .collect();

    let raw = pending
        .iter()
        .map(|p| RawMatch {
            home: p.home,
            away: p.away,
            home_goals: p.home_goals,
            away_goals: p.away_goals,
            season_index: season_of[p.season_label.as_str()],
            season_label: p.season_label.clone(),
            competition: p.competition,
        })
        .collect();
    Ok((registry, raw))
}

/// Converts raw matches into winner-first quadruples.
///
/// Draws keep home-team-first order.
pub fn to_quads(raw: Vec<RawMatch>, registry: TeamRegistry) -> Result<Dataset> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut labels: BTreeMap<u32, String> = BTreeMap::new();
    let quads = raw
        .iter()
        .map(|m| {
            registry.check(m.home)?;
            registry.check(m.away)?;
            if m.season_index == 0 {
                return Err(Error::InvalidArgument("season index must be >= 1".into()));
            }
            labels
                .entry(m.season_index)
                .or_insert_with(|| m.season_label.clone());
            let (a, b) = if m.away_goals > m.home_goals {
                (m.away, m.home)
            } else {
                (m.home, m.away)
            };
            Ok(MatchQuad {
                a,
                b,
                season: m.season_index,
                draw: m.is_draw(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x_max = quads.iter().map(|q| q.season).max().unwrap_or(1);
    let season_labels = (1..=x_max)
        .map(|s| labels.get(&s).cloned().unwrap_or_default())
        .collect();
    Ok(Dataset {
        quads,
        x_max,
        registry,
        raw,
        season_labels,
    })
}

/// Reads a CSV stream straight into a [`Dataset`].
pub fn load_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let (registry, raw) = ingest_csv(reader)?;
    to_quads(raw, registry)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonCount {
    pub season: u32,
    pub label: String,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub matches: usize,
    pub teams: usize,
    pub draws: usize,
    pub draw_fraction: f64,
    pub x_max: u32,
    pub per_season: Vec<SeasonCount>,
}

pub fn dataset_summary(ds: &Dataset) -> DatasetSummary {
    let draws = ds.quads.iter().filter(|q| q.draw).count();
    let mut per_season: Vec<SeasonCount> = (1..=ds.x_max)
        .map(|s| SeasonCount {
            season: s,
            label: ds
                .season_labels
                .get(s as usize - 1)
                .cloned()
                .unwrap_or_default(),
            matches: 0,
        })
        .collect();
    for q in &ds.quads {
        if let Some(slot) = per_season.get_mut(q.season as usize - 1) {
            slot.matches += 1;
        }
    }
    let matches = ds.quads.len();
    DatasetSummary {
        matches,
        teams: ds.registry.len(),
        draws,
        draw_fraction: if matches == 0 {
            0.0
        } else {
            draws as f64 / matches as f64
        },
        x_max: ds.x_max,
        per_season,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "season_label,competition,home,away,home_goals,away_goals\n";

    fn parse(body: &str) -> Result<(TeamRegistry, Vec<RawMatch>)> {
        ingest_csv(format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn maps_fields_directly() {
        let (reg, raw) = parse("2018/2019,NationalLeague,Liverpool,Arsenal,5,1\n").unwrap();
        let m = &raw[0];
        assert_eq!(reg.name(m.home), Some("Liverpool"));
        assert_eq!(reg.name(m.away), Some("Arsenal"));
        assert_eq!((m.home_goals, m.away_goals), (5, 1));
        assert_eq!(m.season_label, "2018/2019");
        assert_eq!(m.competition, Competition::NationalLeague);
        assert_eq!(m.season_index, 1);
    }

    #[test]
    fn repeated_name_gets_one_id() {
        let (reg, raw) = parse(
            "2018/2019,NationalLeague,Liverpool,Arsenal,5,1\n\
             2018/2019,NationalLeague,Chelsea,Liverpool,0,0\n",
        )
        .unwrap();
        assert_eq!(reg.len(), 3);
        assert_eq!(raw[0].home, raw[1].away);
        assert_eq!(reg.id("Liverpool").unwrap().get(), 1);
        assert_eq!(reg.id("Arsenal").unwrap().get(), 2);
        assert_eq!(reg.id("Chelsea").unwrap().get(), 3);
    }

    #[test]
    fn seasons_are_indexed_chronologically() {
        let (reg, raw) = parse(
            "2018/2019,NationalLeague,A,B,1,0\n\
             2010/2011,NationalLeague,B,A,1,0\n",
        )
        .unwrap();
        assert_eq!(raw[0].season_index, 2);
        assert_eq!(raw[1].season_index, 1);
        let ds = to_quads(raw, reg).unwrap();
        assert_eq!(ds.x_max, 2);
        assert_eq!(ds.season_labels, vec!["2010/2011", "2018/2019"]);
    }

    #[test]
    fn header_columns_may_be_reordered() {
        let csv = "home,away,home_goals,away_goals,season_label,competition\nA,B,2,1,2019/2020,EuropaLeague\n";
        let (_, raw) = ingest_csv(csv.as_bytes()).unwrap();
        assert_eq!(raw[0].competition, Competition::EuropaLeague);
    }

    #[test]
    fn rejects_malformed_rows_with_line_number() {
        let cases = [
            "2018/2019,NationalLeague,A,B,1\n",
            "2018/2019,NationalLeague,A,B,x,1\n",
            "2018/2019,NationalLeague,A,B,-1,1\n",
            "2018/2019,CopaDelRey,A,B,1,1\n",
            "2018/2019,NationalLeague,A,A,1,1\n",
        ];
        for body in cases {
            let input = format!("2018/2019,NationalLeague,C,D,0,0\n{body}");
            match parse(&input) {
                Err(Error::Parse { row, .. }) => assert_eq!(row, 3, "{body}"),
                other => panic!("expected parse error for {body:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(ingest_csv("".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(
            ingest_csv(HEADER.as_bytes()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn winner_goes_first_and_draws_keep_home_first() {
        let (reg, raw) = parse(
            "2018/2019,NationalLeague,X,Y,0,2\n\
             2018/2019,NationalLeague,X,Y,1,1\n\
             2018/2019,NationalLeague,X,Y,3,0\n",
        )
        .unwrap();
        let x = reg.id("X").unwrap();
        let y = reg.id("Y").unwrap();
        let ds = to_quads(raw, reg).unwrap();
        assert_eq!(ds.quads.len(), 3);
        assert_eq!(
            ds.quads[0],
            MatchQuad {
                a: y,
                b: x,
                season: 1,
                draw: false
            }
        );
        assert_eq!(
            ds.quads[1],
            MatchQuad {
                a: x,
                b: y,
                season: 1,
                draw: true
            }
        );
        assert_eq!(
            ds.quads[2],
            MatchQuad {
                a: x,
                b: y,
                season: 1,
                draw: false
            }
        );
        assert_eq!(ds.quads.iter().filter(|q| q.draw).count(), 1);
        assert_eq!(ds.raw.len(), 3);
    }

    #[test]
    fn summary_counts() {
        let (reg, raw) = parse(
            "2018/2019,NationalLeague,A,B,1,0\n\
             2018/2019,NationalLeague,C,D,1,1\n\
             2018/2019,ChampionsLeague,A,D,0,3\n",
        )
        .unwrap();
        let ds = to_quads(raw, reg).unwrap();
        let s = dataset_summary(&ds);
        assert_eq!(s.matches, 3);
        assert_eq!(s.teams, 4);
        assert_eq!(s.draw_fraction, 1.0 / 3.0);
        assert_eq!(s.per_season[0].matches, 3);
    }

    #[test]
    fn summary_reports_empty_seasons() {
        let reg = TeamRegistry::from_names(["A", "B"]).unwrap();
        let a = reg.id("A").unwrap();
        let b = reg.id("B").unwrap();
        let raw = vec![RawMatch {
            home: a,
            away: b,
            home_goals: 2,
            away_goals: 0,
            season_label: "2012/2013".into(),
            season_index: 3,
            competition: Competition::NationalLeague,
        }];
        let ds = to_quads(raw, reg).unwrap();
        let s = dataset_summary(&ds);
        let counts: Vec<_> = s.per_season.iter().map(|c| c.matches).collect();
        assert_eq!(counts, vec![0, 0, 1]);
    }

    #[test]
    fn registry_rejects_duplicates() {
        assert!(TeamRegistry::from_names(["A", "B", "A"]).is_err());
    }
}
