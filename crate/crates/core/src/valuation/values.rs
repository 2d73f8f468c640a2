use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};

/// Market value per team, in million EUR.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueTable {
    values: BTreeMap<String, f64>,
}

impl ValueTable {
    pub fn get(&self, team: &str) -> Option<f64> {
        self.values.get(team).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn insert(&mut self, team: impl Into<String>, value: f64) -> Result<()> {
        let team = team.into();
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "value for {team:?} must be positive"
            )));
        }
        if self.values.insert(team.clone(), value).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate team {team:?}")));
        }
        Ok(())
    }
}

/// Reads `team,value_millions` rows. A header row is accepted when its value
/// column is not numeric.
pub fn load_values<R: Read>(reader: R) -> Result<ValueTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut table = ValueTable::default();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let team = &record[0];
        let value: f64 = match record[1].parse() {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::parse(
                    line,
                    format!("value {:?} is not a number", &record[1]),
                ))
            }
        };
        if team.is_empty() {
            return Err(Error::parse(line, "empty team name"));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::parse(
                line,
                format!("value {value} must be positive"),
            ));
        }
        if table.values.insert(team.to_owned(), value).is_some() {
            return Err(Error::parse(line, format!("duplicate team {team:?}")));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values() {
        let t = load_values(
            "team,value_millions\nFC Barcelona,1180\nBV De Graafschap,10.15\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(t.get("FC Barcelona"), Some(1180.0));
        assert_eq!(t.get("BV De Graafschap"), Some(10.15));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        for (input, line) in [
            ("X,-5\n", 1),
            ("A,3\nX,0\n", 2),
            ("A,3\nX,abc\n", 2),
            ("A,3\nA,4\n", 2),
            ("A,3\nB\n", 2),
        ] {
            match load_values(input.as_bytes()) {
                Err(Error::Parse { row, .. }) => assert_eq!(row, line, "{input}"),
                other => panic!("{input:?}: {other:?}"),
            }
        }
    }
}
