//! Writes a synthetic league to `<dir>/matches.csv` and `<dir>/values.csv`.
//!
//! ```text
//! cargo run -p teamvec-core --example synthetic_league -- demo [teams] [seasons] [seed]
//! ```

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use teamvec_core::synthetic::{self, LeagueConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map(String::as_str).unwrap_or("demo"));
    let teams = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seasons = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let seed = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(0);

    let league = synthetic::generate(&LeagueConfig {
        teams,
        seasons,
        seed,
        ..Default::default()
    })?;
    let values = synthetic::market_values(&league.strengths, 0.1, seed + 1);

    fs::create_dir_all(&dir)?;
    synthetic::write_matches_csv(
        &league.dataset,
        BufWriter::new(File::create(dir.join("matches.csv"))?),
    )?;
    synthetic::write_values_csv(
        league.dataset.registry.names(),
        &values,
        BufWriter::new(File::create(dir.join("values.csv"))?),
    )?;
    println!(
        "{} matches, {} teams -> {}",
        league.dataset.quads.len(),
        teams,
        dir.display()
    );
    Ok(())
}
