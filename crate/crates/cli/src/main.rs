//! `teamvec`: train team vectors from match results and query them.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use teamvec_core::analytics::{most_similar, rank_teams, render_neighbors, render_ranking};
use teamvec_core::baseline::RatioMode;
use teamvec_core::match_data::{dataset_summary, load_dataset};
use teamvec_core::model_file::ModelFile;
use teamvec_core::trainer::train;
use teamvec_core::valuation::{
    build_features, evaluate, feature_names, load_values, steve_features, EvalReport, EvalSetup,
    Representation, Task,
};
use teamvec_core::{derive_seed, Dataset, EmbeddingModel, Error, TeamId, TrainConfig};

#[derive(Parser, Debug)]
#[command(
    name = "teamvec",
    version,
    about = "Winner/loser vector representations of soccer teams"
)]
struct Cli {
    /// Root seed; every stage derives its own sub-seed from it.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model from a matches CSV.
    Train {
        matches: PathBuf,
        /// Where to write the model file.
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Nearest teams by winner-vector distance.
    Similar {
        model: PathBuf,
        #[arg(long)]
        team: String,
        #[arg(long, default_value_t = 5, value_parser = positive)]
        k: usize,
    },
    /// Round-robin ranking over a list of teams.
    Rank {
        model: PathBuf,
        /// A file with one team per line, or a comma-separated list.
        #[arg(long)]
        teams: String,
    },
    /// Cross-validated market-value estimation.
    Evaluate {
        matches: PathBuf,
        values: PathBuf,
        /// steve-<width>, season-stats, cat-<x> or sum-<x>.
        #[arg(long, default_value = "steve-16")]
        representation: String,
        #[arg(long, value_enum, default_value_t = TaskArg::Regression)]
        task: TaskArg,
        /// How sum-<x> treats the ratio columns.
        #[arg(long, value_enum, default_value_t = RatioArg::Sum)]
        ratios: RatioArg,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Dataset statistics.
    Summary { matches: PathBuf },
    /// Write per-team feature vectors as CSV.
    ExportFeatures {
        matches: PathBuf,
        #[arg(long, default_value = "season-stats")]
        representation: String,
        /// Take learned features from this model instead of training.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RatioArg::Sum)]
        ratios: RatioArg,
        /// Destination file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        train: TrainArgs,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Clone)]
struct TrainArgs {
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    weight_decay: Option<f64>,
}

impl TrainArgs {
    fn config(&self, seed: u64) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            delta: self.delta.unwrap_or(d.delta),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            learning_rate: self.lr.unwrap_or(d.learning_rate),
            epochs: self.epochs.unwrap_or(d.epochs),
            weight_decay: self.weight_decay.unwrap_or(d.weight_decay),
            seed,
            x_max: None,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TaskArg {
    Regression,
    Classification,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RatioArg {
    Sum,
    Recompute,
}

impl From<RatioArg> for RatioMode {
    fn from(r: RatioArg) -> Self {
        match r {
            RatioArg::Sum => RatioMode::Sum,
            RatioArg::Recompute => RatioMode::Recompute,
        }
    }
}

/// A failed command: exit status plus the message for standard error.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_io() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn open_dataset(path: &Path) -> Result<Dataset, Failure> {
    let file = File::open(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    load_dataset(io::BufReader::new(file)).map_err(with_path(path))
}

fn open_model(path: &Path) -> Result<EmbeddingModel, Failure> {
    let file = ModelFile::load(path).map_err(with_path(path))?;
    file.to_model().map_err(with_path(path))
}

/// Resolves a team name, suggesting close spellings when it is unknown.
fn lookup(model: &EmbeddingModel, name: &str) -> Result<TeamId, Failure> {
    if let Some(id) = model.registry().id(name) {
        return Ok(id);
    }
    let mut close: Vec<(f64, &String)> = model
        .registry()
        .names()
        .iter()
        .map(|n| {
            (
                strsim::jaro_winkler(&n.to_lowercase(), &name.to_lowercase()),
                n,
            )
        })
        .filter(|(score, _)| *score >= 0.8)
        .collect();
    close.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    let mut message = format!("unknown team {name:?}");
    if !close.is_empty() {
        let names: Vec<&str> = close.iter().take(5).map(|(_, n)| n.as_str()).collect();
        message.push_str(&format!("; did you mean: {}", names.join(", ")));
    }
    Err(invalid(message))
}

fn team_list(arg: &str) -> Result<Vec<String>, Failure> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        arg.to_owned()
    };
    Ok(text
        .split([',', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect())
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json = cli.output == Output::Json;
    match cli.command {
        Command::Train {
            matches,
            out,
            train: args,
        } => {
            let ds = open_dataset(&matches)?;
            let cfg = args.config(cli.seed);
            let quiet = cli.quiet;
            let model = train(&ds, &cfg, |stats| {
                if quiet {
                    return;
                }
                if json {
                    println!("{}", serde_json::to_string(&stats).unwrap_or_default());
                } else {
                    println!("epoch {:>3}  mean loss {:.6}", stats.epoch, stats.mean_loss);
                }
            })?;
            ModelFile::new(&model, &cfg)
                .save(&out)
                .map_err(with_path(&out))?;
            if !quiet && !json {
                println!(
                    "wrote {} ({} teams, delta {})",
                    out.display(),
                    model.num_teams(),
                    model.delta()
                );
            }
        }
        Command::Similar { model, team, k } => {
            let model = open_model(&model)?;
            let id = lookup(&model, &team)?;
            let neighbors = most_similar(&model, id, k)?;
            if json {
                print_json(&neighbors)?;
            } else {
                print!("{}", render_neighbors(&team, &neighbors));
            }
        }
        Command::Rank { model, teams } => {
            let model = open_model(&model)?;
            let ids = team_list(&teams)?
                .iter()
                .map(|n| lookup(&model, n))
                .collect::<Result<Vec<_>, _>>()?;
            let ranking = rank_teams(&model, &ids)?;
            if json {
                print_json(&ranking)?;
            } else {
                print!("{}", render_ranking(&ranking));
            }
        }
        Command::Evaluate {
            matches,
            values,
            representation,
            task,
            ratios,
            train: args,
        } => {
            let rep: Representation = representation.parse()?;
            let ds = open_dataset(&matches)?;
            let file = File::open(&values).map_err(|e| Failure {
                code: 2,
                message: format!("{}: {e}", values.display()),
            })?;
            let table = load_values(io::BufReader::new(file)).map_err(with_path(&values))?;
            let task = match task {
                TaskArg::Regression => Task::Regression,
                TaskArg::Classification => Task::Classification,
            };
            let mut setup = EvalSetup::new(rep, task, cli.seed);
            setup.train = args.config(cli.seed);
            setup.ratio_mode = ratios.into();
            let report = evaluate(&ds, &table, &setup)?;
            if json {
                print_json(&report)?;
            } else {
                print!(
                    "{}",
                    EvalReport::render_table(std::slice::from_ref(&report))
                );
                if !cli.quiet {
                    for note in &report.notes {
                        println!("note: {note}");
                    }
                }
            }
        }
        Command::Summary { matches } => {
            let s = dataset_summary(&open_dataset(&matches)?);
            if json {
                print_json(&s)?;
            } else {
                println!("matches  {}", s.matches);
                println!("teams    {}", s.teams);
                println!("draws    {} ({:.1}%)", s.draws, 100.0 * s.draw_fraction);
                println!("seasons  {}", s.x_max);
                for season in &s.per_season {
                    println!(
                        "  {:>3}  {:<12} {:>6}",
                        season.season, season.label, season.matches
                    );
                }
            }
        }
        Command::ExportFeatures {
            matches,
            representation,
            model,
            ratios,
            out,
            train: args,
        } => {
            let ds = open_dataset(&matches)?;
            let teams: Vec<TeamId> = ds.registry.ids().collect();
            let (names, features) = match model {
                Some(path) => {
                    let model = open_model(&path)?;
                    let ids = ds
                        .registry
                        .names()
                        .iter()
                        .map(|n| lookup(&model, n))
                        .collect::<Result<Vec<_>, _>>()?;
                    let rep = Representation::Steve {
                        width: 2 * model.delta(),
                    };
                    (feature_names(rep), steve_features(&model, &ids)?)
                }
                None => {
                    let rep: Representation = representation.parse()?;
                    let cfg = args.config(derive_seed(cli.seed, 1));
                    let (features, _) = build_features(&ds, &teams, rep, &cfg, ratios.into())?;
                    (feature_names(rep), features)
                }
            };
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(File::create(path).map_err(|e| Failure {
                    code: 2,
                    message: format!("{}: {e}", path.display()),
                })?),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(BufWriter::new(sink));
            let header = std::iter::once("team".to_owned()).chain(names);
            w.write_record(header).map_err(|e| Failure {
                code: 2,
                message: e.to_string(),
            })?;
            for (i, name) in ds.registry.names().iter().enumerate() {
                let row = std::iter::once(name.clone())
                    .chain(features.row(i).iter().map(|v| v.to_string()));
                w.write_record(row).map_err(|e| Failure {
                    code: 2,
                    message: e.to_string(),
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
