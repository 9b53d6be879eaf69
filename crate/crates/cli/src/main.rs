//! `axl-arena`: run prisoner's dilemma tournaments, single matches, Moran
//! processes, ecological dynamics and lookup-table training from the shell.
//!
//! Exit status: 0 on success, 2 on configuration errors, 1 on runtime errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "axl-arena", version, about = "Iterated prisoner's dilemma tournaments and population dynamics")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalOpts {
    /// Master seed (overrides the config file and AXL_ARENA_SEED)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; never changes any output
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Rounds per match (a cap when --prob-end is set)
    #[arg(long, global = true)]
    turns: Option<usize>,
    #[arg(long, global = true)]
    repetitions: Option<usize>,
    /// Probability that each played action is flipped
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Probability that a match ends after each round
    #[arg(long, global = true)]
    prob_end: Option<f64>,
    /// Probability that a pair meets in a repetition
    #[arg(long, global = true)]
    edge_prob: Option<f64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Summary format: json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// TOML or JSON config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct PlayerOpts {
    /// Comma-separated strategy names, e.g. "Tit For Tat,Initial(DD,Grudger)"
    #[arg(long)]
    players: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a tournament and write interactions plus a summary
    Tournament {
        #[command(flatten)]
        players: PlayerOpts,
        /// Skip matches of a strategy against itself
        #[arg(long)]
        no_self_play: bool,
    },
    /// Play one match between two strategies and print it
    Match {
        #[command(flatten)]
        players: PlayerOpts,
    },
    /// Run a Moran process to fixation
    Moran {
        #[command(flatten)]
        players: PlayerOpts,
        /// Individuals of each type, comma-separated (default: one each)
        #[arg(long)]
        counts: Option<String>,
    },
    /// Replicator dynamics over a tournament's payoff matrix
    Eco {
        #[command(flatten)]
        players: PlayerOpts,
        #[arg(long)]
        generations: Option<usize>,
        /// Initial shares, comma-separated (default: uniform)
        #[arg(long)]
        proportions: Option<String>,
    },
    /// Evolve a lookup table against an opponent pool
    Train {
        /// Opponent pool
        #[command(flatten)]
        players: PlayerOpts,
        /// Opening plays of the opponent used as key
        #[arg(long)]
        m: Option<usize>,
        /// Recent rounds used as key
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        population_size: Option<usize>,
        #[arg(long)]
        mutation_rate: Option<f64>,
        #[arg(long)]
        generations: Option<usize>,
    },
    /// Print the built-in strategies and their classifiers
    ListStrategies,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn runtime(e: impl std::fmt::Display) -> CliError {
        CliError::Runtime(e.to_string())
    }
}

fn parse_list<T: std::str::FromStr>(field: &'static str, list: &str) -> Result<Vec<T>, ConfigError> {
    list.split(',')
        .map(|s| {
            s.trim().parse().map_err(|_| ConfigError::InvalidValue { field, reason: format!("cannot parse {s:?}") })
        })
        .collect()
}

/// Flags as a config layer that overrides the file.
fn flag_layer(global: GlobalOpts, command: &Command) -> Result<FileConfig, ConfigError> {
    let mut layer = FileConfig {
        seed: global.seed,
        jobs: global.jobs,
        turns: global.turns,
        repetitions: global.repetitions,
        noise: global.noise,
        prob_end: global.prob_end,
        edge_prob: global.edge_prob,
        output_dir: global.output_dir,
        format: global.format,
        ..FileConfig::default()
    };
    let players = match command {
        Command::Tournament { players, .. }
        | Command::Match { players }
        | Command::Moran { players, .. }
        | Command::Eco { players, .. }
        | Command::Train { players, .. } => players.players.as_deref(),
        Command::ListStrategies => None,
    };
    layer.players = players.map(axl_core::strategy::split_names);
    match command {
        Command::Tournament { no_self_play: true, .. } => layer.self_play = Some(false),
        Command::Moran { counts: Some(c), .. } => layer.counts = Some(parse_list("counts", c)?),
        Command::Eco { generations, proportions, .. } => {
            layer.generations = *generations;
            layer.proportions = proportions.as_deref().map(|p| parse_list("proportions", p)).transpose()?;
        }
        Command::Train { m, n, population_size, mutation_rate, generations, .. } => {
            layer.m = *m;
            layer.n = *n;
            layer.population_size = *population_size;
            layer.mutation_rate = *mutation_rate;
            layer.generations = *generations;
        }
        _ => {}
    }
    Ok(layer)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if matches!(cli.command, Command::ListStrategies) {
        commands::list_strategies();
        return Ok(());
    }
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let file = file.merged(flag_layer(cli.global, &cli.command)?);
    let env_seed = config::seed_from_env(std::env::var(config::SEED_ENV).ok())?;
    let run = config::RunConfig::resolve(&file, env_seed)?;
    match cli.command {
        Command::Tournament { .. } => commands::tournament(&run),
        Command::Match { .. } => commands::single_match(&run),
        Command::Moran { .. } => commands::moran(&run, &file),
        Command::Eco { .. } => commands::eco(&run, &file),
        Command::Train { .. } => commands::train(&run, &file),
        Command::ListStrategies => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}
