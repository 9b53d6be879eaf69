use std::fs;
use std::io::Write;
use std::path::PathBuf;

use axl_core::evolution::{run_eco, run_moran, EcoState, MoranState, DEFAULT_MORAN_TURNS};
use axl_core::export::{write_interactions_file, write_summary_file, write_trajectory, Format};
use axl_core::game::actions_to_string;
use axl_core::results::{build_result_set, ResultSet};
use axl_core::seeding::derive_match_seed;
use axl_core::strategy::{builtin_roster, DEMO_NAMES};
use axl_core::tournament::DEFAULT_TURNS;
use axl_core::training::{evolve_lookup_table, TrainerConfig};
use axl_core::{play_match, run_tournament, MatchSpec};

use crate::config::{ConfigError, FileConfig, RunConfig};
use crate::CliError;

fn invalid(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Config(ConfigError::InvalidValue { field, reason: reason.into() })
}

fn output_path(run: &RunConfig, file: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&run.output_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", run.output_dir.display())))?;
    Ok(run.output_dir.join(file))
}

/// Moran and training matches have a fixed length and no noise.
fn reject_match_options(run: &RunConfig, command: &str) -> Result<(), CliError> {
    if run.prob_end > 0.0 {
        return Err(invalid("prob_end", format!("not supported by {command}")));
    }
    if run.noise > 0.0 {
        return Err(invalid("noise", format!("not supported by {command}")));
    }
    Ok(())
}

fn run_results(run: &RunConfig, self_play: bool) -> Result<ResultSet, CliError> {
    let spec = run.tournament_spec().self_play(self_play);
    spec.validate().map_err(|e| invalid("tournament", e.to_string()))?;
    let archive = run_tournament(&spec, run.jobs).map_err(CliError::runtime)?;
    build_result_set(&archive, &spec).map_err(CliError::runtime)
}

pub fn tournament(run: &RunConfig) -> Result<(), CliError> {
    run.require_players(1)?;
    let spec = run.tournament_spec();
    spec.validate().map_err(|e| invalid("tournament", e.to_string()))?;
    let archive = run_tournament(&spec, run.jobs).map_err(CliError::runtime)?;
    let rs = build_result_set(&archive, &spec).map_err(CliError::runtime)?;

    let interactions = output_path(run, "interactions.csv")?;
    write_interactions_file(&archive, &interactions).map_err(CliError::runtime)?;
    let summary = output_path(run, if run.format == Format::Csv { "summary.csv" } else { "summary.json" })?;
    write_summary_file(&rs, &summary, run.format).map_err(CliError::runtime)?;

    let medians = rs.median_normalized_scores();
    let wins = rs.total_wins();
    let width = rs.names.iter().map(String::len).max().unwrap_or(4).max(4);
    println!("{:>4}  {:<width$}  {:>8}  {:>5}", "rank", "name", "median", "wins");
    for (rank, &i) in rs.ranking.iter().enumerate() {
        let median = medians[i].map_or("-".to_owned(), |m| format!("{m:.4}"));
        println!("{:>4}  {:<width$}  {:>8}  {:>5}", rank + 1, rs.names[i], median, wins[i]);
    }
    println!("wrote {} and {}", interactions.display(), summary.display());
    Ok(())
}

pub fn single_match(run: &RunConfig) -> Result<(), CliError> {
    if run.players.len() != 2 {
        return Err(invalid("players", format!("match needs exactly 2, got {}", run.players.len())));
    }
    let spec = MatchSpec {
        length: run.match_length(DEFAULT_TURNS),
        noise: run.noise,
        game: run.game,
        seed: derive_match_seed(run.seed, 0, 1, 0),
    };
    spec.validate().map_err(|e| invalid("match", e.to_string()))?;
    let record = play_match(&spec, &run.players[0], &run.players[1]).map_err(CliError::runtime)?;
    println!("{} / {}", actions_to_string(&record.actions_a), actions_to_string(&record.actions_b));
    println!("{} {}", record.score_a, record.score_b);
    Ok(())
}

pub fn moran(run: &RunConfig, file: &FileConfig) -> Result<(), CliError> {
    run.require_players(1)?;
    reject_match_options(run, "moran")?;
    let counts = file.counts.clone().unwrap_or_else(|| vec![1; run.players.len()]);
    if counts.len() != run.players.len() {
        return Err(invalid("counts", format!("{} counts for {} players", counts.len(), run.players.len())));
    }
    let population: Vec<usize> = counts.iter().enumerate().flat_map(|(t, &c)| std::iter::repeat_n(t, c)).collect();
    let mut state = MoranState::new(population, run.seed);
    state.turns_per_interaction = run.turns.unwrap_or(DEFAULT_MORAN_TURNS);
    let outcome = run_moran(&run.players, &run.game, state).map_err(|e| match e {
        axl_core::evolution::EvolutionError::Match(m) => CliError::runtime(m),
        other => invalid("population", other.to_string()),
    })?;
    let names: Vec<String> = run.players.iter().map(|p| p.name().to_owned()).collect();
    let path = output_path(run, "moran.csv")?;
    let out = fs::File::create(&path).map_err(CliError::runtime)?;
    write_trajectory(&names, &outcome.trajectory, out).map_err(CliError::runtime)?;
    println!("{} fixated after {} generations", names[outcome.winner], outcome.generations);
    println!("wrote {}", path.display());
    Ok(())
}

pub fn eco(run: &RunConfig, file: &FileConfig) -> Result<(), CliError> {
    run.require_players(1)?;
    let n = run.players.len();
    let proportions = file.proportions.clone().unwrap_or_else(|| vec![1.0 / n as f64; n]);
    let generations = file.generations.unwrap_or(100);
    let rs = run_results(run, true)?;
    let initial = EcoState::from_results(&rs, proportions).map_err(|e| invalid("proportions", e.to_string()))?;
    let trajectory = run_eco(&initial, generations).map_err(CliError::runtime)?;
    let path = output_path(run, "eco.csv")?;
    let out = fs::File::create(&path).map_err(CliError::runtime)?;
    write_trajectory(&rs.names, &trajectory, out).map_err(CliError::runtime)?;
    let last = trajectory.last().expect("trajectory includes the initial state");
    let width = rs.names.iter().map(String::len).max().unwrap_or(4);
    for (name, share) in rs.names.iter().zip(last) {
        println!("{name:<width$}  {share:.6}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn train(run: &RunConfig, file: &FileConfig) -> Result<(), CliError> {
    run.require_players(1)?;
    reject_match_options(run, "train")?;
    let mut config = TrainerConfig::new(file.m.unwrap_or(1), file.n.unwrap_or(1), run.players.clone());
    config.population_size = file.population_size.unwrap_or(config.population_size);
    config.mutation_rate = file.mutation_rate.unwrap_or(config.mutation_rate);
    config.generations = file.generations.unwrap_or(config.generations);
    config.turns = run.turns.unwrap_or(config.turns);
    config.seed = run.seed;
    config.game = run.game;
    config.validate().map_err(|e| invalid("train", e.to_string()))?;
    let outcome = evolve_lookup_table(&config).map_err(CliError::runtime)?;

    let table_path = output_path(run, "best_table.txt")?;
    fs::write(&table_path, outcome.best.to_string()).map_err(CliError::runtime)?;
    let history_path = output_path(run, "training_history.csv")?;
    let rows: Vec<Vec<f64>> = outcome.score_history.iter().map(|f| vec![*f]).collect();
    let out = fs::File::create(&history_path).map_err(CliError::runtime)?;
    write_trajectory(&["best_fitness".to_owned()], &rows, out).map_err(CliError::runtime)?;
    println!("best fitness {}", outcome.best_fitness);
    print!("{}", outcome.best);
    println!("wrote {} and {}", table_path.display(), history_path.display());
    Ok(())
}

pub fn list_strategies() {
    let roster = builtin_roster();
    let width = roster.iter().map(|s| s.name().len()).max().unwrap_or(4);
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>10}  {:>11}  {:>4}",
        "name", "memory", "stochastic", "uses length", "demo"
    );
    for s in &roster {
        let c = s.classifier();
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>10}  {:>11}  {:>4}",
            s.name(),
            c.memory_depth.to_string(),
            if c.stochastic { "yes" } else { "no" },
            if c.uses_game_length { "yes" } else { "no" },
            if DEMO_NAMES.contains(&s.name()) { "*" } else { "" },
        );
    }
}
