//! Run configuration: config file (TOML or JSON), environment and flags.
//!
//! Precedence, highest first: command-line flags, the config file, the
//! `AXL_ARENA_SEED` environment variable (seed only), built-in defaults.

use std::path::{Path, PathBuf};

use axl_core::export::Format;
use axl_core::strategy::{resolve, RegistryError};
use axl_core::{Game, MatchLength, StrategySpec, TournamentSpec};
use serde::Deserialize;
use thiserror::Error;

pub const SEED_ENV: &str = "AXL_ARENA_SEED";
pub const DEFAULT_OUTPUT_DIR: &str = "arena-output";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("config file {0} must end in .toml or .json")]
    UnknownExtension(PathBuf),
    #[error(transparent)]
    UnknownStrategy(#[from] RegistryError),
    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { field, reason: reason.into() }
}

/// Everything a config file may set. Every field is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub players: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub turns: Option<usize>,
    pub repetitions: Option<usize>,
    pub noise: Option<f64>,
    pub prob_end: Option<f64>,
    pub edge_prob: Option<f64>,
    pub self_play: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<String>,
    pub game: Option<Game>,
    pub generations: Option<usize>,
    pub counts: Option<Vec<usize>>,
    pub proportions: Option<Vec<f64>>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub population_size: Option<usize>,
    pub mutation_rate: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        let parse_err = |message: String| ConfigError::Parse { path: path.to_owned(), message };
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("toml") => toml::from_str(&text).map_err(|e| parse_err(e.to_string())),
            Some("json") => serde_json::from_str(&text).map_err(|e| parse_err(e.to_string())),
            _ => Err(ConfigError::UnknownExtension(path.to_owned())),
        }
    }

    /// Values in `over` replace values in `self`.
    pub fn merged(self, over: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            players,
            seed,
            jobs,
            turns,
            repetitions,
            noise,
            prob_end,
            edge_prob,
            self_play,
            output_dir,
            format,
            game,
            generations,
            counts,
            proportions,
            m,
            n,
            population_size,
            mutation_rate
        )
    }
}

pub fn seed_from_env(value: Option<String>) -> Result<Option<u64>, ConfigError> {
    value
        .map(|v| v.trim().parse().map_err(|_| invalid("seed", format!("{SEED_ENV}={v:?} is not an unsigned integer"))))
        .transpose()
}

/// Options shared by every subcommand, after merging all sources.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub players: Vec<StrategySpec>,
    pub seed: u64,
    pub jobs: usize,
    /// Turns given explicitly; each subcommand applies its own default.
    pub turns: Option<usize>,
    pub repetitions: usize,
    pub noise: f64,
    pub prob_end: f64,
    pub edge_prob: f64,
    pub self_play: bool,
    pub output_dir: PathBuf,
    pub format: Format,
    pub game: Game,
}

impl RunConfig {
    pub fn resolve(file: &FileConfig, env_seed: Option<u64>) -> Result<RunConfig, ConfigError> {
        let players = file.players.iter().flatten().map(|name| resolve(name)).collect::<Result<Vec<_>, _>>()?;
        let format = match &file.format {
            Some(f) => f.parse::<Format>().map_err(|e| invalid("format", e))?,
            None => Format::Json,
        };
        let config = RunConfig {
            players,
            seed: file.seed.or(env_seed).unwrap_or(0),
            jobs: file.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            turns: file.turns,
            repetitions: file.repetitions.unwrap_or(axl_core::tournament::DEFAULT_REPETITIONS),
            noise: file.noise.unwrap_or(0.0),
            prob_end: file.prob_end.unwrap_or(0.0),
            edge_prob: file.edge_prob.unwrap_or(1.0),
            self_play: file.self_play.unwrap_or(true),
            output_dir: file.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            format,
            game: file.game.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.jobs == 0 {
            return Err(invalid("jobs", "must be at least 1"));
        }
        if self.turns == Some(0) {
            return Err(invalid("turns", "must be positive"));
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(invalid("noise", format!("{} is outside [0, 1]", self.noise)));
        }
        if !(0.0..=1.0).contains(&self.prob_end) {
            return Err(invalid("prob_end", format!("{} is outside [0, 1]", self.prob_end)));
        }
        if !(self.edge_prob > 0.0 && self.edge_prob <= 1.0) {
            return Err(invalid("edge_prob", format!("{} is outside (0, 1]", self.edge_prob)));
        }
        Ok(())
    }

    pub fn require_players(&self, at_least: usize) -> Result<(), ConfigError> {
        if self.players.len() < at_least {
            return Err(invalid("players", format!("need at least {at_least}, got {}", self.players.len())));
        }
        Ok(())
    }

    pub fn match_length(&self, default_turns: usize) -> MatchLength {
        if self.prob_end > 0.0 {
            MatchLength::Geometric { prob_end: self.prob_end, cap: self.turns }
        } else {
            MatchLength::Fixed(self.turns.unwrap_or(default_turns))
        }
    }

    pub fn tournament_spec(&self) -> TournamentSpec {
        TournamentSpec::new(self.players.clone())
            .length(self.match_length(axl_core::tournament::DEFAULT_TURNS))
            .repetitions(self.repetitions)
            .noise(self.noise)
            .edge_prob(self.edge_prob)
            .seed(self.seed)
            .self_play(self.self_play)
            .game(self.game)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_players(names: &[&str]) -> FileConfig {
        FileConfig { players: Some(names.iter().map(|s| s.to_string()).collect()), ..FileConfig::default() }
    }

    #[test]
    fn valid_config() {
        let file = FileConfig { turns: Some(10), ..with_players(&["Tit For Tat", "Grudger"]) };
        let cfg = RunConfig::resolve(&file, None).unwrap();
        assert_eq!(cfg.players.len(), 2);
        assert_eq!(cfg.match_length(200), MatchLength::Fixed(10));
    }

    #[test]
    fn unknown_strategy_has_suggestion() {
        match RunConfig::resolve(&with_players(&["Tit Fot Tat"]), None) {
            Err(ConfigError::UnknownStrategy(RegistryError::UnknownStrategy { suggestion, .. })) => {
                assert_eq!(suggestion.as_deref(), Some("Tit For Tat"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_noise() {
        let file = FileConfig { noise: Some(1.5), ..FileConfig::default() };
        assert!(matches!(RunConfig::resolve(&file, None), Err(ConfigError::InvalidValue { field: "noise", .. })));
    }

    #[test]
    fn seed_precedence() {
        let base = FileConfig::default();
        assert_eq!(RunConfig::resolve(&base, None).unwrap().seed, 0);
        assert_eq!(RunConfig::resolve(&base, Some(7)).unwrap().seed, 7);
        let file = FileConfig { seed: Some(9), ..FileConfig::default() };
        assert_eq!(RunConfig::resolve(&file, Some(7)).unwrap().seed, 9);
        let flags = FileConfig { seed: Some(11), ..FileConfig::default() };
        assert_eq!(RunConfig::resolve(&file.merged(flags), Some(7)).unwrap().seed, 11);
        assert!(seed_from_env(Some("x".into())).is_err());
        assert_eq!(seed_from_env(Some(" 42 ".into())).unwrap(), Some(42));
    }

    #[test]
    fn file_formats() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("run.toml");
        std::fs::write(
            &toml_path,
            "players = [\"Cooperator\"]\nturns = 4\n[game]\nreward = 3\nsucker = 0\ntemptation = 5\npunishment = 1\n",
        )
        .unwrap();
        let cfg = FileConfig::load(&toml_path).unwrap();
        assert_eq!(cfg.turns, Some(4));
        assert!(cfg.game.is_some());
        let json_path = dir.path().join("run.json");
        std::fs::write(&json_path, r#"{"players": ["Defector"], "noise": 0.25}"#).unwrap();
        assert_eq!(FileConfig::load(&json_path).unwrap().noise, Some(0.25));
        let bad = dir.path().join("run.json");
        std::fs::write(&bad, r#"{"nosie": 0.25}"#).unwrap();
        assert!(matches!(FileConfig::load(&bad), Err(ConfigError::Parse { .. })));
        let yaml = dir.path().join("run.yaml");
        std::fs::write(&yaml, "").unwrap();
        assert!(matches!(FileConfig::load(&yaml), Err(ConfigError::UnknownExtension(_))));
    }

    #[test]
    fn invalid_game_in_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        std::fs::write(&path, r#"{"game": {"reward": 3, "sucker": 0, "temptation": 5, "punishment": 6}}"#).unwrap();
        assert!(matches!(FileConfig::load(&path), Err(ConfigError::Parse { .. })));
    }
}
