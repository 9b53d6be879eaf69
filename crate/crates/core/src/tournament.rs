//! Match generation and parallel tournament execution.
//!
//! Every match seed is `derive_match_seed(master_seed, a, b, repetition)`, and
//! sparse pairings draw from a per-repetition stream, so the archive depends
//! only on the spec. Matches run on a dedicated rayon pool of `jobs` threads
//! and are re-sorted into canonical `(repetition, a, b)` order afterwards.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{play_match, MatchError, MatchLength, MatchRecord, MatchSpec};
use crate::game::Game;
use crate::seeding::{derive_match_seed, derive_seed, domain, stream, stream_rng};
use crate::strategy::StrategySpec;

pub const DEFAULT_TURNS: usize = 200;
pub const DEFAULT_REPETITIONS: usize = 10;

#[derive(Clone, Debug)]
pub struct TournamentSpec {
    pub players: Vec<StrategySpec>,
    pub length: MatchLength,
    pub repetitions: usize,
    pub noise: f64,
    /// Probability that a pair meets in a repetition.
    pub edge_prob: f64,
    pub master_seed: u64,
    pub with_self_play: bool,
    pub game: Game,
}

impl TournamentSpec {
    /// Full round robin: 200 turns, 10 repetitions, no noise, self-play on.
    pub fn new(players: Vec<StrategySpec>) -> TournamentSpec {
        TournamentSpec {
            players,
            length: MatchLength::Fixed(DEFAULT_TURNS),
            repetitions: DEFAULT_REPETITIONS,
            noise: 0.0,
            edge_prob: 1.0,
            master_seed: 0,
            with_self_play: true,
            game: Game::default(),
        }
    }

    pub fn turns(mut self, turns: usize) -> Self {
        self.length = MatchLength::Fixed(turns);
        self
    }
    pub fn length(mut self, length: MatchLength) -> Self {
        self.length = length;
        self
    }
    pub fn repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }
    pub fn noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }
    pub fn edge_prob(mut self, edge_prob: f64) -> Self {
        self.edge_prob = edge_prob;
        self
    }
    pub fn seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }
    pub fn self_play(mut self, with_self_play: bool) -> Self {
        self.with_self_play = with_self_play;
        self
    }
    pub fn game(mut self, game: Game) -> Self {
        self.game = game;
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.players.iter().map(|p| p.name().to_owned()).collect()
    }

    pub fn match_spec(&self, a: usize, b: usize, repetition: usize) -> MatchSpec {
        MatchSpec {
            length: self.length,
            noise: self.noise,
            game: self.game,
            seed: derive_match_seed(self.master_seed, a, b, repetition),
        }
    }

    pub fn validate(&self) -> Result<(), TournamentError> {
        if self.players.is_empty() {
            return Err(TournamentError::NoPlayers);
        }
        if self.repetitions == 0 {
            return Err(TournamentError::InvalidValue("repetitions must be at least 1"));
        }
        if !(self.edge_prob > 0.0 && self.edge_prob <= 1.0) {
            return Err(TournamentError::InvalidValue("edge_prob must lie in (0, 1]"));
        }
        self.match_spec(0, 0, 0).validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub repetition: usize,
    pub a: usize,
    pub b: usize,
    pub record: MatchRecord,
}

/// Every match of a tournament in canonical `(repetition, a, b)` order, `a <= b`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct InteractionArchive {
    pub names: Vec<String>,
    pub entries: Vec<ArchiveEntry>,
}

impl InteractionArchive {
    pub fn new(names: Vec<String>, mut entries: Vec<ArchiveEntry>) -> InteractionArchive {
        entries.sort_by_key(|e| (e.repetition, e.a, e.b));
        InteractionArchive { names, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn repetitions(&self) -> usize {
        self.entries.iter().map(|e| e.repetition + 1).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TournamentError {
    #[error("a tournament needs at least one player")]
    NoPlayers,
    #[error("{0}")]
    InvalidValue(&'static str),
    #[error("jobs must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("repetition {repetition}, match {a} vs {b}: {source}")]
    MatchFailed { repetition: usize, a: usize, b: usize, source: MatchError },
}

/// Pairs `(a, b)`, `a <= b`, that meet in `repetition`.
pub fn generate_edges(spec: &TournamentSpec, repetition: usize) -> Vec<(usize, usize)> {
    let n = spec.players.len();
    let sparse = spec.edge_prob < 1.0;
    let mut rng = stream_rng(derive_seed(spec.master_seed, &[domain::EDGES, repetition as u64]), stream::MAIN);
    let mut edges = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        let first = if spec.with_self_play { a } else { a + 1 };
        for b in first..n {
            if !sparse || rng.random::<f64>() < spec.edge_prob {
                edges.push((a, b));
            }
        }
    }
    edges
}

pub fn run_tournament(spec: &TournamentSpec, jobs: usize) -> Result<InteractionArchive, TournamentError> {
    spec.validate()?;
    if jobs == 0 {
        return Err(TournamentError::NoWorkers);
    }
    let tasks: Vec<(usize, usize, usize)> = (0..spec.repetitions)
        .flat_map(|rep| generate_edges(spec, rep).into_iter().map(move |(a, b)| (rep, a, b)))
        .collect();

    let play = |&(repetition, a, b): &(usize, usize, usize)| {
        play_match(&spec.match_spec(a, b, repetition), &spec.players[a], &spec.players[b])
            .map(|record| ArchiveEntry { repetition, a, b, record })
            .map_err(|source| TournamentError::MatchFailed { repetition, a, b, source })
    };

    let outcomes: Vec<Result<ArchiveEntry, TournamentError>> = if jobs == 1 {
        tasks.iter().map(play).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| TournamentError::Pool(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(play).collect())
    };
    // first failure in canonical order, whatever order the workers hit them
    let entries = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(InteractionArchive::new(spec.names(), entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{builtin_roster, demo_set, resolve};

    #[test]
    fn edge_counts() {
        let spec = TournamentSpec::new(demo_set());
        assert_eq!(generate_edges(&spec, 0).len(), 15);
        assert_eq!(generate_edges(&spec.clone().self_play(false), 0).len(), 10);
        let edges = generate_edges(&spec, 0);
        assert!(edges.iter().all(|(a, b)| a <= b));
    }

    #[test]
    fn sparse_edges_match_binomial_mean() {
        let spec = TournamentSpec::new(builtin_roster()).self_play(false).edge_prob(0.5).seed(3);
        let reps = 10_000;
        let total: usize = (0..reps).map(|r| generate_edges(&spec, r).len()).sum();
        let mean = total as f64 / reps as f64;
        assert!((mean - 85.5).abs() / 85.5 < 0.02, "mean {mean}");
        // resampled per repetition
        assert_ne!(generate_edges(&spec, 0), generate_edges(&spec, 1));
    }

    #[test]
    fn demo_tournament_size_and_order() {
        let spec = TournamentSpec::new(demo_set()).turns(10).repetitions(2).seed(1);
        let archive = run_tournament(&spec, 1).unwrap();
        assert_eq!(archive.len(), 30);
        let keys: Vec<_> = archive.entries.iter().map(|e| (e.repetition, e.a, e.b)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(archive, run_tournament(&spec, 8).unwrap());
        assert_eq!(archive.repetitions(), 2);
    }

    #[test]
    fn validation() {
        assert!(matches!(run_tournament(&TournamentSpec::new(vec![]), 1), Err(TournamentError::NoPlayers)));
        let spec = TournamentSpec::new(demo_set());
        assert!(run_tournament(&spec.clone().repetitions(0), 1).is_err());
        assert!(run_tournament(&spec.clone().edge_prob(0.0), 1).is_err());
        assert!(run_tournament(&spec.clone().noise(-0.1), 1).is_err());
        assert!(matches!(run_tournament(&spec, 0), Err(TournamentError::NoWorkers)));
    }

    #[test]
    fn faults_carry_match_coordinates() {
        let players = vec![resolve("Cooperator").unwrap(), resolve("Final(D,Cooperator)").unwrap()];
        let spec =
            TournamentSpec::new(players).length(MatchLength::Geometric { prob_end: 0.1, cap: None }).repetitions(2);
        for jobs in [1, 4] {
            match run_tournament(&spec, jobs) {
                Err(TournamentError::MatchFailed { repetition: 0, a: 0, b: 1, .. }) => {}
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
