//! Iterated prisoner's dilemma engine.
//!
//! The crate is organised bottom-up:
//!
//! * [`game`] holds the payoff model and the one-shot scoring rule.
//! * [`seeding`] derives reproducible per-match random streams.
//! * [`strategy`] holds the strategy contract, the built-in roster, the
//!   lookup-table framework and strategy transformers.
//! * [`engine`] plays a single match (noise, probabilistic ending).
//! * [`tournament`] generates pairings and plays them in parallel.
//! * [`results`] turns an interaction archive into rankings and metrics.
//! * [`evolution`] runs Moran processes and ecological (replicator) dynamics.
//! * [`training`] evolves lookup tables against an opponent pool.
//! * [`export`] reads and writes the CSV/JSON file formats.

pub mod engine;
pub mod evolution;
pub mod export;
pub mod game;
pub mod results;
pub mod seeding;
pub mod strategy;
pub mod tournament;
pub mod training;

pub use engine::{play_match, MatchError, MatchLength, MatchRecord, MatchSpec};
pub use game::{score_pair, Action, Game, GameError};
pub use strategy::{
    builtin_roster, demo_set, filter_by_classifier, Classifier, LookupTable, MemoryDepth, StrategyError, StrategySpec,
    Transformer,
};
pub use tournament::{run_tournament, InteractionArchive, TournamentSpec};
