//! Strategy contract, classifier metadata and the built-in roster.
//!
//! A [`StrategySpec`] is an immutable, shareable description of a decision
//! rule. Per-match state lives in a [`Player`] obtained from
//! [`StrategySpec::player`]; dropping the player (or calling
//! [`Player::reset`]) discards it.

mod lookup;
mod roster;
mod rules;
mod transform;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Action, Game};
use crate::seeding::StreamRng;

pub use lookup::{LookupTable, LookupTableError};
pub use roster::{
    builtin_roster, demo_set, names, resolve, split_names, suggest, RegistryError, DEMO_NAMES, ROSTER_NAMES,
};
pub use rules::{MemoryOne, Rule};
pub use transform::{apply_transformer, Transformer};

/// How many past rounds a rule looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemoryDepth {
    Finite(u32),
    Infinite,
}

impl fmt::Display for MemoryDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryDepth::Finite(k) => write!(f, "{k}"),
            MemoryDepth::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for MemoryDepth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MemoryDepth::Finite(k) => s.serialize_u32(*k),
            MemoryDepth::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MemoryDepth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Finite(u32),
            Named(String),
        }
        match Raw::deserialize(d)? {
            Raw::Finite(k) => Ok(MemoryDepth::Finite(k)),
            Raw::Named(s) if s == "inf" => Ok(MemoryDepth::Infinite),
            Raw::Named(s) => Err(serde::de::Error::custom(format!("bad memory depth {s:?}"))),
        }
    }
}

/// Classification metadata attached to every strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Classifier {
    pub memory_depth: MemoryDepth,
    pub stochastic: bool,
    pub uses_game_length: bool,
    pub inspects_source: bool,
    pub manipulates_source: bool,
    pub manipulates_state: bool,
}

impl Classifier {
    pub const fn new(memory_depth: MemoryDepth, stochastic: bool) -> Classifier {
        Classifier {
            memory_depth,
            stochastic,
            uses_game_length: false,
            inspects_source: false,
            manipulates_source: false,
            manipulates_state: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("{strategy}: histories have different lengths ({own} vs {opp})")]
    HistoryMismatch { strategy: String, own: usize, opp: usize },
    #[error("{strategy}: match length is not known in advance")]
    LengthUnknown { strategy: String },
    #[error("{strategy}: lookup key {key} missing from table")]
    KeyMissing { strategy: String, key: usize },
}

/// What a strategy may look at when choosing its next move.
#[derive(Clone, Copy, Debug)]
pub struct View<'a> {
    /// Own actions as actually played (after noise).
    pub own: &'a [Action],
    /// Opponent actions as actually played.
    pub opp: &'a [Action],
    pub game: &'a Game,
    /// Total match length, when fixed in advance.
    pub length: Option<usize>,
}

impl<'a> View<'a> {
    pub fn new(own: &'a [Action], opp: &'a [Action], game: &'a Game) -> View<'a> {
        View { own, opp, game, length: None }
    }

    pub fn with_length(self, length: Option<usize>) -> View<'a> {
        View { length, ..self }
    }

    /// Zero-based index of the round being decided.
    pub fn round(&self) -> usize {
        self.own.len()
    }

    pub fn opp_last(&self) -> Option<Action> {
        self.opp.last().copied()
    }
}

/// A named decision rule with its classifier.
#[derive(Clone, Debug)]
pub struct StrategySpec {
    name: String,
    classifier: Classifier,
    rule: Rule,
}

impl StrategySpec {
    pub fn new(name: impl Into<String>, classifier: Classifier, rule: Rule) -> StrategySpec {
        StrategySpec { name: name.into(), classifier, rule }
    }

    /// A strategy driven by `table`.
    pub fn looker_up(table: LookupTable) -> StrategySpec {
        let classifier = table.classifier();
        StrategySpec::new("LookerUp", classifier, Rule::LookerUp(Arc::new(table)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn with_name(mut self, name: impl Into<String>) -> StrategySpec {
        self.name = name.into();
        self
    }

    /// Fresh per-match state for this strategy.
    pub fn player(&self) -> Player<'_> {
        Player::new(self)
    }
}

/// Per-match state of one strategy.
#[derive(Debug)]
pub struct Player<'s> {
    spec: &'s StrategySpec,
    memory: rules::Memory<'s>,
}

impl<'s> Player<'s> {
    fn new(spec: &'s StrategySpec) -> Player<'s> {
        Player { spec, memory: rules::Memory::fresh(&spec.rule) }
    }

    pub fn spec(&self) -> &'s StrategySpec {
        self.spec
    }

    pub fn reset(&mut self) {
        self.memory = rules::Memory::fresh(&self.spec.rule);
    }

    /// Chooses the next intended action. Randomness comes only from `rng`.
    pub fn decide(&mut self, view: &View<'_>, rng: &mut StreamRng) -> Result<Action, StrategyError> {
        if view.own.len() != view.opp.len() {
            return Err(StrategyError::HistoryMismatch {
                strategy: self.spec.name.clone(),
                own: view.own.len(),
                opp: view.opp.len(),
            });
        }
        rules::decide(self.spec, &mut self.memory, view, rng)
    }
}

/// Keeps the strategies whose classifier satisfies `predicate`, in order.
pub fn filter_by_classifier<P>(roster: &[StrategySpec], predicate: P) -> Vec<StrategySpec>
where
    P: Fn(&Classifier) -> bool,
{
    roster.iter().filter(|s| predicate(&s.classifier)).cloned().collect()
}
