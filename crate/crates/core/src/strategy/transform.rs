//! Strategy transformers: wrappers that rewrite another strategy's moves.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{Player, Rule, StrategyError, StrategySpec, View};
use crate::game::{actions_to_string, Action};
use crate::seeding::StreamRng;

#[derive(Clone, Debug, PartialEq)]
pub enum Transformer {
    /// Plays the opposite of every inner move.
    FlipAll,
    /// Flips each inner move with the given probability.
    NoisyFlip(f64),
    /// Replaces the first moves with a fixed sequence.
    InitialPlays(Vec<Action>),
    /// Replaces the last moves with a fixed sequence; needs a known match length.
    FinalPlays(Vec<Action>),
}

impl Transformer {
    /// Display name of `inner` under this transformer. Matches the registry syntax.
    pub fn decorate(&self, inner: &str) -> String {
        match self {
            Transformer::FlipAll => format!("Flip({inner})"),
            Transformer::NoisyFlip(p) => format!("Noisy({p},{inner})"),
            Transformer::InitialPlays(seq) => format!("Initial({},{inner})", actions_to_string(seq)),
            Transformer::FinalPlays(seq) => format!("Final({},{inner})", actions_to_string(seq)),
        }
    }
}

impl fmt::Display for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decorate("_"))
    }
}

pub fn apply_transformer(kind: Transformer, inner: StrategySpec) -> StrategySpec {
    let mut classifier = *inner.classifier();
    match &kind {
        Transformer::NoisyFlip(p) if *p > 0.0 => classifier.stochastic = true,
        Transformer::FinalPlays(_) => classifier.uses_game_length = true,
        _ => {}
    }
    let name = kind.decorate(inner.name());
    StrategySpec::new(name, classifier, Rule::Transformed { transformer: kind, inner: Arc::new(inner) })
}

pub(crate) fn decide(
    kind: &Transformer,
    name: &str,
    inner: &mut Player<'_>,
    view: &View<'_>,
    rng: &mut StreamRng,
) -> Result<Action, StrategyError> {
    // The inner strategy always runs so that its own state and draws advance
    // exactly as they would unwrapped.
    let proposed = inner.decide(view, rng)?;
    let round = view.round();
    Ok(match kind {
        Transformer::FlipAll => proposed.flip(),
        Transformer::NoisyFlip(p) => {
            if *p > 0.0 && rng.random::<f64>() < *p {
                proposed.flip()
            } else {
                proposed
            }
        }
        Transformer::InitialPlays(seq) => seq.get(round).copied().unwrap_or(proposed),
        Transformer::FinalPlays(seq) => {
            let length = view.length.ok_or_else(|| StrategyError::LengthUnknown { strategy: name.to_owned() })?;
            let remaining = length.saturating_sub(round);
            if remaining >= 1 && remaining <= seq.len() {
                seq[seq.len() - remaining]
            } else {
                proposed
            }
        }
    })
}
