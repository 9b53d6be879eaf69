//! The match engine: two strategies, one seeded stream set, a full record.
//!
//! Each round both strategies see the actual (post-noise) histories and return
//! an intended action. Each intended action is then flipped independently with
//! probability `noise`, drawn from that seat's noise stream. The actual actions
//! are recorded and scored. Under probabilistic ending the match stops after
//! each completed round with probability `prob_end`, drawn from the ending
//! stream, so the length is geometric with mean `1 / prob_end`.
//!
//! Strategies draw from their own per-seat stream, so one strategy's
//! randomness never shifts another's.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Action, Game};
use crate::seeding::{stream, stream_rng};
use crate::strategy::{StrategyError, StrategySpec, View};

/// How long a match lasts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MatchLength {
    /// Exactly this many rounds; strategies are told the length.
    Fixed(usize),
    /// After every round the match ends with probability `prob_end`;
    /// `cap`, when set, bounds the number of rounds.
    Geometric { prob_end: f64, cap: Option<usize> },
}

impl MatchLength {
    /// Builds a length from the usual `turns` / `prob_end` pair: `prob_end = 0`
    /// means fixed length, otherwise `turns` is an optional cap.
    pub fn from_parts(turns: Option<usize>, prob_end: f64) -> Result<MatchLength, MatchError> {
        let length = if prob_end == 0.0 {
            let turns = turns.ok_or_else(|| invalid("turns", "required when prob_end is 0"))?;
            MatchLength::Fixed(turns)
        } else {
            MatchLength::Geometric { prob_end, cap: turns }
        };
        length.validate()?;
        Ok(length)
    }

    /// Length announced to strategies, if fixed in advance.
    pub fn known(&self) -> Option<usize> {
        match self {
            MatchLength::Fixed(n) => Some(*n),
            MatchLength::Geometric { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        match *self {
            MatchLength::Fixed(0) => Err(invalid("turns", "must be positive")),
            MatchLength::Fixed(_) => Ok(()),
            MatchLength::Geometric { prob_end, cap } => {
                if !(prob_end > 0.0 && prob_end <= 1.0) {
                    return Err(invalid("prob_end", "must lie in (0, 1] for probabilistic ending"));
                }
                if cap == Some(0) {
                    return Err(invalid("turns", "cap must be positive"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchSpec {
    pub length: MatchLength,
    pub noise: f64,
    pub game: Game,
    pub seed: u64,
}

impl MatchSpec {
    /// Noiseless fixed-length match with the default game and seed 0.
    pub fn fixed(turns: usize) -> MatchSpec {
        MatchSpec { length: MatchLength::Fixed(turns), noise: 0.0, game: Game::default(), seed: 0 }
    }

    /// Noiseless match ending with probability `prob_end` after every round.
    pub fn geometric(prob_end: f64, cap: Option<usize>) -> MatchSpec {
        MatchSpec { length: MatchLength::Geometric { prob_end, cap }, ..MatchSpec::fixed(1) }
    }

    pub fn with_noise(self, noise: f64) -> MatchSpec {
        MatchSpec { noise, ..self }
    }

    pub fn with_seed(self, seed: u64) -> MatchSpec {
        MatchSpec { seed, ..self }
    }

    pub fn with_game(self, game: Game) -> MatchSpec {
        MatchSpec { game, ..self }
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(invalid("noise", "must lie in [0, 1]"));
        }
        self.length.validate()
    }
}

/// Full interaction history of one match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub actions_a: Vec<Action>,
    pub actions_b: Vec<Action>,
    pub score_a: f64,
    pub score_b: f64,
    pub seed: u64,
}

impl MatchRecord {
    pub fn length(&self) -> usize {
        self.actions_a.len()
    }

    /// The same match seen from the other seat.
    pub fn mirrored(&self) -> MatchRecord {
        MatchRecord {
            actions_a: self.actions_b.clone(),
            actions_b: self.actions_a.clone(),
            score_a: self.score_b,
            score_b: self.score_a,
            seed: self.seed,
        }
    }

    pub fn cooperations_a(&self) -> usize {
        self.actions_a.iter().filter(|a| a.is_cooperate()).count()
    }

    pub fn cooperations_b(&self) -> usize {
        self.actions_b.iter().filter(|a| a.is_cooperate()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("invalid {field}: {reason}")]
    InvalidValue { field: &'static str, reason: &'static str },
    #[error("strategy fault: {0}")]
    StrategyFault(#[from] StrategyError),
}

fn invalid(field: &'static str, reason: &'static str) -> MatchError {
    MatchError::InvalidValue { field, reason }
}

pub fn play_match(spec: &MatchSpec, strat_a: &StrategySpec, strat_b: &StrategySpec) -> Result<MatchRecord, MatchError> {
    spec.validate()?;
    let mut player_a = strat_a.player();
    let mut player_b = strat_b.player();
    let mut rng_a = stream_rng(spec.seed, stream::PLAYER_A);
    let mut rng_b = stream_rng(spec.seed, stream::PLAYER_B);
    let mut noise_a = stream_rng(spec.seed, stream::NOISE_A);
    let mut noise_b = stream_rng(spec.seed, stream::NOISE_B);
    let mut ending = stream_rng(spec.seed, stream::ENDING);

    let known = spec.length.known();
    let (cap, prob_end) = match spec.length {
        MatchLength::Fixed(n) => (Some(n), 0.0),
        MatchLength::Geometric { prob_end, cap } => (cap, prob_end),
    };

    let capacity = cap.unwrap_or(16).min(1 << 16);
    let mut actions_a = Vec::with_capacity(capacity);
    let mut actions_b = Vec::with_capacity(capacity);
    let (mut score_a, mut score_b) = (0.0, 0.0);

    loop {
        let intended_a =
            player_a.decide(&View::new(&actions_a, &actions_b, &spec.game).with_length(known), &mut rng_a)?;
        let intended_b =
            player_b.decide(&View::new(&actions_b, &actions_a, &spec.game).with_length(known), &mut rng_b)?;
        let actual_a = apply_noise(intended_a, spec.noise, &mut noise_a);
        let actual_b = apply_noise(intended_b, spec.noise, &mut noise_b);
        actions_a.push(actual_a);
        actions_b.push(actual_b);
        let (pa, pb) = spec.game.score(actual_a, actual_b);
        score_a += pa;
        score_b += pb;

        if cap.is_some_and(|c| actions_a.len() >= c) {
            break;
        }
        if prob_end > 0.0 && ending.random::<f64>() < prob_end {
            break;
        }
    }

    Ok(MatchRecord { actions_a, actions_b, score_a, score_b, seed: spec.seed })
}

fn apply_noise(action: Action, noise: f64, rng: &mut crate::seeding::StreamRng) -> Action {
    if noise > 0.0 && rng.random::<f64>() < noise {
        action.flip()
    } else {
        action
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{C, D};
    use crate::strategy::resolve;

    fn s(name: &str) -> StrategySpec {
        resolve(name).unwrap()
    }

    #[test]
    fn tit_for_tat_against_defector() {
        let r = play_match(&MatchSpec::fixed(5), &s("Tit For Tat"), &s("Defector")).unwrap();
        assert_eq!(r.actions_a, vec![C, D, D, D, D]);
        assert_eq!(r.actions_b, vec![D; 5]);
        assert_eq!((r.score_a, r.score_b), (4.0, 9.0));
        assert_eq!(r.length(), 5);
    }

    #[test]
    fn cooperators_under_total_noise_defect() {
        let spec = MatchSpec::fixed(3).with_noise(1.0).with_seed(99);
        let r = play_match(&spec, &s("Cooperator"), &s("Cooperator")).unwrap();
        assert_eq!(r.actions_a, vec![D; 3]);
        assert_eq!(r.actions_b, vec![D; 3]);
        assert_eq!((r.score_a, r.score_b), (3.0, 3.0));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let coop = s("Cooperator");
        let bad_noise = MatchSpec::fixed(3).with_noise(1.5);
        assert!(matches!(play_match(&bad_noise, &coop, &coop), Err(MatchError::InvalidValue { field: "noise", .. })));
        assert!(play_match(&MatchSpec::fixed(0), &coop, &coop).is_err());
        assert!(play_match(&MatchSpec::geometric(0.0, None), &coop, &coop).is_err());
        assert!(play_match(&MatchSpec::geometric(0.5, Some(0)), &coop, &coop).is_err());
        assert!(MatchLength::from_parts(None, 0.0).is_err());
        assert_eq!(MatchLength::from_parts(Some(7), 0.0).unwrap(), MatchLength::Fixed(7));
        assert_eq!(MatchLength::from_parts(None, 0.25).unwrap(), MatchLength::Geometric { prob_end: 0.25, cap: None });
    }

    #[test]
    fn probabilistic_ending_respects_cap_and_minimum() {
        let coop = s("Cooperator");
        for seed in 0..200 {
            let r = play_match(&MatchSpec::geometric(0.5, Some(3)).with_seed(seed), &coop, &coop).unwrap();
            assert!((1..=3).contains(&r.length()));
        }
        let r = play_match(&MatchSpec::geometric(1.0, None), &coop, &coop).unwrap();
        assert_eq!(r.length(), 1);
    }

    #[test]
    fn final_plays_need_a_known_length() {
        let fin = s("Final(D,Cooperator)");
        let r = play_match(&MatchSpec::fixed(3), &fin, &s("Cooperator")).unwrap();
        assert_eq!(r.actions_a, vec![C, C, D]);
        let err = play_match(&MatchSpec::geometric(0.1, None), &fin, &s("Cooperator")).unwrap_err();
        assert!(matches!(err, MatchError::StrategyFault(StrategyError::LengthUnknown { .. })));
    }
}
