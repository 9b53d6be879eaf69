//! Payoff model of the one-shot prisoner's dilemma.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "C")]
    Cooperate,
    #[serde(rename = "D")]
    Defect,
}

pub use Action::{Cooperate as C, Defect as D};

impl Action {
    pub fn flip(self) -> Action {
        match self {
            C => D,
            D => C,
        }
    }

    pub fn is_cooperate(self) -> bool {
        self == C
    }

    pub fn as_char(self) -> char {
        match self {
            C => 'C',
            D => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Action> {
        match c {
            'C' | 'c' => Some(C),
            'D' | 'd' => Some(D),
            _ => None,
        }
    }

    /// Bit encoding used by lookup tables: C = 0, D = 1.
    pub(crate) fn bit(self) -> usize {
        match self {
            C => 0,
            D => 1,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Encodes a sequence of actions as a `C`/`D` string, e.g. `CDDDD`.
pub fn actions_to_string(actions: &[Action]) -> String {
    actions.iter().map(|a| a.as_char()).collect()
}

/// Parses a `C`/`D` string. Returns `None` on any other character.
pub fn parse_actions(s: &str) -> Option<Vec<Action>> {
    s.chars().map(Action::from_char).collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("payoffs must satisfy T > R > P > S, but {0}")]
    Ordering(&'static str),
    #[error("payoffs must satisfy 2R > T + S, but 2R = {two_r} and T + S = {t_plus_s}")]
    Alternation { two_r: f64, t_plus_s: f64 },
    #[error("payoffs must be finite")]
    NotFinite,
}

/// Payoff quadruple (R, S, T, P).
///
/// Constructed only through [`Game::new`], which enforces `T > R > P > S` and
/// `2R > T + S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Game {
    reward: f64,
    sucker: f64,
    temptation: f64,
    punishment: f64,
}

impl Game {
    pub fn new(r: f64, s: f64, t: f64, p: f64) -> Result<Game, GameError> {
        if ![r, s, t, p].iter().all(|v| v.is_finite()) {
            return Err(GameError::NotFinite);
        }
        if t <= r {
            return Err(GameError::Ordering("T > R fails"));
        }
        if r <= p {
            return Err(GameError::Ordering("R > P fails"));
        }
        if p <= s {
            return Err(GameError::Ordering("P > S fails"));
        }
        if 2.0 * r <= t + s {
            return Err(GameError::Alternation { two_r: 2.0 * r, t_plus_s: t + s });
        }
        Ok(Game { reward: r, sucker: s, temptation: t, punishment: p })
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }
    pub fn sucker(&self) -> f64 {
        self.sucker
    }
    pub fn temptation(&self) -> f64 {
        self.temptation
    }
    pub fn punishment(&self) -> f64 {
        self.punishment
    }

    /// Payoffs `(first, second)` for one round.
    pub fn score(&self, a: Action, b: Action) -> (f64, f64) {
        match (a, b) {
            (C, C) => (self.reward, self.reward),
            (D, D) => (self.punishment, self.punishment),
            (C, D) => (self.sucker, self.temptation),
            (D, C) => (self.temptation, self.sucker),
        }
    }
}

impl Default for Game {
    /// (R, S, T, P) = (3, 0, 5, 1).
    fn default() -> Self {
        Game { reward: 3.0, sucker: 0.0, temptation: 5.0, punishment: 1.0 }
    }
}

impl<'de> Deserialize<'de> for Game {
    fn deserialize<De: serde::Deserializer<'de>>(d: De) -> Result<Self, De::Error> {
        #[derive(Deserialize)]
        struct Raw {
            reward: f64,
            sucker: f64,
            temptation: f64,
            punishment: f64,
        }
        let raw = Raw::deserialize(d)?;
        Game::new(raw.reward, raw.sucker, raw.temptation, raw.punishment).map_err(serde::de::Error::custom)
    }
}

/// Single-round payoffs; the first element belongs to the player of `a`.
pub fn score_pair(a: Action, b: Action, game: &Game) -> (f64, f64) {
    game.score(a, b)
}

impl FromStr for Action {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Action::from_char), chars.next()) {
            (Some(a), None) => Ok(a),
            _ => Err(format!("not an action: {s:?}")),
        }
    }
}
