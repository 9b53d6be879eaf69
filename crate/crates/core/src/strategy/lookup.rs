//! Lookup-table strategies keyed on the opponent's opening moves and the most
//! recent joint moves.
//!
//! A key is the opponent's first `m` actions followed by the last `n`
//! `(own, opponent)` pairs, oldest first. Keys are indexed by reading that
//! sequence as a binary number (C = 0, D = 1, first action most significant),
//! so for `m = 0, n = 1` the order is `CC, CD, DC, DD`.
//!
//! Text format:
//!
//! ```text
//! 0 1
//! CC -> C
//! CD -> D
//! DC -> C
//! DD -> D
//! initial: C
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Classifier, MemoryDepth, View};
use crate::game::{actions_to_string, parse_actions, Action};

/// Largest supported key width in bits (`m + 2n`).
pub const MAX_KEY_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LookupTableError {
    #[error("key width m + 2n = {0} exceeds {MAX_KEY_BITS} bits")]
    TooLarge(usize),
    #[error("table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("initial plays have length {got}, expected max(m, n) = {expected}")]
    InitialSize { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LookupTable {
    m: usize,
    n: usize,
    table: Vec<Action>,
    initial: Vec<Action>,
}

impl LookupTable {
    pub fn new(m: usize, n: usize, table: Vec<Action>, initial: Vec<Action>) -> Result<LookupTable, LookupTableError> {
        let expected = Self::key_count(m, n)?;
        if table.len() != expected {
            return Err(LookupTableError::TableSize { expected, got: table.len() });
        }
        if initial.len() != m.max(n) {
            return Err(LookupTableError::InitialSize { expected: m.max(n), got: initial.len() });
        }
        Ok(LookupTable { m, n, table, initial })
    }

    /// Every key maps to `action`; the warm-up is all cooperation.
    pub fn uniform(m: usize, n: usize, action: Action) -> Result<LookupTable, LookupTableError> {
        let keys = Self::key_count(m, n)?;
        Self::new(m, n, vec![action; keys], vec![Action::Cooperate; m.max(n)])
    }

    /// Number of keys, `2^m * 4^n`.
    pub fn key_count(m: usize, n: usize) -> Result<usize, LookupTableError> {
        let bits = m + 2 * n;
        if bits > MAX_KEY_BITS {
            return Err(LookupTableError::TooLarge(bits));
        }
        Ok(1 << bits)
    }

    /// Length of a genome (table entries followed by initial plays).
    pub fn genome_len(m: usize, n: usize) -> Result<usize, LookupTableError> {
        Ok(Self::key_count(m, n)? + m.max(n))
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn entries(&self) -> &[Action] {
        &self.table
    }
    pub fn initial_actions(&self) -> &[Action] {
        &self.initial
    }

    pub fn classifier(&self) -> Classifier {
        let depth = if self.m > 0 { MemoryDepth::Infinite } else { MemoryDepth::Finite(self.n as u32) };
        Classifier::new(depth, false)
    }

    /// Index of the key built from the opponent's opening and recent pairs.
    pub fn key_index(&self, opp_first: &[Action], recent: &[(Action, Action)]) -> usize {
        let mut key = 0usize;
        for a in opp_first {
            key = (key << 1) | a.bit();
        }
        for (own, opp) in recent {
            key = (key << 2) | (own.bit() << 1) | opp.bit();
        }
        key
    }

    pub fn get(&self, key: usize) -> Option<Action> {
        self.table.get(key).copied()
    }

    /// Sets the action for one key. Panics if `key` is out of range.
    pub fn set(&mut self, key: usize, action: Action) {
        self.table[key] = action;
    }

    /// Next action; `Err(key)` only if the key is missing from the table.
    pub fn decide(&self, view: &View<'_>) -> Result<Action, usize> {
        let round = view.round();
        if round < self.initial.len() {
            return Ok(self.initial[round]);
        }
        let recent: Vec<(Action, Action)> =
            view.own[round - self.n..].iter().copied().zip(view.opp[round - self.n..].iter().copied()).collect();
        let key = self.key_index(&view.opp[..self.m], &recent);
        self.get(key).ok_or(key)
    }

    pub fn to_genome(&self) -> Vec<Action> {
        self.table.iter().chain(&self.initial).copied().collect()
    }

    pub fn from_genome(m: usize, n: usize, genome: &[Action]) -> Result<LookupTable, LookupTableError> {
        let keys = Self::key_count(m, n)?;
        let expected = keys + m.max(n);
        if genome.len() != expected {
            return Err(LookupTableError::TableSize { expected, got: genome.len() });
        }
        Self::new(m, n, genome[..keys].to_vec(), genome[keys..].to_vec())
    }

    /// The `C`/`D` spelling of a key index.
    pub fn key_label(&self, key: usize) -> String {
        let bits = self.m + 2 * self.n;
        (0..bits).rev().map(|shift| if (key >> shift) & 1 == 1 { 'D' } else { 'C' }).collect()
    }
}

impl fmt::Display for LookupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m, self.n)?;
        for (key, action) in self.table.iter().enumerate() {
            writeln!(f, "{} -> {}", self.key_label(key), action)?;
        }
        writeln!(f, "initial: {}", actions_to_string(&self.initial))
    }
}

impl FromStr for LookupTable {
    type Err = LookupTableError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: String| LookupTableError::Parse { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

        let (_, header) = lines.next().ok_or_else(|| err(1, "missing `m n` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(1, format!("bad dimension {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [m, n] = dims[..] else {
            return Err(err(1, "header must be `m n`".into()));
        };
        let keys = LookupTable::key_count(m, n)?;
        let width = m + 2 * n;

        let mut table: Vec<Option<Action>> = vec![None; keys];
        let mut initial = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if let Some(rest) = line.trim().strip_prefix("initial:") {
                let plays =
                    parse_actions(rest.trim()).ok_or_else(|| err(lineno, format!("bad initial plays {rest:?}")))?;
                initial = Some(plays);
                continue;
            }
            let (key, action) = line
                .split_once("->")
                .ok_or_else(|| err(lineno, format!("expected `<key> -> <action>`, got {line:?}")))?;
            let key_actions = parse_actions(key.trim())
                .filter(|k| k.len() == width)
                .ok_or_else(|| err(lineno, format!("bad key {:?}", key.trim())))?;
            let action: Action = action.parse().map_err(|e: String| err(lineno, e))?;
            let index = key_actions.iter().fold(0usize, |acc, a| (acc << 1) | a.bit());
            if table[index].replace(action).is_some() {
                return Err(err(lineno, format!("duplicate key {:?}", key.trim())));
            }
        }
        let table: Vec<Action> = table
            .into_iter()
            .enumerate()
            .map(|(k, a)| {
                a.ok_or_else(|| LookupTableError::Parse { line: 0, message: format!("key index {k} has no entry") })
            })
            .collect::<Result<_, _>>()?;
        let initial = initial.ok_or_else(|| err(0, "missing `initial:` line".into()))?;
        LookupTable::new(m, n, table, initial)
    }
}
