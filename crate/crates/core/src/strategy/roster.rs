//! Built-in strategies and name resolution.

use thiserror::Error;

use super::transform::{apply_transformer, Transformer};
use super::{Classifier, MemoryDepth, MemoryOne, Rule, StrategySpec};
use crate::game::{parse_actions, C, D};

/// Stewart–Plotkin tournament roster, in tournament order.
pub const ROSTER_NAMES: [&str; 19] = [
    "Cooperator",
    "Defector",
    "ZD-Extort-2",
    "Joss: 0.9",
    "Hard Tit For Tat",
    "Hard Tit For 2 Tats",
    "Tit For Tat",
    "Grudger",
    "Tit For 2 Tats",
    "Win-Stay Lose-Shift",
    "Random: 0.5",
    "ZD-GTFT-2",
    "GTFT: 0.33",
    "Hard Prober",
    "Prober",
    "Prober 2",
    "Prober 3",
    "Calculator",
    "Hard Go By Majority",
];

/// The five-strategy demonstration set.
pub const DEMO_NAMES: [&str; 5] = ["Cooperator", "Defector", "Tit For Tat", "Grudger", "Random: 0.5"];

fn builtin(name: &str) -> Option<StrategySpec> {
    use MemoryDepth::{Finite, Infinite};
    let (depth, stochastic, rule) = match name {
        "Cooperator" => (Finite(0), false, Rule::Constant(C)),
        "Defector" => (Finite(0), false, Rule::Constant(D)),
        "ZD-Extort-2" => {
            (Finite(1), true, Rule::MemoryOne(MemoryOne { probs: [8.0 / 9.0, 0.5, 1.0 / 3.0, 0.0], opening: C }))
        }
        "Joss: 0.9" => (Finite(1), true, Rule::Joss { p_cooperate: 0.9 }),
        "Hard Tit For Tat" => (Finite(3), false, Rule::HardTitForTat),
        "Hard Tit For 2 Tats" => (Finite(3), false, Rule::HardTitFor2Tats),
        "Tit For Tat" => (Finite(1), false, Rule::TitForTat),
        "Grudger" => (Infinite, false, Rule::Grudger),
        "Tit For 2 Tats" => (Finite(2), false, Rule::TitFor2Tats),
        "Win-Stay Lose-Shift" => (Finite(1), false, Rule::WinStayLoseShift),
        "Random: 0.5" => (Finite(0), true, Rule::Random { p_cooperate: 0.5 }),
        "ZD-GTFT-2" => (Finite(1), true, Rule::MemoryOne(MemoryOne { probs: [1.0, 1.0 / 8.0, 1.0, 0.25], opening: C })),
        "GTFT: 0.33" => (Finite(1), true, Rule::Gtft { forgiveness: 1.0 / 3.0 }),
        "Hard Prober" => (Infinite, false, Rule::HardProber),
        "Prober" => (Infinite, false, Rule::Prober),
        "Prober 2" => (Infinite, false, Rule::Prober2),
        "Prober 3" => (Infinite, false, Rule::Prober3),
        "Calculator" => (Infinite, true, Rule::Calculator),
        "Hard Go By Majority" => (Infinite, false, Rule::HardGoByMajority),
        _ => return None,
    };
    Some(StrategySpec::new(name, Classifier::new(depth, stochastic), rule))
}

pub fn builtin_roster() -> Vec<StrategySpec> {
    ROSTER_NAMES.iter().map(|n| builtin(n).expect("roster name")).collect()
}

pub fn demo_set() -> Vec<StrategySpec> {
    DEMO_NAMES.iter().map(|n| builtin(n).expect("demo name")).collect()
}

/// Every plain (untransformed) name the registry knows.
pub fn names() -> &'static [&'static str] {
    &ROSTER_NAMES
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("unknown strategy {name:?}{}", suggestion.as_ref().map(|s| format!(" (did you mean {s:?}?)")).unwrap_or_default())]
    UnknownStrategy { name: String, suggestion: Option<String> },
    #[error("malformed transformer {name:?}: {reason}")]
    BadTransformer { name: String, reason: String },
}

/// Nearest known plain name by edit distance, if reasonably close.
pub fn suggest(name: &str) -> Option<String> {
    let lowered = name.to_lowercase();
    names()
        .iter()
        .map(|candidate| (strsim::levenshtein(&lowered, &candidate.to_lowercase()), *candidate))
        .min_by_key(|(d, _)| *d)
        .filter(|(d, candidate)| *d <= (candidate.len() / 2).max(2))
        .map(|(_, candidate)| candidate.to_owned())
}

/// Splits `a,b` at the first comma outside parentheses.
fn split_first_arg(args: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in args.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&args[..i], &args[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Splits a comma-separated list of names, keeping commas inside parentheses:
/// `Initial(DD,Tit For Tat),Defector` is two names. Blank entries are dropped.
pub fn split_names(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = list;
    while let Some((head, tail)) = split_first_arg(rest) {
        out.push(head.trim().to_owned());
        rest = tail;
    }
    out.push(rest.trim().to_owned());
    out.retain(|s| !s.is_empty());
    out
}

/// Resolves a plain roster name or transformer syntax:
/// `Flip(<name>)`, `Noisy(<p>,<name>)`, `Initial(<seq>,<name>)`,
/// `Final(<seq>,<name>)`, nesting allowed.
pub fn resolve(name: &str) -> Result<StrategySpec, RegistryError> {
    let name = name.trim();
    if let Some(spec) = builtin(name) {
        return Ok(spec);
    }
    let bad = |reason: &str| RegistryError::BadTransformer { name: name.to_owned(), reason: reason.to_owned() };

    let parsed = name.split_once('(').filter(|_| name.ends_with(')'));
    let Some((head, rest)) = parsed else {
        return Err(RegistryError::UnknownStrategy { name: name.to_owned(), suggestion: suggest(name) });
    };
    let args = &rest[..rest.len() - 1];
    let (kind, inner) = match head.trim() {
        "Flip" => (Transformer::FlipAll, args),
        "Noisy" | "Initial" | "Final" => {
            let (first, inner) = split_first_arg(args).ok_or_else(|| bad("expected two arguments"))?;
            let first = first.trim();
            let kind = match head.trim() {
                "Noisy" => {
                    let p: f64 = first.parse().map_err(|_| bad("flip probability is not a number"))?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(bad("flip probability must lie in [0, 1]"));
                    }
                    Transformer::NoisyFlip(p)
                }
                "Initial" => {
                    Transformer::InitialPlays(parse_actions(first).ok_or_else(|| bad("plays must be a C/D string"))?)
                }
                _ => Transformer::FinalPlays(parse_actions(first).ok_or_else(|| bad("plays must be a C/D string"))?),
            };
            (kind, inner)
        }
        _ => return Err(RegistryError::UnknownStrategy { name: name.to_owned(), suggestion: suggest(name) }),
    };
    let inner = resolve(inner)?;
    Ok(apply_transformer(kind, inner))
}
