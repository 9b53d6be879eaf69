use std::sync::Arc;

use rand::Rng;

use super::transform::{self, Transformer};
use super::{LookupTable, Player, StrategyError, StrategySpec, View};
use crate::game::{Action, C, D};
use crate::seeding::StreamRng;

/// Built-in decision rules.
#[derive(Clone, Debug)]
pub enum Rule {
    /// Always plays the given action.
    Constant(Action),
    /// Cooperates with the given probability each round.
    Random {
        p_cooperate: f64,
    },
    TitForTat,
    TitFor2Tats,
    HardTitForTat,
    HardTitFor2Tats,
    Grudger,
    /// Tit For Tat that only honours a cooperation with probability `p_cooperate`.
    Joss {
        p_cooperate: f64,
    },
    WinStayLoseShift,
    /// Tit For Tat that forgives a defection with probability `forgiveness`.
    Gtft {
        forgiveness: f64,
    },
    MemoryOne(MemoryOne),
    Prober,
    Prober2,
    Prober3,
    HardProber,
    Calculator,
    HardGoByMajority,
    LookerUp(Arc<LookupTable>),
    Transformed {
        transformer: Transformer,
        inner: Arc<StrategySpec>,
    },
}

/// Memory-one rule: cooperation probabilities after each previous joint
/// outcome, ordered `[CC, CD, DC, DD]` as (own, opponent).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryOne {
    pub probs: [f64; 4],
    pub opening: Action,
}

impl MemoryOne {
    pub fn probability_after(&self, own: Action, opp: Action) -> f64 {
        self.probs[own.bit() * 2 + opp.bit()]
    }
}

/// Rounds of Joss play before Calculator classifies its opponent.
pub(crate) const CALCULATOR_PROBE: usize = 20;
const CALCULATOR_JOSS: f64 = 0.9;

#[derive(Debug)]
pub(crate) enum Memory<'s> {
    Stateless,
    Wrapped(Box<Player<'s>>),
}

impl<'s> Memory<'s> {
    pub(crate) fn fresh(rule: &'s Rule) -> Memory<'s> {
        match rule {
            Rule::Transformed { inner, .. } => Memory::Wrapped(Box::new(inner.player())),
            _ => Memory::Stateless,
        }
    }
}

/// Draws once from `rng` and cooperates with probability `p`.
pub(crate) fn cooperate_with(p: f64, rng: &mut StreamRng) -> Action {
    if rng.random::<f64>() < p {
        C
    } else {
        D
    }
}

fn tit_for_tat(view: &View<'_>) -> Action {
    view.opp_last().unwrap_or(C)
}

fn last(actions: &[Action], k: usize) -> &[Action] {
    &actions[actions.len().saturating_sub(k)..]
}

/// Scripted opening followed by a probe verdict: `punish` if the opponent's
/// replies match `trigger`, otherwise Tit For Tat.
fn probe(view: &View<'_>, opening: &[Action], trigger: impl Fn(&[Action]) -> bool, then: Action) -> Action {
    let round = view.round();
    if round < opening.len() {
        opening[round]
    } else if trigger(view.opp) {
        then
    } else {
        tit_for_tat(view)
    }
}

/// True when `moves` is several whole copies of a cycle of length 1..=10.
pub(crate) fn is_whole_cycle(moves: &[Action]) -> bool {
    (1..=10)
        .filter(|p| moves.len().is_multiple_of(*p) && moves.len() > *p)
        .any(|p| moves.chunks_exact(p).all(|chunk| chunk == &moves[..p]))
}

pub(crate) fn decide(
    spec: &StrategySpec,
    memory: &mut Memory<'_>,
    view: &View<'_>,
    rng: &mut StreamRng,
) -> Result<Action, StrategyError> {
    let round = view.round();
    let opp = view.opp;
    let action = match spec.rule() {
        Rule::Constant(a) => *a,
        Rule::Random { p_cooperate } => cooperate_with(*p_cooperate, rng),
        Rule::TitForTat => tit_for_tat(view),
        Rule::TitFor2Tats => {
            if opp.ends_with(&[D, D]) {
                D
            } else {
                C
            }
        }
        Rule::HardTitForTat => {
            if last(opp, 3).contains(&D) {
                D
            } else {
                C
            }
        }
        Rule::HardTitFor2Tats => {
            if last(opp, 3).windows(2).any(|w| w == [D, D]) {
                D
            } else {
                C
            }
        }
        Rule::Grudger => {
            if opp.contains(&D) {
                D
            } else {
                C
            }
        }
        Rule::Joss { p_cooperate } => match tit_for_tat(view) {
            C => cooperate_with(*p_cooperate, rng),
            D => D,
        },
        Rule::WinStayLoseShift => match (view.own.last(), view.opp.last()) {
            (Some(&mine), Some(&theirs)) => {
                let (payoff, _) = view.game.score(mine, theirs);
                if payoff == view.game.reward() || payoff == view.game.temptation() {
                    mine
                } else {
                    mine.flip()
                }
            }
            _ => C,
        },
        Rule::Gtft { forgiveness } => match view.opp_last() {
            None | Some(C) => C,
            Some(D) => cooperate_with(*forgiveness, rng),
        },
        Rule::MemoryOne(m) => match (view.own.last(), view.opp.last()) {
            (Some(&mine), Some(&theirs)) => cooperate_with(m.probability_after(mine, theirs), rng),
            _ => m.opening,
        },
        // Round numbers below are one-based: rounds 2 and 3 are opp[1], opp[2].
        Rule::Prober => probe(view, &[D, C, C], |o| o[1] == C && o[2] == C, D),
        Rule::Prober2 => probe(view, &[D, C, C], |o| o[1] == D && o[2] == C, C),
        Rule::Prober3 => probe(view, &[D, C], |o| o[1] == C, D),
        Rule::HardProber => probe(view, &[D, D, C, C], |o| o[1] == C && o[2] == C, D),
        Rule::Calculator => {
            if round < CALCULATOR_PROBE {
                match tit_for_tat(view) {
                    C => cooperate_with(CALCULATOR_JOSS, rng),
                    D => D,
                }
            } else if is_whole_cycle(&opp[..CALCULATOR_PROBE]) {
                D
            } else {
                tit_for_tat(view)
            }
        }
        Rule::HardGoByMajority => {
            let defections = opp.iter().filter(|a| **a == D).count();
            if opp.len() - defections > defections {
                C
            } else {
                D
            }
        }
        Rule::LookerUp(table) => {
            table.decide(view).map_err(|key| StrategyError::KeyMissing { strategy: spec.name().to_owned(), key })?
        }
        Rule::Transformed { transformer, .. } => {
            let Memory::Wrapped(inner) = memory else {
                unreachable!("transformed strategies always carry an inner player")
            };
            transform::decide(transformer, spec.name(), inner, view, rng)?
        }
    };
    Ok(action)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_cycles() {
        let all_c = vec![C; 20];
        assert!(is_whole_cycle(&all_c));
        let alt: Vec<Action> = (0..20).map(|i| if i % 2 == 0 { C } else { D }).collect();
        assert!(is_whole_cycle(&alt));
        let period5: Vec<Action> = (0..20).map(|i| if i % 5 == 4 { D } else { C }).collect();
        assert!(is_whole_cycle(&period5));
        // period 3 does not tile 20 moves
        let period3: Vec<Action> = (0..20).map(|i| if i % 3 == 2 { D } else { C }).collect();
        assert!(!is_whole_cycle(&period3));
        let mut broken = all_c.clone();
        broken[19] = D;
        assert!(!is_whole_cycle(&broken));
    }

    #[test]
    fn memory_one_indexing() {
        let m = MemoryOne { probs: [0.1, 0.2, 0.3, 0.4], opening: C };
        assert_eq!(m.probability_after(C, C), 0.1);
        assert_eq!(m.probability_after(C, D), 0.2);
        assert_eq!(m.probability_after(D, C), 0.3);
        assert_eq!(m.probability_after(D, D), 0.4);
    }
}
