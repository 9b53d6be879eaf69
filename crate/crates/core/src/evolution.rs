//! Population dynamics: the Moran process and discrete replicator
//! ("ecological") dynamics over a tournament's payoff matrix.

use rand::Rng;
use thiserror::Error;

use crate::engine::{play_match, MatchError, MatchSpec};
use crate::game::Game;
use crate::results::ResultSet;
use crate::seeding::{derive_seed, domain, stream, stream_rng};
use crate::strategy::StrategySpec;

pub const DEFAULT_MORAN_TURNS: usize = 100;

/// Tolerance on the initial proportions' sum.
const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("a Moran population needs at least two individuals, got {0}")]
    PopulationTooSmall(usize),
    #[error("population refers to type {index} but only {types} types exist")]
    UnknownType { index: usize, types: usize },
    #[error("turns per interaction must be positive")]
    NoTurns,
    #[error("individual {index} has negative fitness {fitness}")]
    NegativeFitness { index: usize, fitness: f64 },
    #[error("proportions must be non-negative and sum to 1")]
    NotOnSimplex,
    #[error("payoff matrix must be square with one row per strategy")]
    MatrixShape,
    #[error("payoff matrix entries must be finite and non-negative")]
    NegativePayoff,
    #[error("no payoff recorded for {row} against {col}")]
    MissingPayoff { row: usize, col: usize },
    #[error("mean fitness is zero")]
    DegenerateFitness,
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// A Moran population: each individual is an index into a list of types.
#[derive(Clone, Debug, PartialEq)]
pub struct MoranState {
    pub population: Vec<usize>,
    pub generation: u64,
    pub seed: u64,
    pub turns_per_interaction: usize,
}

impl MoranState {
    pub fn new(population: Vec<usize>, seed: u64) -> MoranState {
        MoranState { population, generation: 0, seed, turns_per_interaction: DEFAULT_MORAN_TURNS }
    }

    pub fn counts(&self, types: usize) -> Vec<usize> {
        let mut counts = vec![0; types];
        for &t in &self.population {
            counts[t] += 1;
        }
        counts
    }

    pub fn is_monomorphic(&self) -> bool {
        self.population.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoranOutcome {
    pub winner: usize,
    /// Birth-death steps taken before fixation.
    pub generations: u64,
    /// Count of each type, starting with the initial population.
    pub trajectory: Vec<Vec<usize>>,
}

/// Mean per-turn score of every individual against every other one.
fn moran_fitness(types: &[StrategySpec], game: &Game, state: &MoranState) -> Result<Vec<f64>, EvolutionError> {
    let n = state.population.len();
    let mut scores = vec![0.0; n];
    let mut turns = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let seed = derive_seed(state.seed, &[domain::MORAN_MATCH, state.generation, i as u64, j as u64]);
            let spec = MatchSpec::fixed(state.turns_per_interaction).with_game(*game).with_seed(seed);
            let rec = play_match(&spec, &types[state.population[i]], &types[state.population[j]])?;
            scores[i] += rec.score_a;
            scores[j] += rec.score_b;
            turns[i] += rec.length();
            turns[j] += rec.length();
        }
    }
    Ok(scores.iter().zip(&turns).map(|(s, t)| s / *t as f64).collect())
}

/// Runs a birth-death Moran process to fixation.
///
/// Each generation every pair of individuals plays one fresh match. One
/// individual is chosen to reproduce with probability proportional to its
/// fitness (uniformly if every fitness is zero) and its offspring replaces an
/// individual chosen uniformly at random, possibly the parent itself.
pub fn run_moran(types: &[StrategySpec], game: &Game, initial: MoranState) -> Result<MoranOutcome, EvolutionError> {
    let n = initial.population.len();
    if n < 2 {
        return Err(EvolutionError::PopulationTooSmall(n));
    }
    if initial.turns_per_interaction == 0 {
        return Err(EvolutionError::NoTurns);
    }
    if let Some(&index) = initial.population.iter().find(|&&t| t >= types.len()) {
        return Err(EvolutionError::UnknownType { index, types: types.len() });
    }

    let start = initial.generation;
    let mut state = initial;
    let mut trajectory = vec![state.counts(types.len())];
    while !state.is_monomorphic() {
        let fitness = moran_fitness(types, game, &state)?;
        if let Some((index, &f)) = fitness.iter().enumerate().find(|(_, f)| **f < 0.0) {
            return Err(EvolutionError::NegativeFitness { index, fitness: f });
        }
        let mut rng = stream_rng(derive_seed(state.seed, &[domain::MORAN_SELECT, state.generation]), stream::MAIN);
        let total: f64 = fitness.iter().sum();
        let parent = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            fitness
                .iter()
                .position(|f| {
                    acc += f;
                    target < acc
                })
                .unwrap_or_else(|| fitness.iter().rposition(|f| *f > 0.0).unwrap_or(n - 1))
        } else {
            rng.random_range(0..n)
        };
        let dead = rng.random_range(0..n);
        state.population[dead] = state.population[parent];
        state.generation += 1;
        trajectory.push(state.counts(types.len()));
    }
    Ok(MoranOutcome { winner: state.population[0], generations: state.generation - start, trajectory })
}

/// Strategy proportions together with the per-turn payoff matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EcoState {
    pub proportions: Vec<f64>,
    pub payoff_matrix: Vec<Vec<f64>>,
}

impl EcoState {
    pub fn new(proportions: Vec<f64>, payoff_matrix: Vec<Vec<f64>>) -> Result<EcoState, EvolutionError> {
        let n = proportions.len();
        if n == 0 || payoff_matrix.len() != n || payoff_matrix.iter().any(|r| r.len() != n) {
            return Err(EvolutionError::MatrixShape);
        }
        if payoff_matrix.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(EvolutionError::NegativePayoff);
        }
        let sum: f64 = proportions.iter().sum();
        if proportions.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(EvolutionError::NotOnSimplex);
        }
        Ok(EcoState { proportions, payoff_matrix })
    }

    /// Uses the tournament's payoff matrix; every cell, including the
    /// diagonal, must have been played.
    pub fn from_results(rs: &ResultSet, proportions: Vec<f64>) -> Result<EcoState, EvolutionError> {
        let matrix = rs
            .payoff_matrix
            .iter()
            .enumerate()
            .map(|(row, cells)| {
                cells
                    .iter()
                    .enumerate()
                    .map(|(col, v)| v.ok_or(EvolutionError::MissingPayoff { row, col }))
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        EcoState::new(proportions, matrix)
    }

    /// Equal shares of every strategy.
    pub fn uniform(payoff_matrix: Vec<Vec<f64>>) -> Result<EcoState, EvolutionError> {
        let n = payoff_matrix.len();
        EcoState::new(vec![1.0 / n as f64; n], payoff_matrix)
    }
}

/// Proportions after one replicator step, before renormalization.
pub fn replicator_step_raw(x: &[f64], matrix: &[Vec<f64>]) -> Result<Vec<f64>, EvolutionError> {
    let fitness: Vec<f64> = matrix.iter().map(|row| row.iter().zip(x).map(|(m, xj)| m * xj).sum()).collect();
    let mean: f64 = x.iter().zip(&fitness).map(|(xi, fi)| xi * fi).sum();
    if mean <= 0.0 {
        return Err(EvolutionError::DegenerateFitness);
    }
    Ok(x.iter().zip(&fitness).map(|(xi, fi)| xi * fi / mean).collect())
}

/// `x'_i = x_i f_i / φ` with `f = M x` and `φ = xᵀ M x`, renormalized to sum 1.
pub fn replicator_step(x: &[f64], matrix: &[Vec<f64>]) -> Result<Vec<f64>, EvolutionError> {
    let mut next = replicator_step_raw(x, matrix)?;
    let sum: f64 = next.iter().sum();
    next.iter_mut().for_each(|v| *v /= sum);
    Ok(next)
}

/// Trajectory of `generations` replicator steps, starting with the initial proportions.
pub fn run_eco(initial: &EcoState, generations: usize) -> Result<Vec<Vec<f64>>, EvolutionError> {
    let mut trajectory = Vec::with_capacity(generations + 1);
    trajectory.push(initial.proportions.clone());
    for _ in 0..generations {
        let next = replicator_step(trajectory.last().expect("non-empty"), &initial.payoff_matrix)?;
        trajectory.push(next);
    }
    Ok(trajectory)
}
