//! Evolutionary search over lookup tables.
//!
//! A genome is a table's entries followed by its initial plays. The search is
//! a (μ + λ) scheme with λ = μ: every parent yields one child by independent
//! per-entry flips at `mutation_rate`, parents and children are pooled, and
//! the best μ survive (parents win ties). Genomes are kept distinct: a child
//! identical to a living genome is dropped, which keeps the population from
//! collapsing onto copies of one table. Evaluation seeds are fixed for the
//! whole run, so a genome's fitness never changes and the best score can only
//! improve.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{play_match, MatchError, MatchSpec};
use crate::game::{Action, Game};
use crate::seeding::{derive_seed, domain, stream, stream_rng, StreamRng};
use crate::strategy::{LookupTable, LookupTableError, StrategySpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainingError {
    #[error("invalid trainer configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Table(#[from] LookupTableError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Clone, Debug)]
pub struct TrainerConfig {
    pub m: usize,
    pub n: usize,
    pub population_size: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub opponent_pool: Vec<StrategySpec>,
    pub turns: usize,
    pub seed: u64,
    pub game: Game,
}

impl TrainerConfig {
    pub fn new(m: usize, n: usize, opponent_pool: Vec<StrategySpec>) -> TrainerConfig {
        TrainerConfig {
            m,
            n,
            population_size: 20,
            generations: 50,
            mutation_rate: 0.1,
            opponent_pool,
            turns: 100,
            seed: 0,
            game: Game::default(),
        }
    }

    pub fn validate(&self) -> Result<(), TrainingError> {
        if self.population_size == 0 {
            return Err(TrainingError::InvalidConfig("population_size must be positive"));
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate < 1.0) {
            return Err(TrainingError::InvalidConfig("mutation_rate must lie in (0, 1)"));
        }
        if self.opponent_pool.is_empty() {
            return Err(TrainingError::InvalidConfig("opponent pool is empty"));
        }
        if self.turns == 0 {
            return Err(TrainingError::InvalidConfig("turns must be positive"));
        }
        LookupTable::genome_len(self.m, self.n)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingOutcome {
    pub best: LookupTable,
    pub best_fitness: f64,
    /// Best fitness after initialisation and after each generation.
    pub score_history: Vec<f64>,
}

/// Mean per-turn score of `table` over one match against each pool member.
/// The match against pool member `k` uses seed `derive_seed(seed, [k])`.
pub fn evaluate_table(
    table: &LookupTable,
    pool: &[StrategySpec],
    turns: usize,
    seed: u64,
    game: &Game,
) -> Result<f64, TrainingError> {
    if pool.is_empty() {
        return Err(TrainingError::InvalidConfig("opponent pool is empty"));
    }
    let me = StrategySpec::looker_up(table.clone());
    let mut total = 0.0;
    for (k, opponent) in pool.iter().enumerate() {
        let spec = MatchSpec::fixed(turns).with_game(*game).with_seed(derive_seed(seed, &[k as u64]));
        let rec = play_match(&spec, &me, opponent)?;
        total += rec.score_a / rec.length() as f64;
    }
    Ok(total / pool.len() as f64)
}

fn random_genome(len: usize, rng: &mut StreamRng) -> Vec<Action> {
    (0..len).map(|_| if rng.random::<bool>() { Action::Defect } else { Action::Cooperate }).collect()
}

fn mutate(genome: &[Action], rate: f64, rng: &mut StreamRng) -> Vec<Action> {
    genome.iter().map(|a| if rng.random::<f64>() < rate { a.flip() } else { *a }).collect()
}

struct Scored {
    genome: Vec<Action>,
    fitness: f64,
}

fn score_all(config: &TrainerConfig, genomes: Vec<Vec<Action>>, eval_seed: u64) -> Result<Vec<Scored>, TrainingError> {
    genomes
        .into_par_iter()
        .map(|genome| {
            let table = LookupTable::from_genome(config.m, config.n, &genome)?;
            let fitness = evaluate_table(&table, &config.opponent_pool, config.turns, eval_seed, &config.game)?;
            Ok(Scored { genome, fitness })
        })
        .collect()
}

fn rank(pool: &mut [Scored]) {
    pool.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

pub fn evolve_lookup_table(config: &TrainerConfig) -> Result<TrainingOutcome, TrainingError> {
    config.validate()?;
    let genome_len = LookupTable::genome_len(config.m, config.n)?;
    let eval_seed = derive_seed(config.seed, &[domain::TRAIN_EVAL]);

    let mut init_rng = stream_rng(derive_seed(config.seed, &[domain::TRAIN_INIT]), stream::MAIN);
    let mut seen = HashSet::new();
    let initial: Vec<Vec<Action>> = (0..config.population_size)
        .map(|_| random_genome(genome_len, &mut init_rng))
        .filter(|g| seen.insert(g.clone()))
        .collect();
    let mut population = score_all(config, initial, eval_seed)?;
    rank(&mut population);
    let mut history = vec![population[0].fitness];

    for generation in 0..config.generations {
        let mut rng = stream_rng(derive_seed(config.seed, &[domain::TRAIN_MUTATE, generation as u64]), stream::MAIN);
        let mut seen: HashSet<Vec<Action>> = population.iter().map(|p| p.genome.clone()).collect();
        let children: Vec<Vec<Action>> = population
            .iter()
            .map(|p| mutate(&p.genome, config.mutation_rate, &mut rng))
            .filter(|g| seen.insert(g.clone()))
            .collect();
        population.extend(score_all(config, children, eval_seed)?);
        rank(&mut population);
        population.truncate(config.population_size);
        history.push(population[0].fitness);
    }

    let best = &population[0];
    Ok(TrainingOutcome {
        best: LookupTable::from_genome(config.m, config.n, &best.genome)?,
        best_fitness: best.fitness,
        score_history: history,
    })
}
