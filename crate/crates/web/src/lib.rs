//! Browser bindings: a tournament summary, a Moran trajectory and an
//! ecological trajectory, each returned as a JSON string.
//!
//! The `*_json` functions hold the logic and are plain Rust; the exported
//! wrappers only convert seeds and errors for JavaScript. Everything runs on
//! one thread.

use axl_core::evolution::{run_eco, run_moran, EcoState, MoranState};
use axl_core::export::summary_json;
use axl_core::results::build_result_set;
use axl_core::strategy::{builtin_roster, resolve, split_names, DEMO_NAMES};
use axl_core::{run_tournament, Game, StrategySpec, TournamentSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on Moran population size; every generation plays all pairs.
pub const MAX_MORAN_POPULATION: usize = 40;

fn players(list: &str) -> Result<Vec<StrategySpec>, String> {
    let specs = split_names(list).iter().map(|n| resolve(n)).collect::<Result<Vec<_>, _>>();
    let specs = specs.map_err(|e| e.to_string())?;
    if specs.is_empty() {
        return Err("no strategies given".into());
    }
    Ok(specs)
}

/// `[{name, memory_depth, stochastic, demo}]` for the built-in roster.
pub fn roster_json() -> String {
    let rows: Vec<_> = builtin_roster()
        .iter()
        .map(|s| {
            json!({
                "name": s.name(),
                "memory_depth": s.classifier().memory_depth,
                "stochastic": s.classifier().stochastic,
                "demo": DEMO_NAMES.contains(&s.name()),
            })
        })
        .collect();
    serde_json::Value::Array(rows).to_string()
}

pub fn tournament_json(list: &str, turns: u32, repetitions: u32, noise: f64, seed: u64) -> Result<String, String> {
    let spec = TournamentSpec::new(players(list)?)
        .turns(turns as usize)
        .repetitions(repetitions as usize)
        .noise(noise)
        .seed(seed);
    let archive = run_tournament(&spec, 1).map_err(|e| e.to_string())?;
    let rs = build_result_set(&archive, &spec).map_err(|e| e.to_string())?;
    summary_json(&rs).map_err(|e| e.to_string())
}

/// `{names, winner, generations, trajectory}`; `counts` is comma-separated,
/// one entry per strategy.
pub fn moran_json(list: &str, counts: &str, turns: u32, seed: u64) -> Result<String, String> {
    let types = players(list)?;
    let counts: Vec<usize> = counts
        .split(',')
        .map(|c| c.trim().parse().map_err(|_| format!("bad count {c:?}")))
        .collect::<Result<_, _>>()?;
    if counts.len() != types.len() {
        return Err(format!("{} counts for {} strategies", counts.len(), types.len()));
    }
    let population: Vec<usize> = counts.iter().enumerate().flat_map(|(t, &c)| std::iter::repeat_n(t, c)).collect();
    if population.len() > MAX_MORAN_POPULATION {
        return Err(format!("population above {MAX_MORAN_POPULATION}"));
    }
    let mut state = MoranState::new(population, seed);
    state.turns_per_interaction = turns as usize;
    let outcome = run_moran(&types, &Game::default(), state).map_err(|e| e.to_string())?;
    Ok(json!({
        "names": types.iter().map(|t| t.name()).collect::<Vec<_>>(),
        "winner": types[outcome.winner].name(),
        "generations": outcome.generations,
        "trajectory": outcome.trajectory,
    })
    .to_string())
}

/// `{names, trajectory}` from uniform shares over a self-play tournament's
/// payoff matrix.
pub fn eco_json(list: &str, turns: u32, generations: u32, seed: u64) -> Result<String, String> {
    let spec = TournamentSpec::new(players(list)?).turns(turns as usize).repetitions(1).seed(seed);
    let archive = run_tournament(&spec, 1).map_err(|e| e.to_string())?;
    let rs = build_result_set(&archive, &spec).map_err(|e| e.to_string())?;
    let n = rs.names.len();
    let initial = EcoState::from_results(&rs, vec![1.0 / n as f64; n]).map_err(|e| e.to_string())?;
    let trajectory = run_eco(&initial, generations as usize).map_err(|e| e.to_string())?;
    Ok(json!({ "names": rs.names, "trajectory": trajectory }).to_string())
}

#[wasm_bindgen]
pub fn roster() -> String {
    roster_json()
}

#[wasm_bindgen]
pub fn tournament(players: &str, turns: u32, repetitions: u32, noise: f64, seed: u32) -> Result<String, JsValue> {
    tournament_json(players, turns, repetitions, noise, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn moran(players: &str, counts: &str, turns: u32, seed: u32) -> Result<String, JsValue> {
    moran_json(players, counts, turns, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn eco(players: &str, turns: u32, generations: u32, seed: u32) -> Result<String, JsValue> {
    eco_json(players, turns, generations, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
