//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails. Thresholds and seeds are pinned below.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use axl_core::evolution::{replicator_step_raw, run_eco, run_moran, EcoState, MoranState};
use axl_core::export::{summary_json, write_interactions};
use axl_core::game::{C, D};
use axl_core::results::{build_result_set, rank_by_wins, rank_strategies};
use axl_core::seeding::{derive_seed, stream_rng};
use axl_core::strategy::{resolve, View};
use axl_core::training::{evaluate_table, evolve_lookup_table, TrainerConfig};
use axl_core::{
    builtin_roster, play_match, score_pair, Action, Game, LookupTable, MatchSpec, StrategySpec, TournamentSpec,
};
use rand::Rng;
use rayon::prelude::*;

/// Master seed shared by the frozen-seed criteria.
const ACCEPTANCE_SEED: u64 = 20_170_131;

fn spec(name: &str) -> StrategySpec {
    resolve(name).unwrap()
}

fn c1_payoffs() {
    let g = Game::default();
    assert_eq!(score_pair(C, C, &g), (3.0, 3.0));
    assert_eq!(score_pair(D, D, &g), (1.0, 1.0));
    assert_eq!(score_pair(C, D, &g), (0.0, 5.0));
    assert_eq!(score_pair(D, C, &g), (5.0, 0.0));
    let values = [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.5];
    let mut checked = 0;
    for &r in &values {
        for &s in &values {
            for &t in &values {
                for &p in &values {
                    let legal = t > r && r > p && p > s && 2.0 * r > t + s;
                    assert_eq!(Game::new(r, s, t, p).is_ok(), legal, "({r},{s},{t},{p})");
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 9usize.pow(4));
}

fn c2_grudger() {
    let grudger = spec("Grudger");
    let g = Game::default();
    let mut rng = stream_rng(0, 0);
    let decide =
        |own: &[Action], opp: &[Action], rng: &mut _| grudger.player().decide(&View::new(own, opp, &g), rng).unwrap();
    assert_eq!(decide(&[], &[], &mut rng), C);
    assert_eq!(decide(&[C, D, D, D], &[C, C, C, C], &mut rng), C);
    assert_eq!(decide(&[C, C, D, D, D], &[C, D, C, C, C], &mut rng), D);
}

fn c3_analytic_matches() {
    for n in [1usize, 5, 100] {
        let m = MatchSpec::fixed(n);
        let nf = n as f64;
        let r = play_match(&m, &spec("Tit For Tat"), &spec("Defector")).unwrap();
        assert_eq!((r.score_a, r.score_b), (nf - 1.0, nf + 4.0), "TFT v Defector, n={n}");
        let r = play_match(&m, &spec("Cooperator"), &spec("Defector")).unwrap();
        assert_eq!((r.score_a, r.score_b), (0.0, 5.0 * nf), "Cooperator v Defector, n={n}");
        let r = play_match(&m, &spec("Tit For Tat"), &spec("Tit For Tat")).unwrap();
        assert_eq!((r.score_a, r.score_b), (3.0 * nf, 3.0 * nf), "TFT v TFT, n={n}");
    }
}

fn roster_spec() -> TournamentSpec {
    TournamentSpec::new(builtin_roster()).turns(200).repetitions(10).self_play(false).seed(ACCEPTANCE_SEED)
}

fn c4_parallel_determinism() {
    let spec = roster_spec();
    let outputs: Vec<(usize, Vec<u8>, String)> = [1, 8]
        .into_iter()
        .map(|jobs| {
            let archive = axl_core::run_tournament(&spec, jobs).unwrap();
            let mut csv = Vec::new();
            write_interactions(&archive, &mut csv).unwrap();
            let json = summary_json(&build_result_set(&archive, &spec).unwrap()).unwrap();
            (archive.len(), csv, json)
        })
        .collect();
    assert_eq!(outputs[0].0, 1710);
    assert_eq!(outputs[1].0, 1710);
    assert!(outputs[0].1 == outputs[1].1, "interaction CSV differs between jobs=1 and jobs=8");
    assert!(outputs[0].2 == outputs[1].2, "summary JSON differs between jobs=1 and jobs=8");
}

fn c5_extortion_wins() {
    let spec = roster_spec();
    let rs = build_result_set(&axl_core::run_tournament(&spec, 8).unwrap(), &spec).unwrap();
    let position = |names: Vec<String>, who: &str| names.iter().position(|n| n == who).unwrap() + 1;
    let score_rank = position(rank_strategies(&rs).into_iter().map(|r| r.0).collect(), "ZD-Extort-2");
    let wins = rank_by_wins(&rs);
    let wins_rank = position(wins.iter().map(|r| r.0.clone()).collect(), "ZD-Extort-2");
    assert!(wins_rank < score_rank, "ZD-Extort-2 wins rank {wins_rank}, score rank {score_rank}");
    let cooperator = wins.iter().find(|r| r.0 == "Cooperator").unwrap();
    assert_eq!(cooperator.1, 0);
}

fn c6_noise() {
    for (a, b) in [("Joss: 0.9", "Random: 0.5"), ("ZD-GTFT-2", "Calculator")] {
        let plain = MatchSpec::fixed(200).with_seed(ACCEPTANCE_SEED);
        let r0 = play_match(&plain.with_noise(0.0), &spec(a), &spec(b)).unwrap();
        assert_eq!(r0, play_match(&plain, &spec(a), &spec(b)).unwrap());
    }
    let t0 = TournamentSpec::new(builtin_roster()).turns(50).repetitions(2).seed(ACCEPTANCE_SEED);
    let a = axl_core::run_tournament(&t0, 4).unwrap();
    assert_eq!(a, axl_core::run_tournament(&t0.clone().noise(0.0), 4).unwrap());
    for n in [1usize, 10, 200] {
        let m = MatchSpec::fixed(n).with_noise(1.0).with_seed(ACCEPTANCE_SEED);
        let r = play_match(&m, &spec("Cooperator"), &spec("Cooperator")).unwrap();
        assert!(r.actions_a.iter().chain(&r.actions_b).all(|&x| x == D));
        assert_eq!((r.score_a, r.score_b), (n as f64, n as f64));
    }
}

fn c7_probabilistic_ending() {
    let (a, b) = (spec("Cooperator"), spec("Cooperator"));
    let total: usize = (0..10_000u64)
        .map(|k| {
            let m = MatchSpec::geometric(0.1, None).with_seed(derive_seed(ACCEPTANCE_SEED, &[k]));
            play_match(&m, &a, &b).unwrap().length()
        })
        .sum();
    let mean = total as f64 / 10_000.0;
    assert!((mean - 10.0).abs() <= 0.05 * 10.0, "mean length {mean}");
}

fn c8_moran_neutrality() {
    let resident = spec("Tit For Tat");
    let mutant = resident.clone().with_name("Tit For Tat (mutant)");
    let types = [resident, mutant];
    let game = Game::default();
    let runs = 20_000u64;
    let fixed: u64 = (0..runs)
        .into_par_iter()
        .map(|k| {
            let state = MoranState::new(vec![1, 0, 0, 0], derive_seed(ACCEPTANCE_SEED, &[k]));
            u64::from(run_moran(&types, &game, state).unwrap().winner == 1)
        })
        .sum();
    let p = fixed as f64 / runs as f64;
    let se = (0.25 * 0.75 / runs as f64).sqrt();
    assert!((p - 0.25).abs() <= 3.0 * se, "fixation rate {p}, 3 SE = {}", 3.0 * se);
}

fn c9_replicator() {
    let matrix = vec![vec![3.0, 0.0], vec![5.0, 1.0]];
    let traj = run_eco(&EcoState::new(vec![0.5, 0.5], matrix.clone()).unwrap(), 100).unwrap();
    assert!(traj.windows(2).all(|w| w[1][1] > w[0][1] || w[0][1] == 1.0), "Defector share not increasing");
    assert!(traj[1][1] > traj[0][1]);
    for x in &traj {
        let raw = replicator_step_raw(x, &matrix).unwrap();
        assert!(raw.iter().all(|v| *v >= 0.0));
        assert!((raw.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    for mono in [vec![1.0, 0.0], vec![0.0, 1.0]] {
        let traj = run_eco(&EcoState::new(mono.clone(), matrix.clone()).unwrap(), 50).unwrap();
        assert!(traj.iter().all(|x| *x == mono));
    }
}

fn c10_lookup_equivalence() {
    let table: LookupTable = "0 1\nCC -> C\nCD -> D\nDC -> C\nDD -> D\ninitial: C\n".parse().unwrap();
    let looker = StrategySpec::looker_up(table);
    let tft = spec("Tit For Tat");
    let g = Game::default();
    let mut unused = stream_rng(0, 0);
    for k in 0..100u64 {
        let mut rng = stream_rng(derive_seed(ACCEPTANCE_SEED, &[k]), 0);
        let opp: Vec<Action> = (0..1000).map(|_| if rng.random::<bool>() { D } else { C }).collect();
        let (mut p_look, mut p_tft) = (looker.player(), tft.player());
        let mut own = Vec::with_capacity(1000);
        for round in 0..1000 {
            let view = View::new(&own, &opp[..round], &g);
            let x = p_look.decide(&view, &mut unused).unwrap();
            let y = p_tft.decide(&view, &mut unused).unwrap();
            assert_eq!(x, y, "sequence {k}, round {round}");
            own.push(x);
        }
    }
}

fn c11_trainer_optimality() {
    let pool = vec![spec("Cooperator")];
    let g = Game::default();
    let len = LookupTable::genome_len(0, 1).unwrap();
    assert_eq!(len, 5);
    let brute = (0u32..1 << len)
        .map(|bits| {
            let genome: Vec<Action> = (0..len).map(|i| if bits >> i & 1 == 1 { D } else { C }).collect();
            let table = LookupTable::from_genome(0, 1, &genome).unwrap();
            evaluate_table(&table, &pool, 100, 0, &g).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(brute, 5.0);
    let mut config = TrainerConfig::new(0, 1, pool);
    config.generations = 50;
    config.seed = ACCEPTANCE_SEED;
    let outcome = evolve_lookup_table(&config).unwrap();
    assert_eq!(outcome.best_fitness, brute);
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(), Duration); 11] = [
        ("1 payoff semantics", c1_payoffs, Duration::from_secs(1)),
        ("2 grudger conformance", c2_grudger, Duration::from_secs(1)),
        ("3 analytic matches", c3_analytic_matches, Duration::from_secs(1)),
        ("4 determinism under parallelism", c4_parallel_determinism, Duration::from_secs(60)),
        ("5 extortion wins more than it scores", c5_extortion_wins, Duration::from_secs(60)),
        ("6 noise identities", c6_noise, Duration::from_secs(1)),
        ("7 probabilistic ending", c7_probabilistic_ending, Duration::from_secs(10)),
        ("8 moran neutrality", c8_moran_neutrality, Duration::from_secs(120)),
        ("9 replicator sanity", c9_replicator, Duration::from_secs(1)),
        ("10 lookup table equivalence", c10_lookup_equivalence, Duration::from_secs(5)),
        ("11 trainer optimality", c11_trainer_optimality, Duration::from_secs(10)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(()) if elapsed <= limit => "PASS".to_owned(),
            Ok(()) => format!("FAIL (over the {limit:?} budget)"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("FAIL ({msg})")
            }
        };
        if !verdict.starts_with("PASS") {
            failures += 1;
        }
        println!("criterion {name:<40} {verdict} [{:.3}s]", elapsed.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
