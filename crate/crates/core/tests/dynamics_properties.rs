use axl_core::evolution::{replicator_step, replicator_step_raw, run_moran, EcoState, MoranState};
use axl_core::game::{C, D};
use axl_core::seeding::derive_seed;
use axl_core::strategy::resolve;
use axl_core::training::{evaluate_table, evolve_lookup_table, TrainerConfig};
use axl_core::{builtin_roster, Action, Game, LookupTable, StrategySpec};
use proptest::prelude::*;

fn types(names: &[&str]) -> Vec<StrategySpec> {
    names.iter().map(|n| resolve(n).unwrap()).collect()
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("zero vector", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.1f64..5.0, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moran_is_reproducible_and_size_preserving(
        pop in prop::collection::vec(0usize..3, 2..6),
        seed: u64,
    ) {
        let t = types(&["Tit For Tat", "Defector", "Random: 0.5"]);
        let mut state = MoranState::new(pop.clone(), seed);
        state.turns_per_interaction = 8;
        let a = run_moran(&t, &Game::default(), state.clone()).unwrap();
        let b = run_moran(&t, &Game::default(), state).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.trajectory.iter().all(|c| c.iter().sum::<usize>() == pop.len()));
        prop_assert_eq!(a.trajectory.last().unwrap()[a.winner], pop.len());
        prop_assert_eq!(a.trajectory.len() as u64, a.generations + 1);
    }

    #[test]
    fn replicator_stays_on_the_simplex((x, m) in (2usize..6).prop_flat_map(|n| (simplex(n), matrix(n)))) {
        let raw = replicator_step_raw(&x, &m).unwrap();
        prop_assert!(raw.iter().all(|v| *v >= 0.0));
        prop_assert!((raw.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let next = replicator_step(&x, &m).unwrap();
        prop_assert!((next.iter().sum::<f64>() - 1.0).abs() <= 1e-15 * 4.0);
    }

    #[test]
    fn monomorphic_states_are_fixed(m in (2usize..6).prop_flat_map(matrix), pick in 0usize..6) {
        let n = m.len();
        let mut x = vec![0.0; n];
        x[pick % n] = 1.0;
        prop_assert_eq!(replicator_step(&x, &m).unwrap(), x);
    }

    #[test]
    fn trainer_matches_brute_force_on_small_pools(ix in prop::collection::vec(0usize..13, 1..4), seed: u64) {
        let roster: Vec<_> = builtin_roster().into_iter().filter(|s| !s.classifier().stochastic).collect();
        let pool: Vec<StrategySpec> = ix.iter().map(|&i| roster[i].clone()).collect();
        let game = Game::default();
        let brute = (0u32..32)
            .map(|bits| {
                let genome: Vec<Action> = (0..5).map(|i| if bits >> i & 1 == 1 { D } else { C }).collect();
                evaluate_table(&LookupTable::from_genome(0, 1, &genome).unwrap(), &pool, 40, 0, &game).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let mut config = TrainerConfig::new(0, 1, pool);
        config.turns = 40;
        config.generations = 40;
        config.seed = seed;
        let out = evolve_lookup_table(&config).unwrap();
        prop_assert!(out.score_history.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(out.best_fitness, brute);
    }
}

#[test]
fn defector_usually_takes_over_from_cooperator() {
    let t = types(&["Defector", "Cooperator"]);
    let runs = 10_000u64;
    let mut defector_wins = 0;
    for k in 0..runs {
        let mut state = MoranState::new(vec![0, 1], derive_seed(5, &[k]));
        state.turns_per_interaction = 10;
        if run_moran(&t, &Game::default(), state).unwrap().winner == 0 {
            defector_wins += 1;
        }
    }
    assert!(defector_wins as f64 / runs as f64 > 0.5, "{defector_wins}");
}

#[test]
fn cooperator_defector_replicator_path() {
    let start = EcoState::new(vec![0.5, 0.5], vec![vec![3.0, 0.0], vec![5.0, 1.0]]).unwrap();
    // closed form: x_D' = x_D (5 x_C + x_D) / (3 x_C² + 5 x_C x_D + x_D²)
    let mut x_d: f64 = 0.5;
    let trajectory = axl_core::evolution::run_eco(&start, 30).unwrap();
    for (step, x) in trajectory.iter().enumerate().skip(1) {
        let x_c = 1.0 - x_d;
        x_d = x_d * (5.0 * x_c + x_d) / (3.0 * x_c * x_c + 5.0 * x_c * x_d + x_d * x_d);
        assert!((x[1] - x_d).abs() < 1e-12, "step {step}");
        assert!(x[1] > trajectory[step - 1][1] || x[1] == 1.0);
    }
}
