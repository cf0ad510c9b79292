//! Parallel and sequential execution give identical results.

use scs_core::chain::{run_restarts, ChainConfig};
use scs_core::complete_graph::{crosscheck_complete, random_distribution};
use scs_core::experiments::{run_experiment, ExperimentSpec, GraphFamily};
use scs_core::sat_reduction::{random_instances, verify_many};
use scs_core::{generate, optimal_oracle, CoordinationGame, Execution, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

#[test]
fn oracle_lists_the_same_witnesses() {
    for f in [Family::Complete(8), Family::Grid { k: 4, d: 2 }, Family::ErdosRenyi { n: 14, p: 0.4, seed: 9 }] {
        let game = CoordinationGame::majority(generate(&f).unwrap());
        let [a, b] = MODES.map(|m| optimal_oracle(&game, 16, m).unwrap());
        assert_eq!(a, b, "{f:?}");
    }
}

#[test]
fn restarts_do_not_depend_on_scheduling() {
    let game = CoordinationGame::majority(generate(&Family::ErdosRenyi { n: 20, p: 0.4, seed: 2 }).unwrap());
    let cfg = ChainConfig::protocol(20, 77);
    let [a, b] = MODES.map(|m| run_restarts(&game, &cfg, 6, m).unwrap());
    assert_eq!(a, b);
}

#[test]
fn experiments_do_not_depend_on_scheduling() {
    let mut spec = ExperimentSpec::new(GraphFamily::Sparse, vec![10, 12], 4);
    spec.trials = 3;
    spec.timing = false;
    let [a, b] = MODES.map(|m| run_experiment(&spec, m).unwrap());
    assert_eq!(a, b);
}

#[test]
fn reductions_and_crosschecks_agree_across_modes() {
    let formulas = random_instances(8, 4, 4, 5).unwrap();
    let [a, b] = MODES.map(|m| {
        verify_many(&formulas, m).into_iter().map(|r| r.unwrap().to_string()).collect::<Vec<_>>()
    });
    assert_eq!(a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let d = random_distribution(9, 8, &mut rng);
        for m in MODES {
            crosscheck_complete(&d, m).unwrap();
        }
    }
}
