//! Local runs and annealing on small random instances, checked against
//! brute-force enumeration of every proper coloring.

use ncg_core::borda::{
    available_colors, borda_welfare, estimate_expected_optimum, local_optimal_run, LocalRunOptions,
};
use ncg_core::game::{Dynamics, PlayOptions};
use ncg_core::graph::{generate_er, is_proper};
use ncg_core::rng::{derive_seed, stream};
use ncg_core::samplers::{enumerate_target, sa_run, AcceptanceMode};
use ncg_core::{AvailableColorLists, Coloring, Graph, PreferenceProfile, Schedule};

struct Instance {
    graph: Graph,
    prefs: PreferenceProfile,
    start: Coloring,
    optimum: u64,
}

fn instance(seed: u64) -> Instance {
    let graph = generate_er(7, 0.4, seed).unwrap();
    let q = graph.max_degree() + 2;
    let prefs = PreferenceProfile::random(7, q, &mut stream(seed, &[1]));
    let start = Dynamics::new(&graph, q).unwrap().play(seed, PlayOptions::default()).unwrap().final_state.assignment().clone();
    let optimum = enumerate_target(&graph, &AvailableColorLists::full(7, q), 10_000_000)
        .unwrap()
        .iter()
        .map(|c| borda_welfare(&prefs, c).unwrap())
        .max()
        .unwrap();
    Instance { graph, prefs, start, optimum }
}

#[test]
fn local_runs_sit_between_start_and_optimum() {
    for seed in 0..6 {
        let inst = instance(seed);
        let initial = borda_welfare(&inst.prefs, &inst.start).unwrap();
        for mode in [AcceptanceMode::Standard, AcceptanceMode::Literal] {
            let opts = LocalRunOptions { mh_steps: 200, mode, ..LocalRunOptions::default() };
            let (est, runs) = estimate_expected_optimum(&inst.graph, &inst.prefs, &inst.start, 20, seed, opts).unwrap();
            for run in &runs {
                let finish = Coloring::new(run.final_colors.clone(), inst.prefs.q()).unwrap();
                assert!(is_proper(&inst.graph, &finish).unwrap());
                assert_eq!(borda_welfare(&inst.prefs, &finish).unwrap(), run.total_welfare);
                assert!(initial <= run.total_welfare && run.total_welfare <= inst.optimum);
                // nobody ends on a color ranked below the one they started with
                for v in 0..7 {
                    assert!(inst.prefs.rank(v, finish.color(v)) <= inst.prefs.rank(v, inst.start.color(v)));
                }
            }
            assert!(est.mean <= est.max as f64 && est.max <= inst.optimum);
        }
    }
}

#[test]
fn estimate_repetitions_follow_derived_seeds() {
    let inst = instance(2);
    let opts = LocalRunOptions { mh_steps: 100, ..LocalRunOptions::default() };
    let (est, _) = estimate_expected_optimum(&inst.graph, &inst.prefs, &inst.start, 5, 9, opts).unwrap();
    for (r, &w) in est.samples.iter().enumerate() {
        let run = local_optimal_run(&inst.graph, &inst.prefs, &inst.start, derive_seed(9, &[r as u64]), opts).unwrap();
        assert_eq!(run.total_welfare, w);
    }
}

#[test]
fn annealing_best_is_feasible_and_bounded() {
    for seed in 0..4 {
        let inst = instance(seed);
        let avail = available_colors(&inst.prefs, &inst.start).unwrap();
        let initial = borda_welfare(&inst.prefs, &inst.start).unwrap();
        for schedule in Schedule::BASIC {
            let trace = sa_run(&inst.graph, &inst.prefs, &inst.start, 5_000, schedule, AcceptanceMode::Standard, seed).unwrap();
            let best = &trace.best_assignment;
            assert!(is_proper(&inst.graph, best).unwrap());
            assert!((0..7).all(|v| avail.contains(v, best.color(v))));
            assert_eq!(borda_welfare(&inst.prefs, best).unwrap(), trace.best_welfare);
            assert!(initial <= trace.best_welfare && trace.best_welfare <= inst.optimum);
            let reached = &trace.records[trace.reaching_time as usize];
            assert_eq!(reached.welfare, trace.best_welfare);
            assert!(trace.records[..trace.reaching_time as usize].iter().all(|r| r.welfare < trace.best_welfare));
        }
    }
}
