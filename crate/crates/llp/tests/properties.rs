//! Property tests for invariants that should hold on arbitrary inputs:
//! schedule independence, monotone traces, witness validity, and
//! equivalences between formulations.

use llp::engine::{self, Mode, Predicate, ScheduleConfig};
use llp::jobs::JobsInstance;
use llp::knapsack::{incr_knapsack, IncrSpec};
use llp::lis::{build_pre, lis_fixed_spec, lis_spec, reconstruct_lis, LisInstance};
use llp::obst::{
    obst_spec, reconstruct_tree, subtree_sizes_balanced, weighted_cost, BalanceMode, ObstInstance,
    PairMap,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn all_modes() -> [Mode; 4] {
    [
        Mode::Sequential,
        Mode::Rounds,
        Mode::Priority,
        Mode::AsyncStale,
    ]
}

fn config_for(mode: Mode, workers: usize, seed: u64, staleness: usize) -> ScheduleConfig {
    let mut config = ScheduleConfig::with_mode(mode);
    config.workers = workers;
    config.seed = seed;
    config.staleness_bound = staleness;
    config
}

/// A random DAG as predecessor sets: each possible edge `(i, j)` with
/// `i < j` is present independently.
fn dag(max_jobs: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max_jobs).prop_flat_map(|n| {
        vec(vec(any::<bool>(), n), n).prop_map(move |adj| {
            (0..n)
                .map(|j| (0..j).filter(|&i| adj[j][i]).collect())
                .collect()
        })
    })
}

/// Distinct values by construction: a permutation of `0..n` scaled and
/// shifted, so LIS instances never trip duplicate validation.
fn distinct_values(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_len, 1i64..=3, -5i64..=5).prop_flat_map(|(n, scale, shift)| {
        Just((0..n as i64).map(|x| x * scale + shift).collect::<Vec<_>>()).prop_shuffle()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every schedule — including the stale asynchronous one under
    /// varying worker counts and seeds — reaches the same fixpoint on
    /// job-scheduling DAGs.
    #[test]
    fn schedules_agree_on_jobs(
        pre in dag(10),
        times_seed in vec(0i64..=9, 10),
        workers in 1usize..=4,
        seed in any::<u64>(),
        staleness in 0usize..=3,
    ) {
        let n = pre.len();
        let times: Vec<i64> = times_seed[..n].to_vec();
        let instance = JobsInstance::new(times, pre).unwrap();
        let spec = instance.spec();
        let expected = engine::solve_sequential(&spec).unwrap();
        for mode in all_modes() {
            let config = config_for(mode, workers, seed, staleness);
            let report = engine::solve(&spec, &config).unwrap();
            prop_assert_eq!(report.values(), expected.values(), "{:?}", mode);
        }
    }

    /// Traces only ever move a cell strictly upward, and replaying a
    /// trace over the bottom vector reproduces the fixpoint.
    #[test]
    fn traces_are_monotone_and_replayable(
        pre in dag(8),
        times_seed in vec(0i64..=9, 8),
        mode_pick in 0usize..4,
        seed in any::<u64>(),
    ) {
        let n = pre.len();
        let instance = JobsInstance::new(times_seed[..n].to_vec(), pre).unwrap();
        let spec = instance.spec();
        let mode = all_modes()[mode_pick];
        let mut config = config_for(mode, 3, seed, 2);
        config.trace = true;
        let report = engine::solve(&spec, &config).unwrap();
        let mut state: Vec<i64> = (0..spec.index_count()).map(|i| spec.bottom(i)).collect();
        let mut last_round = 0;
        for event in report.trace.as_deref().unwrap() {
            if mode != Mode::AsyncStale {
                // Round numbers are worker-local under the asynchronous
                // schedule, so global monotonicity only holds elsewhere.
                prop_assert!(event.round >= last_round, "rounds never rewind");
                last_round = event.round;
            }
            prop_assert_eq!(event.old, state[event.index]);
            prop_assert!(event.new > event.old, "advances are strict");
            state[event.index] = event.new;
        }
        prop_assert_eq!(&state, report.values());
    }

    /// The single-item increment is a pure function of its inputs: every
    /// schedule computes it, and it only ever raises entries.
    #[test]
    fn incr_is_pure_on_every_schedule(
        c in vec(0i64..=30, 1..=12),
        w in 1i64..=6,
        v in 0i64..=15,
        seed in any::<u64>(),
    ) {
        let expected = incr_knapsack(&c, w, v);
        for (j, (&before, &after)) in c.iter().zip(&expected).enumerate() {
            prop_assert!(after >= before, "entry {} lowered", j);
        }
        for mode in all_modes() {
            let config = config_for(mode, 2, seed, 3);
            let spec = IncrSpec::new(c.clone(), w, v);
            let report = engine::solve(&spec, &config).unwrap();
            prop_assert_eq!(report.values(), &expected, "{:?}", mode);
        }
    }

    /// A gap of one on distinct integers is the plain increasing
    /// condition.
    #[test]
    fn unit_gap_is_plain_increase(a in distinct_values(10)) {
        let plain = LisInstance::new(a.clone()).unwrap();
        let gapped = LisInstance::with_gap(a, 1).unwrap();
        let plain_pre = build_pre(&plain);
        let gapped_pre = build_pre(&gapped);
        prop_assert_eq!(plain_pre.predecessors(), gapped_pre.predecessors());
        let lengths = engine::solve_sequential(&lis_spec(&plain)).unwrap();
        let gap_lengths = engine::solve_sequential(&lis_spec(&gapped)).unwrap();
        prop_assert_eq!(lengths.values(), gap_lengths.values());
    }

    /// Both subsequence formulations (plain ascent and fixed-flag
    /// update-once) agree, and the reconstructed witness is a valid
    /// subsequence of the reported best length.
    #[test]
    fn lis_witness_is_valid(a in distinct_values(10), gap in proptest::option::of(1i64..=4)) {
        let instance = match gap {
            Some(k) => LisInstance::with_gap(a, k).unwrap(),
            None => LisInstance::new(a).unwrap(),
        };
        let lengths = engine::solve_sequential(&lis_spec(&instance)).unwrap();
        let flagged = engine::solve_sequential(&lis_fixed_spec(&instance)).unwrap();
        prop_assert_eq!(lengths.values(), flagged.values());

        let witness = reconstruct_lis(&instance, lengths.values());
        let best = *lengths.values().iter().max().unwrap();
        prop_assert_eq!(witness.len() as i64, best);
        let a = instance.values();
        for pair in witness.windows(2) {
            let (i, j) = (pair[0] - 1, pair[1] - 1);
            prop_assert!(i < j);
            match instance.gap() {
                Some(k) => prop_assert!(a[i] + k <= a[j]),
                None => prop_assert!(a[i] < a[j]),
            }
        }
    }

    /// Reconstructed trees reproduce their table's cost and respect the
    /// instance's constraints.
    #[test]
    fn obst_witness_is_valid(
        p in vec(0i64..=9, 1..=7),
        root_pick in proptest::option::of(0usize..7),
        balanced in any::<bool>(),
    ) {
        let n = p.len();
        let root = root_pick.filter(|&x| x < n);
        let balance = balanced.then_some(BalanceMode::EveryNode);
        let Ok(instance) = ObstInstance::with_constraints(p.clone(), root, balance) else {
            // Contradictory constraints are a legitimate draw; nothing
            // to check beyond the rejection itself.
            return Ok(());
        };
        let report = engine::solve_sequential(&obst_spec(&instance)).unwrap();
        let tree = reconstruct_tree(&instance, report.values());
        let map = PairMap::new(n);
        prop_assert_eq!(
            weighted_cost(&tree, &p),
            report.values()[map.flat(0, n - 1)]
        );
        if let Some(x) = root {
            prop_assert!(n == 1 || !llp::obst::key_is_parent(&tree, x + 1));
        }
        if balance.is_some() {
            prop_assert!(subtree_sizes_balanced(&tree));
        }
    }

    /// The flat pair layout is a bijection for any size.
    #[test]
    fn pair_map_is_a_bijection(n in 1usize..=40) {
        let map = PairMap::new(n);
        let mut seen = vec![false; map.len()];
        for i in 0..n {
            for j in i..n {
                let flat = map.flat(i, j);
                prop_assert!(!seen[flat]);
                seen[flat] = true;
                prop_assert_eq!(map.pair(flat), (i, j));
            }
        }
        prop_assert!(seen.into_iter().all(|b| b));
    }
}
