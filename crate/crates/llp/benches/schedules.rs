//! Schedule comparison on representative instances.
//!
//! Run with the default features for the rayon-backed rounds/priority
//! sweeps, and again with `--no-default-features` for the single-threaded
//! fallback; the numbers are directly comparable because results are
//! schedule- and feature-independent:
//!
//! ```text
//! cargo bench -p llp
//! cargo bench -p llp --no-default-features
//! ```
//!
//! Times are reports, not assertions: nothing here fails on regression.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use llp::engine::{self, Mode, Predicate, ScheduleConfig};
use llp::knapsack::{knapsack_spec, KnapsackInstance};
use llp::lis::{lis_fixed_spec, LisInstance};
use llp::obst::{obst_spec, ObstInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config_for(mode: Mode) -> ScheduleConfig {
    let mut config = ScheduleConfig::with_mode(mode);
    config.workers = 4;
    config.seed = 17;
    config.staleness_bound = 2;
    config
}

fn bench_all_modes(c: &mut Criterion, group_name: &str, spec: &impl Predicate) {
    let mut group = c.benchmark_group(group_name);
    group.sample_size(10);
    for (label, mode) in [
        ("sequential", Mode::Sequential),
        ("rounds", Mode::Rounds),
        ("priority", Mode::Priority),
        ("async", Mode::AsyncStale),
    ] {
        let config = config_for(mode);
        group.bench_function(label, |b| {
            b.iter(|| engine::solve(black_box(spec), black_box(&config)).unwrap())
        });
    }
    group.finish();
}

fn shuffled(n: usize, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<i64> = (0..n as i64).collect();
    for i in (1..n).rev() {
        pool.swap(i, rng.random_range(0..=i));
    }
    pool
}

fn benches(c: &mut Criterion) {
    let lis = LisInstance::new(shuffled(400, 3)).unwrap();
    bench_all_modes(c, "lis-fixed-n400", &lis_fixed_spec(&lis));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w: Vec<i64> = (0..60).map(|_| rng.random_range(1..=30)).collect();
    let v: Vec<i64> = (0..60).map(|_| rng.random_range(0..=100)).collect();
    let knapsack = KnapsackInstance::new(w, v, 600).unwrap();
    bench_all_modes(c, "knapsack-60x600", &knapsack_spec(&knapsack));

    let p: Vec<i64> = (0..60).map(|_| rng.random_range(0..=50)).collect();
    let obst = ObstInstance::new(p).unwrap();
    bench_all_modes(c, "obst-n60", &obst_spec(&obst));
}

criterion_group!(schedules, benches);
criterion_main!(schedules);
