//! Free-running workers with bounded-stale reads.
//!
//! Indices are statically partitioned round-robin: worker `w` owns every
//! index `j` with `j % workers == w` and is the only writer to it. During
//! work sweeps a worker reads its own indices fresh and samples every
//! foreign index from recent publication history — some version at most
//! `staleness_bound` behind, chosen by a per-worker seeded generator. One
//! (value, flag) pair is sampled per index per evaluation, so `forbidden`
//! and `advance_target` always agree on what they saw.
//!
//! Termination is quiescence detection: after each worker's local sweeps
//! stop producing advances, all workers run a check sweep with fresh reads
//! behind a barrier. Two consecutive globally clean check sweeps end the
//! solve; any action resets the count and work resumes. Because advances
//! only ever raise values toward the least fixpoint, a clean fresh sweep
//! of a monotone predicate is exact, and the second sweep is confirmation.

use std::cell::RefCell;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Barrier, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::published::Published;
use super::{
    ceiling_for, EngineError, InfeasibleInfo, Outcome, Predicate, ScheduleConfig, SolveReport,
    TraceEvent, Value, View,
};

struct Shared<'a, P> {
    spec: &'a P,
    published: Published,
    barrier: Barrier,
    dirty: AtomicBool,
    abort: AtomicBool,
    error: OnceLock<EngineError>,
    infeasible: OnceLock<InfeasibleInfo>,
    /// Per-worker advance counters; each is written only by its worker, so
    /// the advance ceiling can be enforced with plain loads and stores.
    advances: Vec<AtomicU64>,
    ceiling: u64,
    workers: usize,
    bound: usize,
}

impl<P: Predicate> Shared<'_, P> {
    fn fail(&self, err: EngineError) {
        let _ = self.error.set(err);
        self.abort.store(true, Ordering::Release);
    }
}

/// Per-evaluation memo of sampled pairs, generation-stamped so resetting
/// between evaluations is O(1).
struct SampleCache {
    gen: u64,
    entries: Vec<(u64, Value, bool)>,
}

impl SampleCache {
    fn new(n: usize) -> SampleCache {
        SampleCache {
            gen: 0,
            entries: vec![(0, 0, false); n],
        }
    }

    fn next_evaluation(&mut self) {
        self.gen += 1;
    }
}

/// The view a worker evaluates against: own indices fresh, foreign indices
/// from bounded-stale history (or fresh during check sweeps). Each index is
/// sampled at most once per evaluation.
struct WorkerView<'a> {
    published: &'a Published,
    workers: usize,
    me: usize,
    bound: usize,
    fresh_only: bool,
    rng: RefCell<&'a mut ChaCha8Rng>,
    cache: RefCell<&'a mut SampleCache>,
}

impl WorkerView<'_> {
    fn read(&self, j: usize) -> (Value, bool) {
        let mut cache = self.cache.borrow_mut();
        let gen = cache.gen;
        let (stamp, v, f) = cache.entries[j];
        if stamp == gen {
            return (v, f);
        }
        let pair = if self.fresh_only || j % self.workers == self.me {
            self.published.fresh(j)
        } else {
            self.published
                .sample_stale(j, self.bound, &mut **self.rng.borrow_mut())
        };
        cache.entries[j] = (gen, pair.0, pair.1);
        pair
    }
}

impl View for WorkerView<'_> {
    fn value(&self, index: usize) -> Value {
        self.read(index).0
    }
    fn fixed(&self, index: usize) -> bool {
        self.read(index).1
    }
}

struct WorkerStats {
    sweeps_with_action: u64,
    /// (index, value advances) for each owned index.
    per_index: Vec<(usize, u64)>,
    trace: Vec<TraceEvent>,
}

enum Acted {
    Yes,
    Stop,
}

struct Worker<'a, 'b, P: Predicate> {
    shared: &'a Shared<'b, P>,
    me: usize,
    owned: Vec<usize>,
    rng: ChaCha8Rng,
    cache: SampleCache,
    counts: Vec<u64>,
    local_advances: u64,
    trace_on: bool,
    trace: Vec<TraceEvent>,
    sweep: u64,
    sweeps_with_action: u64,
}

impl<P: Predicate> Worker<'_, '_, P> {
    /// Publish the decided advance for owned index `j`. Mirrors the
    /// snapshot schedules' bookkeeping, but through the atomic cells.
    fn act(&mut self, j: usize, slot: usize, target: Value) -> Acted {
        let shared = self.shared;
        let (current, fixed) = shared.published.fresh(j);
        if target < 0 {
            shared.fail(EngineError::NegativeTarget { index: j, target });
            return Acted::Stop;
        }
        if target < current {
            shared.fail(EngineError::TargetNotIncreasing {
                index: j,
                target,
                current,
            });
            return Acted::Stop;
        }
        let paired = shared.spec.paired_flag();
        let value_changed = target > current;
        if value_changed {
            if let Some(top) = shared.spec.top(j) {
                if target > top {
                    let _ = shared.infeasible.set(InfeasibleInfo {
                        index: j,
                        needed: target,
                        top,
                    });
                    shared.abort.store(true, Ordering::Release);
                    return Acted::Stop;
                }
            }
            shared.published.publish(j, target, false);
            self.counts[slot] += 1;
            self.local_advances += 1;
            if self.trace_on {
                self.trace.push(TraceEvent {
                    round: self.sweep,
                    index: j,
                    old: current,
                    new: target,
                });
            }
            shared.advances[self.me].store(self.local_advances, Ordering::Release);
            let total: u64 = shared
                .advances
                .iter()
                .map(|a| a.load(Ordering::Acquire))
                .sum();
            if total > shared.ceiling {
                shared.fail(EngineError::AdvanceCeiling {
                    ceiling: shared.ceiling,
                    index: j,
                });
                return Acted::Stop;
            }
        }
        if paired && !fixed {
            // Flag publication follows the value it certifies.
            shared.published.publish(j, target, true);
            return Acted::Yes;
        }
        if !value_changed {
            shared.fail(EngineError::TargetNotIncreasing {
                index: j,
                target,
                current,
            });
            return Acted::Stop;
        }
        Acted::Yes
    }

    /// One sweep over owned indices. Returns whether any action happened;
    /// `fresh_only` selects check-sweep semantics.
    fn sweep(&mut self, fresh_only: bool) -> bool {
        self.sweep += 1;
        let mut acted = false;
        for slot in 0..self.owned.len() {
            let j = self.owned[slot];
            self.cache.next_evaluation();
            let decision = {
                let view = WorkerView {
                    published: &self.shared.published,
                    workers: self.shared.workers,
                    me: self.me,
                    bound: self.shared.bound,
                    fresh_only,
                    rng: RefCell::new(&mut self.rng),
                    cache: RefCell::new(&mut self.cache),
                };
                self.shared
                    .spec
                    .forbidden(&view, j)
                    .then(|| self.shared.spec.advance_target(&view, j))
            };
            if let Some(target) = decision {
                match self.act(j, slot, target) {
                    Acted::Yes => acted = true,
                    Acted::Stop => break,
                }
            }
        }
        if acted {
            self.sweeps_with_action += 1;
        }
        acted
    }

    fn run(mut self) -> WorkerStats {
        let mut consecutive_clean = 0;
        loop {
            // Work phase: stale-read sweeps until locally quiescent.
            while !self.shared.abort.load(Ordering::Acquire) {
                if !self.sweep(false) {
                    break;
                }
            }
            // Quiescence protocol. Every worker passes the same three
            // barriers per cycle, abort or not, so nobody deadlocks.
            self.shared.barrier.wait();
            if self.me == 0 {
                self.shared.dirty.store(false, Ordering::Release);
            }
            self.shared.barrier.wait();
            if !self.shared.abort.load(Ordering::Acquire) && self.sweep(true) {
                self.shared.dirty.store(true, Ordering::Release);
            }
            self.shared.barrier.wait();
            if self.shared.abort.load(Ordering::Acquire) {
                break;
            }
            if self.shared.dirty.load(Ordering::Acquire) {
                consecutive_clean = 0;
            } else {
                consecutive_clean += 1;
                if consecutive_clean == 2 {
                    break;
                }
            }
        }
        WorkerStats {
            sweeps_with_action: self.sweeps_with_action,
            per_index: self
                .owned
                .iter()
                .copied()
                .zip(self.counts.iter().copied())
                .collect(),
            trace: self.trace,
        }
    }
}

/// Solve with free-running workers and bounded-stale foreign reads.
///
/// With `workers = 1` and `staleness_bound = 0` this degenerates to the
/// sequential schedule and reproduces its counts exactly. The result
/// vector is independent of `workers`, `seed`, and `staleness_bound` for
/// monotone predicates; round and advance counts are not.
pub fn solve_async(
    spec: &impl Predicate,
    config: &ScheduleConfig,
) -> Result<SolveReport, EngineError> {
    if config.workers == 0 {
        return Err(EngineError::NoWorkers);
    }
    let n = spec.index_count();
    let workers = config.workers;
    let mut bottoms = Vec::with_capacity(n);
    for j in 0..n {
        let b = spec.bottom(j);
        if b < 0 {
            return Err(EngineError::NegativeBottom { index: j, value: b });
        }
        bottoms.push(b);
    }
    let shared = Shared {
        spec,
        published: Published::new(&bottoms, config.staleness_bound),
        barrier: Barrier::new(workers),
        dirty: AtomicBool::new(false),
        abort: AtomicBool::new(false),
        error: OnceLock::new(),
        infeasible: OnceLock::new(),
        advances: (0..workers).map(|_| AtomicU64::new(0)).collect(),
        ceiling: ceiling_for(spec, config),
        workers,
        bound: config.staleness_bound,
    };

    let stats: Vec<WorkerStats> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|me| {
                let shared = &shared;
                let seed = config
                    .seed
                    .wrapping_add((me as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let trace_on = config.trace;
                scope.spawn(move || {
                    Worker {
                        shared,
                        me,
                        owned: (me..n).step_by(workers).collect(),
                        rng: ChaCha8Rng::seed_from_u64(seed),
                        cache: SampleCache::new(n),
                        counts: vec![0; (me..n).step_by(workers).count()],
                        local_advances: 0,
                        trace_on,
                        trace: Vec::new(),
                        sweep: 0,
                        sweeps_with_action: 0,
                    }
                    .run()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });

    if let Some(err) = shared.error.get() {
        return Err(err.clone());
    }

    let (values, _flags) = shared.published.snapshot();
    let mut per_index = vec![0u64; n];
    let mut trace = config.trace.then(Vec::new);
    let mut rounds = 0;
    for stat in stats {
        rounds = rounds.max(stat.sweeps_with_action);
        for (j, c) in stat.per_index {
            per_index[j] = c;
        }
        if let Some(t) = trace.as_mut() {
            t.extend(stat.trace);
        }
    }
    let total_advances = per_index.iter().sum();

    let outcome = match shared.infeasible.get() {
        Some(info) => Outcome::Infeasible {
            partial: values,
            info: info.clone(),
        },
        None => Outcome::Feasible(values),
    };
    Ok(SolveReport {
        outcome,
        rounds,
        total_advances,
        per_index_advances: per_index,
        trace,
    })
}
