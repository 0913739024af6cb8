//! Least-fixpoint search over vectors of non-negative integers.
//!
//! A problem plugs in through [`Predicate`]: it names a bottom vector, a
//! per-index `forbidden` test, and an `advance_target` that says how far a
//! forbidden index must rise. When the underlying feasibility predicate is
//! lattice-linear — closed under componentwise minimum, with every
//! infeasible vector having at least one forbidden index — repeatedly
//! advancing forbidden indices converges to the least feasible vector no
//! matter the order, which is what makes the four schedules here
//! interchangeable:
//!
//! * [`solve_sequential`] — ascending index scans until a clean sweep;
//! * [`solve_rounds`] — synchronous rounds against a frozen snapshot;
//! * [`solve_priority`] — rounds restricted to ascending priority levels;
//! * [`solve_async`] — free-running workers with bounded-stale reads.
//!
//! All four report the same result vector; they differ in round counts and
//! in how much work each index sees.

mod asynchronous;
mod published;
mod rounds;
mod sequential;

pub use asynchronous::solve_async;
pub use published::Published;
pub use rounds::{solve_priority, solve_rounds};
pub use sequential::solve_sequential;

/// Lattice values. Non-negative by convention; the engine rejects negative
/// advance targets so problem arithmetic that underflows is caught.
pub type Value = i64;

/// Read access to a state vector during `forbidden`/`advance_target`
/// evaluation. Schedules hand different implementations to the predicate:
/// a frozen snapshot, live state, or a stale sample.
pub trait View {
    /// Current (possibly stale) value of `index`.
    fn value(&self, index: usize) -> Value;
    /// Whether `index` has been marked fixed. Always `false` for
    /// predicates without paired flags.
    fn fixed(&self, index: usize) -> bool;
}

/// A view over plain slices; the workhorse for snapshot evaluation.
pub struct SliceView<'a> {
    pub values: &'a [Value],
    pub flags: Option<&'a [bool]>,
}

impl View for SliceView<'_> {
    fn value(&self, index: usize) -> Value {
        self.values[index]
    }
    fn fixed(&self, index: usize) -> bool {
        self.flags.is_some_and(|f| f[index])
    }
}

/// A problem statement the engine can drive to its least fixpoint.
///
/// Implementations must be *monotone*: raising any component of the view
/// never turns `forbidden` from true to false with a smaller
/// `advance_target`, and `advance_target` itself never decreases when the
/// view grows. Every shipped predicate is of the ensure form
/// `value(j) >= f_j(view)` with monotone `f_j`, which satisfies this by
/// construction.
pub trait Predicate: Sync {
    /// Number of components in the state vector.
    fn index_count(&self) -> usize;

    /// Initial (least) value of `index`.
    fn bottom(&self, index: usize) -> Value;

    /// True when `index` must advance before the predicate can hold.
    fn forbidden(&self, view: &dyn View, index: usize) -> bool;

    /// The least value that repairs `index`, evaluated against the same
    /// view that made it forbidden. Only called when `forbidden` is true.
    /// Must exceed the view's value at `index`, except for paired-flag
    /// predicates where it may equal it (the flag still gets published).
    fn advance_target(&self, view: &dyn View, index: usize) -> Value;

    /// Inclusive upper bound for `index`, if the problem has one. An
    /// advance target beyond it makes the instance infeasible.
    fn top(&self, _index: usize) -> Option<Value> {
        None
    }

    /// Scheduling level for [`solve_priority`]; must be `Some` for every
    /// index when that schedule is used.
    fn priority(&self, _index: usize) -> Option<i64> {
        None
    }

    /// Whether each index carries a boolean "fixed" flag published after
    /// its value. Used by update-once predicates.
    fn paired_flag(&self) -> bool {
        false
    }
}

/// Which schedule drives the solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Rounds,
    Priority,
    AsyncStale,
}

/// Schedule parameters. `workers` is the thread count for the parallel
/// schedules (ignored by `Sequential`); `seed` and `staleness_bound` only
/// affect `AsyncStale`, where foreign reads may be up to `staleness_bound`
/// published versions old, chosen pseudorandomly from `seed`.
#[derive(Clone, Debug)]
pub struct ScheduleConfig {
    pub mode: Mode,
    pub workers: usize,
    pub seed: u64,
    pub staleness_bound: usize,
    pub trace: bool,
    /// Abort once total advances exceed this; `None` selects
    /// `n * max(top, 2^40)`, a bound no monotone predicate can reach.
    pub advance_ceiling: Option<u64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            mode: Mode::Sequential,
            workers: 1,
            seed: 0,
            staleness_bound: 0,
            trace: false,
            advance_ceiling: None,
        }
    }
}

impl ScheduleConfig {
    pub fn sequential() -> Self {
        Self::default()
    }

    pub fn with_mode(mode: Mode) -> Self {
        ScheduleConfig {
            mode,
            ..Self::default()
        }
    }
}

/// One published value change, for `trace = true` runs. `round` is the
/// sweep or round number in which the advance happened (worker-local under
/// `AsyncStale`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub round: u64,
    pub index: usize,
    pub old: Value,
    pub new: Value,
}

/// Why a solve ended without reaching feasibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibleInfo {
    /// Index whose required advance exceeded its top.
    pub index: usize,
    /// The advance target that was demanded.
    pub needed: Value,
    /// The bound it violated.
    pub top: Value,
}

/// Final state of a solve: either the least feasible vector or proof that
/// feasibility would exceed a top bound (with the partial vector reached).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Vec<Value>),
    Infeasible {
        partial: Vec<Value>,
        info: InfeasibleInfo,
    },
}

impl Outcome {
    /// The state vector regardless of feasibility.
    pub fn values(&self) -> &[Value] {
        match self {
            Outcome::Feasible(v) => v,
            Outcome::Infeasible { partial, .. } => partial,
        }
    }

    pub fn feasible(&self) -> Option<&[Value]> {
        match self {
            Outcome::Feasible(v) => Some(v),
            Outcome::Infeasible { .. } => None,
        }
    }
}

/// What a solve did: the outcome plus work accounting.
///
/// `rounds` counts sweeps that performed at least one action (a value
/// advance or a flag publication); under `AsyncStale` it is the maximum
/// over workers of their local count. `per_index_advances[j]` counts value
/// changes only, so an update-once predicate shows at most 1 everywhere
/// even when flag-only actions occurred.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub rounds: u64,
    pub total_advances: u64,
    pub per_index_advances: Vec<u64>,
    pub trace: Option<Vec<TraceEvent>>,
}

impl SolveReport {
    pub fn values(&self) -> &[Value] {
        self.outcome.values()
    }
}

/// Engine failures. These indicate a broken predicate or a configuration
/// error, never a legitimately infeasible instance (see [`Outcome`]).
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(
        "advance ceiling of {ceiling} exceeded at index {index}; the predicate is not converging (non-monotone or not lattice-linear?)"
    )]
    AdvanceCeiling { ceiling: u64, index: usize },

    #[error(
        "advance target {target} for forbidden index {index} does not exceed its current value {current}"
    )]
    TargetNotIncreasing {
        index: usize,
        target: Value,
        current: Value,
    },

    #[error("advance target {target} for index {index} is negative; problem arithmetic overflowed or the predicate is broken")]
    NegativeTarget { index: usize, target: Value },

    #[error("negative bottom value {value} at index {index}")]
    NegativeBottom { index: usize, value: Value },

    #[error("priority schedule requires a priority for every index; none at {index}")]
    MissingPriority { index: usize },

    #[error("schedule requires at least one worker")]
    NoWorkers,
}

/// Dispatch on `config.mode`.
pub fn solve(spec: &impl Predicate, config: &ScheduleConfig) -> Result<SolveReport, EngineError> {
    match config.mode {
        Mode::Sequential => solve_sequential_cfg(spec, config),
        Mode::Rounds => solve_rounds(spec, config),
        Mode::Priority => solve_priority(spec, config),
        Mode::AsyncStale => solve_async(spec, config),
    }
}

pub(crate) use sequential::solve_sequential_cfg;

/// Default advance ceiling: `n * max(max_top, 2^40)`, saturating.
pub(crate) fn default_ceiling(spec: &impl Predicate) -> u64 {
    let n = spec.index_count() as u64;
    let max_top = (0..spec.index_count())
        .filter_map(|j| spec.top(j))
        .max()
        .unwrap_or(0)
        .max(0) as u64;
    n.saturating_mul(max_top.max(1 << 40))
}

pub(crate) fn ceiling_for(spec: &impl Predicate, config: &ScheduleConfig) -> u64 {
    config
        .advance_ceiling
        .unwrap_or_else(|| default_ceiling(spec))
}

/// Initial state shared by the snapshot-based schedules.
pub(crate) fn initial_state(
    spec: &impl Predicate,
) -> Result<(Vec<Value>, Option<Vec<bool>>), EngineError> {
    let n = spec.index_count();
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let b = spec.bottom(j);
        if b < 0 {
            return Err(EngineError::NegativeBottom { index: j, value: b });
        }
        values.push(b);
    }
    let flags = spec.paired_flag().then(|| vec![false; n]);
    Ok((values, flags))
}

/// Shared bookkeeping for one advance decision. Returns `Ok(true)` if a
/// value was published, `Ok(false)` for a flag-only action, and the
/// infeasibility via `infeasible` out-slot (so callers can stop cleanly).
pub(crate) struct Apply<'a> {
    pub spec_paired: bool,
    pub values: &'a mut [Value],
    pub flags: Option<&'a mut Vec<bool>>,
    pub per_index: &'a mut [u64],
    pub total: &'a mut u64,
    pub ceiling: u64,
    pub trace: Option<&'a mut Vec<TraceEvent>>,
    pub round: u64,
}

pub(crate) enum Applied {
    Advanced,
    FlagOnly,
    Infeasible(InfeasibleInfo),
}

impl Apply<'_> {
    pub(crate) fn apply(
        &mut self,
        spec: &impl Predicate,
        index: usize,
        target: Value,
    ) -> Result<Applied, EngineError> {
        let current = self.values[index];
        if target < 0 {
            return Err(EngineError::NegativeTarget { index, target });
        }
        if target < current {
            return Err(EngineError::TargetNotIncreasing {
                index,
                target,
                current,
            });
        }
        let value_changed = target > current;
        if value_changed {
            if let Some(top) = spec.top(index) {
                if target > top {
                    return Ok(Applied::Infeasible(InfeasibleInfo {
                        index,
                        needed: target,
                        top,
                    }));
                }
            }
            self.values[index] = target;
            self.per_index[index] += 1;
            *self.total += 1;
            if let Some(trace) = self.trace.as_deref_mut() {
                trace.push(TraceEvent {
                    round: self.round,
                    index,
                    old: current,
                    new: target,
                });
            }
            if *self.total > self.ceiling {
                return Err(EngineError::AdvanceCeiling {
                    ceiling: self.ceiling,
                    index,
                });
            }
        }
        // Value first, then the flag: readers that observe the flag must
        // observe the final value.
        if self.spec_paired {
            let flags = self.flags.as_deref_mut().expect("paired spec has flags");
            if !flags[index] {
                flags[index] = true;
                return Ok(if value_changed {
                    Applied::Advanced
                } else {
                    Applied::FlagOnly
                });
            }
        }
        if !value_changed {
            // An action that neither raised the value nor set a flag can
            // never make progress; flag it instead of looping forever.
            return Err(EngineError::TargetNotIncreasing {
                index,
                target,
                current,
            });
        }
        Ok(Applied::Advanced)
    }
}
