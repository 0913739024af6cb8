//! Synchronous schedules: every round evaluates all (or one priority
//! level's) indices against a frozen snapshot, then applies the collected
//! advances. Evaluation is side-effect free, so it parallelizes with rayon
//! when the `parallel` feature is on; results are identical either way
//! because decisions are collected in index order.

use std::collections::BTreeMap;

use super::{
    ceiling_for, initial_state, Applied, Apply, EngineError, Outcome, Predicate, ScheduleConfig,
    SliceView, SolveReport, Value,
};

/// Evaluate `forbidden`/`advance_target` for the given indices against the
/// frozen `values`/`flags`, in index order.
fn collect_decisions(
    spec: &impl Predicate,
    values: &[Value],
    flags: Option<&[bool]>,
    indices: &[usize],
    pool: Option<&rayon_pool::Pool>,
) -> Vec<(usize, Value)> {
    let eval = |&j: &usize| {
        let view = SliceView { values, flags };
        spec.forbidden(&view, j)
            .then(|| (j, spec.advance_target(&view, j)))
    };
    match pool {
        Some(pool) => pool.filter_map_indexed(indices, eval),
        None => indices.iter().filter_map(eval).collect(),
    }
}

#[cfg(feature = "parallel")]
mod rayon_pool {
    use rayon::prelude::*;

    pub struct Pool(rayon::ThreadPool);

    impl Pool {
        pub fn build(workers: usize) -> Option<Pool> {
            if workers <= 1 {
                return None;
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .ok()
                .map(Pool)
        }

        pub fn filter_map_indexed<T: Send>(
            &self,
            indices: &[usize],
            eval: impl Fn(&usize) -> Option<T> + Sync,
        ) -> Vec<T> {
            // par_iter over an indexed source keeps collection order stable,
            // so parallel and serial evaluation produce the same decision list.
            // `&eval` because the pool only requires `Sync` of the caller.
            self.0
                .install(|| indices.par_iter().filter_map(&eval).collect())
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod rayon_pool {
    pub struct Pool(());

    impl Pool {
        pub fn build(_workers: usize) -> Option<Pool> {
            None
        }

        pub fn filter_map_indexed<T>(
            &self,
            _indices: &[usize],
            _eval: impl Fn(&usize) -> Option<T>,
        ) -> Vec<T> {
            unreachable!("pool is never built without the parallel feature")
        }
    }
}

struct RoundState {
    values: Vec<Value>,
    flags: Option<Vec<bool>>,
    per_index: Vec<u64>,
    total: u64,
    ceiling: u64,
    trace: Option<Vec<super::TraceEvent>>,
    rounds: u64,
}

impl RoundState {
    fn apply_round(
        &mut self,
        spec: &impl Predicate,
        decisions: Vec<(usize, Value)>,
    ) -> Result<Option<SolveReport>, EngineError> {
        self.rounds += 1;
        for (j, target) in decisions {
            let mut apply = Apply {
                spec_paired: spec.paired_flag(),
                values: &mut self.values,
                flags: self.flags.as_mut(),
                per_index: &mut self.per_index,
                total: &mut self.total,
                ceiling: self.ceiling,
                trace: self.trace.as_mut(),
                round: self.rounds,
            };
            match apply.apply(spec, j, target)? {
                Applied::Advanced | Applied::FlagOnly => {}
                Applied::Infeasible(info) => return Ok(Some(self.finish_infeasible(info))),
            }
        }
        Ok(None)
    }

    fn finish_infeasible(&mut self, info: super::InfeasibleInfo) -> SolveReport {
        SolveReport {
            outcome: Outcome::Infeasible {
                partial: std::mem::take(&mut self.values),
                info,
            },
            rounds: self.rounds,
            total_advances: self.total,
            per_index_advances: std::mem::take(&mut self.per_index),
            trace: self.trace.take(),
        }
    }

    fn finish_feasible(self) -> SolveReport {
        SolveReport {
            outcome: Outcome::Feasible(self.values),
            rounds: self.rounds,
            total_advances: self.total,
            per_index_advances: self.per_index,
            trace: self.trace,
        }
    }
}

fn round_state(spec: &impl Predicate, config: &ScheduleConfig) -> Result<RoundState, EngineError> {
    if config.workers == 0 {
        return Err(EngineError::NoWorkers);
    }
    let (values, flags) = initial_state(spec)?;
    Ok(RoundState {
        per_index: vec![0; values.len()],
        values,
        flags,
        total: 0,
        ceiling: ceiling_for(spec, config),
        trace: config.trace.then(Vec::new),
        rounds: 0,
    })
}

/// Synchronous rounds over all indices until one round is advance-free.
pub fn solve_rounds(
    spec: &impl Predicate,
    config: &ScheduleConfig,
) -> Result<SolveReport, EngineError> {
    let mut st = round_state(spec, config)?;
    let pool = rayon_pool::Pool::build(config.workers);
    let all: Vec<usize> = (0..spec.index_count()).collect();
    loop {
        let decisions =
            collect_decisions(spec, &st.values, st.flags.as_deref(), &all, pool.as_ref());
        if decisions.is_empty() {
            return Ok(st.finish_feasible());
        }
        if let Some(report) = st.apply_round(spec, decisions)? {
            return Ok(report);
        }
    }
}

/// Rounds restricted to ascending priority levels. Each level runs to
/// quiescence before the next; the whole ladder repeats until a full pass
/// performs no action, so the result is the least fixpoint even for
/// predicates whose dependencies ignore the priorities.
pub fn solve_priority(
    spec: &impl Predicate,
    config: &ScheduleConfig,
) -> Result<SolveReport, EngineError> {
    let mut st = round_state(spec, config)?;
    let pool = rayon_pool::Pool::build(config.workers);
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for j in 0..spec.index_count() {
        let p = spec
            .priority(j)
            .ok_or(EngineError::MissingPriority { index: j })?;
        levels.entry(p).or_default().push(j);
    }
    loop {
        let mut pass_acted = false;
        for indices in levels.values() {
            loop {
                let decisions = collect_decisions(
                    spec,
                    &st.values,
                    st.flags.as_deref(),
                    indices,
                    pool.as_ref(),
                );
                if decisions.is_empty() {
                    break;
                }
                pass_acted = true;
                if let Some(report) = st.apply_round(spec, decisions)? {
                    return Ok(report);
                }
            }
        }
        if !pass_acted {
            return Ok(st.finish_feasible());
        }
    }
}
