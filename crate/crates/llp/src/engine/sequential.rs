//! Ascending-index scans with immediate application, repeated until a full
//! scan finds nothing forbidden. Fully deterministic; the baseline every
//! other schedule is measured against.

use super::{
    ceiling_for, initial_state, Applied, Apply, EngineError, Outcome, Predicate, ScheduleConfig,
    SliceView, SolveReport,
};

/// Solve with the default sequential configuration.
pub fn solve_sequential(spec: &impl Predicate) -> Result<SolveReport, EngineError> {
    solve_sequential_cfg(spec, &ScheduleConfig::sequential())
}

pub(crate) fn solve_sequential_cfg(
    spec: &impl Predicate,
    config: &ScheduleConfig,
) -> Result<SolveReport, EngineError> {
    let n = spec.index_count();
    let ceiling = ceiling_for(spec, config);
    let (mut values, mut flags) = initial_state(spec)?;
    let mut per_index = vec![0u64; n];
    let mut total = 0u64;
    let mut trace = config.trace.then(Vec::new);
    let mut rounds = 0u64;
    let mut sweep = 0u64;

    loop {
        sweep += 1;
        let mut acted = false;
        for j in 0..n {
            let decision = {
                let view = SliceView {
                    values: &values,
                    flags: flags.as_deref(),
                };
                spec.forbidden(&view, j)
                    .then(|| spec.advance_target(&view, j))
            };
            let Some(target) = decision else { continue };
            let mut apply = Apply {
                spec_paired: spec.paired_flag(),
                values: &mut values,
                flags: flags.as_mut(),
                per_index: &mut per_index,
                total: &mut total,
                ceiling,
                trace: trace.as_mut(),
                round: sweep,
            };
            match apply.apply(spec, j, target)? {
                Applied::Advanced | Applied::FlagOnly => acted = true,
                Applied::Infeasible(info) => {
                    if acted {
                        rounds += 1;
                    }
                    return Ok(SolveReport {
                        outcome: Outcome::Infeasible {
                            partial: values,
                            info,
                        },
                        rounds,
                        total_advances: total,
                        per_index_advances: per_index,
                        trace,
                    });
                }
            }
        }
        if acted {
            rounds += 1;
        } else {
            break;
        }
    }

    Ok(SolveReport {
        outcome: Outcome::Feasible(values),
        rounds,
        total_advances: total,
        per_index_advances: per_index,
        trace,
    })
}
