//! Job scheduling with precedence: the smallest completion-time vector in
//! which every job takes its execution time and no job finishes before a
//! predecessor's completion plus its own time. The simplest lattice-linear
//! problem in the crate and the reference predicate for engine tests.

use crate::engine::{Predicate, Value, View};

/// Execution times, precedence lists, and an optional deadline vector.
/// Deadlines make infeasibility reachable: a job forced past its top ends
/// the solve with `Outcome::Infeasible`.
#[derive(Clone, Debug)]
pub struct JobsInstance {
    times: Vec<Value>,
    /// `pre[j]` lists the jobs that must complete before job `j` starts
    /// (0-based).
    pre: Vec<Vec<usize>>,
    tops: Option<Vec<Value>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum JobsError {
    #[error("need at least one job")]
    Empty,

    #[error("execution time of job {index} is negative")]
    NegativeTime { index: usize },

    #[error("precedence list length {got} does not match job count {jobs}")]
    PrecedenceShape { got: usize, jobs: usize },

    #[error("job {index} references out-of-range predecessor {pred}")]
    BadPredecessor { index: usize, pred: usize },

    #[error("precedence graph has a cycle through job {index}")]
    CyclicPrecedence { index: usize },

    #[error("total execution time overflows the value range")]
    Overflow,
}

impl JobsInstance {
    pub fn new(times: Vec<Value>, pre: Vec<Vec<usize>>) -> Result<JobsInstance, JobsError> {
        Self::with_tops(times, pre, None)
    }

    pub fn with_tops(
        times: Vec<Value>,
        pre: Vec<Vec<usize>>,
        tops: Option<Vec<Value>>,
    ) -> Result<JobsInstance, JobsError> {
        let jobs = times.len();
        if jobs == 0 {
            return Err(JobsError::Empty);
        }
        if let Some(index) = times.iter().position(|&t| t < 0) {
            return Err(JobsError::NegativeTime { index });
        }
        if pre.len() != jobs {
            return Err(JobsError::PrecedenceShape {
                got: pre.len(),
                jobs,
            });
        }
        for (index, preds) in pre.iter().enumerate() {
            if let Some(&pred) = preds.iter().find(|&&p| p >= jobs) {
                return Err(JobsError::BadPredecessor { index, pred });
            }
        }
        let total: i128 = times.iter().map(|&t| t as i128).sum();
        if total.saturating_mul(jobs as i128) > Value::MAX as i128 {
            return Err(JobsError::Overflow);
        }
        let instance = JobsInstance { times, pre, tops };
        instance.levels()?;
        Ok(instance)
    }

    pub fn job_count(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[Value] {
        &self.times
    }

    pub fn predecessors(&self) -> &[Vec<usize>] {
        &self.pre
    }

    /// Longest-chain depth of every job (Kahn's algorithm); doubles as the
    /// cycle check and the priority assignment.
    fn levels(&self) -> Result<Vec<i64>, JobsError> {
        let n = self.job_count();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for (j, preds) in self.pre.iter().enumerate() {
            for &i in preds {
                succ[i].push(j);
                indegree[j] += 1;
            }
        }
        let mut level = vec![0i64; n];
        let mut queue: Vec<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
        let mut seen = queue.len();
        let mut head = 0;
        while head < queue.len() {
            let i = queue[head];
            head += 1;
            for &j in &succ[i] {
                level[j] = level[j].max(level[i] + 1);
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push(j);
                    seen += 1;
                }
            }
        }
        if seen < n {
            let index = (0..n).find(|&j| indegree[j] > 0).unwrap();
            return Err(JobsError::CyclicPrecedence { index });
        }
        Ok(level)
    }

    pub fn spec(&self) -> JobsSpec<'_> {
        JobsSpec {
            instance: self,
            levels: self.levels().expect("validated at construction"),
        }
    }
}

/// Ensure form: completion of `j` is at least its own time and at least
/// every predecessor's completion plus its own time.
pub struct JobsSpec<'a> {
    instance: &'a JobsInstance,
    levels: Vec<i64>,
}

impl JobsSpec<'_> {
    fn needed(&self, view: &dyn View, j: usize) -> Value {
        let t = self.instance.times[j];
        self.instance.pre[j]
            .iter()
            .map(|&i| view.value(i) + t)
            .fold(t, Value::max)
    }
}

impl Predicate for JobsSpec<'_> {
    fn index_count(&self) -> usize {
        self.instance.job_count()
    }

    fn bottom(&self, index: usize) -> Value {
        self.instance.times[index]
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        view.value(index) < self.needed(view, index)
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        self.needed(view, index)
    }

    fn top(&self, index: usize) -> Option<Value> {
        self.instance.tops.as_ref().map(|t| t[index])
    }

    fn priority(&self, index: usize) -> Option<i64> {
        Some(self.levels[index])
    }
}
