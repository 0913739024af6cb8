//! Longest increasing subsequence as a least-fixpoint problem.
//!
//! `G[j]` is the length of the longest increasing subsequence ending at
//! position `j`. Positions form a DAG — an edge `i -> j` whenever `i < j`
//! and `A[i] < A[j]` — and `G` is the vertex-length of the longest path
//! ending at each node. Two predicate forms are provided:
//!
//! * [`lis_spec`] — ensure form `G[j] >= max(G[i] + 1)` over predecessors;
//!   indices may re-advance as predecessors grow.
//! * [`lis_fixed_spec`] — update-once form: an index acts only when all its
//!   predecessors carry a published `fixed` flag, so its single advance is
//!   final and a synchronous solve takes one round per DAG level.
//!
//! Constrained variants adjust the graph or add per-index lower bounds:
//! `gap_k` keeps only edges with `A[i] + k <= A[j]`; `odd_bound` requires
//! `G[j]` to also dominate the longest increasing subsequence of odd values
//! ending at `j`; `odd_filter` restricts the subsequence itself to odd
//! values.

use crate::engine::{Predicate, Value, View};

/// An input sequence plus its active constraints.
#[derive(Clone, Debug)]
pub struct LisInstance {
    a: Vec<Value>,
    gap: Option<Value>,
    odd_bound: bool,
    odd_filter: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LisError {
    #[error("need at least one element")]
    Empty,

    #[error("entries must be distinct; positions {first} and {second} both hold {value}")]
    DuplicateValue {
        first: usize,
        second: usize,
        value: Value,
    },

    #[error("gap_k must be at least 1, got {got}")]
    GapTooSmall { got: Value },

    #[error("odd_bound and odd_filter are mutually exclusive constraints")]
    ConflictingConstraints,
}

impl LisInstance {
    pub fn new(a: Vec<Value>) -> Result<LisInstance, LisError> {
        Self::with_constraints(a, None, false, false)
    }

    pub fn with_gap(a: Vec<Value>, gap_k: Value) -> Result<LisInstance, LisError> {
        Self::with_constraints(a, Some(gap_k), false, false)
    }

    pub fn with_constraints(
        a: Vec<Value>,
        gap: Option<Value>,
        odd_bound: bool,
        odd_filter: bool,
    ) -> Result<LisInstance, LisError> {
        if a.is_empty() {
            return Err(LisError::Empty);
        }
        let mut seen: Vec<(Value, usize)> = a.iter().copied().zip(0..).collect();
        seen.sort_unstable();
        for pair in seen.windows(2) {
            if pair[0].0 == pair[1].0 {
                let (first, second) = (pair[0].1.min(pair[1].1), pair[0].1.max(pair[1].1));
                return Err(LisError::DuplicateValue {
                    first,
                    second,
                    value: pair[0].0,
                });
            }
        }
        if let Some(k) = gap {
            if k < 1 {
                return Err(LisError::GapTooSmall { got: k });
            }
        }
        if odd_bound && odd_filter {
            return Err(LisError::ConflictingConstraints);
        }
        Ok(LisInstance {
            a,
            gap,
            odd_bound,
            odd_filter,
        })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sequences
    }

    pub fn values(&self) -> &[Value] {
        &self.a
    }

    pub fn gap(&self) -> Option<Value> {
        self.gap
    }

    pub fn odd_bound(&self) -> bool {
        self.odd_bound
    }

    pub fn odd_filter(&self) -> bool {
        self.odd_filter
    }

    /// True when `i -> j` is an edge of the active precedence graph.
    fn edge(&self, i: usize, j: usize) -> bool {
        let (ai, aj) = (self.a[i], self.a[j]);
        if self.odd_filter && !(is_odd(ai) && is_odd(aj)) {
            return false;
        }
        match self.gap {
            Some(k) => ai.saturating_add(k) <= aj,
            None => ai < aj,
        }
    }

    /// Per-index base lower bounds: 1 everywhere, except 0 for even values
    /// under `odd_filter`, and raised to the odd-subsequence length under
    /// `odd_bound`.
    fn floors(&self) -> Vec<Value> {
        let n = self.len();
        if self.odd_filter {
            return self
                .a
                .iter()
                .map(|&v| if is_odd(v) { 1 } else { 0 })
                .collect();
        }
        let mut floors = vec![1; n];
        if self.odd_bound {
            for (f, lb) in floors.iter_mut().zip(odd_lower_bounds(&self.a)) {
                *f = (*f).max(lb);
            }
        }
        floors
    }
}

fn is_odd(v: Value) -> bool {
    v & 1 != 0
}

/// Length of the longest increasing subsequence of odd values ending at
/// each position (0 where the position's own value is even). One quadratic
/// pass; constant with respect to the solve's state vector.
fn odd_lower_bounds(a: &[Value]) -> Vec<Value> {
    let mut lb = vec![0; a.len()];
    for j in 0..a.len() {
        if !is_odd(a[j]) {
            continue;
        }
        let best = (0..j)
            .filter(|&i| is_odd(a[i]) && a[i] < a[j])
            .map(|i| lb[i])
            .max()
            .unwrap_or(0);
        lb[j] = best + 1;
    }
    lb
}

/// Predecessor sets of the active precedence graph: `pre(j)` lists the
/// positions that can immediately precede `j` in a valid subsequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecedenceGraph {
    pre: Vec<Vec<usize>>,
}

impl PrecedenceGraph {
    pub fn predecessors(&self) -> &[Vec<usize>] {
        &self.pre
    }
}

/// Materialize the predecessor sets under the instance's constraints.
pub fn build_pre(instance: &LisInstance) -> PrecedenceGraph {
    let n = instance.len();
    let pre = (0..n)
        .map(|j| (0..j).filter(|&i| instance.edge(i, j)).collect())
        .collect();
    PrecedenceGraph { pre }
}

fn needed(pre: &[Vec<usize>], floors: &[Value], view: &dyn View, j: usize) -> Value {
    pre[j]
        .iter()
        .map(|&i| view.value(i) + 1)
        .fold(floors[j], Value::max)
}

/// Ensure-form spec: `G[j] >= max(G[i] + 1)` over predecessors, conjoined
/// with the instance's lower bounds.
pub struct LisSpec {
    pre: Vec<Vec<usize>>,
    floors: Vec<Value>,
}

pub fn lis_spec(instance: &LisInstance) -> LisSpec {
    LisSpec {
        pre: build_pre(instance).pre,
        floors: instance.floors(),
    }
}

impl Predicate for LisSpec {
    fn index_count(&self) -> usize {
        self.pre.len()
    }

    fn bottom(&self, index: usize) -> Value {
        // Even positions under odd_filter can never join a subsequence and
        // start (and stay) at 0; everything else starts at length 1.
        self.floors[index].min(1)
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        view.value(index) < needed(&self.pre, &self.floors, view, index)
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        needed(&self.pre, &self.floors, view, index)
    }

    fn priority(&self, index: usize) -> Option<i64> {
        Some(index as i64)
    }
}

/// Update-once spec: an index is forbidden only while unfixed with all
/// predecessors fixed, so the one advance it performs is already final.
pub struct LisFixedSpec {
    pre: Vec<Vec<usize>>,
    floors: Vec<Value>,
}

pub fn lis_fixed_spec(instance: &LisInstance) -> LisFixedSpec {
    LisFixedSpec {
        pre: build_pre(instance).pre,
        floors: instance.floors(),
    }
}

impl Predicate for LisFixedSpec {
    fn index_count(&self) -> usize {
        self.pre.len()
    }

    fn bottom(&self, index: usize) -> Value {
        self.floors[index].min(1)
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        !view.fixed(index) && self.pre[index].iter().all(|&i| view.fixed(i))
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        needed(&self.pre, &self.floors, view, index)
    }

    fn priority(&self, index: usize) -> Option<i64> {
        Some(index as i64)
    }

    fn paired_flag(&self) -> bool {
        true
    }
}

/// Backtrack one optimal subsequence out of a solved vector, as 1-based
/// positions in ascending order.
///
/// From the first position holding the maximum, repeatedly step to the
/// smallest predecessor whose value is exactly one less. When no such
/// predecessor exists the remaining length is owed to the odd lower bound,
/// and the head of the output is the corresponding subsequence of odd
/// values (an `odd_bound` certificate is an odd prefix followed by a
/// graph-respecting continuation). Returns the empty list only when every
/// position is excluded (`odd_filter` with no odd values).
pub fn reconstruct_lis(instance: &LisInstance, values: &[Value]) -> Vec<usize> {
    assert_eq!(
        values.len(),
        instance.len(),
        "solved vector length mismatch"
    );
    let pre = build_pre(instance).pre;
    let best = values.iter().copied().max().expect("nonempty instance");
    if best == 0 {
        return Vec::new();
    }
    let mut j = values.iter().position(|&v| v == best).unwrap();
    let mut chain = vec![j];
    loop {
        let step = pre[j].iter().copied().find(|&i| values[i] == values[j] - 1);
        match step {
            Some(i) => {
                chain.push(i);
                j = i;
            }
            None => break,
        }
    }
    // Any remaining length at the head comes from the odd lower bound.
    if instance.odd_bound && values[j] > 1 {
        let lb = odd_lower_bounds(&instance.a);
        debug_assert_eq!(lb[j], values[j], "head length must match its floor");
        let mut need = lb[j];
        while need > 1 {
            let i = (0..j)
                .find(|&i| {
                    is_odd(instance.a[i]) && instance.a[i] < instance.a[j] && lb[i] == need - 1
                })
                .expect("odd lower bounds decrease in unit steps");
            chain.push(i);
            j = i;
            need -= 1;
        }
    }
    chain.reverse();
    chain.iter().map(|&i| i + 1).collect()
}
