//! 0/1 knapsack over a grid of cells `(i, j)`: the best value achievable
//! using the first `i` items within capacity `j`.
//!
//! Each cell advances toward the larger of its exclude branch (the cell
//! above) and its include branch (up-left by the item's weight, plus its
//! value). Row 0 is implicit and all zero. Scheduling by priority `i`
//! settles the rows in order.
//!
//! Implications `a => b` ("item a may be packed only alongside item b",
//! with `b` earlier than `a`) restrict the include branch: item `a` may be
//! included at capacity `j` only when `b` is in the *recorded witness* of
//! cell `(a - 1, j - w_a)` — the single packing obtained by backtracking
//! the current table with exclusion preferred on ties. That rule reads the
//! table rows below `a`, so it is only meaningful on schedules that settle
//! rows in order; [`solve_knapsack`] rejects the frozen-round and
//! asynchronous schedules for such instances. It is also deliberately
//! stricter than "some optimal packing contains `b`": a packing that ties
//! the recorded one but includes `b` does not license the include branch.
//!
//! [`IncrSpec`] is the single-item increment over one capacity row: given
//! the previous row as immutable input, raise each `G[j]` to
//! `C[j - w] + v`. Its predicate never reads other cells of the mutable
//! state, so every schedule — including the stale asynchronous one —
//! produces the same row, and folding it over the items reproduces
//! [`knapsack_iterative`].

use crate::engine::{self, Predicate, ScheduleConfig, SolveReport, Value, View};

/// Maximum number of grid cells an instance may describe.
pub const MAX_GRID_CELLS: i128 = 100_000_000;

/// Items with positive weights and non-negative values, a capacity, and
/// optional implications `a => b` (0-based, `b < a`).
#[derive(Clone, Debug)]
pub struct KnapsackInstance {
    w: Vec<Value>,
    v: Vec<Value>,
    cap: Value,
    implications: Vec<(usize, usize)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KnapsackError {
    #[error("need at least one item")]
    Empty,

    #[error("items need one weight and one value each: {weights} weights, {values} values")]
    LengthMismatch { weights: usize, values: usize },

    #[error("weight of item {index} is {got}; weights must be positive")]
    NonPositiveWeight { index: usize, got: Value },

    #[error("value of item {index} is negative")]
    NegativeValue { index: usize },

    #[error("capacity is negative")]
    NegativeCapacity,

    #[error("{got} items exceed the supported maximum of 64")]
    TooManyItems { got: usize },

    #[error("grid of {cells} cells exceeds the supported maximum of {MAX_GRID_CELLS}")]
    GridTooLarge { cells: i128 },

    #[error("total value can overflow the value range")]
    Overflow,

    #[error("implication ({a}, {b}) names an item out of range")]
    ImplicationOutOfRange { a: usize, b: usize },

    #[error("implication ({a}, {b}) must require an earlier item (b < a)")]
    ImplicationOrder { a: usize, b: usize },

    #[error("implications need a schedule that settles rows in order; {mode:?} does not")]
    UnsupportedSchedule { mode: engine::Mode },

    #[error(transparent)]
    Engine(#[from] engine::EngineError),
}

impl KnapsackInstance {
    pub fn new(
        w: Vec<Value>,
        v: Vec<Value>,
        cap: Value,
    ) -> Result<KnapsackInstance, KnapsackError> {
        Self::with_implications(w, v, cap, Vec::new())
    }

    /// Each implication `(a, b)` reads "packing item `a` requires item
    /// `b`", with both 0-based and `b < a`.
    pub fn with_implications(
        w: Vec<Value>,
        v: Vec<Value>,
        cap: Value,
        implications: Vec<(usize, usize)>,
    ) -> Result<KnapsackInstance, KnapsackError> {
        if w.is_empty() {
            return Err(KnapsackError::Empty);
        }
        if w.len() != v.len() {
            return Err(KnapsackError::LengthMismatch {
                weights: w.len(),
                values: v.len(),
            });
        }
        let n = w.len();
        if n > 64 {
            return Err(KnapsackError::TooManyItems { got: n });
        }
        if let Some(index) = w.iter().position(|&x| x < 1) {
            return Err(KnapsackError::NonPositiveWeight {
                index,
                got: w[index],
            });
        }
        if let Some(index) = v.iter().position(|&x| x < 0) {
            return Err(KnapsackError::NegativeValue { index });
        }
        if cap < 0 {
            return Err(KnapsackError::NegativeCapacity);
        }
        let cells = n as i128 * (cap as i128 + 1);
        if cells > MAX_GRID_CELLS {
            return Err(KnapsackError::GridTooLarge { cells });
        }
        if v.iter().map(|&x| x as i128).sum::<i128>() > Value::MAX as i128 {
            return Err(KnapsackError::Overflow);
        }
        for &(a, b) in &implications {
            if a >= n || b >= n {
                return Err(KnapsackError::ImplicationOutOfRange { a, b });
            }
            if b >= a {
                return Err(KnapsackError::ImplicationOrder { a, b });
            }
        }
        Ok(KnapsackInstance {
            w,
            v,
            cap,
            implications,
        })
    }

    pub fn item_count(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[Value] {
        &self.w
    }

    pub fn values(&self) -> &[Value] {
        &self.v
    }

    pub fn capacity(&self) -> Value {
        self.cap
    }

    pub fn implications(&self) -> &[(usize, usize)] {
        &self.implications
    }

    /// Cells per grid row (`capacity + 1`).
    pub fn columns(&self) -> usize {
        self.cap as usize + 1
    }
}

/// Grid spec for the knapsack recurrence.
pub struct KnapsackSpec {
    w: Vec<Value>,
    v: Vec<Value>,
    cols: usize,
    /// Bit `t` of `req[i]` set means packing item `i + 1` (1-based)
    /// requires item `t + 1`.
    req: Vec<u64>,
}

pub fn knapsack_spec(instance: &KnapsackInstance) -> KnapsackSpec {
    let mut req = vec![0u64; instance.item_count()];
    for &(a, b) in &instance.implications {
        req[a] |= 1 << b;
    }
    KnapsackSpec {
        w: instance.w.clone(),
        v: instance.v.clone(),
        cols: instance.columns(),
        req,
    }
}

impl KnapsackSpec {
    /// 1-based row and 0-based column of a flat index.
    fn cell(&self, index: usize) -> (usize, usize) {
        (index / self.cols + 1, index % self.cols)
    }

    /// Value of cell `(i, j)` with row 0 implicit zero.
    fn at(&self, view: &dyn View, i: usize, j: usize) -> Value {
        if i == 0 {
            0
        } else {
            view.value((i - 1) * self.cols + j)
        }
    }

    /// The recorded witness at `(row, col)`: backtrack with exclusion
    /// preferred on ties, as a bitset over 0-based items.
    fn recorded_witness(&self, view: &dyn View, row: usize, col: usize) -> u64 {
        let mut mask = 0u64;
        let mut c = col;
        for t in (1..=row).rev() {
            let wt = self.w[t - 1] as usize;
            if self.at(view, t, c) != self.at(view, t - 1, c) && c >= wt {
                mask |= 1 << (t - 1);
                c -= wt;
            }
        }
        mask
    }

    /// The larger of the exclude and (admissible) include branches.
    fn branch_max(&self, view: &dyn View, i: usize, j: usize) -> Value {
        let exclude = self.at(view, i - 1, j);
        let wt = self.w[i - 1];
        if (j as Value) < wt {
            return exclude;
        }
        let jw = j - wt as usize;
        let need = self.req[i - 1];
        if need != 0 && self.recorded_witness(view, i - 1, jw) & need != need {
            return exclude;
        }
        exclude.max(self.at(view, i - 1, jw) + self.v[i - 1])
    }
}

impl Predicate for KnapsackSpec {
    fn index_count(&self) -> usize {
        self.w.len() * self.cols
    }

    fn bottom(&self, _index: usize) -> Value {
        0
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        let (i, j) = self.cell(index);
        view.value(index) < self.branch_max(view, i, j)
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        let (i, j) = self.cell(index);
        self.branch_max(view, i, j)
    }

    fn priority(&self, index: usize) -> Option<i64> {
        Some((index / self.cols) as i64)
    }
}

/// Solve a knapsack instance under `config`, rejecting schedules that do
/// not settle rows in order when implications are present.
pub fn solve_knapsack(
    instance: &KnapsackInstance,
    config: &ScheduleConfig,
) -> Result<SolveReport, KnapsackError> {
    if !instance.implications.is_empty()
        && matches!(config.mode, engine::Mode::Rounds | engine::Mode::AsyncStale)
    {
        return Err(KnapsackError::UnsupportedSchedule { mode: config.mode });
    }
    Ok(engine::solve(&knapsack_spec(instance), config)?)
}

/// One row of the iterative formulation: raise `C` by offering one item
/// of weight `w` and value `v` at every capacity. Pure in its inputs.
pub fn incr_knapsack(c: &[Value], w: Value, v: Value) -> Vec<Value> {
    debug_assert!(w >= 1);
    c.iter()
        .enumerate()
        .map(|(j, &keep)| {
            if j as Value >= w {
                keep.max(c[j - w as usize] + v)
            } else {
                keep
            }
        })
        .collect()
}

/// Single-item increment as a spec over one capacity row. The predicate
/// reads only the immutable previous row, never the mutable state of
/// other cells, so every schedule computes the same fixpoint.
pub struct IncrSpec {
    c: Vec<Value>,
    w: Value,
    v: Value,
}

impl IncrSpec {
    pub fn new(c: Vec<Value>, w: Value, v: Value) -> IncrSpec {
        assert!(w >= 1, "weights must be positive");
        IncrSpec { c, w, v }
    }
}

impl Predicate for IncrSpec {
    fn index_count(&self) -> usize {
        self.c.len()
    }

    fn bottom(&self, index: usize) -> Value {
        self.c[index]
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        index as Value >= self.w && view.value(index) < self.c[index - self.w as usize] + self.v
    }

    fn advance_target(&self, _view: &dyn View, index: usize) -> Value {
        self.c[index - self.w as usize] + self.v
    }

    fn priority(&self, _index: usize) -> Option<i64> {
        Some(0)
    }
}

/// The final capacity row after offering every item in turn, by folding
/// [`incr_knapsack`] — no grid involved.
pub fn knapsack_iterative(w: &[Value], v: &[Value], cap: Value) -> Vec<Value> {
    let mut row = vec![0; cap as usize + 1];
    for (&wt, &val) in w.iter().zip(v) {
        row = incr_knapsack(&row, wt, val);
    }
    row
}

/// The recorded witness of the solved grid at full capacity: 1-based item
/// numbers, ascending.
pub fn reconstruct_items(instance: &KnapsackInstance, values: &[Value]) -> Vec<usize> {
    let spec = knapsack_spec(instance);
    assert_eq!(
        values.len(),
        spec.index_count(),
        "solved vector length mismatch"
    );
    let view = engine::SliceView {
        values,
        flags: None,
    };
    let mask = spec.recorded_witness(&view, instance.item_count(), instance.cap as usize);
    (0..instance.item_count())
        .filter(|&t| mask & (1 << t) != 0)
        .map(|t| t + 1)
        .collect()
}
