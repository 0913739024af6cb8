//! Brute-force verification of lattice-linearity on small finite lattices.
//!
//! A predicate `B` over vectors is lattice-linear when every vector that
//! fails `B` has a *forbidden* index: one that must advance in any feasible
//! vector above. The checker treats `B` as a black box, derives
//! forbiddenness by definition — index `j` is forbidden at `G` when no
//! `H >= G` with `H[j] = G[j]` satisfies `B` — and exhaustively searches
//! the lattice for a failing vector with no forbidden index. Only feasible
//! for tiny dimensions; that is the point: it certifies the shape of a
//! predicate before the engine trusts it at scale.

use crate::engine::{Predicate, SliceView, Value};

/// A finite sublattice: all vectors `G` with `0 <= G[j] <= dims[j]`.
#[derive(Clone, Debug)]
pub struct FiniteLattice {
    dims: Vec<Value>,
}

/// Default cap on enumerated vectors; [`FiniteLattice::with_ceiling`]
/// overrides it.
pub const DEFAULT_ENUMERATION_CEILING: u128 = 1_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CheckerError {
    #[error("lattice would enumerate {states} vectors, over the ceiling of {ceiling}")]
    EnumerationTooLarge { states: u128, ceiling: u128 },

    #[error("lattice dimensions must be non-negative; got {dim} at coordinate {index}")]
    NegativeDimension { index: usize, dim: Value },

    #[error("lattice must have at least one coordinate")]
    Empty,
}

/// Why a predicate failed the check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `B` fails at `state` yet no index is forbidden, so `state` sits
    /// below two incomparable feasible vectors whose meet is infeasible.
    NoForbiddenIndex,
    /// An advance target disagreed with the least repairing value
    /// (see [`check_advance_minimal`]).
    TargetNotMinimal {
        index: usize,
        target: Value,
        minimal: Value,
    },
}

/// A concrete witness that the check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub state: Vec<Value>,
    pub violation: Violation,
}

/// Result of a lattice-linearity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    LatticeLinear,
    Counterexample(Counterexample),
}

impl CheckOutcome {
    pub fn is_linear(&self) -> bool {
        matches!(self, CheckOutcome::LatticeLinear)
    }
}

impl FiniteLattice {
    /// Lattice of vectors bounded by `dims` componentwise, subject to the
    /// default enumeration ceiling.
    pub fn new(dims: Vec<Value>) -> Result<FiniteLattice, CheckerError> {
        Self::with_ceiling(dims, DEFAULT_ENUMERATION_CEILING)
    }

    pub fn with_ceiling(dims: Vec<Value>, ceiling: u128) -> Result<FiniteLattice, CheckerError> {
        if dims.is_empty() {
            return Err(CheckerError::Empty);
        }
        let mut states: u128 = 1;
        for (index, &dim) in dims.iter().enumerate() {
            if dim < 0 {
                return Err(CheckerError::NegativeDimension { index, dim });
            }
            states = states.saturating_mul(dim as u128 + 1);
        }
        if states > ceiling {
            return Err(CheckerError::EnumerationTooLarge { states, ceiling });
        }
        Ok(FiniteLattice { dims })
    }

    pub fn dims(&self) -> &[Value] {
        &self.dims
    }

    pub fn coordinate_count(&self) -> usize {
        self.dims.len()
    }

    /// Visit every vector in lexicographic order (last coordinate varies
    /// fastest). Stops early when `visit` returns `false`.
    fn for_each(&self, mut visit: impl FnMut(&[Value]) -> bool) {
        let mut state = vec![0; self.dims.len()];
        loop {
            if !visit(&state) {
                return;
            }
            // Odometer increment from the last coordinate.
            let mut k = self.dims.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if state[k] < self.dims[k] {
                    state[k] += 1;
                    break;
                }
                state[k] = 0;
            }
        }
    }

    /// Visit every `H >= floor` within the lattice, holding `H[pin]` at
    /// `floor[pin]`. Stops early when `visit` returns `false`.
    fn for_each_above(&self, floor: &[Value], pin: usize, mut visit: impl FnMut(&[Value]) -> bool) {
        let mut state = floor.to_vec();
        loop {
            if !visit(&state) {
                return;
            }
            let mut k = self.dims.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if k != pin && state[k] < self.dims[k] {
                    state[k] += 1;
                    break;
                }
                state[k] = floor[k];
            }
        }
    }
}

/// Definition-level forbiddenness: `j` is forbidden at `state` under
/// `predicate` when every `H >= state` with `H[j] = state[j]` fails it.
pub fn forbidden_bruteforce(
    lattice: &FiniteLattice,
    predicate: impl Fn(&[Value]) -> bool,
    state: &[Value],
    j: usize,
) -> bool {
    assert_eq!(state.len(), lattice.dims.len(), "state arity mismatch");
    assert!(j < state.len(), "index out of range");
    let mut forbidden = true;
    lattice.for_each_above(state, j, |h| {
        if predicate(h) {
            forbidden = false;
            return false;
        }
        true
    });
    forbidden
}

/// Exhaustively check lattice-linearity of `predicate` over `lattice`.
/// Returns the lexicographically first failing vector with no forbidden
/// index, if one exists.
pub fn check_lattice_linear(
    lattice: &FiniteLattice,
    predicate: impl Fn(&[Value]) -> bool,
) -> CheckOutcome {
    let mut result = CheckOutcome::LatticeLinear;
    lattice.for_each(|g| {
        if predicate(g) {
            return true;
        }
        let has_forbidden = (0..g.len()).any(|j| forbidden_bruteforce(lattice, &predicate, g, j));
        if has_forbidden {
            return true;
        }
        result = CheckOutcome::Counterexample(Counterexample {
            state: g.to_vec(),
            violation: Violation::NoForbiddenIndex,
        });
        false
    });
    result
}

/// The global predicate induced by an ensure-form [`Predicate`]: `B(G)`
/// holds when no index is forbidden. This is the black box handed to
/// [`check_lattice_linear`] when verifying a shipped spec.
pub fn induced_predicate<P: Predicate>(spec: &P) -> impl Fn(&[Value]) -> bool + '_ {
    move |g: &[Value]| {
        let view = SliceView {
            values: g,
            flags: None,
        };
        (0..spec.index_count()).all(|j| !spec.forbidden(&view, j))
    }
}

/// Check that a spec's analytic `forbidden` is sound for the definition:
/// wherever the spec declares an index forbidden, brute force must agree.
/// (The converse does not hold in general — near the lattice boundary, and
/// at vectors whose deficit sits upstream, the definition marks indices the
/// local test cannot see — so only this direction is checkable.)
pub fn check_forbidden_sound<P: Predicate>(
    lattice: &FiniteLattice,
    spec: &P,
) -> Option<Counterexample> {
    assert!(!spec.paired_flag(), "flag-paired specs have stateful views");
    let predicate = induced_predicate(spec);
    let mut failure = None;
    lattice.for_each(|g| {
        let view = SliceView {
            values: g,
            flags: None,
        };
        for j in 0..g.len() {
            if spec.forbidden(&view, j) && !forbidden_bruteforce(lattice, &predicate, g, j) {
                failure = Some(Counterexample {
                    state: g.to_vec(),
                    violation: Violation::NoForbiddenIndex,
                });
                return false;
            }
        }
        true
    });
    failure
}

/// Check that `advance_target` jumps exactly to the least value that makes
/// the index non-forbidden under the spec's own test. Targets beyond the
/// lattice bound are accepted only when no in-bound value repairs the
/// index.
pub fn check_advance_minimal<P: Predicate>(
    lattice: &FiniteLattice,
    spec: &P,
) -> Option<Counterexample> {
    assert!(!spec.paired_flag(), "flag-paired specs have stateful views");
    let mut failure = None;
    lattice.for_each(|g| {
        let mut scratch = g.to_vec();
        for j in 0..g.len() {
            let forbidden = {
                let view = SliceView {
                    values: g,
                    flags: None,
                };
                spec.forbidden(&view, j)
            };
            if !forbidden {
                continue;
            }
            let target = {
                let view = SliceView {
                    values: g,
                    flags: None,
                };
                spec.advance_target(&view, j)
            };
            let mut minimal = None;
            for candidate in (g[j] + 1)..=lattice.dims[j] {
                scratch[j] = candidate;
                let view = SliceView {
                    values: &scratch,
                    flags: None,
                };
                if !spec.forbidden(&view, j) {
                    minimal = Some(candidate);
                    break;
                }
            }
            scratch[j] = g[j];
            let ok = match minimal {
                Some(m) => target == m,
                None => target > lattice.dims[j],
            };
            if !ok {
                failure = Some(Counterexample {
                    state: g.to_vec(),
                    violation: Violation::TargetNotMinimal {
                        index: j,
                        target,
                        minimal: minimal.unwrap_or(-1),
                    },
                });
                return false;
            }
        }
        true
    });
    failure
}

/// A boxed global predicate over state vectors.
pub type PredicateFn = Box<dyn Fn(&[Value]) -> bool + Send + Sync>;

/// Named predicates exposed to the CLI's `check-linearity` command. Each
/// fixes a tiny instance so the predicate is a pure function of the vector.
pub struct BuiltinPredicate {
    pub name: &'static str,
    /// Human description of the coordinates, for counterexample readouts.
    pub coordinates: &'static str,
    /// Expected vector arity, or `None` when any arity works.
    pub arity: Option<usize>,
    pub predicate: PredicateFn,
}

/// Look up a built-in predicate by CLI name.
// The predicates keep the lower-bound shape `g >= x + 1` so each conjunct
// reads as the ensure clause it models.
#[allow(clippy::int_plus_one)]
pub fn builtin(name: &str) -> Option<BuiltinPredicate> {
    match name {
        // The textbook non-example: feasible region {(0,1), (1,0), ...} is
        // not meet-closed, so (0,0) fails B with no forbidden index.
        "sum-ge-1" => Some(BuiltinPredicate {
            name: "sum-ge-1",
            coordinates: "free coordinates; B(G) = sum(G) >= 1",
            arity: None,
            predicate: Box::new(|g| g.iter().sum::<Value>() >= 1),
        }),
        // Job scheduling with t = [1, 2, 1] on a chain: each job starts
        // after its predecessor finishes.
        "jobs" => Some(BuiltinPredicate {
            name: "jobs",
            coordinates: "G[j] = completion time of job j+1; t = [1,2,1], chain precedence",
            arity: Some(3),
            predicate: Box::new(|g| g[0] >= 1 && g[1] >= g[0] + 2 && g[2] >= g[1] + 1),
        }),
        // Longest increasing subsequence lengths for A = [1, 2, 3].
        "lis" => Some(BuiltinPredicate {
            name: "lis",
            coordinates: "G[j] = LIS length ending at position j+1 of A = [1,2,3]",
            arity: Some(3),
            predicate: Box::new(|g| g[0] >= 1 && g[1] >= g[0] + 1 && g[2] >= g[0].max(g[1]) + 1),
        }),
        // Optimal BST costs for frequencies p = [1, 2]; coordinates are the
        // ranges (1,1), (1,2), (2,2), and s(1,2) = 3.
        "obst" => Some(BuiltinPredicate {
            name: "obst",
            coordinates: "G = [cost(1,1), cost(1,2), cost(2,2)] for p = [1,2]",
            arity: Some(3),
            predicate: Box::new(|g| {
                let (c11, c12, c22) = (g[0], g[1], g[2]);
                c11 >= 1 && c22 >= 2 && c12 >= 3 + c11.min(c22)
            }),
        }),
        // Knapsack profits for items (w=1,v=1), (w=1,v=2) at capacity 1;
        // coordinates are the cells (1,0), (1,1), (2,0), (2,1).
        "knapsack" => Some(BuiltinPredicate {
            name: "knapsack",
            coordinates: "G = [G(1,0), G(1,1), G(2,0), G(2,1)] for w=[1,1], v=[1,2], W=1",
            arity: Some(4),
            predicate: Box::new(|g| {
                let (g10, g11, g20, g21) = (g[0], g[1], g[2], g[3]);
                g10 >= 0 && g11 >= 1 && g20 >= g10 && g21 >= g11.max(g10 + 2)
            }),
        }),
        _ => None,
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["sum-ge-1", "jobs", "lis", "obst", "knapsack"];
