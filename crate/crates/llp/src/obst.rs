//! Optimal binary search trees and matrix-chain multiplication over range
//! cells `(i, j)`.
//!
//! `G[i,j]` is the least cost of a binary search tree over keys `i..=j`
//! (respectively, of multiplying matrices `i..=j`). Cells advance toward
//! `min` over admissible roots (split points) of the two subrange costs
//! plus the local term, with empty subranges contributing zero. Scheduling
//! by priority `j - i` fills short ranges first, which makes every cell's
//! single advance final.
//!
//! Constraints restrict the admissible roots: `forbidden_root` removes one
//! key as the root of any multi-key range (it may only appear as a leaf),
//! and `balanced` keeps only roots whose left and right subtree sizes
//! differ by at most one — at every node by default, or only at the global
//! root under [`BalanceMode::RootOnly`]. A combination that leaves some
//! range with no admissible root at all is rejected at construction as
//! infeasible.

use crate::engine::{Predicate, Value, View};

/// Bijection between range cells `(i, j)` with `0 <= i <= j < n` and flat
/// engine indices, laid out diagonal-major: all length-1 ranges first, then
/// length 2, and so on. A sequential ascending scan therefore visits cells
/// in dependency order.
#[derive(Clone, Copy, Debug)]
pub struct PairMap {
    n: usize,
}

impl PairMap {
    pub fn new(n: usize) -> PairMap {
        PairMap { n }
    }

    pub fn len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        let d = j - i;
        d * (2 * self.n - d + 1) / 2 + i
    }

    pub fn pair(&self, mut flat: usize) -> (usize, usize) {
        for d in 0..self.n {
            let width = self.n - d;
            if flat < width {
                return (flat, flat + d);
            }
            flat -= width;
        }
        panic!("flat index out of range");
    }
}

/// Prefix sums over the key frequencies, serving every `s(i, j)` range sum
/// in constant time. `s(i, j) = 0` on empty ranges.
#[derive(Clone, Debug)]
pub struct WeightSums {
    prefix: Vec<Value>,
}

impl WeightSums {
    pub fn new(p: &[Value]) -> WeightSums {
        let mut prefix = Vec::with_capacity(p.len() + 1);
        prefix.push(0);
        for &f in p {
            prefix.push(prefix.last().unwrap() + f);
        }
        WeightSums { prefix }
    }

    /// Sum of frequencies over keys `i..=j` (0-based), 0 when `i > j`.
    pub fn range(&self, i: usize, j: usize) -> Value {
        if i > j {
            0
        } else {
            self.prefix[j + 1] - self.prefix[i]
        }
    }
}

/// Where the balance constraint applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceMode {
    /// Every node's subtree sizes differ by at most one (the default).
    EveryNode,
    /// Only the root split of the full key range is constrained.
    RootOnly,
}

/// Key frequencies plus the active constraints. `forbidden_root` is a
/// 0-based key index.
#[derive(Clone, Debug)]
pub struct ObstInstance {
    p: Vec<Value>,
    forbidden_root: Option<usize>,
    balance: Option<BalanceMode>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ObstError {
    #[error("need at least one key")]
    Empty,

    #[error("frequency of key {index} is negative")]
    NegativeFrequency { index: usize },

    #[error("forbidden root {got} is out of range for {n} keys")]
    RootOutOfRange { got: usize, n: usize },

    #[error("total weighted cost can overflow the value range")]
    Overflow,

    #[error(
        "constraints leave keys {}..={} with no admissible root; no tree satisfies them",
        .i + 1,
        .j + 1
    )]
    InfeasibleConstraints { i: usize, j: usize },
}

impl ObstInstance {
    pub fn new(p: Vec<Value>) -> Result<ObstInstance, ObstError> {
        Self::with_constraints(p, None, None)
    }

    pub fn with_constraints(
        p: Vec<Value>,
        forbidden_root: Option<usize>,
        balance: Option<BalanceMode>,
    ) -> Result<ObstInstance, ObstError> {
        if p.is_empty() {
            return Err(ObstError::Empty);
        }
        if let Some(index) = p.iter().position(|&f| f < 0) {
            return Err(ObstError::NegativeFrequency { index });
        }
        let n = p.len();
        if let Some(x) = forbidden_root {
            if x >= n {
                return Err(ObstError::RootOutOfRange { got: x, n });
            }
        }
        let total: i128 = p.iter().map(|&f| f as i128).sum();
        if total * n as i128 > Value::MAX as i128 {
            return Err(ObstError::Overflow);
        }
        let instance = ObstInstance {
            p,
            forbidden_root,
            balance,
        };
        for i in 0..n {
            for j in i + 1..n {
                if instance.admissible_roots(i, j).next().is_none() {
                    return Err(ObstError::InfeasibleConstraints { i, j });
                }
            }
        }
        Ok(instance)
    }

    pub fn key_count(&self) -> usize {
        self.p.len()
    }

    pub fn frequencies(&self) -> &[Value] {
        &self.p
    }

    pub fn forbidden_root(&self) -> Option<usize> {
        self.forbidden_root
    }

    pub fn balance(&self) -> Option<BalanceMode> {
        self.balance
    }

    /// Roots `k` a tree over keys `i..=j` may use under the constraints.
    /// The root splits the range into subtrees of sizes `k - i` and
    /// `j - k`.
    pub fn admissible_roots(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        // The strict-root-range build reproduces a `k < j` upper bound for
        // comparison runs; the default admits every key of the range.
        let upper = if cfg!(feature = "strict-root-range") && i < j {
            j - 1
        } else {
            j
        };
        let balance_applies = match self.balance {
            None => false,
            Some(BalanceMode::EveryNode) => true,
            Some(BalanceMode::RootOnly) => i == 0 && j == self.p.len() - 1,
        };
        let forbidden = (i < j).then_some(self.forbidden_root).flatten();
        (i..=upper).filter(move |&k| {
            if Some(k) == forbidden {
                return false;
            }
            if balance_applies {
                let (left, right) = ((k - i) as i64, (j - k) as i64);
                if (left - right).abs() > 1 {
                    return false;
                }
            }
            true
        })
    }
}

/// Cost of rooting the range `i..=j` at `k`, reading subrange costs from
/// the view. Empty subranges cost nothing.
fn root_cost(
    view: &dyn View,
    map: &PairMap,
    sums: &WeightSums,
    i: usize,
    j: usize,
    k: usize,
) -> Value {
    let left = if k > i {
        view.value(map.flat(i, k - 1))
    } else {
        0
    };
    let right = if k < j {
        view.value(map.flat(k + 1, j))
    } else {
        0
    };
    left + sums.range(i, j) + right
}

/// Range-cell spec for the optimal binary search tree recurrence.
pub struct ObstSpec {
    instance: ObstInstance,
    map: PairMap,
    sums: WeightSums,
}

pub fn obst_spec(instance: &ObstInstance) -> ObstSpec {
    ObstSpec {
        map: PairMap::new(instance.key_count()),
        sums: WeightSums::new(&instance.p),
        instance: instance.clone(),
    }
}

impl ObstSpec {
    fn least_cost(&self, view: &dyn View, i: usize, j: usize) -> Value {
        self.instance
            .admissible_roots(i, j)
            .map(|k| root_cost(view, &self.map, &self.sums, i, j, k))
            .min()
            .expect("admissible roots validated nonempty at construction")
    }
}

impl Predicate for ObstSpec {
    fn index_count(&self) -> usize {
        self.map.len()
    }

    fn bottom(&self, index: usize) -> Value {
        let (i, j) = self.map.pair(index);
        if i == j {
            self.instance.p[i]
        } else {
            0
        }
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        let (i, j) = self.map.pair(index);
        i < j && view.value(index) < self.least_cost(view, i, j)
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        let (i, j) = self.map.pair(index);
        self.least_cost(view, i, j)
    }

    fn priority(&self, index: usize) -> Option<i64> {
        let (i, j) = self.map.pair(index);
        Some((j - i) as i64)
    }
}

/// A binary search tree over 1-based key numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub key: usize,
    pub left: Option<Box<TreeNode>>,
    pub right: Option<Box<TreeNode>>,
}

impl TreeNode {
    pub fn size(&self) -> usize {
        let left = self.left.as_deref().map_or(0, TreeNode::size);
        let right = self.right.as_deref().map_or(0, TreeNode::size);
        left + right + 1
    }
}

/// Total search cost of a tree: each key's frequency times its depth, the
/// root at depth 1. `p` is 0-based; keys in the tree are 1-based.
pub fn weighted_cost(tree: &TreeNode, p: &[Value]) -> Value {
    fn walk(node: &TreeNode, p: &[Value], depth: Value) -> Value {
        let own = p[node.key - 1] * depth;
        let left = node.left.as_deref().map_or(0, |t| walk(t, p, depth + 1));
        let right = node.right.as_deref().map_or(0, |t| walk(t, p, depth + 1));
        own + left + right
    }
    walk(tree, p, 1)
}

/// True when every node's two subtree sizes differ by at most one.
pub fn subtree_sizes_balanced(tree: &TreeNode) -> bool {
    let left = tree.left.as_deref();
    let right = tree.right.as_deref();
    let diff = left.map_or(0, TreeNode::size) as i64 - right.map_or(0, TreeNode::size) as i64;
    diff.abs() <= 1
        && left.is_none_or(subtree_sizes_balanced)
        && right.is_none_or(subtree_sizes_balanced)
}

/// True when the 1-based `key` has at least one child somewhere in the
/// tree.
pub fn key_is_parent(tree: &TreeNode, key: usize) -> bool {
    if tree.key == key && (tree.left.is_some() || tree.right.is_some()) {
        return true;
    }
    tree.left.as_deref().is_some_and(|t| key_is_parent(t, key))
        || tree.right.as_deref().is_some_and(|t| key_is_parent(t, key))
}

/// Rebuild one optimal tree from a solved cost table, choosing the
/// smallest admissible root that achieves each range's cost.
pub fn reconstruct_tree(instance: &ObstInstance, values: &[Value]) -> TreeNode {
    let n = instance.key_count();
    let map = PairMap::new(n);
    assert_eq!(values.len(), map.len(), "solved vector length mismatch");
    let sums = WeightSums::new(&instance.p);
    let view = crate::engine::SliceView {
        values,
        flags: None,
    };
    build_tree(instance, &map, &sums, &view, values, 0, n - 1)
}

fn build_tree(
    instance: &ObstInstance,
    map: &PairMap,
    sums: &WeightSums,
    view: &crate::engine::SliceView<'_>,
    values: &[Value],
    i: usize,
    j: usize,
) -> TreeNode {
    let cell = values[map.flat(i, j)];
    let k = instance
        .admissible_roots(i, j)
        .find(|&k| root_cost(view, map, sums, i, j, k) == cell)
        .expect("solved table admits its own costs");
    let left = (k > i).then(|| Box::new(build_tree(instance, map, sums, view, values, i, k - 1)));
    let right = (k < j).then(|| Box::new(build_tree(instance, map, sums, view, values, k + 1, j)));
    TreeNode {
        key: k + 1,
        left,
        right,
    }
}

/// Matrix dimensions: matrix `t` (0-based) is `dims[t] x dims[t + 1]`, so
/// `n` matrices take `n + 1` entries.
#[derive(Clone, Debug)]
pub struct ChainInstance {
    dims: Vec<Value>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("need at least two dimensions (one matrix)")]
    TooFewDims,

    #[error("dimension {index} is {got}; all dimensions must be positive")]
    NonPositiveDim { index: usize, got: Value },

    #[error("scalar multiplication counts can overflow the value range")]
    Overflow,
}

impl ChainInstance {
    pub fn new(dims: Vec<Value>) -> Result<ChainInstance, ChainError> {
        if dims.len() < 2 {
            return Err(ChainError::TooFewDims);
        }
        if let Some(index) = dims.iter().position(|&d| d < 1) {
            return Err(ChainError::NonPositiveDim {
                index,
                got: dims[index],
            });
        }
        let max = *dims.iter().max().unwrap() as i128;
        if max * max * max * dims.len() as i128 > Value::MAX as i128 {
            return Err(ChainError::Overflow);
        }
        Ok(ChainInstance { dims })
    }

    pub fn matrix_count(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[Value] {
        &self.dims
    }
}

/// Range-cell spec for the matrix-chain recurrence: split `i..=j` at `k`,
/// pay the two subranges plus the final product's scalar multiplications.
pub struct ChainSpec {
    dims: Vec<Value>,
    map: PairMap,
}

pub fn matrix_chain_spec(instance: &ChainInstance) -> ChainSpec {
    ChainSpec {
        dims: instance.dims.clone(),
        map: PairMap::new(instance.matrix_count()),
    }
}

impl ChainSpec {
    fn split_cost(&self, view: &dyn View, i: usize, j: usize, k: usize) -> Value {
        let left = if k > i {
            view.value(self.map.flat(i, k))
        } else {
            0
        };
        let right = if k + 1 < j {
            view.value(self.map.flat(k + 1, j))
        } else {
            0
        };
        left + self.dims[i] * self.dims[k + 1] * self.dims[j + 1] + right
    }

    fn least_cost(&self, view: &dyn View, i: usize, j: usize) -> Value {
        (i..j)
            .map(|k| self.split_cost(view, i, j, k))
            .min()
            .expect("multi-matrix range always has a split")
    }
}

impl Predicate for ChainSpec {
    fn index_count(&self) -> usize {
        self.map.len()
    }

    fn bottom(&self, _index: usize) -> Value {
        0
    }

    fn forbidden(&self, view: &dyn View, index: usize) -> bool {
        let (i, j) = self.map.pair(index);
        i < j && view.value(index) < self.least_cost(view, i, j)
    }

    fn advance_target(&self, view: &dyn View, index: usize) -> Value {
        let (i, j) = self.map.pair(index);
        self.least_cost(view, i, j)
    }

    fn priority(&self, index: usize) -> Option<i64> {
        let (i, j) = self.map.pair(index);
        Some((j - i) as i64)
    }
}

/// A parenthesization over 1-based matrix numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainTree {
    Leaf(usize),
    Node(Box<ChainTree>, Box<ChainTree>),
}

impl std::fmt::Display for ChainTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChainTree::Leaf(t) => write!(f, "M{t}"),
            ChainTree::Node(l, r) => write!(f, "({l}*{r})"),
        }
    }
}

/// Rebuild one optimal parenthesization, choosing the smallest split point
/// that achieves each range's cost.
pub fn reconstruct_chain(instance: &ChainInstance, values: &[Value]) -> ChainTree {
    let spec = matrix_chain_spec(instance);
    assert_eq!(
        values.len(),
        spec.map.len(),
        "solved vector length mismatch"
    );
    let view = crate::engine::SliceView {
        values,
        flags: None,
    };
    build_chain(&spec, &view, values, 0, instance.matrix_count() - 1)
}

fn build_chain(
    spec: &ChainSpec,
    view: &crate::engine::SliceView<'_>,
    values: &[Value],
    i: usize,
    j: usize,
) -> ChainTree {
    if i == j {
        return ChainTree::Leaf(i + 1);
    }
    let cell = values[spec.map.flat(i, j)];
    let k = (i..j)
        .find(|&k| spec.split_cost(view, i, j, k) == cell)
        .expect("solved table admits its own costs");
    ChainTree::Node(
        Box::new(build_chain(spec, view, values, i, k)),
        Box::new(build_chain(spec, view, values, k + 1, j)),
    )
}
