//! JSON-facing problem descriptions.
//!
//! The on-disk format is a tagged object — `"problem"` selects the
//! variant — with 1-based key and item numbers, matching how answers are
//! reported. [`ProblemInstance::build`] converts to the 0-based typed
//! instances and runs their validation.

use serde::{Deserialize, Serialize};

use crate::engine::Value;
use crate::knapsack::{KnapsackError, KnapsackInstance};
use crate::lis::{LisError, LisInstance};
use crate::obst::{BalanceMode, ChainError, ChainInstance, ObstError, ObstInstance};

/// A problem description as it appears in an instance file.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(tag = "problem", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemInstance {
    Lis {
        #[serde(rename = "A")]
        a: Vec<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_k: Option<Value>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        odd_bound: bool,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        odd_filter: bool,
    },
    Obst {
        p: Vec<Value>,
        /// 1-based key number.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forbidden_root: Option<usize>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        balanced: bool,
    },
    Chain {
        dims: Vec<Value>,
    },
    Knapsack {
        w: Vec<Value>,
        v: Vec<Value>,
        #[serde(rename = "W")]
        cap: Value,
        /// 1-based pairs `[a, b]`: packing item `a` requires item `b`.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        implications: Vec<(usize, usize)>,
    },
}

/// A validated, 0-based instance ready to solve.
#[derive(Clone, Debug)]
pub enum Problem {
    Lis(LisInstance),
    Obst(ObstInstance),
    Chain(ChainInstance),
    Knapsack(KnapsackInstance),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{field} numbers items from 1; 0 is not a valid reference")]
    OneBased { field: &'static str },

    #[error(transparent)]
    Lis(#[from] LisError),

    #[error(transparent)]
    Obst(#[from] ObstError),

    #[error(transparent)]
    Chain(#[from] ChainError),

    #[error(transparent)]
    Knapsack(#[from] KnapsackError),
}

impl ProblemInstance {
    /// Convert to a typed instance, translating 1-based references and
    /// running the instance validation.
    pub fn build(&self) -> Result<Problem, InstanceError> {
        match self {
            ProblemInstance::Lis {
                a,
                gap_k,
                odd_bound,
                odd_filter,
            } => Ok(Problem::Lis(LisInstance::with_constraints(
                a.clone(),
                *gap_k,
                *odd_bound,
                *odd_filter,
            )?)),
            ProblemInstance::Obst {
                p,
                forbidden_root,
                balanced,
            } => {
                let root = match forbidden_root {
                    Some(0) => {
                        return Err(InstanceError::OneBased {
                            field: "forbidden_root",
                        })
                    }
                    Some(x) => Some(x - 1),
                    None => None,
                };
                let balance = balanced.then_some(BalanceMode::EveryNode);
                Ok(Problem::Obst(ObstInstance::with_constraints(
                    p.clone(),
                    root,
                    balance,
                )?))
            }
            ProblemInstance::Chain { dims } => {
                Ok(Problem::Chain(ChainInstance::new(dims.clone())?))
            }
            ProblemInstance::Knapsack {
                w,
                v,
                cap,
                implications,
            } => {
                let pairs = implications
                    .iter()
                    .map(|&(a, b)| {
                        if a == 0 || b == 0 {
                            Err(InstanceError::OneBased {
                                field: "implications",
                            })
                        } else {
                            Ok((a - 1, b - 1))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Problem::Knapsack(KnapsackInstance::with_implications(
                    w.clone(),
                    v.clone(),
                    *cap,
                    pairs,
                )?))
            }
        }
    }
}
