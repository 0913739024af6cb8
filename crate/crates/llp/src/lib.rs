//! Parallel combinatorial optimization by predicate detection.
//!
//! The crate solves problems that can be phrased as *find the least vector
//! satisfying a lattice-linear predicate*: the feasible region is closed
//! under componentwise minimum, and whenever a vector is infeasible some
//! index is provably too small and must advance. The [`engine`] walks such
//! predicates to their least fixpoint under four interchangeable schedules;
//! the problem modules ([`lis`], [`obst`], [`knapsack`], [`jobs`]) supply
//! predicates for classic dynamic programs plus constrained variants; the
//! [`checker`] verifies lattice-linearity of small predicates by brute
//! force, and [`oracle`] provides enumeration baselines for testing.

pub mod checker;
pub mod engine;
pub mod instance;
pub mod jobs;
pub mod knapsack;
pub mod lis;
pub mod obst;
pub mod oracle;

pub use engine::{Mode, ScheduleConfig, SolveReport, Value};
