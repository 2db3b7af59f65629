//! Adaptive Search for permutation constraint problems, with two parallel
//! multi-walk runtimes: independent walks with termination detection (TDO)
//! and best-configuration propagation over a tree (PoC).

pub mod engine;
pub mod error;
pub mod eval;
pub mod problem;
pub mod runtime;

pub use engine::{
    solve, solve_sequential, CommDirective, CommHook, Engine, EngineParams, NoComm, RunStats, SolveOutcome, Status,
};
pub use error::{Error, Result};
pub use eval::Evaluator;
pub use problem::{validate, Configuration, ProblemKind, ProblemSpec};
pub use runtime::{run_lockstep, run_parallel, ParallelOutcome, ParallelParams, Variant};
