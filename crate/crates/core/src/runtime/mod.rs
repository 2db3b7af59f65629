//! Parallel multi-walk execution.
//!
//! Every worker runs its own engine from its own seed. Two variants differ in
//! what happens at the communication step, every `k` iterations:
//!
//! * [`Variant::Tdo`] only detects termination: the first worker to solve
//!   sets a shared flag, and every other worker stops when it next polls it.
//! * [`Variant::Poc`] additionally pushes the cheapest known configuration
//!   through a tree of workers, and workers on worse configurations take it
//!   over.
//!
//! Communication goes through one-sided slots ([`mailbox`]) that writers fill
//! without the owner's involvement, so no worker ever waits for another.

pub mod board;
pub mod lockstep;
pub mod mailbox;
pub mod poc;
pub mod topology;

use std::fmt;
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::engine::{CommDirective, CommHook, Engine, EngineParams, RunStats, SolveOutcome};
use crate::error::{Error, Result};
use crate::problem::{validate, Configuration, ProblemSpec};

pub use board::TerminationBoard;
pub use lockstep::{run_lockstep, LockstepPoc, Participant};
pub use mailbox::{MailboxGrid, Received, Slot};
pub use poc::{Inbound, PocNode, Source};
pub use topology::TreeTopology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Tdo,
    Poc,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Tdo => "tdo",
            Variant::Poc => "poc",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tdo" => Ok(Variant::Tdo),
            "poc" => Ok(Variant::Poc),
            _ => Err(Error::InvalidParams(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelParams {
    pub variant: Variant,
    pub num_workers: usize,
    /// Branching factor of the propagation tree.
    pub arity: usize,
    /// Overrides the engines' own communication interval.
    pub comm_interval_k: u64,
}

impl ParallelParams {
    pub fn new(variant: Variant, num_workers: usize) -> Self {
        ParallelParams {
            variant,
            num_workers,
            arity: 2,
            comm_interval_k: 100,
        }
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.comm_interval_k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.comm_interval_k == 0 {
            return Err(Error::InvalidParams("comm_interval_k must be at least 1".into()));
        }
        TreeTopology::new(self.num_workers, self.arity).map(|_| ())
    }

    pub fn topology(&self) -> Result<TreeTopology> {
        TreeTopology::new(self.num_workers, self.arity)
    }

    /// Engine parameters of worker `rank`.
    pub fn worker_params(&self, master: &EngineParams, rank: usize) -> EngineParams {
        let mut params = master.clone().with_seed(worker_seed(master.seed, rank));
        params.comm_interval_k = self.comm_interval_k;
        params
    }
}

/// Seed of worker `rank`. Rank 0 keeps the master seed, which makes a
/// one-worker run replay the sequential run with the same seed.
pub fn worker_seed(master: u64, rank: usize) -> u64 {
    master ^ (rank as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone)]
pub struct WorkerReport {
    pub rank: usize,
    pub seed: u64,
    pub solved: bool,
    pub terminated_by_peer: bool,
    pub stats: RunStats,
    pub propagations: u64,
}

#[derive(Debug, Clone)]
pub struct ParallelOutcome {
    pub solved: bool,
    pub winner_rank: Option<usize>,
    pub solution: Option<Configuration>,
    pub wall_time: Duration,
    pub workers: Vec<WorkerReport>,
    /// Largest number of iterations any worker ran past its last reported
    /// count at the moment the termination flag was set.
    pub max_termination_overrun: Option<u64>,
}

impl ParallelOutcome {
    pub fn adoptions(&self) -> u64 {
        self.workers.iter().map(|w| w.stats.adoptions).sum()
    }

    pub fn propagations(&self) -> u64 {
        self.workers.iter().map(|w| w.propagations).sum()
    }

    /// Statistics of the winning walk, or of rank 0 when nobody solved.
    pub fn representative_stats(&self) -> &RunStats {
        &self.workers[self.winner_rank.unwrap_or(0)].stats
    }

    fn assemble(spec: &ProblemSpec, board: &TerminationBoard, workers: Vec<WorkerReport>, wall_time: Duration) -> Self {
        let winner_rank = board.winner();
        let solution = board.solution();
        let valid = solution
            .as_ref()
            .is_some_and(|s| validate::is_valid_solution(spec, s.values()));
        debug_assert!(solution.is_none() || valid, "published solution is invalid");
        let max_termination_overrun = board.progress_at_termination().map(|snap| {
            workers
                .iter()
                .filter(|w| Some(w.rank) != winner_rank)
                .map(|w| w.stats.iterations.saturating_sub(snap[w.rank]))
                .max()
                .unwrap_or(0)
        });
        ParallelOutcome {
            solved: valid,
            winner_rank,
            solution: solution.filter(|_| valid),
            wall_time,
            workers,
            max_termination_overrun,
        }
    }
}

/// Shared part of both hooks: report progress, publish a solution, and stop
/// once anyone has published. `None` means "carry on".
fn termination_check(rank: usize, board: &TerminationBoard, engine: &Engine<'_>) -> Option<CommDirective> {
    board.report_progress(rank, engine.iterations());
    if engine.is_solved() {
        board.try_publish(rank, engine.iterations(), engine.configuration());
        return Some(CommDirective::Terminate);
    }
    board.is_set().then_some(CommDirective::Terminate)
}

/// Termination detection only.
#[derive(Debug)]
pub struct TdoHook<'b> {
    rank: usize,
    board: &'b TerminationBoard,
}

impl<'b> TdoHook<'b> {
    pub fn new(rank: usize, board: &'b TerminationBoard) -> Self {
        TdoHook { rank, board }
    }
}

impl CommHook for TdoHook<'_> {
    fn communicate(&mut self, engine: &Engine<'_>) -> CommDirective {
        termination_check(self.rank, self.board, engine).unwrap_or(CommDirective::Continue)
    }
}

/// Termination detection plus propagation of the best configuration.
#[derive(Debug)]
pub struct PocHook<'b> {
    node: PocNode,
    board: &'b TerminationBoard,
    grid: &'b MailboxGrid,
}

impl<'b> PocHook<'b> {
    pub fn new(rank: usize, board: &'b TerminationBoard, grid: &'b MailboxGrid) -> Self {
        PocHook {
            node: PocNode::new(rank, grid),
            board,
            grid,
        }
    }

    pub fn node(&self) -> &PocNode {
        &self.node
    }
}

impl CommHook for PocHook<'_> {
    fn communicate(&mut self, engine: &Engine<'_>) -> CommDirective {
        if let Some(d) = termination_check(self.node.rank(), self.board, engine) {
            return d;
        }
        match self.node.exchange(&engine.configuration(), self.grid) {
            Some(better) => {
                debug_assert!(better.is_consistent(engine.spec()), "payload carries a stale cost");
                CommDirective::Adopt(better)
            }
            None => CommDirective::Continue,
        }
    }
}

/// Runs `num_workers` walks on their own threads until one of them solves
/// the instance or all of them give up.
pub fn run_parallel(
    spec: &ProblemSpec,
    engine_params: &EngineParams,
    params: &ParallelParams,
) -> Result<ParallelOutcome> {
    params.validate()?;
    let topology = params.topology()?;
    let worker_params: Vec<EngineParams> = (0..params.num_workers)
        .map(|r| params.worker_params(engine_params, r))
        .collect();
    let engines = worker_params
        .iter()
        .map(|p| Engine::new(spec, p.clone()))
        .collect::<Result<Vec<_>>>()?;

    let board = TerminationBoard::new(params.num_workers);
    let grid = (params.variant == Variant::Poc).then(|| MailboxGrid::new(topology, spec.num_vars()));

    let start = Instant::now();
    let workers = thread::scope(|s| {
        let handles: Vec<_> = engines
            .into_iter()
            .enumerate()
            .map(|(rank, engine)| {
                let (board, grid) = (&board, grid.as_ref());
                s.spawn(move || -> (SolveOutcome, u64) {
                    match grid {
                        Some(grid) => {
                            let mut hook = PocHook::new(rank, board, grid);
                            let outcome = engine.run(&mut hook);
                            (outcome, hook.node.propagations())
                        }
                        None => (engine.run(&mut TdoHook::new(rank, board)), 0),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect::<Vec<_>>()
    });
    let wall_time = start.elapsed();

    let workers = workers
        .into_iter()
        .zip(&worker_params)
        .enumerate()
        .map(|(rank, ((outcome, propagations), p))| WorkerReport {
            rank,
            seed: p.seed,
            solved: outcome.solved,
            terminated_by_peer: outcome.terminated_by_peer,
            stats: outcome.stats,
            propagations,
        })
        .collect();
    Ok(ParallelOutcome::assemble(spec, &board, workers, wall_time))
}
