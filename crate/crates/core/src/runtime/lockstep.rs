//! Deterministic round-based scheduling of the communication protocols.
//!
//! A round lets every worker compute up to its next communication step, then
//! runs the communication of all workers in two phases: every node first
//! reads its inbound slots, then every node decides and writes. Writes made
//! in a round are therefore seen in the next one, whatever the rank order,
//! and a whole run is a pure function of its seeds.

use std::time::Instant;

use crate::engine::{Engine, EngineParams, Status};
use crate::error::Result;
use crate::problem::{Configuration, ProblemSpec};

use super::board::TerminationBoard;
use super::mailbox::MailboxGrid;
use super::poc::PocNode;
use super::topology::TreeTopology;
use super::{ParallelOutcome, ParallelParams, Variant, WorkerReport};

/// Something that can take part in configuration propagation.
pub trait Participant {
    fn configuration(&self) -> Configuration;

    /// Takes over `payload` if it is strictly cheaper.
    fn adopt(&mut self, payload: &Configuration) -> bool;

    /// Inactive participants neither read nor write.
    fn is_active(&self) -> bool {
        true
    }
}

/// A frozen walk: never moves on its own, only adopts.
impl Participant for Configuration {
    fn configuration(&self) -> Configuration {
        self.clone()
    }

    fn adopt(&mut self, payload: &Configuration) -> bool {
        if payload.cost() < self.cost() {
            *self = payload.clone();
            true
        } else {
            false
        }
    }
}

impl Participant for Engine<'_> {
    fn configuration(&self) -> Configuration {
        Engine::configuration(self)
    }

    fn adopt(&mut self, payload: &Configuration) -> bool {
        Engine::adopt(self, payload)
    }
}

/// Propagation over a tree, one synchronous round at a time.
#[derive(Debug)]
pub struct LockstepPoc {
    grid: MailboxGrid,
    nodes: Vec<PocNode>,
}

impl LockstepPoc {
    pub fn new(topology: TreeTopology, num_vars: usize) -> Self {
        let grid = MailboxGrid::new(topology, num_vars);
        let nodes = (0..topology.num_workers()).map(|r| PocNode::new(r, &grid)).collect();
        LockstepPoc { grid, nodes }
    }

    pub fn grid(&self) -> &MailboxGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[PocNode] {
        &self.nodes
    }

    /// One communication round. Returns the number of adoptions.
    pub fn round<P: Participant>(&mut self, walkers: &mut [P]) -> usize {
        assert_eq!(walkers.len(), self.nodes.len());
        let inbound: Vec<_> = self
            .nodes
            .iter_mut()
            .zip(walkers.iter())
            .map(|(node, w)| w.is_active().then(|| node.receive(&self.grid)))
            .collect();
        let mut adoptions = 0;
        for ((node, walker), inbound) in self.nodes.iter_mut().zip(walkers).zip(inbound) {
            let Some(inbound) = inbound else { continue };
            let own = walker.configuration();
            if let Some(better) = node.decide_and_post(&own, &inbound, &self.grid) {
                adoptions += walker.adopt(&better) as usize;
            }
        }
        adoptions
    }

    /// Cheapest cost `rank` has access to: its own or one waiting in its
    /// inbound slots.
    pub fn known_cost(&self, rank: usize, own: u64) -> u64 {
        self.grid.best_inbound_cost(rank).map_or(own, |c| c.min(own))
    }
}

struct Walker<'a> {
    engine: Engine<'a>,
    status: Status,
    stopped: bool,
    last_call: Option<u64>,
}

impl Walker<'_> {
    fn runnable(&self) -> bool {
        self.status == Status::Running && !self.stopped
    }

    /// Advances to the next communication step.
    fn work(&mut self, k: u64) {
        while self.runnable() {
            self.status = self.engine.advance();
            let it = self.engine.iterations();
            if it.is_multiple_of(k) && self.last_call != Some(it) {
                self.last_call = Some(it);
                return;
            }
        }
    }
}

impl Participant for Walker<'_> {
    fn configuration(&self) -> Configuration {
        self.engine.configuration()
    }

    fn adopt(&mut self, payload: &Configuration) -> bool {
        self.engine.adopt(payload)
    }

    fn is_active(&self) -> bool {
        self.runnable()
    }
}

/// Same protocol as [`super::run_parallel`], but with all workers on the
/// calling thread advancing in lockstep. Simultaneous solutions in a round
/// go to the lowest rank.
pub fn run_lockstep(
    spec: &ProblemSpec,
    engine_params: &EngineParams,
    params: &ParallelParams,
) -> Result<ParallelOutcome> {
    params.validate()?;
    let topology = params.topology()?;
    let k = params.comm_interval_k;
    let mut walkers = (0..params.num_workers)
        .map(|r| {
            Ok(Walker {
                engine: Engine::new(spec, params.worker_params(engine_params, r))?,
                status: Status::Running,
                stopped: false,
                last_call: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let board = TerminationBoard::new(params.num_workers);
    let mut poc = (params.variant == Variant::Poc).then(|| LockstepPoc::new(topology, spec.num_vars()));

    let start = Instant::now();
    while walkers.iter().any(Walker::runnable) {
        for w in walkers.iter_mut() {
            w.work(k);
        }
        for (rank, w) in walkers.iter_mut().enumerate() {
            if w.stopped || w.status == Status::Exhausted {
                continue;
            }
            board.report_progress(rank, w.engine.iterations());
            if w.status == Status::Solved {
                board.try_publish(rank, w.engine.iterations(), w.engine.configuration());
            }
        }
        if board.is_set() {
            for w in walkers.iter_mut().filter(|w| w.status == Status::Running) {
                w.stopped = true;
            }
            break;
        }
        if let Some(poc) = poc.as_mut() {
            poc.round(&mut walkers);
        }
    }
    let wall_time = start.elapsed();

    let propagations: Vec<u64> = match &poc {
        Some(p) => p.nodes().iter().map(PocNode::propagations).collect(),
        None => vec![0; params.num_workers],
    };
    let workers = walkers
        .into_iter()
        .zip(propagations)
        .enumerate()
        .map(|(rank, (w, propagations))| {
            let seed = w.engine.params().seed;
            let outcome = w.engine.finish(wall_time, w.stopped);
            WorkerReport {
                rank,
                seed,
                solved: outcome.solved,
                terminated_by_peer: outcome.terminated_by_peer,
                stats: outcome.stats,
                propagations,
            }
        })
        .collect();
    Ok(ParallelOutcome::assemble(spec, &board, workers, wall_time))
}
