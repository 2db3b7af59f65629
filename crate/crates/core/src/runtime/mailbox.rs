//! Emulated one-sided communication slots.
//!
//! A [`Slot`] is a region of "remote memory" that a peer writes into without
//! any participation from the owner. Writes never block: a writer that finds
//! another write in progress drops its own. Readers use the version counter
//! to detect torn copies: the version is odd while a write is in flight, and
//! a copy is accepted only if the version is even and unchanged across it.

use std::sync::atomic::{fence, AtomicU32, AtomicU64, AtomicUsize, Ordering};

use crate::problem::Configuration;

use super::topology::TreeTopology;

#[derive(Debug)]
pub struct Slot {
    version: AtomicU64,
    cost: AtomicU64,
    origin: AtomicUsize,
    values: Box<[AtomicU32]>,
}

/// A payload copied out of a slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Received {
    pub version: u64,
    pub origin: usize,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadResult {
    /// Nothing newer than the caller's last seen version.
    Unchanged,
    /// A write was in flight or completed during the copy.
    Torn,
    Fresh(Received),
}

impl Slot {
    pub fn new(len: usize) -> Self {
        Slot {
            version: AtomicU64::new(0),
            cost: AtomicU64::new(0),
            origin: AtomicUsize::new(usize::MAX),
            values: (0..len).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    pub fn version(&self) -> u64 {
        self.version.load(Ordering::Acquire)
    }

    /// Posts `config` into the slot. Returns `false` if another writer held
    /// the slot, in which case nothing was written.
    pub fn write(&self, origin: usize, config: &Configuration) -> bool {
        debug_assert_eq!(config.values().len(), self.values.len());
        let v = self.version.load(Ordering::Relaxed);
        if v & 1 == 1
            || self
                .version
                .compare_exchange(v, v + 1, Ordering::Acquire, Ordering::Relaxed)
                .is_err()
        {
            return false;
        }
        self.cost.store(config.cost(), Ordering::Relaxed);
        self.origin.store(origin, Ordering::Relaxed);
        for (dst, &x) in self.values.iter().zip(config.values()) {
            dst.store(x, Ordering::Relaxed);
        }
        self.version.store(v + 2, Ordering::Release);
        true
    }

    /// Single copy attempt.
    pub fn read_since(&self, last_seen: u64) -> ReadResult {
        let before = self.version.load(Ordering::Acquire);
        if before == last_seen {
            return ReadResult::Unchanged;
        }
        if before & 1 == 1 {
            return ReadResult::Torn;
        }
        let cost = self.cost.load(Ordering::Relaxed);
        let origin = self.origin.load(Ordering::Relaxed);
        let values: Vec<u32> = self.values.iter().map(|x| x.load(Ordering::Relaxed)).collect();
        fence(Ordering::Acquire);
        let after = self.version.load(Ordering::Relaxed);
        if after != before {
            return ReadResult::Torn;
        }
        ReadResult::Fresh(Received {
            version: before,
            origin,
            config: Configuration::from_parts(values, cost),
        })
    }

    /// Reads with one retry after a torn copy. `None` when there is nothing
    /// new or the slot stayed busy; `last_seen` only advances on success.
    pub fn read_new(&self, last_seen: &mut u64) -> Option<Received> {
        for _ in 0..2 {
            match self.read_since(*last_seen) {
                ReadResult::Unchanged => return None,
                ReadResult::Torn => continue,
                ReadResult::Fresh(r) => {
                    *last_seen = r.version;
                    return Some(r);
                }
            }
        }
        None
    }

    /// Cost currently published in the slot, if a write ever completed and
    /// none is in flight.
    pub fn peek_cost(&self) -> Option<u64> {
        match self.read_since(u64::MAX) {
            ReadResult::Fresh(r) if r.version > 0 => Some(r.config.cost()),
            _ => None,
        }
    }
}

/// Inbound slots of every rank of a tree: one written by the parent and one
/// per child.
#[derive(Debug)]
pub struct MailboxGrid {
    topology: TreeTopology,
    from_parent: Vec<Slot>,
    from_children: Vec<Vec<Slot>>,
}

impl MailboxGrid {
    pub fn new(topology: TreeTopology, num_vars: usize) -> Self {
        let p = topology.num_workers();
        MailboxGrid {
            topology,
            from_parent: (0..p).map(|_| Slot::new(num_vars)).collect(),
            from_children: (0..p)
                .map(|r| topology.children(r).map(|_| Slot::new(num_vars)).collect())
                .collect(),
        }
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    /// Slot of `rank` written by its parent.
    pub fn parent_slot(&self, rank: usize) -> &Slot {
        &self.from_parent[rank]
    }

    /// Slots of `rank` written by its children, in child order.
    pub fn child_slots(&self, rank: usize) -> &[Slot] {
        &self.from_children[rank]
    }

    /// One-sided write from `rank` into its parent's memory.
    pub fn post_up(&self, rank: usize, config: &Configuration) -> bool {
        match (self.topology.parent(rank), self.topology.child_slot(rank)) {
            (Some(parent), Some(slot)) => self.from_children[parent][slot].write(rank, config),
            _ => false,
        }
    }

    /// One-sided write from `rank` into the memory of its child `child`.
    pub fn post_down(&self, rank: usize, child: usize, config: &Configuration) -> bool {
        debug_assert_eq!(self.topology.parent(child), Some(rank));
        self.from_parent[child].write(rank, config)
    }

    /// Lowest cost sitting in any inbound slot of `rank`.
    pub fn best_inbound_cost(&self, rank: usize) -> Option<u64> {
        std::iter::once(&self.from_parent[rank])
            .chain(&self.from_children[rank])
            .filter_map(Slot::peek_cost)
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemKind, ProblemSpec};

    #[test]
    fn write_then_read() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 6).unwrap();
        let c = Configuration::new(&spec, vec![0, 5, 1, 4, 2, 3]).unwrap();
        let slot = Slot::new(6);
        let mut seen = 0;
        assert_eq!(slot.read_new(&mut seen), None);
        assert!(slot.write(3, &c));
        let got = slot.read_new(&mut seen).unwrap();
        assert_eq!(got.config, c);
        assert_eq!(got.origin, 3);
        assert_eq!(seen, 2);
        assert_eq!(slot.read_new(&mut seen), None);
        assert_eq!(slot.peek_cost(), Some(0));
    }

    #[test]
    fn in_flight_write_is_torn() {
        let slot = Slot::new(3);
        slot.version.store(5, Ordering::Release);
        assert_eq!(slot.read_since(0), ReadResult::Torn);
        let mut seen = 0;
        assert_eq!(slot.read_new(&mut seen), None);
        assert_eq!(seen, 0);
        // a second writer backs off instead of waiting
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 3).unwrap();
        let c = Configuration::new(&spec, vec![0, 1, 2]).unwrap();
        assert!(!slot.write(0, &c));
    }

    #[test]
    fn grid_routes_by_rank() {
        let topo = TreeTopology::binary(7).unwrap();
        let grid = MailboxGrid::new(topo, 4);
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 4).unwrap();
        let c = Configuration::new(&spec, vec![0, 1, 2, 3]).unwrap();
        assert!(grid.post_up(4, &c));
        assert_eq!(grid.child_slots(1)[1].version(), 2);
        assert_eq!(grid.child_slots(1)[0].version(), 0);
        assert!(grid.post_down(2, 5, &c));
        assert_eq!(grid.parent_slot(5).version(), 2);
        assert!(!grid.post_up(0, &c));
        assert_eq!(grid.best_inbound_cost(1), Some(c.cost()));
        assert_eq!(grid.best_inbound_cost(3), None);
    }
}
