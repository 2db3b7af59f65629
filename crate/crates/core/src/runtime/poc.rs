//! Propagation of configurations over the worker tree.
//!
//! At every communication step a node reads its inbound slots, keeps the
//! cheapest configuration it knows, and forwards it. Forwarding follows a
//! wave rule: a node writes in a direction (up to its parent, or down to its
//! children) only when its best-known cost beats the last cost it sent that
//! way, or when the best-known configuration just arrived from the opposite
//! direction. Equal costs are never re-sent, so the tree goes quiet once
//! everyone agrees.

use crate::problem::Configuration;

use super::mailbox::{MailboxGrid, Received};

/// Where a received configuration came from, relative to the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Parent,
    /// Child rank.
    Child(usize),
}

/// Fresh payloads read during one communication step.
#[derive(Debug, Clone, Default)]
pub struct Inbound {
    messages: Vec<(Source, Received)>,
}

impl Inbound {
    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn messages(&self) -> &[(Source, Received)] {
        &self.messages
    }

    /// Cheapest payload; the parent wins ties, then lower child ranks.
    pub fn best(&self) -> Option<&(Source, Received)> {
        self.messages.iter().min_by_key(|(_, r)| r.config.cost())
    }
}

/// Per-worker protocol state.
#[derive(Debug, Clone)]
pub struct PocNode {
    rank: usize,
    seen_parent: u64,
    seen_children: Vec<u64>,
    last_sent_up: Option<u64>,
    last_sent_down: Option<u64>,
    propagations: u64,
}

impl PocNode {
    pub fn new(rank: usize, grid: &MailboxGrid) -> Self {
        PocNode {
            rank,
            seen_parent: 0,
            seen_children: vec![0; grid.child_slots(rank).len()],
            last_sent_up: None,
            last_sent_down: None,
            propagations: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Completed writes into neighbours' slots.
    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    /// Copies every slot that changed since the previous step. A slot whose
    /// copy is torn twice in a row is skipped until the next step.
    pub fn receive(&mut self, grid: &MailboxGrid) -> Inbound {
        let mut messages = Vec::new();
        if let Some(r) = grid.parent_slot(self.rank).read_new(&mut self.seen_parent) {
            messages.push((Source::Parent, r));
        }
        let first_child = grid.topology().children(self.rank).start;
        for (i, slot) in grid.child_slots(self.rank).iter().enumerate() {
            if let Some(r) = slot.read_new(&mut self.seen_children[i]) {
                messages.push((Source::Child(first_child + i), r));
            }
        }
        Inbound { messages }
    }

    /// Decides on the configuration to keep and forwards it.
    ///
    /// Returns the received configuration to adopt when it is strictly
    /// cheaper than `own`; otherwise `own` is what gets forwarded.
    pub fn decide_and_post(
        &mut self,
        own: &Configuration,
        inbound: &Inbound,
        grid: &MailboxGrid,
    ) -> Option<Configuration> {
        let (best, source) = match inbound.best() {
            Some((src, r)) if r.config.cost() < own.cost() => (&r.config, Some(*src)),
            _ => (own, None),
        };
        let cost = best.cost();
        let improves = |last: Option<u64>| last.is_none_or(|l| cost < l);

        let topology = grid.topology();
        if topology.parent(self.rank).is_some()
            && (improves(self.last_sent_up) || matches!(source, Some(Source::Child(_))))
        {
            if grid.post_up(self.rank, best) {
                self.propagations += 1;
            }
            self.last_sent_up = Some(cost);
        }
        if !topology.is_leaf(self.rank) && (improves(self.last_sent_down) || source == Some(Source::Parent)) {
            for child in topology.children(self.rank) {
                if source == Some(Source::Child(child)) {
                    continue;
                }
                if grid.post_down(self.rank, child, best) {
                    self.propagations += 1;
                }
            }
            self.last_sent_down = Some(cost);
        }
        source.map(|_| best.clone())
    }

    /// One full communication step.
    pub fn exchange(&mut self, own: &Configuration, grid: &MailboxGrid) -> Option<Configuration> {
        let inbound = self.receive(grid);
        self.decide_and_post(own, &inbound, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemKind, ProblemSpec};
    use crate::runtime::topology::TreeTopology;

    fn ai(values: &[u32]) -> Configuration {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, values.len()).unwrap();
        Configuration::new(&spec, values.to_vec()).unwrap()
    }

    #[test]
    fn cheaper_payload_is_adopted() {
        let grid = MailboxGrid::new(TreeTopology::binary(3).unwrap(), 4);
        let good = ai(&[0, 3, 1, 2]);
        let bad = ai(&[0, 1, 2, 3]);
        assert!(good.cost() < bad.cost());
        let mut child = PocNode::new(1, &grid);
        let mut root = PocNode::new(0, &grid);
        assert_eq!(child.exchange(&good, &grid), None);
        assert_eq!(root.exchange(&bad, &grid), Some(good.clone()));
        // the root forwards it to its other child but not back to rank 1
        assert_eq!(grid.parent_slot(2).version(), 2);
        assert_eq!(grid.parent_slot(1).version(), 0);
    }

    #[test]
    fn worse_payload_is_answered_with_own() {
        let grid = MailboxGrid::new(TreeTopology::binary(2).unwrap(), 4);
        let good = ai(&[0, 3, 1, 2]);
        let bad = ai(&[0, 1, 2, 3]);
        let mut child = PocNode::new(1, &grid);
        let mut root = PocNode::new(0, &grid);
        child.exchange(&bad, &grid);
        assert_eq!(root.exchange(&good, &grid), None);
        let mut seen = 0;
        let down = grid.parent_slot(1).read_new(&mut seen).unwrap();
        assert_eq!(down.config, good);
        assert_eq!(down.origin, 0);
    }

    #[test]
    fn equal_costs_are_not_resent() {
        let grid = MailboxGrid::new(TreeTopology::binary(2).unwrap(), 4);
        let c = ai(&[0, 1, 2, 3]);
        let mut child = PocNode::new(1, &grid);
        child.exchange(&c, &grid);
        child.exchange(&c, &grid);
        assert_eq!(child.propagations(), 1);
        assert_eq!(grid.child_slots(0)[0].version(), 2);
    }
}
