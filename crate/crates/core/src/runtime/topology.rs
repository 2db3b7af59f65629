use std::ops::Range;

use crate::error::{Error, Result};

/// Complete `arity`-ary tree over ranks `0..num_workers`, rooted at rank 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeTopology {
    num_workers: usize,
    arity: usize,
}

impl TreeTopology {
    pub fn new(num_workers: usize, arity: usize) -> Result<Self> {
        if num_workers == 0 {
            return Err(Error::InvalidParams("at least one worker is required".into()));
        }
        if arity == 0 {
            return Err(Error::InvalidParams("tree arity must be positive".into()));
        }
        Ok(TreeTopology { num_workers, arity })
    }

    pub fn binary(num_workers: usize) -> Result<Self> {
        Self::new(num_workers, 2)
    }

    pub fn num_workers(&self) -> usize {
        self.num_workers
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn parent(&self, rank: usize) -> Option<usize> {
        (rank > 0).then(|| (rank - 1) / self.arity)
    }

    pub fn children(&self, rank: usize) -> Range<usize> {
        let first = (self.arity * rank + 1).min(self.num_workers);
        let last = (self.arity * rank + self.arity + 1).min(self.num_workers);
        first..last
    }

    /// Position of `rank` among its parent's children.
    pub fn child_slot(&self, rank: usize) -> Option<usize> {
        self.parent(rank).map(|p| rank - (self.arity * p + 1))
    }

    pub fn depth_of(&self, mut rank: usize) -> usize {
        let mut depth = 0;
        while let Some(p) = self.parent(rank) {
            rank = p;
            depth += 1;
        }
        depth
    }

    /// Depth of the deepest rank.
    pub fn depth(&self) -> usize {
        self.depth_of(self.num_workers - 1)
    }

    pub fn is_leaf(&self, rank: usize) -> bool {
        self.children(rank).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_tree_of_fifteen() {
        let t = TreeTopology::binary(15).unwrap();
        assert_eq!(t.parent(0), None);
        assert_eq!(t.children(0), 1..3);
        assert_eq!(t.children(6), 13..15);
        assert_eq!(t.parent(14), Some(6));
        assert_eq!(t.child_slot(14), Some(1));
        assert_eq!(t.depth(), 3);
        assert!((7..15).all(|r| t.is_leaf(r)));
    }

    #[test]
    fn partial_last_level() {
        let t = TreeTopology::new(6, 3).unwrap();
        assert_eq!(t.children(0), 1..4);
        assert_eq!(t.children(1), 4..6);
        assert!(t.children(2).is_empty());
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(TreeTopology::new(0, 2).is_err());
        assert!(TreeTopology::new(4, 0).is_err());
    }

    proptest! {
        #[test]
        fn covers_every_rank_once(p in 1usize..200, arity in 1usize..6) {
            let t = TreeTopology::new(p, arity).unwrap();
            let mut seen = vec![0; p];
            seen[0] += 1;
            for r in 0..p {
                for c in t.children(r) {
                    prop_assert_eq!(t.parent(c), Some(r));
                    prop_assert_eq!(t.children(r).nth(t.child_slot(c).unwrap()), Some(c));
                    seen[c] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
        }
    }
}
