//! Permutation CSP benchmark instances and their error functions.
//!
//! Every instance is a permutation problem: a configuration assigns each
//! variable a distinct value of the instance's base domain, and moves are
//! position swaps. Costs are integers so that incremental evaluation can be
//! checked exactly against a full recomputation.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    MagicSquare,
    CostasArray,
    AllInterval,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::MagicSquare,
        ProblemKind::CostasArray,
        ProblemKind::AllInterval,
    ];

    pub fn min_size(self) -> usize {
        match self {
            ProblemKind::MagicSquare => 3,
            ProblemKind::CostasArray | ProblemKind::AllInterval => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::MagicSquare => "magic-square",
            ProblemKind::CostasArray => "costas",
            ProblemKind::AllInterval => "all-interval",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "magic-square" | "magicsquare" | "magic" | "ms" => Ok(ProblemKind::MagicSquare),
            "costas" | "costas-array" | "costasarray" | "cap" => Ok(ProblemKind::CostasArray),
            "all-interval" | "allinterval" | "ai" => Ok(ProblemKind::AllInterval),
            other => Err(format!(
                "unknown problem '{other}' (expected magic-square, costas or all-interval)"
            )),
        }
    }
}

/// Identifier of one constraint inside a [`ProblemSpec`].
///
/// Magic square: rows are `0..n`, columns `n..2n`, the main diagonal `2n`
/// and the anti-diagonal `2n + 1`. Costas: constraint `d - 1` is difference
/// row `d`. All-interval: a single constraint `0`.
pub type ConstraintId = usize;

/// An immutable benchmark instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    kind: ProblemKind,
    n: usize,
    base_domain: Vec<u32>,
    num_constraints: usize,
    constraint_index: Vec<Vec<ConstraintId>>,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, n: usize) -> Result<Self> {
        let min = kind.min_size();
        if n < min {
            return Err(Error::SizeOutOfRange { kind, min, got: n });
        }
        let (base_domain, num_constraints): (Vec<u32>, usize) = match kind {
            ProblemKind::MagicSquare => ((1..=(n * n) as u32).collect(), 2 * n + 2),
            ProblemKind::CostasArray => ((1..=n as u32).collect(), n - 2),
            ProblemKind::AllInterval => ((0..n as u32).collect(), 1),
        };
        let mut spec = ProblemSpec {
            kind,
            n,
            base_domain,
            num_constraints,
            constraint_index: Vec::new(),
        };
        let mut index = vec![Vec::new(); spec.num_vars()];
        for c in 0..num_constraints {
            for v in spec.constraint_scope(c) {
                index[v].push(c);
            }
        }
        spec.constraint_index = index;
        Ok(spec)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.base_domain.len()
    }

    pub fn base_domain(&self) -> &[u32] {
        &self.base_domain
    }

    pub fn num_constraints(&self) -> usize {
        self.num_constraints
    }

    /// Constraints whose scope contains variable `var`.
    pub fn constraints_of(&self, var: usize) -> &[ConstraintId] {
        &self.constraint_index[var]
    }

    /// Target sum of every line of a magic square of this order.
    pub fn magic_constant(&self) -> i64 {
        let n = self.n as i64;
        n * (n * n + 1) / 2
    }

    /// Variables touched by constraint `c`, in ascending order.
    pub fn constraint_scope(&self, c: ConstraintId) -> Vec<usize> {
        let n = self.n;
        match self.kind {
            ProblemKind::MagicSquare => {
                let mut cells = magic_line(n, c);
                cells.sort_unstable();
                cells
            }
            // Row d involves the entries s[i + d] - s[i] for i in 0..n-d,
            // which together touch every position.
            ProblemKind::CostasArray => (0..n).collect(),
            ProblemKind::AllInterval => (0..n).collect(),
        }
    }

    pub fn random_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let mut values = self.base_domain.clone();
        values.shuffle(rng);
        values
    }

    pub fn check_permutation(&self, values: &[u32]) -> Result<()> {
        if values.len() != self.num_vars() {
            return Err(Error::NotAPermutation);
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        if sorted != self.base_domain {
            return Err(Error::NotAPermutation);
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.num_vars() {
            Err(Error::IndexOutOfRange {
                index,
                len: self.num_vars(),
            })
        } else {
            Ok(())
        }
    }

    /// Sum of all constraint errors. Zero iff `values` is a solution.
    pub fn full_cost(&self, values: &[u32]) -> Result<u64> {
        self.check_permutation(values)?;
        Ok(self.cost_unchecked(values))
    }

    pub(crate) fn cost_unchecked(&self, values: &[u32]) -> u64 {
        (0..self.num_constraints)
            .map(|c| self.constraint_error_with(c, |p| values[p]))
            .sum()
    }

    pub fn constraint_error(&self, c: ConstraintId, values: &[u32]) -> u64 {
        self.constraint_error_with(c, |p| values[p])
    }

    fn constraint_error_with(&self, c: ConstraintId, value_at: impl Fn(usize) -> u32) -> u64 {
        let n = self.n;
        match self.kind {
            ProblemKind::MagicSquare => {
                let sum: i64 = magic_line(n, c).into_iter().map(|p| value_at(p) as i64).sum();
                (sum - self.magic_constant()).unsigned_abs()
            }
            ProblemKind::CostasArray => {
                let d = c + 1;
                let mut row: Vec<i64> = (0..n - d)
                    .map(|i| value_at(i + d) as i64 - value_at(i) as i64)
                    .collect();
                duplicate_count(&mut row)
            }
            ProblemKind::AllInterval => {
                let mut diffs: Vec<i64> = (0..n - 1)
                    .map(|i| (value_at(i + 1) as i64 - value_at(i) as i64).abs())
                    .collect();
                duplicate_count(&mut diffs)
            }
        }
    }

    /// Projects constraint errors onto variables.
    ///
    /// Magic square cells accumulate the absolute errors of their lines.
    /// In an all-interval series each interval that repeats an earlier one
    /// adds 1 to both of its endpoints, so the errors sum to twice the cost.
    /// A Costas variable's error starts from the number of colliding
    /// difference pairs it takes part in, refined so that the worst variable
    /// is rarely ambiguous: the count is
    /// scaled up, and every repeat of an earlier difference in row `d` adds
    /// `n^2 - d^2` to both of its endpoints, which favours fixing collisions
    /// between close positions first.
    pub fn variable_errors(&self, config: &Configuration) -> Vec<u64> {
        let values = config.values();
        let n = self.n;
        let mut errors = vec![0u64; self.num_vars()];
        match self.kind {
            ProblemKind::MagicSquare => {
                let line_err: Vec<u64> = (0..self.num_constraints)
                    .map(|c| self.constraint_error(c, values))
                    .collect();
                for (v, e) in errors.iter_mut().enumerate() {
                    *e = self.constraint_index[v].iter().map(|&c| line_err[c]).sum();
                }
            }
            ProblemKind::CostasArray => {
                let scale = crate::eval::costas_tie_scale(n);
                for d in 1..n.saturating_sub(1) {
                    let weight = (n * n - d * d) as u64;
                    let row: Vec<i64> = (0..n - d).map(|i| values[i + d] as i64 - values[i] as i64).collect();
                    for (i, x) in row.iter().enumerate() {
                        let others = row.iter().filter(|y| *y == x).count() as u64 - 1;
                        let repeated = row[..i].contains(x);
                        let e = others * scale + if repeated { weight } else { 0 };
                        errors[i] += e;
                        errors[i + d] += e;
                    }
                }
            }
            ProblemKind::AllInterval => {
                let diffs: Vec<i64> = (0..n - 1)
                    .map(|i| (values[i + 1] as i64 - values[i] as i64).abs())
                    .collect();
                for (i, x) in diffs.iter().enumerate() {
                    let repeated = diffs[..i].contains(x) as u64;
                    errors[i] += repeated;
                    errors[i + 1] += repeated;
                }
            }
        }
        errors
    }

    /// Cost change caused by swapping the values at positions `i` and `j`.
    ///
    /// Only the constraints containing `i` or `j` are re-evaluated.
    pub fn delta_cost_swap(&self, config: &Configuration, i: usize, j: usize) -> Result<i64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        let values = config.values();
        let mut touched: Vec<ConstraintId> = self.constraint_index[i]
            .iter()
            .chain(&self.constraint_index[j])
            .copied()
            .collect();
        touched.sort_unstable();
        touched.dedup();

        let swapped = |p: usize| {
            if p == i {
                values[j]
            } else if p == j {
                values[i]
            } else {
                values[p]
            }
        };
        let delta = touched
            .into_iter()
            .map(|c| {
                self.constraint_error_with(c, swapped) as i64 - self.constraint_error_with(c, |p| values[p]) as i64
            })
            .sum();
        Ok(delta)
    }

    pub fn is_solution(&self, config: &Configuration) -> bool {
        config.cost() == 0
    }
}

/// Cells of magic-square line `c` (row, column or diagonal).
fn magic_line(n: usize, c: ConstraintId) -> Vec<usize> {
    if c < n {
        (0..n).map(|k| c * n + k).collect()
    } else if c < 2 * n {
        (0..n).map(|k| k * n + (c - n)).collect()
    } else if c == 2 * n {
        (0..n).map(|k| k * n + k).collect()
    } else {
        (0..n).map(|k| k * n + (n - 1 - k)).collect()
    }
}

/// Number of entries that repeat an earlier entry: `len - distinct`.
fn duplicate_count(xs: &mut [i64]) -> u64 {
    xs.sort_unstable();
    xs.windows(2).filter(|w| w[0] == w[1]).count() as u64
}

/// A complete assignment with its cached cost.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    values: Vec<u32>,
    cost: u64,
}

impl Configuration {
    pub fn new(spec: &ProblemSpec, values: Vec<u32>) -> Result<Self> {
        let cost = spec.full_cost(&values)?;
        Ok(Configuration { values, cost })
    }

    /// Builds a configuration whose cost is already known. The caller must
    /// guarantee that `cost` is the true cost of `values`.
    pub(crate) fn from_parts(values: Vec<u32>, cost: u64) -> Self {
        Configuration { values, cost }
    }

    pub fn random<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Self {
        let values = spec.random_values(rng);
        let cost = spec.cost_unchecked(&values);
        Configuration { values, cost }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// Recomputes the cost from scratch and compares it with the cached one.
    pub fn is_consistent(&self, spec: &ProblemSpec) -> bool {
        spec.full_cost(&self.values).is_ok_and(|c| c == self.cost)
    }
}

/// Per-kind solution checkers written directly from the problem definitions,
/// independent of the cost functions.
pub mod validate {
    use std::collections::HashSet;

    use super::{ProblemKind, ProblemSpec};

    pub fn is_valid_solution(spec: &ProblemSpec, values: &[u32]) -> bool {
        if spec.check_permutation(values).is_err() {
            return false;
        }
        match spec.kind() {
            ProblemKind::MagicSquare => is_magic_square(spec.n(), values),
            ProblemKind::CostasArray => is_costas_array(values),
            ProblemKind::AllInterval => is_all_interval_series(values),
        }
    }

    /// All rows, columns and both diagonals share the magic sum.
    pub fn is_magic_square(n: usize, values: &[u32]) -> bool {
        if values.len() != n * n {
            return false;
        }
        let target = (n * (n * n + 1) / 2) as u64;
        let at = |r: usize, c: usize| values[r * n + c] as u64;
        (0..n).all(|r| (0..n).map(|c| at(r, c)).sum::<u64>() == target)
            && (0..n).all(|c| (0..n).map(|r| at(r, c)).sum::<u64>() == target)
            && (0..n).map(|k| at(k, k)).sum::<u64>() == target
            && (0..n).map(|k| at(k, n - 1 - k)).sum::<u64>() == target
    }

    /// Dots at `(i, values[i])`: every displacement vector between two dots
    /// is distinct.
    pub fn is_costas_array(values: &[u32]) -> bool {
        let mut seen = HashSet::new();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let v = (j - i, values[j] as i64 - values[i] as i64);
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    /// Adjacent absolute differences are pairwise distinct.
    pub fn is_all_interval_series(values: &[u32]) -> bool {
        let mut seen = HashSet::new();
        values
            .windows(2)
            .all(|w| seen.insert((w[1] as i64 - w[0] as i64).abs()))
    }
}
