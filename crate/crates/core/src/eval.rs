//! Incremental cost bookkeeping for the search loop.
//!
//! [`Evaluator`] owns the current permutation together with per-constraint
//! aggregates (line sums for magic squares, occurrence counts of every
//! difference value for the difference-based problems), so a swap delta
//! costs O(1) for magic squares and all-interval and O(n) for Costas.

use crate::problem::{Configuration, ProblemKind, ProblemSpec};

#[derive(Debug, Clone)]
enum Aggregates {
    /// Signed `sum - magic constant` per line, indexed like constraint ids.
    Magic { line_err: Vec<i64> },
    /// `counts[d - 1][diff + n]` for difference row `d`.
    Costas { counts: Vec<Vec<u32>> },
    /// `counts[|diff|]`.
    AllInterval { counts: Vec<u32> },
}

#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    spec: &'a ProblemSpec,
    values: Vec<u32>,
    cost: u64,
    agg: Aggregates,
}

/// Multiplier that puts the colliding-pair count of a Costas variable above
/// its tie-breaking part, which is at most `2 (n - 2) n^2`.
pub(crate) fn costas_tie_scale(n: usize) -> u64 {
    2 * (n * n * n) as u64 + 1
}

/// Error contribution of one difference value occurring `count` times.
#[inline]
fn excess(count: i64) -> i64 {
    (count - 1).max(0)
}

impl<'a> Evaluator<'a> {
    /// `values` must already be a permutation of the spec's base domain.
    pub fn new(spec: &'a ProblemSpec, values: Vec<u32>) -> Self {
        debug_assert!(spec.check_permutation(&values).is_ok());
        let agg = match spec.kind() {
            ProblemKind::MagicSquare => Aggregates::Magic {
                line_err: vec![0; spec.num_constraints()],
            },
            ProblemKind::CostasArray => Aggregates::Costas {
                counts: vec![vec![0; 2 * spec.n()]; spec.num_constraints()],
            },
            ProblemKind::AllInterval => Aggregates::AllInterval {
                counts: vec![0; spec.n()],
            },
        };
        let mut eval = Evaluator {
            spec,
            values,
            cost: 0,
            agg,
        };
        eval.rebuild();
        eval
    }

    pub fn from_configuration(spec: &'a ProblemSpec, config: &Configuration) -> Self {
        Self::new(spec, config.values().to_vec())
    }

    pub fn spec(&self) -> &'a ProblemSpec {
        self.spec
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::from_parts(self.values.clone(), self.cost)
    }

    /// Replaces the current permutation and recomputes every aggregate.
    pub fn reset(&mut self, values: &[u32]) {
        debug_assert!(self.spec.check_permutation(values).is_ok());
        self.values.clear();
        self.values.extend_from_slice(values);
        self.rebuild();
    }

    /// Mutable access to the permutation for in-place reshuffles; the
    /// aggregates are rebuilt when the guard closure returns.
    pub fn rewrite(&mut self, f: impl FnOnce(&mut [u32])) {
        f(&mut self.values);
        debug_assert!(self.spec.check_permutation(&self.values).is_ok());
        self.rebuild();
    }

    fn rebuild(&mut self) {
        let n = self.spec.n();
        let values = &self.values;
        self.cost = match &mut self.agg {
            Aggregates::Magic { line_err } => {
                let m = self.spec.magic_constant();
                line_err.iter_mut().for_each(|e| *e = -m);
                for r in 0..n {
                    for c in 0..n {
                        let x = values[r * n + c] as i64;
                        line_err[r] += x;
                        line_err[n + c] += x;
                        if r == c {
                            line_err[2 * n] += x;
                        }
                        if r + c == n - 1 {
                            line_err[2 * n + 1] += x;
                        }
                    }
                }
                line_err.iter().map(|e| e.unsigned_abs()).sum()
            }
            Aggregates::Costas { counts } => {
                let mut cost = 0;
                for (row, counts) in counts.iter_mut().enumerate() {
                    let d = row + 1;
                    counts.iter_mut().for_each(|c| *c = 0);
                    for i in 0..n - d {
                        let diff = values[i + d] as i64 - values[i] as i64;
                        counts[(diff + n as i64) as usize] += 1;
                    }
                    cost += counts.iter().map(|&c| excess(c as i64)).sum::<i64>();
                }
                cost as u64
            }
            Aggregates::AllInterval { counts } => {
                counts.iter_mut().for_each(|c| *c = 0);
                for w in values.windows(2) {
                    counts[w[0].abs_diff(w[1]) as usize] += 1;
                }
                counts.iter().map(|&c| excess(c as i64)).sum::<i64>() as u64
            }
        };
    }

    /// Per-variable projection of constraint errors, written into `out`.
    pub fn variable_errors(&self, out: &mut [u64]) {
        let n = self.spec.n();
        let values = &self.values;
        match &self.agg {
            Aggregates::Magic { line_err } => {
                let diag = line_err[2 * n].unsigned_abs();
                let anti = line_err[2 * n + 1].unsigned_abs();
                for r in 0..n {
                    let row = line_err[r].unsigned_abs();
                    for c in 0..n {
                        let mut e = row + line_err[n + c].unsigned_abs();
                        if r == c {
                            e += diag;
                        }
                        if r + c == n - 1 {
                            e += anti;
                        }
                        out[r * n + c] = e;
                    }
                }
            }
            Aggregates::Costas { counts } => {
                out.iter_mut().for_each(|e| *e = 0);
                let scale = costas_tie_scale(n);
                let mut seen = vec![false; 2 * n];
                for (row, counts) in counts.iter().enumerate() {
                    let d = row + 1;
                    let weight = (n * n - d * d) as u64;
                    seen.iter_mut().for_each(|s| *s = false);
                    for i in 0..n - d {
                        let idx = (values[i + d] as i64 - values[i] as i64 + n as i64) as usize;
                        let mut e = (counts[idx] as u64 - 1) * scale;
                        if std::mem::replace(&mut seen[idx], true) {
                            e += weight;
                        }
                        out[i] += e;
                        out[i + d] += e;
                    }
                }
            }
            Aggregates::AllInterval { .. } => {
                out.iter_mut().for_each(|e| *e = 0);
                // every occurrence of an interval after its first one is one
                // unit of cost, blamed on both of its endpoints
                let mut seen = vec![false; n];
                for i in 0..n - 1 {
                    let v = values[i].abs_diff(values[i + 1]) as usize;
                    let e = std::mem::replace(&mut seen[v], true) as u64;
                    out[i] += e;
                    out[i + 1] += e;
                }
            }
        }
    }

    /// Cost change of swapping positions `i` and `j` (`i != j`).
    pub fn delta_swap(&self, i: usize, j: usize) -> i64 {
        self.swap_changes(i, j).0
    }

    /// Key by which the search ranks a swap; lower is better and a key
    /// below `(0, 0)` counts as an improvement.
    ///
    /// For magic squares and Costas arrays this is `(cost delta, 0)`. For
    /// all-interval series the cost (number of repeated intervals) is a poor
    /// guide on its own: the key is the change in the sum of the interval
    /// values that do not occur, then the cost delta. Large intervals are
    /// the hard ones to place, and this sum reaches zero exactly when the
    /// cost does.
    pub fn swap_score(&self, i: usize, j: usize) -> (i64, i64) {
        let (delta, guidance) = self.swap_changes(i, j);
        match self.spec.kind() {
            ProblemKind::AllInterval => (guidance, delta),
            _ => (delta, 0),
        }
    }

    /// Cost delta and, for all-interval, missing-interval-sum delta.
    fn swap_changes(&self, i: usize, j: usize) -> (i64, i64) {
        debug_assert_ne!(i, j);
        let n = self.spec.n();
        let values = &self.values;
        let at = |p: usize| -> i64 {
            if p == i {
                values[j] as i64
            } else if p == j {
                values[i] as i64
            } else {
                values[p] as i64
            }
        };
        match &self.agg {
            Aggregates::Magic { line_err } => {
                let (x, y) = (values[i] as i64, values[j] as i64);
                let (ri, ci) = (i / n, i % n);
                let (rj, cj) = (j / n, j % n);
                // (line, change) pairs; a line holding both cells is unchanged.
                let mut changes: [(usize, i64); 8] = [(usize::MAX, 0); 8];
                let mut len = 0;
                let mut push = |line: usize, amount: i64| {
                    for entry in changes[..len].iter_mut() {
                        if entry.0 == line {
                            entry.1 += amount;
                            return;
                        }
                    }
                    changes[len] = (line, amount);
                    len += 1;
                };
                push(ri, y - x);
                push(rj, x - y);
                push(n + ci, y - x);
                push(n + cj, x - y);
                if ri == ci {
                    push(2 * n, y - x);
                }
                if rj == cj {
                    push(2 * n, x - y);
                }
                if ri + ci == n - 1 {
                    push(2 * n + 1, y - x);
                }
                if rj + cj == n - 1 {
                    push(2 * n + 1, x - y);
                }
                let delta = changes[..len]
                    .iter()
                    .filter(|(_, amount)| *amount != 0)
                    .map(|&(line, amount)| {
                        let old = line_err[line];
                        (old + amount).abs() - old.abs()
                    })
                    .sum::<i64>();
                (delta, 0)
            }
            Aggregates::Costas { counts } => {
                let mut delta = 0;
                for (row, counts) in counts.iter().enumerate() {
                    let d = row + 1;
                    let mut entries = [usize::MAX; 4];
                    let mut len = 0;
                    for p in [i.wrapping_sub(d), i, j.wrapping_sub(d), j] {
                        if p < n - d && !entries[..len].contains(&p) {
                            entries[len] = p;
                            len += 1;
                        }
                    }
                    let old = entries[..len].iter().map(|&p| values[p + d] as i64 - values[p] as i64);
                    let new = entries[..len].iter().map(|&p| at(p + d) - at(p));
                    delta += count_change(old, new, |v| counts[(v + n as i64) as usize] as i64).0;
                }
                (delta, 0)
            }
            Aggregates::AllInterval { counts } => {
                let mut entries = [usize::MAX; 4];
                let mut len = 0;
                for p in [i.wrapping_sub(1), i, j.wrapping_sub(1), j] {
                    if p < n - 1 && !entries[..len].contains(&p) {
                        entries[len] = p;
                        len += 1;
                    }
                }
                let old = entries[..len]
                    .iter()
                    .map(|&p| (values[p + 1] as i64 - values[p] as i64).abs());
                let new = entries[..len].iter().map(|&p| (at(p + 1) - at(p)).abs());
                count_change(old, new, |v| counts[v as usize] as i64)
            }
        }
    }

    pub fn apply_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let delta = self.delta_swap(i, j);
        let n = self.spec.n();
        match &mut self.agg {
            Aggregates::Magic { line_err } => {
                let (x, y) = (self.values[i] as i64, self.values[j] as i64);
                for (cell, change) in [(i, y - x), (j, x - y)] {
                    let (r, c) = (cell / n, cell % n);
                    line_err[r] += change;
                    line_err[n + c] += change;
                    if r == c {
                        line_err[2 * n] += change;
                    }
                    if r + c == n - 1 {
                        line_err[2 * n + 1] += change;
                    }
                }
                self.values.swap(i, j);
            }
            Aggregates::Costas { counts } => {
                for (row, counts) in counts.iter_mut().enumerate() {
                    let d = row + 1;
                    for_each_entry(n - d, d, i, j, |p| {
                        let diff = self.values[p + d] as i64 - self.values[p] as i64;
                        counts[(diff + n as i64) as usize] -= 1;
                    });
                }
                self.values.swap(i, j);
                for (row, counts) in counts.iter_mut().enumerate() {
                    let d = row + 1;
                    for_each_entry(n - d, d, i, j, |p| {
                        let diff = self.values[p + d] as i64 - self.values[p] as i64;
                        counts[(diff + n as i64) as usize] += 1;
                    });
                }
            }
            Aggregates::AllInterval { counts } => {
                for_each_entry(n - 1, 1, i, j, |p| {
                    counts[self.values[p].abs_diff(self.values[p + 1]) as usize] -= 1;
                });
                self.values.swap(i, j);
                for_each_entry(n - 1, 1, i, j, |p| {
                    counts[self.values[p].abs_diff(self.values[p + 1]) as usize] += 1;
                });
            }
        }
        self.cost = (self.cost as i64 + delta) as u64;
    }
}

/// Calls `f` once for every distinct difference entry (start position `p`,
/// spanning `p..=p + d`) that contains position `i` or `j`.
fn for_each_entry(len: usize, d: usize, i: usize, j: usize, mut f: impl FnMut(usize)) {
    let mut seen = [usize::MAX; 4];
    let mut k = 0;
    for p in [i.wrapping_sub(d), i, j.wrapping_sub(d), j] {
        if p < len && !seen[..k].contains(&p) {
            seen[k] = p;
            k += 1;
            f(p);
        }
    }
}

/// Change in `sum(excess(count))` when the `old` difference values are
/// replaced by the `new` ones, and change in the sum of values whose count
/// is zero. At most four values leave and four arrive.
fn count_change(
    old: impl Iterator<Item = i64>,
    new: impl Iterator<Item = i64>,
    count: impl Fn(i64) -> i64,
) -> (i64, i64) {
    // (value, net change in its count)
    let mut net: [(i64, i64); 8] = [(0, 0); 8];
    let mut len = 0;
    let mut add = |v: i64, by: i64| {
        for e in net[..len].iter_mut() {
            if e.0 == v {
                e.1 += by;
                return;
            }
        }
        net[len] = (v, by);
        len += 1;
    };
    old.for_each(|v| add(v, -1));
    new.for_each(|v| add(v, 1));
    let mut delta = 0;
    let mut missing = 0;
    for &(v, by) in net[..len].iter().filter(|(_, by)| *by != 0) {
        let c = count(v);
        delta += excess(c + by) - excess(c);
        missing += v * ((c + by == 0) as i64 - (c == 0) as i64);
    }
    (delta, missing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_stateless_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in ProblemKind::ALL {
            for n in [3, 4, 7, 10] {
                let spec = ProblemSpec::new(kind, n).unwrap();
                let mut eval = Evaluator::new(&spec, spec.random_values(&mut rng));
                let mut errs = vec![0; spec.num_vars()];
                for _ in 0..200 {
                    let config = eval.configuration();
                    assert_eq!(eval.cost(), spec.full_cost(eval.values()).unwrap());
                    eval.variable_errors(&mut errs);
                    assert_eq!(errs, spec.variable_errors(&config));
                    let i = rng.gen_range(0..spec.num_vars());
                    let j = (i + rng.gen_range(1..spec.num_vars())) % spec.num_vars();
                    assert_eq!(
                        eval.delta_swap(i, j),
                        spec.delta_cost_swap(&config, i, j).unwrap(),
                        "{kind} n={n} swap({i},{j})"
                    );
                    eval.apply_swap(i, j);
                }
            }
        }
    }

    #[test]
    fn rewrite_rebuilds_aggregates() {
        let spec = ProblemSpec::new(ProblemKind::MagicSquare, 3).unwrap();
        let mut eval = Evaluator::new(&spec, (1..=9).collect());
        eval.rewrite(|v| v.copy_from_slice(&[2, 7, 6, 9, 5, 1, 4, 3, 8]));
        assert_eq!(eval.cost(), 0);
    }
}
