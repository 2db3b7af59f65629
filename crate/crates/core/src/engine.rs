//! The sequential Adaptive Search loop.
//!
//! Each iteration projects constraint errors onto variables, picks the
//! non-tabu variable with the highest error, and scans every swap partner
//! for the move with the smallest resulting cost (min-conflict). A strictly
//! improving move is applied. A non-improving best move is still applied
//! with probability `escape_probability`; otherwise the iteration is a local
//! minimum: the variable is frozen for `tabu_tenure` iterations, and once
//! `reset_limit` variables are frozen at the same time a random subset of
//! positions is reshuffled (partial reset). A restart from a fresh random
//! permutation happens after `max_iterations` iterations without success.
//!
//! Every `comm_interval_k` iterations the engine calls a [`CommHook`], which
//! is how the parallel runtime observes and steers a walk.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Evaluator;
use crate::problem::{Configuration, ProblemKind, ProblemSpec};

/// Random generator used by every engine: ChaCha with 8 rounds, seeded with
/// `ChaCha8Rng::seed_from_u64`. Its output stream is fixed across platforms.
pub type EngineRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    /// Iterations a variable stays frozen after a local minimum.
    pub tabu_tenure: u64,
    /// Number of simultaneously frozen variables that triggers a partial reset.
    pub reset_limit: usize,
    /// Fraction of positions reshuffled by a partial reset, in `(0, 1]`.
    pub reset_fraction: f64,
    /// Iterations per restart window.
    pub max_iterations: u64,
    /// Full restarts allowed before giving up.
    pub max_restarts: u32,
    /// Iterations between two calls of the communication hook.
    pub comm_interval_k: u64,
    /// Probability of applying the best move at a local minimum even though
    /// it does not improve, instead of freezing the variable.
    pub escape_probability: f64,
    pub seed: u64,
}

impl EngineParams {
    /// Per-kind defaults.
    ///
    /// Magic squares get out of local minima through occasional sideways
    /// moves and the tabu list; `reset_limit` is a tenth of the cells, which
    /// the tenure keeps out of reach in practice. Costas arrays and
    /// all-interval series use `reset_limit = 1`, a reset at every local
    /// minimum. Costas arrays reshuffle everything, all-interval series a
    /// tenth of the positions, and all-interval series take most
    /// non-improving moves instead of stopping at them.
    pub fn defaults_for(spec: &ProblemSpec) -> Self {
        let num_vars = spec.num_vars();
        let n = spec.n() as u64;
        let (tabu_tenure, reset_limit, reset_fraction, escape_probability) = match spec.kind() {
            ProblemKind::MagicSquare => (10, (num_vars / 10).max(2), 0.1, 0.1),
            ProblemKind::CostasArray => (10, 1, 1.0, 0.0),
            ProblemKind::AllInterval => (10, 1, 0.1, 0.8),
        };
        EngineParams {
            tabu_tenure,
            reset_limit,
            reset_fraction,
            max_iterations: 100_000 * n,
            max_restarts: 10,
            comm_interval_k: 100,
            escape_probability,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.tabu_tenure == 0 {
            return fail("tabu_tenure must be positive");
        }
        if self.reset_limit == 0 {
            return fail("reset_limit must be positive");
        }
        if !(self.reset_fraction > 0.0 && self.reset_fraction <= 1.0) {
            return fail("reset_fraction must lie in (0, 1]");
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be positive");
        }
        if self.comm_interval_k == 0 {
            return fail("comm_interval_k must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.escape_probability) {
            return fail("escape_probability must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Short-term memory of frozen variables.
#[derive(Debug, Clone)]
pub struct TabuMemory {
    /// A variable is tabu at iteration `t` while `frozen_until[v] > t`.
    frozen_until: Vec<u64>,
}

impl TabuMemory {
    pub fn new(num_vars: usize) -> Self {
        TabuMemory {
            frozen_until: vec![0; num_vars],
        }
    }

    pub fn is_tabu(&self, var: usize, now: u64) -> bool {
        self.frozen_until[var] > now
    }

    /// Freezes `var` for the current iteration and the next `tenure` ones.
    pub fn freeze(&mut self, var: usize, now: u64, tenure: u64) {
        self.frozen_until[var] = now + 1 + tenure;
    }

    pub fn tabu_count(&self, now: u64) -> usize {
        self.frozen_until.iter().filter(|&&t| t > now).count()
    }

    pub fn clear(&mut self) {
        self.frozen_until.iter_mut().for_each(|t| *t = 0);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: u64,
    pub local_minima: u64,
    pub resets: u64,
    pub restarts: u64,
    /// Sum over iterations of the number of maximal-error candidates.
    pub tie_candidate_sum: u64,
    /// Configurations taken over from peers.
    pub adoptions: u64,
    pub wall_time: Duration,
}

impl RunStats {
    /// Mean size of the maximal-error candidate set per iteration.
    pub fn same_var_per_iteration(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.tie_candidate_sum as f64 / self.iterations as f64
        }
    }

    /// Equality of every counter, ignoring wall time.
    pub fn same_counters(&self, other: &RunStats) -> bool {
        RunStats {
            wall_time: Duration::ZERO,
            ..self.clone()
        } == RunStats {
            wall_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommDirective {
    Continue,
    Terminate,
    Adopt(Configuration),
}

/// Called by the engine every `comm_interval_k` iterations, and once more
/// when it reaches a solution.
pub trait CommHook {
    fn communicate(&mut self, engine: &Engine<'_>) -> CommDirective;
}

impl<F> CommHook for F
where
    F: FnMut(&Engine<'_>) -> CommDirective,
{
    fn communicate(&mut self, engine: &Engine<'_>) -> CommDirective {
        self(engine)
    }
}

/// Hook for purely sequential runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoComm;

impl CommHook for NoComm {
    fn communicate(&mut self, _: &Engine<'_>) -> CommDirective {
        CommDirective::Continue
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solved: bool,
    pub solution: Option<Configuration>,
    pub stats: RunStats,
    pub terminated_by_peer: bool,
}

/// Uniformly random non-tabu variable of maximal error, together with the
/// size of the maximal-error candidate set. `None` when every variable is
/// tabu.
pub fn select_worst_variable<R: Rng + ?Sized>(
    errors: &[u64],
    tabu: &TabuMemory,
    now: u64,
    rng: &mut R,
) -> Option<(usize, usize)> {
    let mut best = None;
    let mut best_err = 0;
    let mut ties = 0usize;
    for (v, &e) in errors.iter().enumerate() {
        if tabu.is_tabu(v, now) {
            continue;
        }
        if best.is_none() || e > best_err {
            best = Some(v);
            best_err = e;
            ties = 1;
        } else if e == best_err {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = Some(v);
            }
        }
    }
    best.map(|v| (v, ties))
}

/// Scans every swap partner of `var` and returns a uniformly random partner
/// among the best ones, with its cost delta.
///
/// Partners are ranked by [`Evaluator::swap_score`]. That is the plain cost
/// delta for magic squares and Costas arrays; for all-interval series the
/// ranking is led by a finer guidance score, so the chosen delta is minimal
/// only among partners of equal guidance.
pub fn select_min_conflict_move<R: Rng + ?Sized>(eval: &Evaluator<'_>, var: usize, rng: &mut R) -> (usize, i64) {
    let (partner, _) = best_swap(eval, var, rng);
    (partner, eval.delta_swap(var, partner))
}

fn best_swap<R: Rng + ?Sized>(eval: &Evaluator<'_>, var: usize, rng: &mut R) -> (usize, (i64, i64)) {
    let num_vars = eval.values().len();
    let mut best = var;
    let mut best_score = (i64::MAX, i64::MAX);
    let mut ties = 0u32;
    for j in (0..num_vars).filter(|&j| j != var) {
        let score = eval.swap_score(var, j);
        if score < best_score {
            best = j;
            best_score = score;
            ties = 1;
        } else if score == best_score {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = j;
            }
        }
    }
    (best, best_score)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Solved,
    /// Restart budget spent without a solution.
    Exhausted,
}

/// What happened during one call of [`Engine::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Improved {
        var: usize,
        partner: usize,
        delta: i64,
    },
    /// Local minimum left by applying the best non-improving move.
    Escaped {
        var: usize,
        partner: usize,
        delta: i64,
    },
    LocalMinimum {
        var: usize,
        reset: bool,
    },
    /// Every variable was tabu; a partial reset was forced and no iteration
    /// was counted.
    ForcedReset,
}

#[derive(Debug, Clone)]
pub struct Engine<'a> {
    spec: &'a ProblemSpec,
    params: EngineParams,
    rng: EngineRng,
    eval: Evaluator<'a>,
    tabu: TabuMemory,
    stats: RunStats,
    window_iterations: u64,
    errors: Vec<u64>,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a ProblemSpec, params: EngineParams) -> Result<Self> {
        params.validate()?;
        let mut rng = EngineRng::seed_from_u64(params.seed);
        let values = spec.random_values(&mut rng);
        Ok(Engine {
            spec,
            eval: Evaluator::new(spec, values),
            tabu: TabuMemory::new(spec.num_vars()),
            stats: RunStats::default(),
            window_iterations: 0,
            errors: vec![0; spec.num_vars()],
            params,
            rng,
        })
    }

    pub fn spec(&self) -> &'a ProblemSpec {
        self.spec
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn cost(&self) -> u64 {
        self.eval.cost()
    }

    pub fn values(&self) -> &[u32] {
        self.eval.values()
    }

    pub fn configuration(&self) -> Configuration {
        self.eval.configuration()
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn iterations(&self) -> u64 {
        self.stats.iterations
    }

    pub fn tabu(&self) -> &TabuMemory {
        &self.tabu
    }

    pub fn tabu_count(&self) -> usize {
        self.tabu.tabu_count(self.stats.iterations)
    }

    pub fn is_solved(&self) -> bool {
        self.eval.cost() == 0
    }

    /// One search iteration.
    pub fn step(&mut self) -> StepEvent {
        let now = self.stats.iterations;
        self.eval.variable_errors(&mut self.errors);
        let Some((var, ties)) = select_worst_variable(&self.errors, &self.tabu, now, &mut self.rng) else {
            self.partial_reset();
            return StepEvent::ForcedReset;
        };
        self.stats.tie_candidate_sum += ties as u64;

        let (partner, score) = best_swap(&self.eval, var, &mut self.rng);
        let delta = self.eval.delta_swap(var, partner);
        let escape = score >= (0, 0)
            && self.params.escape_probability > 0.0
            && self.rng.gen_bool(self.params.escape_probability);
        let event = if score < (0, 0) {
            self.eval.apply_swap(var, partner);
            StepEvent::Improved { var, partner, delta }
        } else if escape {
            self.eval.apply_swap(var, partner);
            StepEvent::Escaped { var, partner, delta }
        } else {
            self.stats.local_minima += 1;
            self.tabu.freeze(var, now, self.params.tabu_tenure);
            let reset = self.tabu.tabu_count(now) >= self.params.reset_limit;
            if reset {
                self.partial_reset();
            }
            StepEvent::LocalMinimum { var, reset }
        };
        self.stats.iterations += 1;
        self.window_iterations += 1;
        event
    }

    /// Reshuffles `ceil(reset_fraction * num_vars)` randomly chosen
    /// positions (at least two) among themselves and clears the tabu list.
    pub fn partial_reset(&mut self) {
        let num_vars = self.spec.num_vars();
        let amount = ((self.params.reset_fraction * num_vars as f64).ceil() as usize).clamp(2.min(num_vars), num_vars);
        let rng = &mut self.rng;
        self.eval.rewrite(|values| {
            let positions = index::sample(rng, num_vars, amount).into_vec();
            let mut picked: Vec<u32> = positions.iter().map(|&p| values[p]).collect();
            picked.shuffle(rng);
            for (&p, v) in positions.iter().zip(picked) {
                values[p] = v;
            }
        });
        self.tabu.clear();
        self.stats.resets += 1;
    }

    /// Starts over from a fresh random permutation.
    pub fn restart(&mut self) {
        let values = self.spec.random_values(&mut self.rng);
        self.eval.reset(&values);
        self.tabu.clear();
        self.window_iterations = 0;
        self.stats.restarts += 1;
    }

    /// Replaces the current configuration with `payload` if it is a valid
    /// permutation of strictly lower cost. Returns whether it was taken.
    pub fn adopt(&mut self, payload: &Configuration) -> bool {
        let Ok(cost) = self.spec.full_cost(payload.values()) else {
            return false;
        };
        debug_assert_eq!(cost, payload.cost(), "payload carries a stale cost");
        if cost >= self.eval.cost() {
            return false;
        }
        self.eval.reset(payload.values());
        self.tabu.clear();
        self.stats.adoptions += 1;
        true
    }

    /// Performs one unit of work: a restart when the current window is used
    /// up, otherwise a search step.
    pub fn advance(&mut self) -> Status {
        if self.is_solved() {
            return Status::Solved;
        }
        if self.window_iterations >= self.params.max_iterations {
            if self.stats.restarts >= self.params.max_restarts as u64 {
                return Status::Exhausted;
            }
            self.restart();
        } else {
            self.step();
        }
        if self.is_solved() {
            Status::Solved
        } else {
            Status::Running
        }
    }

    /// Applies a hook's answer. Returns `true` when the walk must stop.
    pub fn apply(&mut self, directive: CommDirective) -> bool {
        match directive {
            CommDirective::Continue => false,
            CommDirective::Terminate => true,
            CommDirective::Adopt(payload) => {
                self.adopt(&payload);
                false
            }
        }
    }

    /// Runs until a solution is found, the hook asks to stop, or the restart
    /// budget is spent.
    pub fn run<H: CommHook + ?Sized>(mut self, hook: &mut H) -> SolveOutcome {
        let start = Instant::now();
        let k = self.params.comm_interval_k;
        let mut last_call = None;
        let mut terminated_by_peer = false;
        loop {
            match self.advance() {
                Status::Solved => {
                    hook.communicate(&self);
                    break;
                }
                Status::Exhausted => break,
                Status::Running => {}
            }
            let it = self.stats.iterations;
            if it.is_multiple_of(k) && last_call != Some(it) {
                last_call = Some(it);
                if self.apply(hook.communicate(&self)) {
                    terminated_by_peer = true;
                    break;
                }
            }
        }
        self.finish(start.elapsed(), terminated_by_peer)
    }

    /// Wraps up a walk driven from outside [`Engine::run`].
    pub fn finish(mut self, wall_time: Duration, terminated_by_peer: bool) -> SolveOutcome {
        self.stats.wall_time = wall_time;
        let solved = self.is_solved();
        SolveOutcome {
            solved,
            solution: solved.then(|| self.configuration()),
            stats: self.stats,
            terminated_by_peer,
        }
    }
}

pub fn solve<H: CommHook + ?Sized>(spec: &ProblemSpec, params: EngineParams, hook: &mut H) -> Result<SolveOutcome> {
    Ok(Engine::new(spec, params)?.run(hook))
}

/// Sequential solve without communication.
pub fn solve_sequential(spec: &ProblemSpec, params: EngineParams) -> Result<SolveOutcome> {
    solve(spec, params, &mut NoComm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::validate;

    fn rng(seed: u64) -> EngineRng {
        EngineRng::seed_from_u64(seed)
    }

    #[test]
    fn worst_variable_ties() {
        let tabu = TabuMemory::new(4);
        let (v, ties) = select_worst_variable(&[0, 5, 5, 2], &tabu, 0, &mut rng(1)).unwrap();
        assert!(v == 1 || v == 2);
        assert_eq!(ties, 2);
    }

    #[test]
    fn worst_variable_skips_tabu() {
        let mut tabu = TabuMemory::new(4);
        tabu.freeze(1, 0, 3);
        assert_eq!(
            select_worst_variable(&[0, 5, 5, 2], &tabu, 0, &mut rng(1)),
            Some((2, 1))
        );
        // frozen through iteration 3, free again at 4
        assert!(tabu.is_tabu(1, 3));
        assert!(!tabu.is_tabu(1, 4));
    }

    #[test]
    fn all_tabu_yields_none() {
        let mut tabu = TabuMemory::new(2);
        tabu.freeze(0, 0, 1);
        tabu.freeze(1, 0, 1);
        assert_eq!(select_worst_variable(&[1, 1], &tabu, 0, &mut rng(1)), None);
    }

    #[test]
    fn worst_variable_is_uniform_among_ties() {
        // 10^4 fair draws: sd = 50, so +-3 sd is +-150 around 5000.
        let tabu = TabuMemory::new(2);
        let mut r = rng(99);
        let firsts = (0..10_000)
            .filter(|_| select_worst_variable(&[5, 5], &tabu, 0, &mut r).unwrap().0 == 0)
            .count();
        assert!((4850..=5150).contains(&firsts), "{firsts}");
    }

    #[test]
    fn min_conflict_finds_the_solving_swap() {
        let spec = ProblemSpec::new(ProblemKind::MagicSquare, 3).unwrap();
        // Lo-Shu with cells 0 and 8 exchanged
        let eval = Evaluator::new(&spec, vec![8, 7, 6, 9, 5, 1, 4, 3, 2]);
        let cost = eval.cost() as i64;
        assert!(cost > 0);
        assert_eq!(select_min_conflict_move(&eval, 0, &mut rng(3)), (8, -cost));
    }

    #[test]
    fn terminate_on_first_call() {
        let spec = ProblemSpec::new(ProblemKind::CostasArray, 12).unwrap();
        let params = EngineParams::defaults_for(&spec).with_seed(5);
        let k = params.comm_interval_k;
        let mut calls = 0;
        let out = solve(&spec, params, &mut |_: &Engine<'_>| {
            calls += 1;
            CommDirective::Terminate
        })
        .unwrap();
        assert_eq!(calls, 1);
        assert!(out.terminated_by_peer);
        assert!(!out.solved);
        assert!(out.stats.iterations <= k);
    }

    #[test]
    fn improving_step_decreases_cost() {
        let spec = ProblemSpec::new(ProblemKind::CostasArray, 12).unwrap();
        let mut engine = Engine::new(&spec, EngineParams::defaults_for(&spec)).unwrap();
        for _ in 0..500 {
            let before = engine.cost();
            let minima = engine.stats().local_minima;
            match engine.step() {
                StepEvent::Improved { .. } => assert!(engine.cost() < before),
                StepEvent::LocalMinimum { .. } | StepEvent::Escaped { .. } => {
                    assert_eq!(engine.stats().local_minima, minima + 1)
                }
                StepEvent::ForcedReset => unreachable!(),
            }
            if engine.is_solved() {
                break;
            }
        }
    }

    #[test]
    fn local_minimum_freezes_variable() {
        let spec = ProblemSpec::new(ProblemKind::MagicSquare, 6).unwrap();
        let mut params = EngineParams::defaults_for(&spec);
        params.reset_limit = 36;
        let mut engine = Engine::new(&spec, params).unwrap();
        let mut seen = false;
        for _ in 0..10_000 {
            let minima = engine.stats().local_minima;
            let now = engine.iterations();
            if let StepEvent::LocalMinimum { var, reset: false } = engine.step() {
                assert_eq!(engine.stats().local_minima, minima + 1);
                assert!(engine.tabu().is_tabu(var, now + 1));
                seen = true;
                break;
            }
        }
        assert!(seen);
    }

    #[test]
    fn certain_escape_never_stops_at_a_minimum() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 12).unwrap();
        let mut params = EngineParams::defaults_for(&spec);
        params.escape_probability = 1.0;
        let mut engine = Engine::new(&spec, params).unwrap();
        let mut escapes = 0;
        for _ in 0..2_000 {
            if engine.is_solved() {
                engine.restart();
            }
            let before = engine.cost();
            match engine.step() {
                StepEvent::Escaped { delta, .. } => {
                    assert!(delta >= 0);
                    assert_eq!(engine.cost() as i64, before as i64 + delta);
                    escapes += 1;
                }
                StepEvent::Improved { .. } => {}
                other => panic!("{other:?}"),
            }
        }
        assert!(escapes > 0);
        assert_eq!(engine.stats().local_minima, 0);
    }

    #[test]
    fn partial_reset_keeps_untouched_positions_mostly() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 40).unwrap();
        let mut params = EngineParams::defaults_for(&spec);
        params.reset_fraction = 0.1;
        let mut engine = Engine::new(&spec, params).unwrap();
        for _ in 0..200 {
            let before = engine.values().to_vec();
            engine.partial_reset();
            let changed = before.iter().zip(engine.values()).filter(|(a, b)| a != b).count();
            assert!(changed <= 4, "{changed}");
            assert!(spec.check_permutation(engine.values()).is_ok());
            assert_eq!(engine.tabu_count(), 0);
        }
    }

    #[test]
    fn restart_clears_tabu() {
        let spec = ProblemSpec::new(ProblemKind::MagicSquare, 4).unwrap();
        let mut engine = Engine::new(&spec, EngineParams::defaults_for(&spec)).unwrap();
        engine.tabu.freeze(3, 0, 10);
        assert_eq!(engine.tabu_count(), 1);
        engine.restart();
        assert_eq!(engine.tabu_count(), 0);
        assert_eq!(engine.stats().restarts, 1);
        assert_eq!(engine.cost(), spec.full_cost(engine.values()).unwrap());
    }

    #[test]
    fn adopt_requires_strict_improvement() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 8).unwrap();
        let mut engine = Engine::new(&spec, EngineParams::defaults_for(&spec).with_seed(2)).unwrap();
        let own = engine.configuration();
        assert!(!engine.adopt(&own));
        let solution = Configuration::new(&spec, vec![0, 7, 1, 6, 2, 5, 3, 4]).unwrap();
        assert_eq!(solution.cost(), 0);
        engine.tabu.freeze(1, engine.iterations(), 5);
        assert!(engine.adopt(&solution));
        assert_eq!(engine.cost(), 0);
        assert_eq!(engine.tabu_count(), 0);
        assert_eq!(engine.stats().adoptions, 1);
        assert_eq!(engine.stats().restarts, 0);
        assert!(!engine.adopt(&solution));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 8).unwrap();
        let base = EngineParams::defaults_for(&spec);
        for bad in [
            EngineParams {
                reset_fraction: 0.0,
                ..base.clone()
            },
            EngineParams {
                reset_fraction: 1.5,
                ..base.clone()
            },
            EngineParams {
                comm_interval_k: 0,
                ..base.clone()
            },
            EngineParams {
                tabu_tenure: 0,
                ..base.clone()
            },
            EngineParams {
                reset_limit: 0,
                ..base.clone()
            },
        ] {
            assert!(Engine::new(&spec, bad).is_err());
        }
    }

    #[test]
    fn sequential_solve_is_sound_and_deterministic() {
        for kind in ProblemKind::ALL {
            let spec = ProblemSpec::new(kind, 8).unwrap();
            let params = EngineParams::defaults_for(&spec).with_seed(17);
            let a = solve_sequential(&spec, params.clone()).unwrap();
            let b = solve_sequential(&spec, params).unwrap();
            assert!(a.solved, "{kind}");
            let sol = a.solution.as_ref().unwrap();
            assert!(validate::is_valid_solution(&spec, sol.values()));
            assert_eq!(a.solution, b.solution);
            assert!(a.stats.same_counters(&b.stats));
        }
    }
}
