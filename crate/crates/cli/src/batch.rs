use std::time::Instant;

use anyhow::Result;
use paras_core::{run_parallel, solve_sequential, validate, ProblemSpec};

use crate::config::ExperimentConfig;
use crate::report::{Aggregate, RunRow};

/// Runs one solve of `cfg` with the seed of `run_index`.
///
/// Wall time covers the search only: for sequential runs the engine loop,
/// for parallel runs everything from thread start to the last join.
pub fn run_once(cfg: &ExperimentConfig, spec: &ProblemSpec, run_index: u32) -> Result<RunRow> {
    let params = cfg.engine_params(spec, run_index);
    let seed = params.seed;
    let row = |solved, wall_ms, stats: &paras_core::RunStats, winner_rank, adoptions, propagations| RunRow {
        run_id: run_index,
        problem: cfg.problem.name().to_string(),
        n: cfg.n,
        variant: cfg.mode.name().to_string(),
        workers: cfg.worker_count(),
        k: cfg.k,
        seed,
        solved,
        wall_ms,
        iterations: stats.iterations,
        local_minima: stats.local_minima,
        resets: stats.resets,
        restarts: stats.restarts,
        same_var_avg: stats.same_var_per_iteration(),
        winner_rank,
        adoptions,
        propagations,
    };
    match cfg.parallel_params() {
        None => {
            let out = solve_sequential(spec, params)?;
            let solved = out
                .solution
                .as_ref()
                .is_some_and(|s| validate::is_valid_solution(spec, s.values()));
            let ms = out.stats.wall_time.as_secs_f64() * 1e3;
            Ok(row(solved, ms, &out.stats, solved.then_some(0), 0, 0))
        }
        Some(pp) => {
            let out = run_parallel(spec, &params, &pp)?;
            let ms = out.wall_time.as_secs_f64() * 1e3;
            Ok(row(
                out.solved,
                ms,
                out.representative_stats(),
                out.winner_rank,
                out.adoptions(),
                out.propagations(),
            ))
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub rows: Vec<RunRow>,
    pub aggregate: Aggregate,
    pub elapsed_s: f64,
}

/// Runs all `cfg.runs` solves one after the other. A run that fails to
/// solve is recorded as such and the batch goes on.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<BatchResult> {
    run_batch_with(cfg, |_| {})
}

/// Like [`run_batch`], calling `progress` after every run.
pub fn run_batch_with(cfg: &ExperimentConfig, mut progress: impl FnMut(&RunRow)) -> Result<BatchResult> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let start = Instant::now();
    let mut rows = Vec::with_capacity(cfg.runs as usize);
    for i in 0..cfg.runs {
        let row = run_once(cfg, &spec, i)?;
        progress(&row);
        rows.push(row);
    }
    let aggregate = Aggregate::from_rows(&rows)?;
    Ok(BatchResult {
        rows,
        aggregate,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}
