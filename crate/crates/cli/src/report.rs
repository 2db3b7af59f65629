//! Per-run rows, aggregates, and their CSV/JSON forms.
//!
//! A CSV result file holds one row per run and, after the rows, one
//! `# aggregate ...` comment line per configuration. The footer is for human
//! readers only; aggregates are always recomputed from the rows.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: u32,
    pub problem: String,
    pub n: usize,
    pub variant: String,
    pub workers: usize,
    pub k: u64,
    pub seed: u64,
    pub solved: bool,
    pub wall_ms: f64,
    pub iterations: u64,
    pub local_minima: u64,
    pub resets: u64,
    pub restarts: u64,
    pub same_var_avg: f64,
    pub winner_rank: Option<usize>,
    pub adoptions: u64,
    pub propagations: u64,
}

impl RunRow {
    /// The columns that do not depend on timing.
    pub fn without_time(&self) -> RunRow {
        RunRow {
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Identifies one experiment configuration among result rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigKey {
    pub problem: String,
    pub n: usize,
    pub variant: String,
    pub workers: usize,
    pub k: u64,
}

impl ConfigKey {
    pub fn of(row: &RunRow) -> Self {
        ConfigKey {
            problem: row.problem.clone(),
            n: row.n,
            variant: row.variant.clone(),
            workers: row.workers,
            k: row.k,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{} n={} {} P={} k={}",
            self.problem, self.n, self.variant, self.workers, self.k
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let len = sorted.len();
        let median = if len % 2 == 1 {
            sorted[len / 2]
        } else {
            (sorted[len / 2 - 1] + sorted[len / 2]) / 2.0
        };
        Some(Summary {
            mean: sorted.iter().sum::<f64>() / len as f64,
            median,
            min: sorted[0],
            max: sorted[len - 1],
        })
    }
}

/// Means over the solved runs of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedStats {
    pub wall_ms: Summary,
    pub iterations: f64,
    pub local_minima: f64,
    pub resets: f64,
    pub restarts: f64,
    pub same_var_avg: f64,
    pub adoptions: f64,
    pub propagations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config: ConfigKey,
    pub runs: usize,
    pub solved: usize,
    pub solve_rate: f64,
    /// `None` when no run solved the instance.
    pub stats: Option<SolvedStats>,
}

impl Aggregate {
    /// Aggregates rows of one configuration. Unsolved runs only count
    /// towards the solve rate.
    pub fn from_rows(rows: &[RunRow]) -> Result<Self> {
        let Some(first) = rows.first() else {
            bail!("no rows to aggregate");
        };
        let config = ConfigKey::of(first);
        if rows.iter().any(|r| ConfigKey::of(r) != config) {
            bail!("rows mix several configurations");
        }
        let solved: Vec<&RunRow> = rows.iter().filter(|r| r.solved).collect();
        let mean = |f: fn(&RunRow) -> f64| solved.iter().map(|r| f(r)).sum::<f64>() / solved.len() as f64;
        let stats = Summary::of(&solved.iter().map(|r| r.wall_ms).collect::<Vec<_>>()).map(|wall_ms| SolvedStats {
            wall_ms,
            iterations: mean(|r| r.iterations as f64),
            local_minima: mean(|r| r.local_minima as f64),
            resets: mean(|r| r.resets as f64),
            restarts: mean(|r| r.restarts as f64),
            same_var_avg: mean(|r| r.same_var_avg),
            adoptions: mean(|r| r.adoptions as f64),
            propagations: mean(|r| r.propagations as f64),
        });
        Ok(Aggregate {
            config,
            runs: rows.len(),
            solved: solved.len(),
            solve_rate: solved.len() as f64 / rows.len() as f64,
            stats,
        })
    }

    /// Aggregates of every configuration present, in order of appearance.
    pub fn group(rows: &[RunRow]) -> Result<Vec<Self>> {
        let mut keys: Vec<ConfigKey> = Vec::new();
        for r in rows {
            let key = ConfigKey::of(r);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.iter()
            .map(|key| {
                let mine: Vec<RunRow> = rows.iter().filter(|r| ConfigKey::of(r) == *key).cloned().collect();
                Aggregate::from_rows(&mine)
            })
            .collect()
    }

    pub fn median_wall_ms(&self) -> Option<f64> {
        self.stats.as_ref().map(|s| s.wall_ms.median)
    }

    /// Ratio of median wall times, `baseline / self`.
    pub fn speedup_over(&self, baseline: &Aggregate) -> Option<f64> {
        Some(baseline.median_wall_ms()? / self.median_wall_ms()?)
    }

    pub fn footer_line(&self) -> String {
        let c = &self.config;
        let mut line = format!(
            "# aggregate problem={} n={} variant={} workers={} k={} runs={} solved={} solve_rate={:.4}",
            c.problem, c.n, c.variant, c.workers, c.k, self.runs, self.solved, self.solve_rate
        );
        if let Some(s) = &self.stats {
            line.push_str(&format!(
                " wall_ms_mean={:.3} wall_ms_median={:.3} wall_ms_min={:.3} wall_ms_max={:.3} \
                 iterations={:.2} local_minima={:.2} resets={:.2} restarts={:.2} same_var_avg={:.3} \
                 adoptions={:.2} propagations={:.2}",
                s.wall_ms.mean,
                s.wall_ms.median,
                s.wall_ms.min,
                s.wall_ms.max,
                s.iterations,
                s.local_minima,
                s.resets,
                s.restarts,
                s.same_var_avg,
                s.adoptions,
                s.propagations
            ));
        }
        line
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[RunRow]) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    for agg in Aggregate::group(rows)? {
        writeln!(out, "{}", agg.footer_line())?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    reader
        .deserialize()
        .map(|r| r.context("malformed result row"))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonReport {
    rows: Vec<RunRow>,
    aggregates: Vec<Aggregate>,
}

pub fn write_json<W: Write>(out: W, rows: &[RunRow]) -> Result<()> {
    let report = JsonReport {
        rows: rows.to_vec(),
        aggregates: Aggregate::group(rows)?,
    };
    serde_json::to_writer_pretty(out, &report)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<RunRow>> {
    let report: JsonReport = serde_json::from_reader(input)?;
    Ok(report.rows)
}

/// Reads a result file, picking the format from the extension.
pub fn read_results(path: &Path) -> Result<Vec<RunRow>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let reader = BufReader::new(file);
    let rows = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_json(reader),
        _ => read_csv(reader),
    }
    .with_context(|| format!("cannot read {}", path.display()))?;
    if rows.is_empty() {
        bail!("{} holds no result rows", path.display());
    }
    Ok(rows)
}
