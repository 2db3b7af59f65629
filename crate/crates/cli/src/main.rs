use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use paras_cli::config::{build_experiments, parse_config, OutputFormat};
use paras_cli::table::{render_speedup_table, render_stats_table};
use paras_cli::{read_results, run_batch_with, write_csv, write_json, Aggregate, RunRow};
use paras_core::{run_parallel, solve_sequential, ProblemKind, ProblemSpec};

#[derive(Parser)]
#[command(name = "paras", version, about = "Parallel Adaptive Search for permutation problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the solution with its statistics.
    Solve(ExperimentArgs),
    /// Run an experiment repeatedly and write per-run results.
    Bench(ExperimentArgs),
    /// Sequential statistics (iterations, local minima, resets, ties) per instance.
    StatsTable(StatsArgs),
    /// Compare median wall times of result files against a baseline file.
    Speedup(SpeedupArgs),
}

#[derive(Args, Default)]
struct ExperimentArgs {
    /// key=value settings file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    size: Option<usize>,
    /// seq, tdo or poc.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    arity: Option<usize>,
    /// Communication interval; `bench` accepts a comma-separated list.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tabu_tenure: Option<u64>,
    #[arg(long)]
    reset_limit: Option<usize>,
    #[arg(long)]
    reset_fraction: Option<f64>,
    #[arg(long)]
    max_iterations: Option<u64>,
    #[arg(long)]
    max_restarts: Option<u32>,
    #[arg(long)]
    escape_probability: Option<f64>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Result file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn settings(&self) -> Result<Vec<(String, String)>> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                parse_config(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => Vec::new(),
        };
        let mut set = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                pairs.push((key.to_string(), v));
            }
        };
        set("problem", self.problem.clone());
        set("size", self.size.map(|v| v.to_string()));
        set("variant", self.variant.clone());
        set("workers", self.workers.map(|v| v.to_string()));
        set("arity", self.arity.map(|v| v.to_string()));
        set("k", self.k.clone());
        set("runs", self.runs.map(|v| v.to_string()));
        set("seed", self.seed.map(|v| v.to_string()));
        set("tabu_tenure", self.tabu_tenure.map(|v| v.to_string()));
        set("reset_limit", self.reset_limit.map(|v| v.to_string()));
        set("reset_fraction", self.reset_fraction.map(|v| v.to_string()));
        set("max_iterations", self.max_iterations.map(|v| v.to_string()));
        set("max_restarts", self.max_restarts.map(|v| v.to_string()));
        set("escape_probability", self.escape_probability.map(|v| v.to_string()));
        set("format", self.format.clone());
        set("output", self.output.as_ref().map(|p| p.display().to_string()));
        Ok(pairs)
    }
}

#[derive(Args)]
struct StatsArgs {
    /// Instances as kind:size, e.g. costas:14.
    #[arg(long = "instance", required = true)]
    instances: Vec<String>,
    #[arg(long, default_value_t = 100)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the per-run rows (CSV) here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpeedupArgs {
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long = "parallel", required = true)]
    parallel: Vec<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Bench(args) => bench(&args),
        Command::StatsTable(args) => stats_table(&args),
        Command::Speedup(args) => speedup(&args),
    }
}

fn solve(args: &ExperimentArgs) -> Result<ExitCode> {
    let mut configs = build_experiments(&args.settings()?)?;
    if configs.len() != 1 {
        bail!("solve takes a single value of k");
    }
    let cfg = configs.remove(0);
    let spec = cfg.spec()?;
    let params = cfg.engine_params(&spec, 0);
    let (solution, stats, wall, winner) = match cfg.parallel_params() {
        None => {
            let out = solve_sequential(&spec, params)?;
            let wall = out.stats.wall_time;
            (out.solution, out.stats, wall, None)
        }
        Some(pp) => {
            let out = run_parallel(&spec, &params, &pp)?;
            let stats = out.representative_stats().clone();
            (out.solution, stats, out.wall_time, out.winner_rank)
        }
    };
    println!(
        "problem      {} n={} ({} workers, {})",
        cfg.problem,
        cfg.n,
        cfg.worker_count(),
        cfg.mode
    );
    println!("seed         {}", cfg.seed);
    println!("wall time    {:.3} ms", wall.as_secs_f64() * 1e3);
    println!("iterations   {}", stats.iterations);
    println!("local minima {}", stats.local_minima);
    println!("resets       {}", stats.resets);
    println!("restarts     {}", stats.restarts);
    println!("same var     {:.3}", stats.same_var_per_iteration());
    if let Some(w) = winner {
        println!("winner       rank {w}");
    }
    match solution {
        Some(s) => {
            assert!(spec.is_solution(&s));
            println!("solution     {}", render_solution(&spec, s.values()));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("no solution within the iteration budget");
            Ok(ExitCode::from(1))
        }
    }
}

fn render_solution(spec: &ProblemSpec, values: &[u32]) -> String {
    let joined = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    match spec.kind() {
        ProblemKind::MagicSquare => {
            let rows: Vec<String> = values.chunks(spec.n()).map(joined).collect();
            format!("\n  {}", rows.join("\n  "))
        }
        _ => joined(values),
    }
}

fn bench(args: &ExperimentArgs) -> Result<ExitCode> {
    let configs = build_experiments(&args.settings()?)?;
    let (format, output) = (configs[0].format, configs[0].output.clone());
    // fail before running anything if the output cannot be written
    let sink: Box<dyn Write> = match &output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let mut rows: Vec<RunRow> = Vec::new();
    for cfg in &configs {
        let total = cfg.runs;
        let res = run_batch_with(cfg, |row| {
            eprint!("\r{} k={}: run {}/{}", cfg.problem, cfg.k, row.run_id + 1, total);
        })?;
        eprintln!();
        eprintln!("{}", res.aggregate.footer_line());
        rows.extend(res.rows);
    }
    write_rows(sink, format, &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn write_rows(mut sink: Box<dyn Write>, format: OutputFormat, rows: &[RunRow]) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&mut sink, rows)?,
        OutputFormat::Json => write_json(&mut sink, rows)?,
    }
    sink.flush()?;
    Ok(())
}

fn stats_table(args: &StatsArgs) -> Result<ExitCode> {
    let mut pairs_per_instance = Vec::new();
    for inst in &args.instances {
        let (kind, size) = inst
            .split_once(':')
            .with_context(|| format!("instance `{inst}` is not kind:size"))?;
        pairs_per_instance.push(vec![
            ("problem".to_string(), kind.to_string()),
            ("size".to_string(), size.to_string()),
            ("runs".to_string(), args.runs.to_string()),
            ("seed".to_string(), args.seed.to_string()),
        ]);
    }
    let configs = pairs_per_instance
        .iter()
        .map(|p| build_experiments(p).map(|mut c| c.remove(0)))
        .collect::<Result<Vec<_>>>()?;
    let sink = match &args.output {
        Some(path) => Some(File::create(path).with_context(|| format!("cannot write {}", path.display()))?),
        None => None,
    };
    let mut rows = Vec::new();
    let mut aggs = Vec::new();
    for cfg in &configs {
        let res = run_batch_with(cfg, |row| {
            eprint!("\r{} {}: run {}", cfg.problem, cfg.n, row.run_id + 1)
        })?;
        eprintln!();
        aggs.push(res.aggregate);
        rows.extend(res.rows);
    }
    print!("{}", render_stats_table(&aggs));
    if let Some(file) = sink {
        write_rows(Box::new(BufWriter::new(file)), OutputFormat::Csv, &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn speedup(args: &SpeedupArgs) -> Result<ExitCode> {
    let base_rows = read_results(&args.baseline)?;
    let base = Aggregate::group(&base_rows)?;
    if base.len() != 1 {
        bail!(
            "baseline file must hold exactly one configuration, found {}",
            base.len()
        );
    }
    let mut others = Vec::new();
    for path in &args.parallel {
        others.extend(Aggregate::group(&read_results(path)?)?);
    }
    print!("{}", render_speedup_table(&base[0], &others));
    Ok(ExitCode::SUCCESS)
}
