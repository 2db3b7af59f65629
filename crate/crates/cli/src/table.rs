//! Plain-text tables for the terminal.

use crate::report::Aggregate;

/// Table-1 style summary: one line per instance.
pub fn render_stats_table(aggs: &[Aggregate]) -> String {
    let mut out = format!(
        "{:<20} {:>7} {:>10} {:>14} {:>14} {:>10} {:>9}\n",
        "Problem", "Solved", "Time (s)", "Iterations", "Local Minima", "Resets", "Same var"
    );
    for a in aggs {
        let name = format!("{} {}", a.config.problem, a.config.n);
        let solved = format!("{}/{}", a.solved, a.runs);
        match &a.stats {
            Some(s) => out.push_str(&format!(
                "{:<20} {:>7} {:>10.3} {:>14.2} {:>14.2} {:>10.2} {:>9.2}\n",
                name,
                solved,
                s.wall_ms.mean / 1e3,
                s.iterations,
                s.local_minima,
                s.resets,
                s.same_var_avg
            )),
            None => out.push_str(&format!("{name:<20} {solved:>7} {:>10}\n", "-")),
        }
    }
    out
}

/// Median times of every configuration next to its speedup over `baseline`.
pub fn render_speedup_table(baseline: &Aggregate, others: &[Aggregate]) -> String {
    let fmt_ms = |a: &Aggregate| a.median_wall_ms().map_or("-".to_string(), |m| format!("{m:.3}"));
    let mut out = format!(
        "baseline {}: median {} ms, solved {}/{}\n{:<36} {:>8} {:>14} {:>9}\n",
        baseline.config.label(),
        fmt_ms(baseline),
        baseline.solved,
        baseline.runs,
        "configuration",
        "solved",
        "median (ms)",
        "speedup"
    );
    for a in others {
        let speedup = a.speedup_over(baseline).map_or("-".to_string(), |s| format!("{s:.3}"));
        out.push_str(&format!(
            "{:<36} {:>8} {:>14} {:>9}\n",
            a.config.label(),
            format!("{}/{}", a.solved, a.runs),
            fmt_ms(a),
            speedup
        ));
    }
    out
}
