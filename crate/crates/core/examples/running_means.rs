//! Several seeded growth runs on a coarse grid and the prefix means of the
//! eight reported quantities.
//!
//!     cargo run --release --example running_means -- [runs]

use microvasc::config::RunConfig;
use microvasc::runner::cmd_stats;
use microvasc::statistics::QUANTITY_NAMES;

fn main() -> microvasc::Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let mut cfg = RunConfig {
        output: std::env::temp_dir().join("microvasc_running_means"),
        cells: [12, 12, 12],
        ..Default::default()
    };
    cfg.export.checkpoints = false;
    let out = cmd_stats(&cfg, runs)?;
    println!("{} runs, {} reused from an earlier invocation", out.runs.len(), out.resumed);
    for (i, row) in out.means.rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:10.3e}")).collect();
        println!("{:3} {}", i + 1, cells.join(" "));
    }
    println!("    {}", QUANTITY_NAMES.map(|q| format!("{q:>10}")).join(" "));
    println!("tables in {}", cfg.output.display());
    Ok(())
}
