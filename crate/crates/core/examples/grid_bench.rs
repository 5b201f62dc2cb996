//! Diagram sizes on random grid road networks, in the layout of the
//! published benchmark table.
//!
//!     cargo run --release --example grid_bench -- [max_n] [samples] [last]
//!
//! `last` reports the last level's diagram per pair instead of the sum
//! over all levels.

use scenbdd::bench::{format_table, run_grid_bench, BenchConfig, SizeMeasure};

fn main() -> scenbdd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_n: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(2);
    let samples: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(32);
    let measure = match args.get(2).map(String::as_str) {
        Some("last") => SizeMeasure::LastLevel,
        _ => SizeMeasure::Summed,
    };
    let mut results = Vec::new();
    for alpha in [Some(1.1), Some(1.5), None] {
        for n in 1..=max_n {
            let cfg = BenchConfig {
                n,
                samples,
                alpha_factor: alpha,
                measure,
                ..BenchConfig::default()
            };
            results.push(run_grid_bench(&cfg)?);
        }
    }
    print!("{}", format_table(&results));
    Ok(())
}
