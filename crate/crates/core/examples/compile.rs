//! Compile every ladder level under each ordering heuristic and compare
//! the diagram sizes.
//!
//!     cargo run --example compile [instance-file]

use scenbdd::{compile_ladder, enumerate_ladder, parse_instance, EnumerationLimits, OrderScope, OrderingHeuristic};

fn main() -> scenbdd::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snip3x3.inst").to_string());
    let inst = parse_instance(&std::fs::read_to_string(&path)?)?;
    let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
    let heuristics = [
        ("occurrence", OrderingHeuristic::OccurrenceAscending),
        ("cuthill-mckee", OrderingHeuristic::CuthillMcKeeLike),
        ("identity", OrderingHeuristic::Identity),
    ];
    println!("{:<14} {:>8} {:>10} {:>10}", "order", "scope", "nodes", "size");
    for (name, h) in &heuristics {
        for scope in [OrderScope::Shared, OrderScope::PerLevel] {
            let c = compile_ladder(&ladder, h, scope, scenbdd::DEFAULT_NODE_CAP)?;
            let label = if scope == OrderScope::Shared { "shared" } else { "level" };
            println!("{name:<14} {label:>8} {:>10} {:>10}", c.total_internal_nodes(), c.total_size());
        }
    }
    Ok(())
}
