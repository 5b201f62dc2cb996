//! Stochastic network interdiction on the 3x3 grid: the optimal expected
//! maximum flow for every attack budget.
//!
//!     cargo run --release --example snip_sweep

use scenbdd::{compile_ladder, enumerate_ladder, parse_instance, solve_by_enumeration, EnumerationLimits, OrderScope};

fn main() -> scenbdd::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snip3x3.inst");
    let mut inst = parse_instance(&std::fs::read_to_string(path)?)?;
    let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
    let compiled = compile_ladder(&ladder, &Default::default(), OrderScope::Shared, scenbdd::DEFAULT_NODE_CAP)?;
    println!("flow levels: {:?}", ladder.alphas());
    println!("{:>6} {:>12}  attacked", "budget", "E[max flow]");
    for budget in 0..=inst.num_edges() {
        inst.budget = budget as f64;
        let s = solve_by_enumeration(&inst, &ladder, &compiled, 24)?;
        let arcs: Vec<String> = s.x.taken().map(|e| e.to_string()).collect();
        println!("{budget:>6} {:>12.6}  {}", s.value, arcs.join(","));
    }
    Ok(())
}
