//! Choose which edges to reinforce: every budget-feasible decision is
//! evaluated on the compiled diagrams and checked against brute force.
//!
//!     cargo run --example optimize [instance-file]

use scenbdd::optimize::feasible_decisions;
use scenbdd::{
    compile_ladder, enumerate_ladder, evaluate, oracle_best_decision, parse_instance, solve_by_enumeration,
    EnumerationLimits, OrderScope,
};

fn main() -> scenbdd::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/grid5.inst").to_string());
    let inst = parse_instance(&std::fs::read_to_string(&path)?)?;
    let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
    let compiled = compile_ladder(&ladder, &Default::default(), OrderScope::Shared, scenbdd::DEFAULT_NODE_CAP)?;
    for x in feasible_decisions(&inst, 20)? {
        let r = evaluate(&inst, &ladder, &compiled, &x)?;
        println!("x={x} cost={} expected={:.6}", inst.decision_cost(&x), r.expected_value);
    }
    let best = solve_by_enumeration(&inst, &ladder, &compiled, 20)?;
    let truth = oracle_best_decision(&inst)?;
    println!("best x={} value={}", best.x, best.value);
    println!("brute force x={} value={}", truth.x, truth.value);
    Ok(())
}
