//! Two-terminal reliability of a small network: compile "some path
//! survives" into a diagram and read the probability off it.
//!
//!     cargo run --example reliability

use scenbdd::probability::prob;
use scenbdd::recourse::{enumerate_shortest_paths, EnumerationLimits};
use scenbdd::{compile_monotone, parse_instance, OrderingHeuristic, DEFAULT_NODE_CAP};

const BRIDGE: &str = "\
[meta] mode=shortest_path directed=0 source=s sink=t penalty=100
[nodes]
s
a
b
t
[edges]
s a 1 0.9 0 0 0
s b 1 0.9 0 0 0
a b 1 0.9 0 0 0
a t 1 0.9 0 0 0
b t 1 0.9 0 0 0
";

fn main() -> scenbdd::Result<()> {
    let inst = parse_instance(BRIDGE)?;
    let ladder = enumerate_shortest_paths(&inst, &EnumerationLimits::default())?;
    // every simple path, regardless of length
    let paths: Vec<_> = ladder.all_points().cloned().collect();
    for p in &paths {
        println!("path {p}");
    }
    let order = scenbdd::order::order_edges(inst.num_edges(), &paths, &OrderingHeuristic::OccurrenceAscending)?;
    let bdd = compile_monotone(&paths, &order, DEFAULT_NODE_CAP)?;
    println!("diagram: {} internal nodes, order {:?}", bdd.internal_nodes(), bdd.order());
    println!("P[s and t connected] = {}", prob(&bdd, &inst.probabilities()));
    print!("{}", bdd.dump());
    Ok(())
}
