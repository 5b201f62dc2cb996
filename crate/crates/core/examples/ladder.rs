//! Critical-value ladders for both recourse modes, with the failure sets
//! that push the recourse past each level.
//!
//!     cargo run --example ladder [instance-file]

use scenbdd::recourse::failure_clutter;
use scenbdd::{enumerate_ladder, parse_instance, write_ladder, EnumerationLimits};

fn main() -> scenbdd::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let paths: Vec<String> = match std::env::args().nth(1) {
        Some(p) => vec![p],
        None => vec![format!("{dir}/triangle.inst"), format!("{dir}/parallel_flow.inst")],
    };
    for path in paths {
        let inst = parse_instance(&std::fs::read_to_string(&path)?)?;
        let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
        println!("== {path} ({})", inst.mode.as_str());
        print!("{}", write_ladder(&ladder));
        for i in 0..ladder.levels.len() {
            let cuts = failure_clutter(&ladder, i, 10_000)?;
            let shown: Vec<String> = cuts.iter().map(|c| c.to_string()).collect();
            println!("level {i} is missed exactly when one of these fails: {}", shown.join(" "));
        }
    }
    Ok(())
}
