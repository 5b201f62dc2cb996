//! Emit the mixed-integer model of an instance as an LP file and show its
//! size accounting per level.
//!
//!     cargo run --example emit_lp [instance-file] [output.lp]

use scenbdd::lp::{read_lp_summary, write_lp};
use scenbdd::{compile_ladder, emit_mip, enumerate_ladder, parse_instance, EnumerationLimits, OrderScope};

fn main() -> scenbdd::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/triangle.inst").to_string());
    let inst = parse_instance(&std::fs::read_to_string(&path)?)?;
    let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
    let compiled = compile_ladder(&ladder, &Default::default(), OrderScope::Shared, scenbdd::DEFAULT_NODE_CAP)?;
    let model = emit_mip(&inst, &ladder, &compiled.bdds)?;
    let text = write_lp(&model);
    for (i, b) in compiled.bdds.iter().enumerate() {
        let c = model.level_counts(i);
        println!(
            "level {i}: {} internal nodes -> {} columns, {} rows (with decisions and budget: {} x {})",
            b.internal_nodes(),
            c.node_vars,
            c.node_rows,
            c.formula_vars,
            c.formula_rows
        );
    }
    let summary = read_lp_summary(&text)?;
    println!("file: {} rows, {} columns, {} binaries", summary.rows, summary.columns, summary.binaries);
    match args.next() {
        Some(out) => std::fs::write(out, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
