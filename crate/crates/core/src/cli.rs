//! Subcommand bodies behind the `scenbdd` binary. Each writes its report to
//! `out` and any artifacts to the configured paths.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bdd::{incidence_bandwidth, DEFAULT_NODE_CAP};
use crate::bench::{format_table, run_grid_bench, BenchConfig};
use crate::error::{Error, Result};
use crate::instance::{parse_instance, Decision, NetworkInstance};
use crate::lp::write_lp;
use crate::mip::{emit_mip, propagate_fixed};
use crate::optimize::{feasible_decisions, solve_by_enumeration};
use crate::oracle::{oracle_best_decision, Oracle, ORACLE_DECISION_LIMIT};
use crate::order::OrderingHeuristic;
use crate::pipeline::{compile_ladder, evaluate, CompiledLadder, OrderScope};
use crate::recourse::{enumerate_ladder, load_ladder, write_ladder, CriticalLadder, EnumerationLimits};

/// Agreement required between pipeline and oracle in `check`.
pub const CHECK_TOL: f64 = 1e-9;
/// Agreement required between the model and the pipeline in `check`.
pub const MODEL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub instance: Option<PathBuf>,
    pub ladder: Option<PathBuf>,
    pub order: OrderingHeuristic,
    pub out: Option<PathBuf>,
    pub x: Option<String>,
    pub seed: u64,
    pub node_cap: usize,
    /// `None` keeps every path in the benchmark.
    pub alpha_factor: Option<f64>,
    pub n: usize,
    pub reps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            instance: None,
            ladder: None,
            order: OrderingHeuristic::OccurrenceAscending,
            out: None,
            x: None,
            seed: 1,
            node_cap: DEFAULT_NODE_CAP,
            alpha_factor: Some(1.1),
            n: 1,
            reps: 32,
        }
    }
}

/// Resolves `occ`, `cmk`, `id` or `file` (with `order_file`) to a heuristic.
pub fn parse_order(name: &str, order_file: Option<&Path>) -> Result<OrderingHeuristic> {
    match name {
        "occ" => Ok(OrderingHeuristic::OccurrenceAscending),
        "cmk" => Ok(OrderingHeuristic::CuthillMcKeeLike),
        "id" => Ok(OrderingHeuristic::Identity),
        "file" => {
            let path = order_file
                .ok_or_else(|| Error::InvalidArgument("--order file needs --order-file <path>".into()))?;
            let text = read(path)?;
            let perm = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("order file: '{t}' is not an edge id")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OrderingHeuristic::Explicit(perm))
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown order '{other}'; expected occ, cmk, id or file"
        ))),
    }
}

/// Parses `inf` or a real number of at least 1.
pub fn parse_alpha_factor(text: &str) -> Result<Option<f64>> {
    if matches!(text, "inf" | "infinity") {
        return Ok(None);
    }
    match text.parse::<f64>() {
        Ok(f) if f >= 1.0 && f.is_finite() => Ok(Some(f)),
        _ => Err(Error::InvalidArgument(format!(
            "alpha factor must be inf or a number >= 1, got '{text}'"
        ))),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

pub fn load_instance(cfg: &RunConfig) -> Result<NetworkInstance> {
    let path = cfg
        .instance
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--instance is required".into()))?;
    parse_instance(&read(path)?)
}

/// The ladder from `--ladder` if given, otherwise enumerated.
pub fn obtain_ladder(cfg: &RunConfig, inst: &NetworkInstance) -> Result<CriticalLadder> {
    match &cfg.ladder {
        Some(path) => load_ladder(&read(path)?, inst),
        None => enumerate_ladder(inst, &EnumerationLimits::default()),
    }
}

fn compile(cfg: &RunConfig, ladder: &CriticalLadder) -> Result<CompiledLadder> {
    if ladder.levels.is_empty() {
        return Err(Error::InvalidLadder("ladder has no levels".into()));
    }
    compile_ladder(ladder, &cfg.order, OrderScope::Shared, cfg.node_cap)
}

fn parse_x(cfg: &RunConfig, inst: &NetworkInstance) -> Result<Decision> {
    let m = inst.num_edges();
    let x = match &cfg.x {
        None => return Ok(Decision::zeros(m)),
        Some(text) => Decision::from_bitstring(text)
            .ok_or_else(|| Error::InvalidArgument(format!("--x '{text}' is not a 0/1 string")))?,
    };
    if x.len() != m {
        return Err(Error::InvalidArgument(format!(
            "--x has {} entries, instance has {m} edges",
            x.len()
        )));
    }
    Ok(x)
}

/// Enumerates the ladder. Writes it to `--out` if given, else to `out`
/// after the `#` summary lines (which keep the output a valid ladder file).
pub fn cmd_ladder(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let inst = load_instance(cfg)?;
    let ladder = enumerate_ladder(&inst, &EnumerationLimits::default())?;
    writeln!(out, "# levels {}", ladder.levels.len())?;
    for (i, l) in ladder.levels.iter().enumerate() {
        writeln!(out, "# level {i} alpha={} scenarios={}", l.alpha, l.min_true_points.len())?;
    }
    if let Some(p) = ladder.penalty {
        writeln!(out, "# penalty alpha={p}")?;
    }
    let text = write_ladder(&ladder);
    match &cfg.out {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Compiles every level under one shared order and prints the size table.
/// With `--out <dir>`, dumps `level<i>.bdd` files there.
pub fn cmd_compile(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let inst = load_instance(cfg)?;
    let ladder = obtain_ladder(cfg, &inst)?;
    let compiled = compile(cfg, &ladder)?;
    let order = compiled.shared_order().expect("shared scope");
    writeln!(
        out,
        "order {}",
        order.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
    )?;
    writeln!(out, "{:>5} {:>12} {:>8} {:>6} {:>9}", "level", "alpha", "size", "width", "bandwidth")?;
    for (i, (b, l)) in compiled.bdds.iter().zip(&ladder.levels).enumerate() {
        let s = b.stats();
        let bw = incidence_bandwidth(&ladder.cumulative_family(i), order);
        writeln!(out, "{i:>5} {:>12} {:>8} {:>6} {bw:>9}", l.alpha, s.total_size, s.width)?;
    }
    writeln!(out, "total {}", compiled.total_size())?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        for (i, b) in compiled.bdds.iter().enumerate() {
            write_file(&dir.join(format!("level{i}.bdd")), &b.dump())?;
        }
    }
    Ok(())
}

/// Prints the probability report for `--x` (all zeros if absent).
pub fn cmd_evaluate(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let inst = load_instance(cfg)?;
    let x = parse_x(cfg, &inst)?;
    let ladder = obtain_ladder(cfg, &inst)?;
    let compiled = compile(cfg, &ladder)?;
    let report = evaluate(&inst, &ladder, &compiled, &x)?;
    write!(out, "{report}")?;
    Ok(())
}

/// Writes the LP model to `--out`, or to `out` if no path is given.
pub fn cmd_emit(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let inst = load_instance(cfg)?;
    let ladder = obtain_ladder(cfg, &inst)?;
    let compiled = compile(cfg, &ladder)?;
    let model = emit_mip(&inst, &ladder, &compiled.bdds)?;
    let text = write_lp(&model);
    match &cfg.out {
        Some(path) => {
            write_file(path, &text)?;
            writeln!(
                out,
                "rows {} columns {} binaries {}",
                model.constraints.len(),
                model.variables.len(),
                model.num_binaries()
            )?;
            for i in 0..ladder.levels.len() {
                let c = model.level_counts(i);
                writeln!(
                    out,
                    "level {i} node-columns {} node-rows {} formula-columns {} formula-rows {}",
                    c.node_vars, c.node_rows, c.formula_vars, c.formula_rows
                )?;
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn agree(a: &Result<f64>, b: &Result<f64>, tol: f64) -> bool {
    match (a, b) {
        (Ok(u), Ok(v)) => (u - v).abs() <= tol,
        (Err(Error::RecourseUndefined(_)), Err(Error::RecourseUndefined(_))) => true,
        _ => false,
    }
}

fn show(v: &Result<f64>) -> String {
    match v {
        Ok(v) => v.to_string(),
        Err(Error::RecourseUndefined(_)) => "undefined".into(),
        Err(e) => format!("error({e})"),
    }
}

/// Compares the compiled pipeline, the emitted model and the brute-force
/// oracle on every feasible decision, then the optimizers. Fails with an
/// invariant error if any comparison is out of tolerance.
pub fn cmd_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let inst = load_instance(cfg)?;
    let ladder = obtain_ladder(cfg, &inst)?;
    let compiled = compile_ladder(&ladder, &cfg.order, OrderScope::Shared, cfg.node_cap)?;
    let oracle = Oracle::new(&inst)?;
    let model = emit_mip(&inst, &ladder, &compiled.bdds);
    let decisions = feasible_decisions(&inst, ORACLE_DECISION_LIMIT)?;
    let mut failures = 0;
    for x in &decisions {
        let pipeline = evaluate(&inst, &ladder, &compiled, x).map(|r| r.expected_value);
        let truth = oracle.expected(x).map(|r| r.expected_value);
        let mut ok = agree(&pipeline, &truth, CHECK_TOL);
        let mut model_note = String::new();
        if let (Ok(model), Ok(v)) = (&model, &pipeline) {
            let prop = propagate_fixed(model, x)?;
            let fixed = prop.unfixed(1e-9).is_empty() && !prop.is_infeasible();
            let obj = model.objective_value(&prop.values());
            if !fixed || (obj - v).abs() > MODEL_TOL {
                ok = false;
            }
            model_note = format!(" model={obj}");
        }
        if !ok {
            failures += 1;
        }
        writeln!(
            out,
            "x={} pipeline={} oracle={}{} {}",
            x,
            show(&pipeline),
            show(&truth),
            model_note,
            if ok { "ok" } else { "MISMATCH" }
        )?;
    }
    let best = solve_by_enumeration(&inst, &ladder, &compiled, ORACLE_DECISION_LIMIT).map(|s| (s.x, s.value));
    let truth = oracle_best_decision(&inst).map(|s| (s.x, s.value));
    let opt_ok = agree(
        &best.as_ref().map(|b| b.1).map_err(clone_err),
        &truth.as_ref().map(|b| b.1).map_err(clone_err),
        CHECK_TOL,
    );
    match (&best, &truth) {
        (Ok(b), Ok(t)) => writeln!(out, "optimum pipeline x={} {} oracle x={} {}", b.0, b.1, t.0, t.1)?,
        _ => writeln!(out, "optimum undefined")?,
    }
    if !opt_ok {
        failures += 1;
    }
    if let Err(e) = &model {
        writeln!(out, "model not emitted: {e}")?;
    }
    if failures == 0 {
        writeln!(out, "PASS {} decisions", decisions.len())?;
        Ok(())
    } else {
        writeln!(out, "FAIL {failures} mismatches")?;
        Err(Error::Invariant(format!("{failures} mismatches between pipeline and oracle")))
    }
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::RecourseUndefined(s) => Error::RecourseUndefined(s.clone()),
        other => Error::Invariant(other.to_string()),
    }
}

/// Runs the random-grid benchmark and prints its quantile table, also
/// written to `--out` if given.
pub fn cmd_bench_grid(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let bench = BenchConfig {
        n: cfg.n,
        samples: cfg.reps,
        alpha_factor: cfg.alpha_factor,
        seed: cfg.seed,
        heuristic: cfg.order.clone(),
        node_cap: cfg.node_cap,
        ..BenchConfig::default()
    };
    let table = format_table(&[run_grid_bench(&bench)?]);
    if let Some(path) = &cfg.out {
        write_file(path, &table)?;
    }
    out.write_all(table.as_bytes())?;
    Ok(())
}
