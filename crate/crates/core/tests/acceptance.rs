//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines show up in `cargo test` output.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenbdd::bench::{run_grid_bench, BenchConfig};
use scenbdd::lp::{read_lp_summary, write_lp};
use scenbdd::mip::{propagate_fixed, VarRole};
use scenbdd::optimize::feasible_decisions;
use scenbdd::oracle::Oracle;
use scenbdd::probability::{prob_conditioned, ProbabilityReport};
use scenbdd::scenario::minimize_family;
use scenbdd::{
    compile_ladder, compile_monotone, emit_mip, enumerate_ladder, evaluate, oracle_best_decision, solve_by_enumeration,
    CompiledLadder, CriticalLadder, EnumerationLimits, Error, NetworkInstance, OrderScope, OrderingHeuristic, Scenario,
    DEFAULT_NODE_CAP,
};

const EXACT_TOL: f64 = 1e-9;
const MODEL_TOL: f64 = 1e-7;
const OPT_TOL: f64 = 1e-6;

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    let detail = match failures.first() {
        None => summary,
        Some(first) => format!("{summary}; {} failures, first: {first}", failures.len()),
    };
    Outcome {
        pass: failures.is_empty(),
        detail,
    }
}

fn pipeline(inst: &NetworkInstance) -> scenbdd::Result<(CriticalLadder, CompiledLadder)> {
    let ladder = enumerate_ladder(inst, &EnumerationLimits::default())?;
    let compiled = compile_ladder(&ladder, &OrderingHeuristic::OccurrenceAscending, OrderScope::Shared, DEFAULT_NODE_CAP)?;
    Ok((ladder, compiled))
}

/// Oracle probability per distinct value against the report's level and
/// penalty probabilities.
fn distribution_gap(report: &ProbabilityReport, dist: &[(f64, f64)]) -> Option<String> {
    let mut rows: Vec<(f64, f64)> = report.alphas.iter().copied().zip(report.equality.iter().copied()).collect();
    if let Some(pen) = report.penalty {
        rows.push((pen, report.penalty_mass));
    }
    for &(v, pr) in dist {
        let mass: f64 = rows.iter().filter(|r| (r.0 - v).abs() <= EXACT_TOL).map(|r| r.1).sum();
        if !close(mass, pr, EXACT_TOL) {
            return Some(format!("value {v}: oracle probability {pr}, diagrams {mass}"));
        }
    }
    for &(a, q) in &rows {
        if q > EXACT_TOL && !dist.iter().any(|d| (d.0 - a).abs() <= EXACT_TOL) {
            return Some(format!("value {a} has probability {q} but is outside the oracle support"));
        }
    }
    None
}

/// Pipeline against oracle on every feasible decision of every instance.
fn exactness_sweep(instances: &[NetworkInstance], failures: &mut Vec<String>) -> (usize, f64) {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (k, inst) in instances.iter().enumerate() {
        let oracle = Oracle::new(inst).expect("small instance");
        let decisions = feasible_decisions(inst, 24).expect("decisions");
        let built = pipeline(inst);
        for x in &decisions {
            checked += 1;
            let truth = oracle.expected(x);
            let got = match &built {
                Ok((ladder, compiled)) => evaluate(inst, ladder, compiled, x),
                Err(Error::RecourseUndefined(m)) => Err(Error::RecourseUndefined(m.clone())),
                Err(e) => {
                    failures.push(format!("instance {k}: pipeline error {e}"));
                    break;
                }
            };
            match (got, truth) {
                (Ok(r), Ok(t)) => {
                    let gap = (r.expected_value - t.expected_value).abs();
                    worst = worst.max(gap);
                    if gap > EXACT_TOL {
                        failures.push(format!(
                            "instance {k} x={x}: diagrams {} oracle {}",
                            r.expected_value, t.expected_value
                        ));
                    } else if let Some(msg) = distribution_gap(&r, &t.distribution) {
                        failures.push(format!("instance {k} x={x}: {msg}"));
                    }
                }
                (Err(Error::RecourseUndefined(_)), Err(Error::RecourseUndefined(_))) => {}
                (a, b) => failures.push(format!(
                    "instance {k} x={x}: diagrams {:?} oracle {:?}",
                    a.map(|r| r.expected_value),
                    b.map(|r| r.expected_value)
                )),
            }
        }
    }
    (checked, worst)
}

fn criterion_1() -> Outcome {
    let instances = mixed_instances(0x5eed_0001, 200, 14, 8);
    let max_edges = instances.iter().map(|i| i.num_edges()).max().unwrap_or(0);
    let mut failures = Vec::new();
    let (checked, worst) = exactness_sweep(&instances, &mut failures);
    outcome(
        &failures,
        format!(
            "{} instances (max |E| {max_edges}), {checked} decisions, max |diagrams - oracle| {worst:.1e} <= {EXACT_TOL:.0e}",
            instances.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut models = 0;
    let mut decisions = 0;
    let mut worst: f64 = 0.0;
    for (k, inst) in mixed_instances(0x5eed_0002, 80, 10, 6).iter().enumerate() {
        if models == 60 {
            break;
        }
        let Ok((ladder, compiled)) = pipeline(inst) else { continue };
        let Ok(model) = emit_mip(inst, &ladder, &compiled.bdds) else { continue };
        models += 1;
        let (p, delta) = (inst.probabilities(), inst.deltas());
        for x in feasible_decisions(inst, 24).unwrap() {
            decisions += 1;
            let prop = propagate_fixed(&model, &x).unwrap();
            let report = evaluate(inst, &ladder, &compiled, &x);
            if let Err(Error::RecourseUndefined(_)) = report {
                if !prop.is_infeasible() {
                    failures.push(format!("instance {k} x={x}: undefined recourse but the model stays feasible"));
                }
                continue;
            }
            let report = report.unwrap();
            if prop.is_infeasible() || !prop.unfixed(1e-9).is_empty() {
                failures.push(format!("instance {k} x={x}: model completion not unique"));
                continue;
            }
            let values = prop.values();
            for (l, b) in compiled.bdds.iter().enumerate() {
                let want = prob_conditioned(b, &p, &delta, &x);
                let root = model
                    .variables
                    .iter()
                    .position(|v| v.role == VarRole::NodeProb { level: l, node: 0 });
                if let Some(j) = root {
                    worst = worst.max((values[j] - want).abs());
                    if !close(values[j], want, MODEL_TOL) {
                        failures.push(format!("instance {k} x={x} level {l}: model {} diagram {want}", values[j]));
                    }
                }
            }
            let obj = model.objective_value(&values);
            if !close(obj, report.expected_value, MODEL_TOL) || model.max_violation(&values) > 1e-9 {
                failures.push(format!("instance {k} x={x}: objective {obj} vs {}", report.expected_value));
            }
        }
    }
    if models < 50 {
        failures.push(format!("only {models} models emitted"));
    }
    outcome(
        &failures,
        format!("{models} models, {decisions} fixed decisions, max |root - conditioned probability| {worst:.1e} <= {MODEL_TOL:.0e}"),
    )
}

fn highs_available() -> bool {
    Command::new("python3")
        .args(["-c", "import highspy"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn criterion_3() -> Outcome {
    let instances = mixed_instances(0x5eed_0003, 60, 12, 12);
    let mut failures = Vec::new();
    let mut optima = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let enumerated = pipeline(inst).and_then(|(ladder, compiled)| {
            solve_by_enumeration(inst, &ladder, &compiled, 24).map(|s| (s.value, ladder, compiled))
        });
        let truth = oracle_best_decision(inst);
        match (&enumerated, &truth) {
            (Ok((v, ..)), Ok(t)) if close(*v, t.value, OPT_TOL) => {}
            (Err(Error::RecourseUndefined(_)), Err(Error::RecourseUndefined(_))) => {}
            _ => failures.push(format!(
                "instance {k}: enumeration {:?} oracle {:?}",
                enumerated.as_ref().map(|e| e.0),
                truth.as_ref().map(|t| t.value)
            )),
        }
        optima.push(enumerated);
    }
    let decidable = instances.iter().map(|i| i.decidable_edges().len()).max().unwrap_or(0);
    let mut summary = format!(
        "{} instances (max {decidable} decidable edges), enumeration = brute force",
        instances.len()
    );

    if highs_available() {
        let dir = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for (k, (inst, opt)) in instances.iter().zip(&optima).enumerate() {
            let Ok((ladder, compiled)) = pipeline(inst) else { continue };
            let Ok(model) = emit_mip(inst, &ladder, &compiled.bdds) else { continue };
            let path = dir.path().join(format!("m{k}.lp"));
            std::fs::write(&path, write_lp(&model)).unwrap();
            files.push((path, opt.as_ref().ok().map(|o| o.0)));
        }
        let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts/highs_solve.py");
        let out = Command::new("python3")
            .arg(script)
            .args(files.iter().map(|f| &f.0))
            .output()
            .unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != files.len() {
            failures.push(format!("solver printed {} lines for {} models", lines.len(), files.len()));
        }
        let mut worst: f64 = 0.0;
        for (line, (path, want)) in lines.iter().zip(&files) {
            let got = line.rsplit(' ').next().unwrap_or("");
            match (got.parse::<f64>(), want) {
                (Ok(v), Some(w)) => {
                    worst = worst.max((v - w).abs());
                    if !close(v, *w, OPT_TOL) {
                        failures.push(format!("{}: solver {v} enumeration {w}", path.display()));
                    }
                }
                (Err(_), None) if got == "infeasible" => {}
                _ => failures.push(format!("{}: solver '{got}' enumeration {want:?}", path.display())),
            }
        }
        summary += &format!(
            "; HiGHS on {} LP files, max |solver - enumeration| {worst:.1e} <= {OPT_TOL:.0e}",
            files.len()
        );
    } else {
        summary += "; external solver leg skipped (python3 with highspy not found)";
    }
    outcome(&failures, summary)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = Vec::new();
    for (name, inst) in all_fixtures() {
        let (ladder, compiled) = pipeline(&inst).unwrap();
        let model = emit_mip(&inst, &ladder, &compiled.bdds).unwrap();
        let m = inst.num_edges();
        let all_decidable = inst.decidable_edges().len() == m;
        for (l, b) in compiled.bdds.iter().enumerate() {
            let v = b.internal_nodes();
            let c = model.level_counts(l);
            let (want_vars, want_rows) = if all_decidable {
                (v + m, 4 * v + 1)
            } else {
                // one equality row per node on a layer without a decision
                let dec = (0..v).filter(|&i| inst.edge(b.edge_of(i)).decidable).count();
                let budget = usize::from(!inst.decidable_edges().is_empty());
                (v + inst.decidable_edges().len(), 4 * dec + (v - dec) + budget)
            };
            if (c.formula_vars, c.formula_rows) != (want_vars, want_rows) {
                failures.push(format!(
                    "{name} level {l}: counted {}x{}, expected {want_vars}x{want_rows}",
                    c.formula_vars, c.formula_rows
                ));
            }
        }
        let summary = read_lp_summary(&write_lp(&model)).unwrap();
        if (summary.rows, summary.columns, summary.binaries)
            != (model.constraints.len(), model.variables.len(), model.num_binaries())
        {
            failures.push(format!("{name}: LP file read back as {summary:?}"));
        }
        checked.push(format!("{name}{}", if all_decidable { "" } else { "*" }));
    }
    outcome(
        &failures,
        format!(
            "|V|+|E| columns and 4|V|+1 rows per level on {} (* = mixed decidability, generalized count)",
            checked.join(" ")
        ),
    )
}

fn random_family(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scenario> {
    let k = rng.gen_range(0..=8);
    let density = rng.gen_range(0.1..0.6);
    (0..k)
        .map(|_| Scenario::from_edges(n, (1..=n).filter(|_| rng.gen_bool(density))))
        .collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut failures = Vec::new();
    let mut diagrams = 0;
    let mut points = 0u64;
    for n in 1..=16usize {
        let reps = if n <= 12 { 30 } else { 6 };
        for rep in 0..reps {
            let raw = match rep {
                0 => vec![],
                1 => vec![Scenario::empty(n)],
                _ => random_family(&mut rng, n),
            };
            let family = minimize_family(raw.clone());
            let mut order: Vec<usize> = (1..=n).collect();
            order.shuffle(&mut rng);
            let tag = format!("n={n} rep={rep}");
            let b = compile_monotone(&raw, &order, DEFAULT_NODE_CAP).unwrap();
            diagrams += 1;
            let mut problems = audit(&b);
            problems.extend(b.structure_violations());

            let table: Vec<bool> = (0..1u64 << n)
                .map(|mask| covers(&family, &Scenario::from_mask(n, mask)))
                .collect();
            for mask in 0..1u64 << n {
                let xi = Scenario::from_mask(n, mask);
                if walk(&b, &xi) != table[mask as usize] {
                    problems.push(format!("wrong value on {xi}"));
                    break;
                }
                if table[mask as usize] && (0..n).any(|e| !table[(mask | 1 << e) as usize]) {
                    problems.push(format!("not monotone above {xi}"));
                    break;
                }
            }
            points += 1 << n;
            if b.stats().layer_widths != reference_layer_widths(&table, &order) {
                problems.push(format!(
                    "layer widths {:?}, reduced reference {:?}",
                    b.stats().layer_widths,
                    reference_layer_widths(&table, &order)
                ));
            }

            // same function from a shuffled, padded input
            let mut noisy = raw.clone();
            for s in &raw {
                let mut sup = s.clone();
                sup.insert(rng.gen_range(1..=n));
                noisy.push(sup);
            }
            noisy.shuffle(&mut rng);
            if compile_monotone(&noisy, &order, DEFAULT_NODE_CAP).unwrap() != b {
                problems.push("shuffled input gives a different diagram".into());
            }

            let d = b.dual();
            problems.extend(audit(&d).into_iter().map(|p| format!("dual: {p}")));
            if d.dual() != b {
                problems.push("dual is not an involution".into());
            }
            for mask in (0..1u64 << n).step_by(if n > 12 { 7 } else { 1 }) {
                let xi = Scenario::from_mask(n, mask);
                if walk(&d, &xi) != walk(&b, &xi.complement()) {
                    problems.push(format!("dual wrong on {xi}"));
                    break;
                }
            }
            failures.extend(problems.into_iter().map(|p| format!("{tag}: {p}")));
        }
    }
    outcome(
        &failures,
        format!("{diagrams} diagrams up to 16 variables, {points} truth-table points, 0 violations"),
    )
}

fn criterion_6() -> Outcome {
    // published medians for n = 1, 2 and cutoff factors 1.1, 1.5, none
    let published = [
        (1, Some(1.1), 3),
        (1, Some(1.5), 3),
        (1, None, 6),
        (2, Some(1.1), 4),
        (2, Some(1.5), 4),
        (2, None, 21),
    ];
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    for (n, alpha, reference) in published {
        let cfg = BenchConfig {
            n,
            samples: 32,
            alpha_factor: alpha,
            ..BenchConfig::default()
        };
        let median = run_grid_bench(&cfg).unwrap().quantiles.median();
        let ratio = (median as f64 / reference as f64).max(reference as f64 / median as f64);
        let a = scenbdd::bench::format_alpha(alpha);
        cells.push(format!("n={n} a={a}: {median} vs {reference} (x{ratio:.2})"));
        if ratio > 3.0 {
            failures.push(format!("n={n} alpha={a}: median {median} vs published {reference}"));
        }
    }
    outcome(&failures, format!("medians within x3: {}", cells.join(", ")))
}

fn criterion_7() -> Outcome {
    let instances = snip_instances(0x5eed_0007, 60, 12);
    let mut failures = Vec::new();
    let (checked, worst) = exactness_sweep(&instances, &mut failures);

    let mut grid = fixture("snip3x3.inst");
    let (ladder, compiled) = pipeline(&grid).unwrap();
    let mut sweep = Vec::new();
    for budget in 0..=grid.num_edges() {
        grid.budget = budget as f64;
        let s = solve_by_enumeration(&grid, &ladder, &compiled, 24).unwrap();
        let t = oracle_best_decision(&grid).unwrap();
        if !close(s.value, t.value, EXACT_TOL) {
            failures.push(format!("budget {budget}: diagrams {} oracle {}", s.value, t.value));
        }
        sweep.push(s.value);
    }
    if let Some(w) = sweep.windows(2).position(|w| w[1] > w[0] + 1e-12) {
        failures.push(format!("sweep rises from budget {w} to {}", w + 1));
    }
    outcome(
        &failures,
        format!(
            "{} interdiction instances (<= 12 arcs), {checked} decisions, max gap {worst:.1e}; 3x3 sweep {:.4} -> {:.4} non-increasing over {} budgets",
            instances.len(),
            sweep[0],
            sweep[sweep.len() - 1],
            sweep.len()
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_scenbdd")).args(args).output().unwrap();
    assert!(out.status.success(), "scenbdd {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut artifacts = 0;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (name, _) in all_fixtures() {
        let inst = fixture_dir().join(&name);
        let inst = inst.to_str().unwrap();
        let mut runs = Vec::new();
        for dir in &dirs {
            let bdd_dir = dir.path().join(&name);
            let mut bytes = run_cli(&["ladder", "--instance", inst]);
            bytes.extend(run_cli(&["emit", "--instance", inst]));
            bytes.extend(run_cli(&["compile", "--instance", inst, "--out", bdd_dir.to_str().unwrap()]));
            let mut dumps: Vec<_> = std::fs::read_dir(&bdd_dir).unwrap().map(|e| e.unwrap().path()).collect();
            dumps.sort();
            for d in dumps {
                bytes.extend(std::fs::read(d).unwrap());
                artifacts += 1;
            }
            runs.push(bytes);
        }
        artifacts += 3;
        if runs[0] != runs[1] {
            failures.push(format!("{name}: outputs differ between runs"));
        }
    }
    let bench = ["bench-grid", "--n", "2", "--alpha-factor", "1.5", "--reps", "8", "--seed", "7"];
    if run_cli(&bench) != run_cli(&bench) {
        failures.push("bench table differs between runs".into());
    }
    outcome(
        &failures,
        format!("{} artifacts per run plus a bench table, byte-identical across two processes", artifacts / 2 + 1),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1", "end-to-end exactness", criterion_1),
        ("2", "linearization exactness", criterion_2),
        ("3", "optimizer agreement", criterion_3),
        ("4", "size formulas", criterion_4),
        ("5", "diagram structure", criterion_5),
        ("6", "grid benchmark medians", criterion_6),
        ("7", "interdiction mode", criterion_7),
        ("8", "determinism", criterion_8),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({title}): {} [{:.1}s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
