mod common;

use common::{close, fixture};
use scenbdd::mip::propagate_fixed;
use scenbdd::{
    compile_ladder, emit_mip, enumerate_ladder, evaluate, load_ladder, oracle_expected, solve_by_enumeration,
    write_ladder, CompiledLadder, CriticalLadder, Decision, EnumerationLimits, Mode, NetworkInstance, OrderScope,
    OrderingHeuristic, DEFAULT_NODE_CAP,
};

fn build(inst: &NetworkInstance) -> (CriticalLadder, CompiledLadder) {
    let ladder = enumerate_ladder(inst, &EnumerationLimits::default()).unwrap();
    let compiled = compile_ladder(&ladder, &OrderingHeuristic::default(), OrderScope::Shared, DEFAULT_NODE_CAP).unwrap();
    (ladder, compiled)
}

#[test]
fn grid5_fields() {
    let g = fixture("grid5.inst");
    assert_eq!(g.mode, Mode::ShortestPath);
    assert!(!g.directed);
    assert_eq!((g.source.as_str(), g.sink.as_str()), ("s", "t"));
    assert_eq!((g.cutoff, g.penalty, g.budget), (Some(8.0), Some(30.0), 2.0));
    assert_eq!(g.nodes, ["s", "a", "b", "c", "t"]);
    assert_eq!(g.num_edges(), 5);
    let e4 = g.edge(4);
    assert_eq!((e4.tail.as_str(), e4.head.as_str()), ("b", "c"));
    assert_eq!((e4.weight, e4.p, e4.delta, e4.cost, e4.decidable), (2.0, 0.95, 0.03, 2.0, true));
}

#[test]
fn triangle_ladder_round_trips() {
    let tri = fixture("triangle.inst");
    let (ladder, _) = build(&tri);
    assert_eq!(ladder.alphas(), [3.0, 4.0]);
    assert_eq!(ladder.penalty, Some(120.0));
    assert_eq!(load_ladder(&write_ladder(&ladder), &tri).unwrap(), ladder);
}

#[test]
fn triangle_expectation_against_brute_force() {
    let tri = fixture("triangle.inst");
    let (ladder, compiled) = build(&tri);
    let x = Decision::zeros(3);
    let got = evaluate(&tri, &ladder, &compiled, &x).unwrap().expected_value;
    // detour alive with prob .81 gives 3, else direct road .9 gives 4, else 120
    let hand = 0.81 * 3.0 + 0.19 * 0.9 * 4.0 + 0.19 * 0.1 * 120.0;
    assert!(close(got, hand, 1e-12));
    assert!(close(got, oracle_expected(&tri, &x).unwrap().expected_value, 1e-12));
}

#[test]
fn certain_survival_gives_the_nominal_value() {
    let mut g = fixture("grid5.inst");
    for e in &mut g.edges {
        e.p = 1.0;
        e.delta = 0.0;
    }
    let (ladder, compiled) = build(&g);
    let r = evaluate(&g, &ladder, &compiled, &Decision::zeros(5)).unwrap();
    assert_eq!(r.expected_value, 6.0);
    assert_eq!(r.penalty_mass, 0.0);
}

#[test]
fn single_edge_model_selects_the_boost() {
    let inst = fixture("one_edge.inst");
    let (ladder, compiled) = build(&inst);
    let model = emit_mip(&inst, &ladder, &compiled.bdds).unwrap();
    let objective = |bit: bool| {
        let prop = propagate_fixed(&model, &Decision::from_bits(vec![bit])).unwrap();
        model.objective_value(&prop.values())
    };
    // 0.9 * 7 + 0.1 * 120 against 0.95 * 7 + 0.05 * 120
    assert!(close(objective(false), 18.3, 1e-12));
    assert!(close(objective(true), 12.65, 1e-12));
    let best = solve_by_enumeration(&inst, &ladder, &compiled, 20).unwrap();
    assert_eq!(best.x.to_bitstring(), "1");
}

#[test]
fn zero_budget_keeps_the_nominal_decision() {
    let mut g = fixture("grid5.inst");
    g.budget = 0.0;
    let (ladder, compiled) = build(&g);
    let best = solve_by_enumeration(&g, &ladder, &compiled, 20).unwrap();
    assert_eq!(best.x, Decision::zeros(5));
    let nominal = evaluate(&g, &ladder, &compiled, &best.x).unwrap().expected_value;
    assert_eq!(best.value, nominal);
}

#[test]
fn parallel_boost_picks_the_better_edge() {
    let par = fixture("parallel.inst");
    let (ladder, compiled) = build(&par);
    let value = |bits: &str| {
        evaluate(&par, &ladder, &compiled, &Decision::from_bitstring(bits).unwrap())
            .unwrap()
            .expected_value
    };
    let best = solve_by_enumeration(&par, &ladder, &compiled, 20).unwrap();
    let want = if value("10") <= value("01") { "10" } else { "01" };
    assert_eq!(best.x.to_bitstring(), want);
    assert!(best.value < value("00"));
}

#[test]
fn nondecidable_model_is_the_nominal_evaluation() {
    let inst = fixture("nondecidable.inst");
    let (ladder, compiled) = build(&inst);
    let model = emit_mip(&inst, &ladder, &compiled.bdds).unwrap();
    assert_eq!(model.num_binaries(), 0);
    let x = Decision::zeros(inst.num_edges());
    let prop = propagate_fixed(&model, &x).unwrap();
    assert!(prop.unfixed(1e-9).is_empty());
    let nominal = evaluate(&inst, &ladder, &compiled, &x).unwrap().expected_value;
    assert!(close(model.objective_value(&prop.values()), nominal, 1e-9));
}
