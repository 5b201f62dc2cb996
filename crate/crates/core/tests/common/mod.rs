#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenbdd::generate::{random_instance, random_snip, InstanceShape};
use scenbdd::{parse_instance, Bdd, Mode, NetworkInstance, NodeRef, Scenario};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> NetworkInstance {
    let path = fixture_dir().join(name);
    parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Every `.inst` file under `fixtures/`, sorted by name.
pub fn all_fixtures() -> Vec<(String, NetworkInstance)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".inst"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), fixture(&n))).collect()
}

/// Clears decisions beyond the first `max` decidable edges.
pub fn cap_decidable(inst: &mut NetworkInstance, max: usize) {
    let mut seen = 0;
    for e in &mut inst.edges {
        if e.decidable {
            seen += 1;
            if seen > max {
                e.decidable = false;
                e.delta = 0.0;
            }
        }
    }
}

/// Random instances alternating between the two recourse modes.
pub fn mixed_instances(seed: u64, count: usize, max_edges: usize, max_decidable: usize) -> Vec<NetworkInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mode = if i % 2 == 0 { Mode::ShortestPath } else { Mode::MaxFlow };
            let shape = InstanceShape {
                mode,
                nodes: rng.gen_range(2..=7),
                edges: rng.gen_range(1..=max_edges),
                decidable_share: rng.gen_range(0.3..1.0),
            };
            let mut inst = random_instance(&mut rng, &shape);
            cap_decidable(&mut inst, max_decidable);
            inst
        })
        .collect()
}

pub fn snip_instances(seed: u64, count: usize, max_arcs: usize) -> Vec<NetworkInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nodes = rng.gen_range(3..=6);
            let arcs = rng.gen_range(2..=max_arcs);
            random_snip(&mut rng, nodes, arcs)
        })
        .collect()
}

/// Evaluates a diagram by walking it from the root, using only its nodes.
pub fn walk(b: &Bdd, xi: &Scenario) -> bool {
    let mut r = b.root();
    loop {
        match r {
            NodeRef::True => return true,
            NodeRef::False => return false,
            NodeRef::Node(i) => {
                let n = b.node(i as usize);
                let edge = b.order()[n.layer - 1];
                r = if xi.contains(edge) { n.hi } else { n.lo };
            }
        }
    }
}

/// Whether some member of `family` survives in `xi`.
pub fn covers(family: &[Scenario], xi: &Scenario) -> bool {
    family.iter().any(|s| s.is_subset(xi))
}

/// Independent structural audit: problems with orderedness, reducedness,
/// uniqueness and reachability.
pub fn audit(b: &Bdd) -> Vec<String> {
    let mut problems = Vec::new();
    let layer = |r: NodeRef| match r {
        NodeRef::Node(i) => b.node(i as usize).layer,
        _ => usize::MAX,
    };
    let mut triples = HashSet::new();
    for (i, n) in b.nodes().iter().enumerate() {
        if n.lo == n.hi {
            problems.push(format!("node {i} is redundant"));
        }
        if layer(n.lo) <= n.layer || layer(n.hi) <= n.layer {
            problems.push(format!("node {i} has a child on its own or an earlier layer"));
        }
        if !triples.insert((n.layer, n.lo, n.hi)) {
            problems.push(format!("node {i} duplicates another node"));
        }
    }
    let mut reached = vec![false; b.nodes().len()];
    let mut stack = vec![b.root()];
    while let Some(r) = stack.pop() {
        if let NodeRef::Node(i) = r {
            if !std::mem::replace(&mut reached[i as usize], true) {
                let n = b.node(i as usize);
                stack.push(n.lo);
                stack.push(n.hi);
            }
        }
    }
    if let Some(i) = reached.iter().position(|r| !r) {
        problems.push(format!("node {i} is unreachable"));
    }
    problems
}

/// Node count per layer of the reduced ordered diagram of the function
/// given by its truth table, computed from distinct essential subfunctions.
/// `table[mask]` is the value on the scenario whose bit `order[k] - 1`
/// is set for each surviving edge.
pub fn reference_layer_widths(table: &[bool], order: &[usize]) -> Vec<usize> {
    let n = order.len();
    // re-index so that the first order position is the most significant bit
    let mut by_order = vec![false; table.len()];
    for (mask, &v) in table.iter().enumerate() {
        let mut idx = 0usize;
        for (k, &e) in order.iter().enumerate() {
            if mask >> (e - 1) & 1 == 1 {
                idx |= 1 << (n - 1 - k);
            }
        }
        by_order[idx] = v;
    }
    (0..n)
        .map(|k| {
            let block = 1usize << (n - k);
            let half = block / 2;
            let mut distinct = HashSet::new();
            for chunk in by_order.chunks(block) {
                if chunk[..half] != chunk[half..] {
                    distinct.insert(chunk.to_vec());
                }
            }
            distinct.len()
        })
        .collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
