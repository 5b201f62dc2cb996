//! Seeded random instances for tests, examples and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Network;
use crate::instance::{validate_instance, Edge, Mode, NetworkInstance};

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceShape {
    pub mode: Mode,
    pub nodes: usize,
    pub edges: usize,
    /// Chance that an edge carries a decision.
    pub decidable_share: f64,
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn random_p<R: Rng>(rng: &mut R) -> f64 {
    match rng.gen_range(0..20) {
        0 | 1 => 1.0,
        2 => 0.0,
        _ => round2(rng.gen_range(0.05..0.95)),
    }
}

fn random_delta<R: Rng>(rng: &mut R, p: f64) -> f64 {
    if rng.gen_bool(0.1) {
        return 0.0;
    }
    round2(rng.gen_range(-p..=1.0 - p)).clamp(-p, 1.0 - p)
}

/// A random instance of the requested shape. Node `v0` is the source and
/// the last node the sink; a source–sink chain is laid first so most
/// samples are connected.
pub fn random_instance<R: Rng>(rng: &mut R, shape: &InstanceShape) -> NetworkInstance {
    assert!(shape.nodes >= 2, "need a source and a sink");
    let n = shape.nodes;
    let nodes: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let directed = match shape.mode {
        Mode::MaxFlow => rng.gen_bool(0.8),
        Mode::ShortestPath => rng.gen_bool(0.5),
    };

    let mut middle: Vec<usize> = (1..n - 1).collect();
    middle.shuffle(rng);
    let hops = rng.gen_range(0..=middle.len().min(3));
    let mut chain = vec![0];
    chain.extend(&middle[..hops]);
    chain.push(n - 1);
    let mut pairs: Vec<(usize, usize)> = chain.windows(2).map(|w| (w[0], w[1])).collect();
    pairs.truncate(shape.edges);
    while pairs.len() < shape.edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            pairs.push((u, v));
        }
    }
    pairs.shuffle(rng);

    let edges: Vec<Edge> = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let weight = match shape.mode {
                Mode::ShortestPath if rng.gen_bool(0.3) => rng.gen_range(1..=10) as f64 * 0.5,
                Mode::ShortestPath => rng.gen_range(1..=5) as f64,
                Mode::MaxFlow => rng.gen_range(1..=4) as f64,
            };
            let p = random_p(rng);
            let decidable = rng.gen_bool(shape.decidable_share);
            let delta = if decidable { random_delta(rng, p) } else { 0.0 };
            Edge {
                id: i + 1,
                tail: nodes[u].clone(),
                head: nodes[v].clone(),
                weight,
                p,
                delta,
                cost: rng.gen_range(0..=3) as f64,
                decidable,
            }
        })
        .collect();
    let total_cost: f64 = edges.iter().filter(|e| e.decidable).map(|e| e.cost).sum();
    let budget = rng.gen_range(0..=total_cost as u32) as f64;

    let mut inst = NetworkInstance {
        mode: shape.mode,
        directed,
        source: nodes[0].clone(),
        sink: nodes[n - 1].clone(),
        cutoff: None,
        penalty: None,
        budget,
        nodes,
        edges,
    };
    if shape.mode == Mode::ShortestPath {
        let total: f64 = inst.edges.iter().map(|e| e.weight).sum();
        let nominal = Network::new(&inst).shortest_distance(|_| true);
        match nominal {
            Some(d) if rng.gen_bool(0.5) => {
                let cutoff = (d * rng.gen_range(1.0..2.0) * 2.0).round() / 2.0;
                inst.cutoff = Some(cutoff.max(d));
                inst.penalty = Some(2.0 * cutoff.max(d) + 1.0);
            }
            _ if rng.gen_bool(0.85) => inst.penalty = Some(total + 1.0),
            _ => {}
        }
    }
    debug_assert!(validate_instance(&inst).is_empty());
    inst
}

/// A random interdiction instance: directed capacitated arcs, every arc
/// decidable with a negative shift (an attack lowers survival).
pub fn random_snip<R: Rng>(rng: &mut R, nodes: usize, arcs: usize) -> NetworkInstance {
    let mut inst = random_instance(
        rng,
        &InstanceShape {
            mode: Mode::MaxFlow,
            nodes,
            edges: arcs,
            decidable_share: 1.0,
        },
    );
    inst.directed = true;
    for e in &mut inst.edges {
        e.p = if rng.gen_bool(0.5) { 1.0 } else { round2(rng.gen_range(0.6..1.0)) };
        e.delta = -round2(e.p * rng.gen_range(0.3..1.0));
        e.cost = rng.gen_range(1..=2) as f64;
        e.decidable = true;
    }
    inst.budget = rng.gen_range(0..=4) as f64;
    debug_assert!(validate_instance(&inst).is_empty());
    inst
}

/// The `rows × cols` directed grid from the top-left to the bottom-right
/// corner with arcs pointing right and down. Capacities cycle through
/// `1..=3`; every arc survives nominally and an attack succeeds with
/// probability `attack`.
pub fn snip_grid(rows: usize, cols: usize, attack: f64) -> NetworkInstance {
    let name = |r: usize, c: usize| format!("g{r}{c}");
    let nodes: Vec<String> = (0..rows).flat_map(|r| (0..cols).map(move |c| name(r, c))).collect();
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let mut push = |tail: String, head: String| {
                let id = edges.len() + 1;
                edges.push(Edge {
                    id,
                    tail,
                    head,
                    weight: (1 + (id * 7) % 3) as f64,
                    p: 1.0,
                    delta: -attack,
                    cost: 1.0,
                    decidable: true,
                });
            };
            if c + 1 < cols {
                push(name(r, c), name(r, c + 1));
            }
            if r + 1 < rows {
                push(name(r, c), name(r + 1, c));
            }
        }
    }
    NetworkInstance {
        mode: Mode::MaxFlow,
        directed: true,
        source: name(0, 0),
        sink: name(rows - 1, cols - 1),
        cutoff: None,
        penalty: None,
        budget: 0.0,
        nodes,
        edges,
    }
}
