//! Diagram sizes on random road-like grids.
//!
//! A sample is an `(n+1) × (n+1)` lattice of jittered points. Candidate
//! roads are the lattice sides plus one diagonal per cell (so no two roads
//! cross); a random spanning tree is drawn from the candidates and further
//! candidates are added until the edge count reaches `density × nodes`.
//! Lengths are Euclidean.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bdd::DEFAULT_NODE_CAP;
use crate::error::{Error, Result};
use crate::graph::Network;
use crate::instance::{validate_instance, Edge, Mode, NetworkInstance};
use crate::order::OrderingHeuristic;
use crate::pipeline::{compile_ladder, OrderScope};
use crate::recourse::{enumerate_shortest_paths, EnumerationLimits};

const SAMPLE_RETRIES: usize = 100;

/// What one origin–destination pair contributes to the statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeMeasure {
    /// Total size (internal nodes plus terminals) summed over all levels.
    Summed,
    /// Total size of the last level's diagram alone, which encodes every
    /// path within the cutoff.
    LastLevel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    /// Grid side in cells.
    pub n: usize,
    pub samples: usize,
    pub density: f64,
    /// Cutoff as a multiple of the nominal distance; `None` keeps every path.
    pub alpha_factor: Option<f64>,
    pub seed: u64,
    pub heuristic: OrderingHeuristic,
    pub node_cap: usize,
    pub measure: SizeMeasure,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 1,
            samples: 32,
            density: 1.2,
            alpha_factor: Some(1.1),
            seed: 1,
            heuristic: OrderingHeuristic::OccurrenceAscending,
            node_cap: DEFAULT_NODE_CAP,
            measure: SizeMeasure::Summed,
        }
    }
}

/// Min, 25%, median, 75%, 99% and max by the nearest-rank rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quantiles(pub [usize; 6]);

pub const QUANTILE_LEVELS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 0.99, 1.0];

impl Quantiles {
    pub fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let n = v.len();
        let pick = |q: f64| {
            let rank = (q * n as f64).ceil() as usize;
            v[rank.clamp(1, n) - 1]
        };
        Some(Quantiles(QUANTILE_LEVELS.map(pick)))
    }

    pub fn median(&self) -> usize {
        self.0[2]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub config: BenchConfig,
    /// Summed diagram size of every origin–destination pair of every sample.
    pub sizes: Vec<usize>,
    pub quantiles: Quantiles,
}

/// One jittered grid network without source or sink; all edges undirected.
pub fn grid_network<R: Rng>(rng: &mut R, n: usize, density: f64) -> NetworkInstance {
    let side = n + 1;
    let id = |r: usize, c: usize| r * side + c;
    let points: Vec<(f64, f64)> = (0..side * side)
        .map(|k| {
            let (r, c) = (k / side, k % side);
            (r as f64 + rng.gen_range(-0.3..0.3), c as f64 + rng.gen_range(-0.3..0.3))
        })
        .collect();
    let mut candidates = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                candidates.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                candidates.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < side && c + 1 < side {
                candidates.push(if rng.gen_bool(0.5) {
                    (id(r, c), id(r + 1, c + 1))
                } else {
                    (id(r, c + 1), id(r + 1, c))
                });
            }
        }
    }
    candidates.shuffle(rng);

    let nodes = side * side;
    let target = ((density * nodes as f64).round() as usize).clamp(nodes - 1, candidates.len());
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let mut chosen = Vec::with_capacity(target);
    let mut rest = Vec::new();
    for (u, v) in candidates {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            chosen.push((u, v));
        } else {
            rest.push((u, v));
        }
    }
    chosen.extend(rest.into_iter().take(target - chosen.len()));

    let names: Vec<String> = (0..nodes).map(|k| format!("g{}_{}", k / side, k % side)).collect();
    let edges = chosen
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let (a, b) = (points[u], points[v]);
            Edge {
                id: i + 1,
                tail: names[u].clone(),
                head: names[v].clone(),
                weight: ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt(),
                p: 0.9,
                delta: 0.0,
                cost: 0.0,
                decidable: false,
            }
        })
        .collect();
    NetworkInstance {
        mode: Mode::ShortestPath,
        directed: false,
        source: names[0].clone(),
        sink: names[nodes - 1].clone(),
        cutoff: None,
        penalty: None,
        budget: 0.0,
        nodes: names,
        edges,
    }
}

fn connected(inst: &NetworkInstance) -> bool {
    let net = Network::new(inst);
    net.distances_from(0, |_| true).iter().all(|d| d.is_finite())
}

/// The shortest-path instance for one origin–destination pair with the
/// cutoff `factor × nominal distance`.
pub fn od_instance(grid: &NetworkInstance, origin: usize, dest: usize, factor: Option<f64>) -> NetworkInstance {
    let mut inst = grid.clone();
    inst.source = grid.nodes[origin].clone();
    inst.sink = grid.nodes[dest].clone();
    let d = Network::new(&inst).shortest_distance(|_| true).unwrap_or(0.0);
    match factor {
        Some(f) => {
            let cutoff = f * d;
            inst.cutoff = Some(cutoff);
            inst.penalty = Some(2.0 * cutoff + 1.0);
        }
        None => inst.penalty = Some(inst.edges.iter().map(|e| e.weight).sum::<f64>() + 1.0),
    }
    inst
}

/// Summed per-level diagram size for every origin–destination pair of
/// every sample.
pub fn run_grid_bench(cfg: &BenchConfig) -> Result<BenchResult> {
    if let Some(f) = cfg.alpha_factor {
        if f.is_nan() || f < 1.0 {
            return Err(Error::InvalidArgument(format!("alpha factor {f} is below 1")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let limits = EnumerationLimits::default();
    let mut sizes = Vec::new();
    for _ in 0..cfg.samples {
        let grid = (0..SAMPLE_RETRIES)
            .map(|_| grid_network(&mut rng, cfg.n, cfg.density))
            .find(connected)
            .ok_or_else(|| Error::Invariant("no connected grid sample within the retry bound".into()))?;
        let k = grid.nodes.len();
        for o in 0..k {
            for d in o + 1..k {
                let inst = od_instance(&grid, o, d, cfg.alpha_factor);
                debug_assert!(validate_instance(&inst).is_empty());
                let ladder = enumerate_shortest_paths(&inst, &limits)?;
                let compiled = compile_ladder(&ladder, &cfg.heuristic, OrderScope::PerLevel, cfg.node_cap)?;
                sizes.push(match cfg.measure {
                    SizeMeasure::Summed => compiled.total_size(),
                    SizeMeasure::LastLevel => compiled.bdds.last().map_or(1, |b| b.stats().total_size),
                });
            }
        }
    }
    let quantiles = Quantiles::of(&sizes).ok_or_else(|| Error::InvalidArgument("no samples requested".into()))?;
    Ok(BenchResult {
        config: cfg.clone(),
        sizes,
        quantiles,
    })
}

pub fn format_alpha(factor: Option<f64>) -> String {
    match factor {
        Some(f) => format!("{f}"),
        None => "inf".into(),
    }
}

/// Fixed-width quantile table, one row per result.
pub fn format_table(results: &[BenchResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "n", "alpha", "pairs", "min", "25%", "median", "75%", "99%", "max"
    );
    for r in results {
        let q = r.quantiles.0;
        let _ = writeln!(
            out,
            "{:>3} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
            r.config.n,
            format_alpha(r.config.alpha_factor),
            r.sizes.len(),
            q[0],
            q[1],
            q[2],
            q[3],
            q[4],
            q[5]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_quantiles() {
        let q = Quantiles::of(&[5, 1, 3, 2, 4]).unwrap();
        assert_eq!(q.0, [1, 2, 3, 4, 5, 5]);
        assert_eq!(Quantiles::of(&[]), None);
    }

    #[test]
    fn grid_is_connected_with_target_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            let g = grid_network(&mut rng, n, 1.2);
            let nodes = (n + 1) * (n + 1);
            assert_eq!(g.nodes.len(), nodes);
            assert_eq!(g.num_edges(), (1.2 * nodes as f64).round() as usize);
            assert!(connected(&g));
        }
    }

    #[test]
    fn deterministic_table() {
        let cfg = BenchConfig { samples: 3, ..BenchConfig::default() };
        let a = format_table(&[run_grid_bench(&cfg).unwrap()]);
        let b = format_table(&[run_grid_bench(&cfg).unwrap()]);
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 2);
    }
}
