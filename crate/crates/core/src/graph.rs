//! Graph primitives over a [`NetworkInstance`]: distances, bounded simple-path
//! enumeration and maximum flow, each restricted to a set of surviving edges.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::instance::NetworkInstance;

/// Adjacency view: `adj[v]` lists `(neighbor, edge index 0-based)`.
#[derive(Clone, Debug)]
pub struct Network {
    pub num_nodes: usize,
    pub source: usize,
    pub sink: usize,
    /// `(tail, head, weight)` per edge, 0-based edge index.
    pub arcs: Vec<(usize, usize, f64)>,
    pub directed: bool,
    out: Vec<Vec<(usize, usize)>>,
    inc: Vec<Vec<(usize, usize)>>,
}

impl Network {
    pub fn new(inst: &NetworkInstance) -> Self {
        let index = inst.node_index();
        let n = inst.nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut arcs = Vec::with_capacity(inst.edges.len());
        for (i, e) in inst.edges.iter().enumerate() {
            let (u, v) = (index[e.tail.as_str()], index[e.head.as_str()]);
            arcs.push((u, v, e.weight));
            out[u].push((v, i));
            inc[v].push((u, i));
            if !inst.directed {
                out[v].push((u, i));
                inc[u].push((v, i));
            }
        }
        Network {
            num_nodes: n,
            source: index[inst.source.as_str()],
            sink: index[inst.sink.as_str()],
            arcs,
            directed: inst.directed,
            out,
            inc,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.arcs.len()
    }

    /// Shortest distances from every node *to* `target` over surviving edges.
    pub fn distances_to(&self, target: usize, alive: impl Fn(usize) -> bool) -> Vec<f64> {
        self.dijkstra(target, &self.inc, alive)
    }

    /// Shortest distances *from* `origin` over surviving edges.
    pub fn distances_from(&self, origin: usize, alive: impl Fn(usize) -> bool) -> Vec<f64> {
        self.dijkstra(origin, &self.out, alive)
    }

    /// Source–sink distance, `None` when disconnected.
    pub fn shortest_distance(&self, alive: impl Fn(usize) -> bool) -> Option<f64> {
        let d = self.distances_from(self.source, alive)[self.sink];
        d.is_finite().then_some(d)
    }

    fn dijkstra(
        &self,
        start: usize,
        adj: &[Vec<(usize, usize)>],
        alive: impl Fn(usize) -> bool,
    ) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.num_nodes];
        let mut heap = BinaryHeap::new();
        dist[start] = 0.0;
        heap.push(HeapItem(0.0, start));
        while let Some(HeapItem(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &adj[v] {
                if !alive(e) {
                    continue;
                }
                let nd = d + self.arcs[e].2;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(HeapItem(nd, w));
                }
            }
        }
        dist
    }

    /// All simple source–sink paths of length at most `limit` (plus `tol`),
    /// as `(length, edge indices 0-based in path order)`.
    ///
    /// Restricted backtracking: a partial path is abandoned as soon as its
    /// length plus the remaining distance to the sink exceeds the limit.
    pub fn simple_paths(
        &self,
        limit: f64,
        tol: f64,
        max_paths: usize,
    ) -> Result<Vec<(f64, Vec<usize>)>> {
        let to_sink = self.distances_to(self.sink, |_| true);
        let mut paths = Vec::new();
        if !to_sink[self.source].is_finite() || to_sink[self.source] > limit + tol {
            return Ok(paths);
        }
        let mut on_path = vec![false; self.num_nodes];
        let mut stack: Vec<usize> = Vec::new();
        on_path[self.source] = true;
        self.extend(
            self.source,
            0.0,
            limit + tol,
            &to_sink,
            &mut on_path,
            &mut stack,
            &mut paths,
            max_paths,
        )?;
        Ok(paths)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        v: usize,
        len: f64,
        bound: f64,
        to_sink: &[f64],
        on_path: &mut [bool],
        stack: &mut Vec<usize>,
        paths: &mut Vec<(f64, Vec<usize>)>,
        max_paths: usize,
    ) -> Result<()> {
        if v == self.sink {
            if paths.len() >= max_paths {
                return Err(Error::SizeLimit(format!(
                    "more than {max_paths} simple paths within the cutoff"
                )));
            }
            // Sum in path order so equal paths get bit-identical lengths.
            let exact = stack.iter().map(|&e| self.arcs[e].2).sum();
            paths.push((exact, stack.clone()));
            return Ok(());
        }
        for &(w, e) in &self.out[v] {
            if on_path[w] {
                continue;
            }
            let nl = len + self.arcs[e].2;
            if nl + to_sink[w] > bound {
                continue;
            }
            on_path[w] = true;
            stack.push(e);
            self.extend(w, nl, bound, to_sink, on_path, stack, paths, max_paths)?;
            stack.pop();
            on_path[w] = false;
        }
        Ok(())
    }

    /// Maximum source–sink flow over surviving edges (Edmonds–Karp).
    pub fn max_flow(&self, alive: impl Fn(usize) -> bool) -> f64 {
        let mut residual = FlowGraph::new(self.num_nodes);
        for (i, &(u, v, c)) in self.arcs.iter().enumerate() {
            if alive(i) {
                let back = if self.directed { 0.0 } else { c };
                residual.add(u, v, c, back);
            }
        }
        residual.run(self.source, self.sink)
    }
}

struct FlowGraph {
    head: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, forward: f64, backward: f64) {
        self.adj[u].push(self.head.len());
        self.head.push(v);
        self.cap.push(forward);
        self.adj[v].push(self.head.len());
        self.head.push(u);
        self.cap.push(backward);
    }

    fn run(&mut self, s: usize, t: usize) -> f64 {
        const EPS: f64 = 1e-12;
        let n = self.adj.len();
        let mut total = 0.0;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.adj[u] {
                    let w = self.head[a];
                    if !seen[w] && self.cap[a] > EPS {
                        seen[w] = true;
                        via[w] = a;
                        queue.push_back(w);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let a = via[v];
                push = push.min(self.cap[a]);
                v = self.head[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = via[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                v = self.head[a ^ 1];
            }
            total += push;
        }
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
