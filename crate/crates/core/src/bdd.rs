//! Reduced ordered binary decision diagrams for monotone scenario indicators.
//!
//! Nodes are hash-consed in a unique table keyed by `(layer, lo, hi)`; there
//! are no complemented arcs. After construction every diagram is renumbered
//! canonically: by layer, and within a layer by first discovery in a
//! depth-first walk from the root that visits the `lo` child before `hi`.
//! Two diagrams for the same function and order are therefore equal as values.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::order::check_permutation;
use crate::scenario::{minimize_family, Scenario};

/// Default cap on internal nodes per diagram.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    False,
    True,
    Node(u32),
}

impl NodeRef {
    pub fn index(self) -> Option<usize> {
        match self {
            NodeRef::Node(i) => Some(i as usize),
            _ => None,
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::False => f.write_str("F"),
            NodeRef::True => f.write_str("T"),
            NodeRef::Node(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    /// 1-based position in the variable order.
    pub layer: usize,
    /// Target of the FALSE arc (edge failed).
    pub lo: NodeRef,
    /// Target of the TRUE arc (edge survived).
    pub hi: NodeRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bdd {
    num_vars: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
    root: NodeRef,
}

/// Size figures of one diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BddStats {
    /// Internal nodes plus both terminals; 1 for a terminal-only diagram.
    pub total_size: usize,
    pub internal_nodes: usize,
    /// Largest layer width.
    pub width: usize,
    pub layer_widths: Vec<usize>,
}

impl Bdd {
    /// Assembles a diagram from raw parts, checks it and renumbers it canonically.
    pub fn from_parts(num_vars: usize, order: Vec<usize>, nodes: Vec<Node>, root: NodeRef) -> Result<Self> {
        check_permutation(&order, num_vars)?;
        let raw = Bdd {
            num_vars,
            order,
            nodes,
            root,
        };
        for (i, n) in raw.nodes.iter().enumerate() {
            for child in [n.lo, n.hi] {
                if let Some(c) = child.index() {
                    if c >= raw.nodes.len() {
                        return Err(Error::InvalidArgument(format!("node {i} points to missing node {c}")));
                    }
                }
            }
        }
        if let Some(r) = root.index() {
            if r >= raw.nodes.len() {
                return Err(Error::InvalidArgument(format!("root {r} is not a node")));
            }
        }
        let violations = raw.structure_violations();
        if !violations.is_empty() {
            return Err(Error::InvalidArgument(violations.join("; ")));
        }
        Ok(raw.canonical())
    }

    /// The constant diagram for `value`.
    pub fn constant(num_vars: usize, order: Vec<usize>, value: bool) -> Self {
        Bdd {
            num_vars,
            order,
            nodes: Vec::new(),
            root: if value { NodeRef::True } else { NodeRef::False },
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// `order[k]` is the 1-based edge id tested at layer `k + 1`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeRef {
        self.root
    }

    /// Edge id tested at node `id`.
    pub fn edge_of(&self, id: usize) -> usize {
        self.order[self.nodes[id].layer - 1]
    }

    pub fn internal_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates the encoded function on a scenario of surviving edges.
    pub fn eval(&self, xi: &Scenario) -> bool {
        assert_eq!(xi.width(), self.num_vars, "scenario width differs from the diagram's variable count");
        let mut at = self.root;
        loop {
            match at {
                NodeRef::True => return true,
                NodeRef::False => return false,
                NodeRef::Node(i) => {
                    let n = &self.nodes[i as usize];
                    at = if xi.contains(self.order[n.layer - 1]) { n.hi } else { n.lo };
                }
            }
        }
    }

    /// The diagram with every arc label flipped. For a monotone `Φ` it encodes
    /// `¬Φᴰ(x) = Φ(¬x)`; node and layer counts are unchanged.
    pub fn dual(&self) -> Bdd {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                layer: n.layer,
                lo: n.hi,
                hi: n.lo,
            })
            .collect();
        Bdd {
            num_vars: self.num_vars,
            order: self.order.clone(),
            nodes,
            root: self.root,
        }
        .canonical()
    }

    pub fn stats(&self) -> BddStats {
        let mut layer_widths = vec![0usize; self.num_vars];
        for n in &self.nodes {
            layer_widths[n.layer - 1] += 1;
        }
        BddStats {
            total_size: if self.nodes.is_empty() { 1 } else { self.nodes.len() + 2 },
            internal_nodes: self.nodes.len(),
            width: layer_widths.iter().copied().max().unwrap_or(0),
            layer_widths,
        }
    }

    /// Reports broken structural invariants (ordered, reduced, single root,
    /// every node reachable). Empty for every diagram this crate produces.
    pub fn structure_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let layer = |r: NodeRef| match r {
            NodeRef::Node(i) => self.nodes[i as usize].layer,
            _ => self.num_vars + 1,
        };
        let mut seen = HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.layer == 0 || n.layer > self.num_vars {
                out.push(format!("node {i}: layer {} out of range", n.layer));
                continue;
            }
            if n.lo == n.hi {
                out.push(format!("node {i}: redundant (lo == hi)"));
            }
            if layer(n.lo) <= n.layer || layer(n.hi) <= n.layer {
                out.push(format!("node {i}: arc does not descend to a higher layer"));
            }
            if let Some(j) = seen.insert(*n, i) {
                out.push(format!("nodes {j} and {i}: duplicate (layer, lo, hi)"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let mut reached = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeRef> = vec![self.root];
        while let Some(r) = stack.pop() {
            if let NodeRef::Node(i) = r {
                if !std::mem::replace(&mut reached[i as usize], true) {
                    let n = &self.nodes[i as usize];
                    stack.push(n.lo);
                    stack.push(n.hi);
                }
            }
        }
        for (i, r) in reached.iter().enumerate() {
            if !r {
                out.push(format!("node {i}: unreachable from the root"));
            }
        }
        out
    }

    /// Renumbers nodes by (layer, lo-first DFS discovery). Drops unreachable nodes.
    fn canonical(&self) -> Bdd {
        let n = self.nodes.len();
        let mut rank = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack: Vec<NodeRef> = vec![self.root];
        while let Some(r) = stack.pop() {
            if let NodeRef::Node(i) = r {
                let i = i as usize;
                if rank[i] == usize::MAX {
                    rank[i] = next;
                    next += 1;
                    stack.push(self.nodes[i].hi);
                    stack.push(self.nodes[i].lo);
                }
            }
        }
        let mut ids: Vec<usize> = (0..n).filter(|&i| rank[i] != usize::MAX).collect();
        ids.sort_by_key(|&i| (self.nodes[i].layer, rank[i]));
        let mut remap = vec![0u32; n];
        for (new, &old) in ids.iter().enumerate() {
            remap[old] = new as u32;
        }
        let map = |r: NodeRef| match r {
            NodeRef::Node(i) => NodeRef::Node(remap[i as usize]),
            t => t,
        };
        Bdd {
            num_vars: self.num_vars,
            order: self.order.clone(),
            nodes: ids
                .iter()
                .map(|&i| {
                    let node = self.nodes[i];
                    Node {
                        layer: node.layer,
                        lo: map(node.lo),
                        hi: map(node.hi),
                    }
                })
                .collect(),
            root: map(self.root),
        }
    }

    /// Line-oriented dump:
    ///
    /// ```text
    /// bdd vars=<n> root=<id|T|F>
    /// order <e1> <e2> ...
    /// <id> <edge> <lo> <hi>
    /// ```
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bdd vars={} root={}", self.num_vars, self.root);
        let order: Vec<String> = self.order.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "order {}", order.join(" "));
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {}", self.order[n.layer - 1], n.lo, n.hi);
        }
        out
    }
}

struct Builder {
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    memo: HashMap<Vec<Scenario>, NodeRef>,
    cap: usize,
}

impl Builder {
    fn mk(&mut self, layer: usize, lo: NodeRef, hi: NodeRef) -> Result<NodeRef> {
        if lo == hi {
            return Ok(lo);
        }
        let key = Node { layer, lo, hi };
        if let Some(&id) = self.unique.get(&key) {
            return Ok(NodeRef::Node(id));
        }
        if self.nodes.len() >= self.cap {
            return Err(Error::SizeLimit(format!(
                "BDD node cap {} reached at layer {layer} ({} memoized subfamilies)",
                self.cap,
                self.memo.len()
            )));
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(key);
        self.unique.insert(key, id);
        Ok(NodeRef::Node(id))
    }

    /// `family` is a canonical clutter over layer positions.
    fn build(&mut self, family: Vec<Scenario>) -> Result<NodeRef> {
        if family.is_empty() {
            return Ok(NodeRef::False);
        }
        if family[0].is_empty() {
            return Ok(NodeRef::True);
        }
        if let Some(&r) = self.memo.get(&family) {
            return Ok(r);
        }
        let top = family
            .iter()
            .filter_map(Scenario::first_bit)
            .min()
            .expect("nonempty sets");
        let lo_family: Vec<Scenario> = family.iter().filter(|s| !s.has_bit(top)).cloned().collect();
        let hi_family = minimize_family(
            family
                .iter()
                .map(|s| {
                    let mut t = s.clone();
                    t.clear_bit(top);
                    t
                })
                .collect(),
        );
        let lo = self.build(lo_family)?;
        let hi = self.build(hi_family)?;
        let r = self.mk(top + 1, lo, hi)?;
        self.memo.insert(family, r);
        Ok(r)
    }
}

/// Compiles the monotone function whose minimal true points are `points`
/// (true on every superset of some point) under the edge `order`.
///
/// The input need not be minimized; duplicates and supersets are dropped first.
pub fn compile_monotone(points: &[Scenario], order: &[usize], node_cap: usize) -> Result<Bdd> {
    let num_vars = order.len();
    check_permutation(order, num_vars)?;
    let mut position = vec![0usize; num_vars];
    for (k, &e) in order.iter().enumerate() {
        position[e - 1] = k;
    }
    let mut family = Vec::with_capacity(points.len());
    for s in points {
        if s.width() != num_vars {
            return Err(Error::InvalidArgument(format!(
                "scenario {s} has width {} but the order covers {num_vars} edges",
                s.width()
            )));
        }
        let mut t = Scenario::empty(num_vars);
        for b in s.bits() {
            t.set_bit(position[b]);
        }
        family.push(t);
    }
    let mut builder = Builder {
        nodes: Vec::new(),
        unique: HashMap::new(),
        memo: HashMap::new(),
        cap: node_cap,
    };
    let root = builder.build(minimize_family(family))?;
    Ok(Bdd {
        num_vars,
        order: order.to_vec(),
        nodes: builder.nodes,
        root,
    }
    .canonical())
}

/// Largest span, in layers, covered by one scenario of `family` under `order`
/// (0 for a family of empty sets).
pub fn incidence_bandwidth(family: &[Scenario], order: &[usize]) -> usize {
    let mut position = vec![0usize; order.len()];
    for (k, &e) in order.iter().enumerate() {
        position[e - 1] = k;
    }
    family
        .iter()
        .filter_map(|s| {
            let pos = s.bits().map(|b| position[b]);
            let (lo, hi) = pos.fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p), hi.max(p)));
            (lo != usize::MAX).then(|| hi - lo + 1)
        })
        .max()
        .unwrap_or(0)
}
