//! Network instances and their on-disk text format.
//!
//! ```text
//! # comment
//! [meta] mode=shortest_path directed=0 source=s sink=t cutoff=10 penalty=120 budget=1
//! [nodes]
//! s
//! t
//! [edges]
//! s t 7 0.9 0.05 1 1
//! ```
//!
//! Edge lines are `<tail> <head> <length-or-capacity> <p> <delta> <cost> <decidable>`,
//! and their order in the file is the canonical edge index `1..=|E|`.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Slack allowed when checking `p + delta` against `[0, 1]`.
const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    ShortestPath,
    MaxFlow,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ShortestPath => "shortest_path",
            Mode::MaxFlow => "max_flow",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// 1-based canonical index.
    pub id: usize,
    pub tail: String,
    pub head: String,
    /// Length in shortest-path mode, capacity in max-flow mode.
    pub weight: f64,
    /// Nominal probability that the edge survives.
    pub p: f64,
    /// Shift applied to `p` when the edge's decision is taken.
    pub delta: f64,
    pub cost: f64,
    pub decidable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkInstance {
    pub mode: Mode,
    pub directed: bool,
    pub source: String,
    pub sink: String,
    /// `None` means no distance limit.
    pub cutoff: Option<f64>,
    pub penalty: Option<f64>,
    pub budget: f64,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

/// One broken invariant, as reported by [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

impl NetworkInstance {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id - 1]
    }

    /// Nominal survival probabilities indexed by `edge id - 1`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.p).collect()
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.delta).collect()
    }

    /// Probabilities after applying decision `x`.
    pub fn shifted_probabilities(&self, x: &Decision) -> Vec<f64> {
        shift(&self.probabilities(), &self.deltas(), x)
    }

    /// 1-based ids of the edges that carry a decision variable.
    pub fn decidable_edges(&self) -> Vec<usize> {
        self.edges.iter().filter(|e| e.decidable).map(|e| e.id).collect()
    }

    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    }

    /// Cost of `x` under the instance's decision costs.
    pub fn decision_cost(&self, x: &Decision) -> f64 {
        x.taken().fold(0.0, |acc, e| acc + self.edge(e).cost)
    }

    /// Budget-feasible and only touching decidable edges.
    pub fn is_feasible(&self, x: &Decision) -> bool {
        x.len() == self.num_edges()
            && x.taken().all(|e| self.edge(e).decidable)
            && self.decision_cost(x) <= self.budget + 1e-9
    }
}

/// `p_i + x_i * delta_i`, clamped against rounding so it stays a probability.
pub fn shift(p: &[f64], delta: &[f64], x: &Decision) -> Vec<f64> {
    p.iter()
        .zip(delta)
        .enumerate()
        .map(|(i, (&p, &d))| {
            if x.get(i + 1) {
                (p + d).clamp(0.0, 1.0)
            } else {
                p
            }
        })
        .collect()
}

/// First-stage decision vector `x ∈ {0,1}^|E|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decision(Vec<bool>);

impl Decision {
    pub fn zeros(n: usize) -> Self {
        Decision(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Decision(bits)
    }

    pub fn from_bitstring(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Decision)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut x = Self::zeros(n);
        for e in edges {
            x.0[e - 1] = true;
        }
        x
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value for 1-based edge `e`.
    pub fn get(&self, e: usize) -> bool {
        self.0[e - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// 1-based ids with `x_e = 1`.
    pub fn taken(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i + 1)
    }

    pub fn to_bitstring(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn support(&self) -> Scenario {
        Scenario::from_edges(self.len(), self.taken())
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Checks every instance invariant; an empty list means the instance is valid.
pub fn validate_instance(inst: &NetworkInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: String, rule: &str| {
        out.push(Violation {
            field,
            rule: rule.to_string(),
        })
    };

    let mut seen = HashSet::new();
    for n in &inst.nodes {
        if !seen.insert(n.as_str()) {
            push(format!("node {n}"), "duplicate node id");
        }
    }
    for (name, id) in [("source", &inst.source), ("sink", &inst.sink)] {
        if !seen.contains(id.as_str()) {
            push(name.to_string(), "references an undeclared node");
        }
    }
    if inst.source == inst.sink {
        push("source".to_string(), "source equals sink");
    }
    if !(inst.budget >= 0.0 && inst.budget.is_finite()) {
        push("budget".to_string(), "must be a finite nonnegative number");
    }
    if let Some(c) = inst.cutoff {
        if c.is_nan() || c < 0.0 {
            push("cutoff".to_string(), "must be nonnegative");
        }
    }
    if inst.mode == Mode::ShortestPath {
        match (inst.cutoff, inst.penalty) {
            (Some(_), None) => push("penalty".to_string(), "penalty required with a finite cutoff"),
            (Some(c), Some(pen)) if pen.is_nan() || pen <= c => {
                push("penalty".to_string(), "penalty must exceed the cutoff")
            }
            _ => {}
        }
    }
    if let Some(pen) = inst.penalty {
        if !pen.is_finite() {
            push("penalty".to_string(), "must be finite");
        }
    }

    for (i, e) in inst.edges.iter().enumerate() {
        let field = format!("edge {}", i + 1);
        if e.id != i + 1 {
            push(field.clone(), "edge indices must be contiguous 1..|E|");
        }
        if !seen.contains(e.tail.as_str()) || !seen.contains(e.head.as_str()) {
            push(field.clone(), "endpoint references an undeclared node");
        }
        if !(e.weight > 0.0 && e.weight.is_finite()) {
            let what = match inst.mode {
                Mode::ShortestPath => "length must be positive and finite",
                Mode::MaxFlow => "capacity must be positive and finite",
            };
            push(field.clone(), what);
        }
        if !(0.0..=1.0).contains(&e.p) {
            push(field.clone(), "p out of [0,1]");
        } else if !(e.delta >= -e.p - PROB_TOL && e.delta <= 1.0 - e.p + PROB_TOL) {
            push(field.clone(), "delta out of [-p,1-p]");
        }
        if !(e.cost >= 0.0 && e.cost.is_finite()) {
            push(field.clone(), "cost must be nonnegative");
        }
        if !e.decidable && e.delta != 0.0 {
            push(field, "delta must be 0 on a non-decidable edge");
        }
    }
    out
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v = match tok {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => tok.parse::<f64>().map_err(|_| Error::Syntax {
            line,
            message: format!("{what}: cannot parse '{tok}' as a real number"),
        })?,
    };
    if v.is_nan() {
        return Err(Error::Syntax {
            line,
            message: format!("{what}: NaN is not allowed"),
        });
    }
    Ok(v)
}

fn parse_flag(tok: &str, line: usize, what: &str) -> Result<bool> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Syntax {
            line,
            message: format!("{what}: expected 0 or 1, found '{tok}'"),
        }),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Meta,
    Nodes,
    Edges,
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<NetworkInstance> {
    let mut section = Section::None;
    let mut meta: Vec<(String, String, usize)> = Vec::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let mut line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let close = rest.find(']').ok_or_else(|| Error::Syntax {
                line: lineno,
                message: "unterminated section header".into(),
            })?;
            section = match &rest[..close] {
                "meta" => Section::Meta,
                "nodes" => Section::Nodes,
                "edges" => Section::Edges,
                other => {
                    return Err(Error::Syntax {
                        line: lineno,
                        message: format!("unknown section [{other}]"),
                    })
                }
            };
            line = rest[close + 1..].trim();
            if line.is_empty() {
                continue;
            }
        }
        match section {
            Section::None => {
                return Err(Error::Syntax {
                    line: lineno,
                    message: "content before the first section header".into(),
                })
            }
            Section::Meta => {
                for tok in line.split_whitespace() {
                    let (k, v) = tok.split_once('=').ok_or_else(|| Error::Syntax {
                        line: lineno,
                        message: format!("expected key=value, found '{tok}'"),
                    })?;
                    meta.push((k.to_string(), v.to_string(), lineno));
                }
            }
            Section::Nodes => {
                let mut toks = line.split_whitespace();
                let id = toks.next().unwrap_or_default();
                if toks.next().is_some() {
                    return Err(Error::Syntax {
                        line: lineno,
                        message: "expected one node id per line".into(),
                    });
                }
                nodes.push(id.to_string());
            }
            Section::Edges => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 7 {
                    return Err(Error::Syntax {
                        line: lineno,
                        message: format!(
                            "edge line needs 7 fields (tail head weight p delta cost decidable), found {}",
                            toks.len()
                        ),
                    });
                }
                edges.push(Edge {
                    id: edges.len() + 1,
                    tail: toks[0].to_string(),
                    head: toks[1].to_string(),
                    weight: parse_real(toks[2], lineno, "weight")?,
                    p: parse_real(toks[3], lineno, "p")?,
                    delta: parse_real(toks[4], lineno, "delta")?,
                    cost: parse_real(toks[5], lineno, "cost")?,
                    decidable: parse_flag(toks[6], lineno, "decidable")?,
                });
            }
        }
    }

    let mut mode = None;
    let mut directed = None;
    let mut source = None;
    let mut sink = None;
    let mut cutoff = None;
    let mut penalty = None;
    let mut budget = 0.0;
    for (k, v, line) in meta {
        match k.as_str() {
            "mode" => {
                mode = Some(match v.as_str() {
                    "shortest_path" => Mode::ShortestPath,
                    "max_flow" => Mode::MaxFlow,
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            message: format!("unknown mode '{v}'"),
                        })
                    }
                })
            }
            "directed" => directed = Some(parse_flag(&v, line, "directed")?),
            "source" => source = Some(v),
            "sink" => sink = Some(v),
            "cutoff" => {
                let c = parse_real(&v, line, "cutoff")?;
                cutoff = if c.is_infinite() { None } else { Some(c) };
            }
            "penalty" => penalty = Some(parse_real(&v, line, "penalty")?),
            "budget" => budget = parse_real(&v, line, "budget")?,
            _ => {
                return Err(Error::Syntax {
                    line,
                    message: format!("unknown meta key '{k}'"),
                })
            }
        }
    }
    let missing = |what: &str| Error::Syntax {
        line: 1,
        message: format!("[meta] is missing '{what}'"),
    };
    let mode = mode.ok_or_else(|| missing("mode"))?;
    let inst = NetworkInstance {
        mode,
        directed: directed.unwrap_or(mode == Mode::MaxFlow),
        source: source.ok_or_else(|| missing("source"))?,
        sink: sink.ok_or_else(|| missing("sink"))?,
        cutoff,
        penalty,
        budget,
        nodes,
        edges,
    };
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(Error::InvalidInstance(msgs.join("; ")))
    }
}

/// Canonical text form; `parse_instance(&serialize_instance(i))` returns `i`.
pub fn serialize_instance(inst: &NetworkInstance) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "[meta] mode={} directed={} source={} sink={} cutoff={}",
        inst.mode.as_str(),
        inst.directed as u8,
        inst.source,
        inst.sink,
        inst.cutoff.map_or_else(|| "inf".to_string(), |c| c.to_string()),
    );
    if let Some(p) = inst.penalty {
        let _ = write!(out, " penalty={p}");
    }
    let _ = writeln!(out, " budget={}", inst.budget);
    out.push_str("[nodes]\n");
    for n in &inst.nodes {
        out.push_str(n);
        out.push('\n');
    }
    out.push_str("[edges]\n");
    for e in &inst.edges {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {}",
            e.tail, e.head, e.weight, e.p, e.delta, e.cost, e.decidable as u8
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_EDGE: &str = "\
# minimal instance
[meta] mode=shortest_path source=s sink=t penalty=120 budget=1
[nodes]
s
t
[edges]
s t 7 0.9 0.05 1 1
";

    #[test]
    fn parses_minimal_instance() {
        let inst = parse_instance(ONE_EDGE).unwrap();
        assert_eq!(inst.num_edges(), 1);
        assert_eq!(inst.mode, Mode::ShortestPath);
        assert!(!inst.directed);
        assert_eq!(inst.cutoff, None);
        let e = inst.edge(1);
        assert_eq!((e.p, e.delta, e.cost, e.decidable), (0.9, 0.05, 1.0, true));
    }

    #[test]
    fn finite_cutoff_requires_penalty() {
        let text = ONE_EDGE.replace("penalty=120", "cutoff=10");
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("penalty required"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = ONE_EDGE.replace("s t 7 0.9 0.05 1 1", "s t 7 0.9 0.05 1");
        match parse_instance(&text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
        let text = ONE_EDGE.replace("0.9 0.05", "zero 0.05");
        assert!(matches!(parse_instance(&text), Err(Error::Syntax { line: 7, .. })));
    }

    #[test]
    fn delta_range_is_checked_per_edge() {
        let text = ONE_EDGE.replace("0.9 0.05", "0.9 0.2");
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("edge 1: delta out of [-p,1-p]"), "{err}");
    }

    #[test]
    fn validate_reports_each_violation() {
        let mut inst = parse_instance(ONE_EDGE).unwrap();
        assert!(validate_instance(&inst).is_empty());

        inst.edges[0].p = 1.2;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "edge 1");

        let mut inst = parse_instance(ONE_EDGE).unwrap();
        inst.sink = "s".into();
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "source equals sink");
    }

    #[test]
    fn non_decidable_edge_with_delta_is_rejected() {
        let text = ONE_EDGE.replace("0.05 1 1", "0.05 1 0");
        assert!(parse_instance(&text).is_err());
    }

    #[test]
    fn serialize_is_canonical() {
        let inst = parse_instance(ONE_EDGE).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn decision_feasibility() {
        let inst = parse_instance(ONE_EDGE).unwrap();
        assert!(inst.is_feasible(&Decision::from_bitstring("1").unwrap()));
        let mut tight = inst.clone();
        tight.budget = 0.5;
        assert!(!tight.is_feasible(&Decision::from_bitstring("1").unwrap()));
        assert!(!inst.is_feasible(&Decision::zeros(2)));
    }
}
