//! Critical-value ladders: the ordered recourse values of a network together
//! with their minimal survivable scenarios.
//!
//! Level `i` of a ladder stores the scenarios that are inclusion-minimal among
//! those reaching value `alpha_i`. The sublevel indicator "recourse at least as
//! good as `alpha_i`" is true exactly on supersets of the points stored at
//! levels `0..=i`; [`CriticalLadder::cumulative_family`] returns its minimal
//! true points.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::instance::{strip_comment, Mode, NetworkInstance};
use crate::scenario::{minimize_family, Scenario};

/// Absolute tolerance used to merge critical values.
pub const VALUE_TOL: f64 = 1e-9;

/// Which direction of the recourse value is "better".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    /// Costs such as path lengths: level `i` means `f <= alpha_i`, alphas increase.
    AtMost,
    /// Throughput such as flows: level `i` means `f >= alpha_i`, alphas decrease.
    AtLeast,
}

impl Sense {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::ShortestPath => Sense::AtMost,
            Mode::MaxFlow => Sense::AtLeast,
        }
    }

    /// Whether `a` is strictly better than `b` beyond the merge tolerance.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::AtMost => a < b - VALUE_TOL,
            Sense::AtLeast => a > b + VALUE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub alpha: f64,
    pub min_true_points: Vec<Scenario>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalLadder {
    pub num_edges: usize,
    pub sense: Sense,
    pub levels: Vec<Level>,
    /// Value charged for scenarios that reach no level.
    pub penalty: Option<f64>,
}

impl CriticalLadder {
    pub fn alphas(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.alpha).collect()
    }

    /// Minimal true points of the sublevel indicator at `level`.
    pub fn cumulative_family(&self, level: usize) -> Vec<Scenario> {
        let all = self.levels[..=level]
            .iter()
            .flat_map(|l| l.min_true_points.iter().cloned())
            .collect();
        minimize_family(all)
    }

    /// Every stored scenario of every level, in ladder order.
    pub fn all_points(&self) -> impl Iterator<Item = &Scenario> {
        self.levels.iter().flat_map(|l| l.min_true_points.iter())
    }

    /// Checks the ladder invariants: strictly improving alphas, nonempty
    /// levels, matching widths, antichains within a level and no level
    /// containing a scenario of an earlier level.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLadder(msg));
        for (i, level) in self.levels.iter().enumerate() {
            if !level.alpha.is_finite() {
                return bad(format!("level {i}: alpha must be finite"));
            }
            if i > 0 && !self.sense.better(self.levels[i - 1].alpha, level.alpha) {
                let dir = match self.sense {
                    Sense::AtMost => "increasing",
                    Sense::AtLeast => "decreasing",
                };
                return bad(format!(
                    "level {i}: alphas must be strictly {dir} ({} then {})",
                    self.levels[i - 1].alpha,
                    level.alpha
                ));
            }
            if level.min_true_points.is_empty() {
                return bad(format!("level {i} (alpha={}) is empty", level.alpha));
            }
            for s in &level.min_true_points {
                if s.width() != self.num_edges {
                    return bad(format!(
                        "level {i}: scenario {s} has width {} but the instance has {} edges",
                        s.width(),
                        self.num_edges
                    ));
                }
            }
            for (a, sa) in level.min_true_points.iter().enumerate() {
                for sb in &level.min_true_points[a + 1..] {
                    if sa.is_subset(sb) || sb.is_subset(sa) {
                        return bad(format!(
                            "antichain violation at level {i} (alpha={}): {sa} and {sb}",
                            level.alpha
                        ));
                    }
                }
            }
            for (j, earlier) in self.levels[..i].iter().enumerate() {
                for lower in &earlier.min_true_points {
                    if let Some(s) = level.min_true_points.iter().find(|s| lower.is_subset(s)) {
                        return bad(format!(
                            "minimality violation: level {i} scenario {s} contains level {j} scenario {lower}"
                        ));
                    }
                }
            }
        }
        if let (Some(pen), Some(last)) = (self.penalty, self.levels.last()) {
            if !self.sense.better(last.alpha, pen) {
                return bad(format!(
                    "penalty {pen} must be worse than the last level alpha {}",
                    last.alpha
                ));
            }
        }
        Ok(())
    }

    /// Recourse value of `xi` read off the ladder, `None` if no level holds
    /// and there is no penalty.
    pub fn value_of(&self, xi: &Scenario) -> Option<f64> {
        self.levels
            .iter()
            .find(|l| l.min_true_points.iter().any(|m| m.is_subset(xi)))
            .map(|l| l.alpha)
            .or(self.penalty)
    }
}

/// Limits for the enumeration routines.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    /// Most simple paths collected before aborting.
    pub max_paths: usize,
    /// Largest edge count accepted by the brute-force flow enumeration.
    pub flow_edge_limit: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_paths: 1_000_000,
            flow_edge_limit: 24,
        }
    }
}

/// Builds the ladder appropriate for the instance's mode.
pub fn enumerate_ladder(inst: &NetworkInstance, limits: &EnumerationLimits) -> Result<CriticalLadder> {
    match inst.mode {
        Mode::ShortestPath => enumerate_shortest_paths(inst, limits),
        Mode::MaxFlow => enumerate_flow_levels(inst, limits),
    }
}

/// Groups the simple source–sink paths within the cutoff by length.
pub fn enumerate_shortest_paths(
    inst: &NetworkInstance,
    limits: &EnumerationLimits,
) -> Result<CriticalLadder> {
    if inst.mode != Mode::ShortestPath {
        return Err(Error::InvalidArgument("instance is not in shortest_path mode".into()));
    }
    let net = Network::new(inst);
    let m = inst.num_edges();
    let limit = inst.cutoff.unwrap_or(f64::INFINITY);
    let mut paths = net.simple_paths(limit, VALUE_TOL, limits.max_paths)?;
    if paths.is_empty() && inst.penalty.is_none() {
        return Err(Error::RecourseUndefined(format!(
            "no {}–{} path and no penalty defined",
            inst.source, inst.sink
        )));
    }
    paths.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut levels: Vec<Level> = Vec::new();
    for (len, edges) in paths {
        let s = Scenario::from_edges(m, edges.iter().map(|e| e + 1));
        match levels.last_mut() {
            Some(level) if len - level.alpha <= VALUE_TOL => level.min_true_points.push(s),
            _ => levels.push(Level {
                alpha: len,
                min_true_points: vec![s],
            }),
        }
    }
    Ok(prune_levels(m, Sense::AtMost, levels, inst.penalty))
}

/// Drops, level by level, scenarios that contain a scenario of an earlier
/// level or another scenario of the same level, then removes emptied levels.
fn prune_levels(num_edges: usize, sense: Sense, levels: Vec<Level>, penalty: Option<f64>) -> CriticalLadder {
    let mut kept: Vec<Level> = Vec::with_capacity(levels.len());
    for level in levels {
        let mut pts = minimize_family(level.min_true_points);
        pts.retain(|s| {
            !kept
                .iter()
                .any(|l| l.min_true_points.iter().any(|m| m.is_subset(s)))
        });
        if !pts.is_empty() {
            kept.push(Level {
                alpha: level.alpha,
                min_true_points: pts,
            });
        }
    }
    CriticalLadder {
        num_edges,
        sense,
        levels: kept,
        penalty,
    }
}

/// Enumerates every surviving-arc subset, evaluates its max flow and keeps the
/// subsets whose every single-arc removal strictly lowers the flow.
pub fn enumerate_flow_levels(
    inst: &NetworkInstance,
    limits: &EnumerationLimits,
) -> Result<CriticalLadder> {
    if inst.mode != Mode::MaxFlow {
        return Err(Error::InvalidArgument("instance is not in max_flow mode".into()));
    }
    let m = inst.num_edges();
    if m > limits.flow_edge_limit {
        return Err(Error::SizeLimit(format!(
            "{m} arcs exceed the brute-force flow enumeration limit of {}; supply an external ladder file instead",
            limits.flow_edge_limit
        )));
    }
    let net = Network::new(inst);
    let flows: Vec<f64> = (0..1u64 << m)
        .map(|mask| net.max_flow(|e| mask >> e & 1 == 1))
        .collect();

    let mut minimal: Vec<(f64, u64)> = Vec::new();
    for (mask, &f) in flows.iter().enumerate() {
        let mask = mask as u64;
        let strict = (0..m)
            .filter(|&e| mask >> e & 1 == 1)
            .all(|e| flows[(mask & !(1 << e)) as usize] < f - VALUE_TOL);
        if strict {
            minimal.push((f, mask));
        }
    }
    minimal.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut levels: Vec<Level> = Vec::new();
    for (f, mask) in minimal {
        let s = Scenario::from_mask(m, mask);
        match levels.last_mut() {
            Some(level) if level.alpha - f <= VALUE_TOL => level.min_true_points.push(s),
            _ => levels.push(Level {
                alpha: f,
                min_true_points: vec![s],
            }),
        }
    }
    Ok(prune_levels(m, Sense::AtLeast, levels, None))
}

/// Writes the ladder file: `[level] alpha=<v>` headers each followed by one
/// `{0,1}` scenario per line, then an optional `[penalty] alpha=<v>`.
pub fn write_ladder(ladder: &CriticalLadder) -> String {
    let mut out = String::new();
    for level in &ladder.levels {
        let _ = writeln!(out, "[level] alpha={}", level.alpha);
        for s in &level.min_true_points {
            let _ = writeln!(out, "{s}");
        }
    }
    if let Some(p) = ladder.penalty {
        let _ = writeln!(out, "[penalty] alpha={p}");
    }
    out
}

fn parse_alpha(rest: &str, line: usize) -> Result<f64> {
    let value = rest
        .trim()
        .strip_prefix("alpha=")
        .ok_or_else(|| Error::Syntax {
            line,
            message: "expected alpha=<real> after the section header".into(),
        })?;
    value.trim().parse::<f64>().map_err(|_| Error::Syntax {
        line,
        message: format!("cannot parse alpha '{value}'"),
    })
}

/// Parses a ladder file for `inst` and verifies every ladder invariant.
pub fn load_ladder(text: &str, inst: &NetworkInstance) -> Result<CriticalLadder> {
    let m = inst.num_edges();
    let mut levels: Vec<Level> = Vec::new();
    let mut penalty = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("[level]") {
            if penalty.is_some() {
                return Err(Error::Syntax {
                    line,
                    message: "[level] after [penalty]".into(),
                });
            }
            levels.push(Level {
                alpha: parse_alpha(rest, line)?,
                min_true_points: Vec::new(),
            });
        } else if let Some(rest) = body.strip_prefix("[penalty]") {
            penalty = Some(parse_alpha(rest, line)?);
        } else {
            let s = Scenario::from_bitstring(body).ok_or_else(|| Error::Syntax {
                line,
                message: format!("expected a {{0,1}} string, found '{body}'"),
            })?;
            if s.width() != m {
                return Err(Error::Syntax {
                    line,
                    message: format!("scenario width {} differs from |E| = {m}", s.width()),
                });
            }
            match (levels.last_mut(), penalty) {
                (Some(level), None) => level.min_true_points.push(s),
                _ => {
                    return Err(Error::Syntax {
                        line,
                        message: "scenario outside a [level] section".into(),
                    })
                }
            }
        }
    }
    let ladder = CriticalLadder {
        num_edges: m,
        sense: Sense::for_mode(inst.mode),
        levels,
        penalty,
    };
    ladder.validate()?;
    Ok(ladder)
}

/// Minimal failure sets that push the recourse past `alpha_level`: the minimal
/// transversals of the level's cumulative family. Aborts once more than
/// `max_sets` partial transversals are alive.
pub fn failure_clutter(ladder: &CriticalLadder, level: usize, max_sets: usize) -> Result<Vec<Scenario>> {
    if level >= ladder.levels.len() {
        return Err(Error::InvalidArgument(format!(
            "level {level} out of range (ladder has {})",
            ladder.levels.len()
        )));
    }
    minimal_transversals(ladder.num_edges, &ladder.cumulative_family(level), max_sets)
}

/// Berge-style incremental dualization of a clutter.
pub fn minimal_transversals(width: usize, family: &[Scenario], max_sets: usize) -> Result<Vec<Scenario>> {
    let mut current = vec![Scenario::empty(width)];
    for edge in family {
        let mut next = Vec::with_capacity(current.len());
        for t in &current {
            if t.intersects(edge) {
                next.push(t.clone());
            } else {
                for e in edge.edges() {
                    let mut grown = t.clone();
                    grown.insert(e);
                    next.push(grown);
                }
            }
        }
        current = minimize_family(next);
        if current.len() > max_sets {
            return Err(Error::SizeLimit(format!(
                "transversal family exceeds {max_sets} sets ({} after {} of {} hyperedges)",
                current.len(),
                family.iter().position(|f| f == edge).unwrap_or(0) + 1,
                family.len()
            )));
        }
    }
    Ok(current)
}
