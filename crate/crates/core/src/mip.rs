//! The mixed-integer model: one probability-flow block per ladder level,
//! shared decision columns, level probabilities as first differences of
//! root probabilities, and the budget row.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::bdd::{Bdd, NodeRef};
use crate::error::{Error, Result};
use crate::instance::{Decision, NetworkInstance};
use crate::recourse::CriticalLadder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRole {
    /// Probability of reaching ⊤ from `node` in the level's diagram.
    NodeProb { level: usize, node: usize },
    Decision { edge: usize },
    /// Probability that the recourse equals the level's value.
    LevelProb { level: usize },
    PenaltyProb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub role: VarRole,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowRole {
    Node { level: usize, node: usize },
    LevelDef { level: usize },
    PenaltyDef,
    /// All mass must reach some level when no penalty exists.
    Complete,
    Budget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`; zero coefficients are kept so the
    /// sparsity pattern does not depend on the data.
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub role: RowRole,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MipModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimized.
    pub objective: Vec<(usize, f64)>,
}

/// Per-level size figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelCounts {
    pub node_vars: usize,
    pub node_rows: usize,
    /// Level columns plus every decision column.
    pub formula_vars: usize,
    /// Level rows plus the budget row.
    pub formula_rows: usize,
}

impl MipModel {
    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn decision_index(&self, edge: usize) -> Option<usize> {
        self.variables
            .iter()
            .position(|v| v.role == VarRole::Decision { edge })
    }

    pub fn level_counts(&self, level: usize) -> LevelCounts {
        let node_vars = self
            .variables
            .iter()
            .filter(|v| matches!(v.role, VarRole::NodeProb { level: l, .. } if l == level))
            .count();
        let decisions = self
            .variables
            .iter()
            .filter(|v| matches!(v.role, VarRole::Decision { .. }))
            .count();
        let node_rows = self
            .constraints
            .iter()
            .filter(|c| matches!(c.role, RowRole::Node { level: l, .. } if l == level))
            .count();
        let budget = self.constraints.iter().filter(|c| c.role == RowRole::Budget).count();
        LevelCounts {
            node_vars,
            node_rows,
            formula_vars: node_vars + decisions,
            formula_rows: node_rows + budget,
        }
    }

    /// Hash of names, kinds, senses and sparsity pattern; coefficients,
    /// right-hand sides and bounds are excluded.
    pub fn structure_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for v in &self.variables {
            v.name.hash(&mut h);
            v.kind.hash(&mut h);
        }
        for c in &self.constraints {
            c.name.hash(&mut h);
            c.sense.hash(&mut h);
            for &(j, _) in &c.terms {
                j.hash(&mut h);
            }
        }
        for &(j, _) in &self.objective {
            j.hash(&mut h);
        }
        h.finish()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Largest violation of any row or bound by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &y) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - y).max(y - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(j, a)| a * values[j]).sum();
            let gap = match c.sense {
                RowSense::Le => lhs - c.rhs,
                RowSense::Ge => c.rhs - lhs,
                RowSense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

/// A variable reference or a substituted terminal constant.
enum Operand {
    Var(usize),
    Const(f64),
}

struct RowBuilder {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl RowBuilder {
    fn new() -> Self {
        RowBuilder { terms: Vec::new(), constant: 0.0 }
    }

    fn add(mut self, op: &Operand, coef: f64) -> Self {
        match *op {
            Operand::Var(j) => self.terms.push((j, coef)),
            Operand::Const(c) => self.constant += coef * c,
        }
        self
    }

    /// `terms + constant (sense) rhs`, constants moved to the right.
    fn finish(self, name: String, sense: RowSense, rhs: f64, role: RowRole) -> Constraint {
        Constraint {
            name,
            terms: self.terms,
            sense,
            rhs: rhs - self.constant,
            role,
        }
    }
}

/// Builds the model for minimizing expected recourse over budget-feasible
/// decisions. `bdds[i]` must encode level `i` of `ladder` and all diagrams
/// must share one variable order.
pub fn emit_mip(inst: &NetworkInstance, ladder: &CriticalLadder, bdds: &[Bdd]) -> Result<MipModel> {
    let m = inst.num_edges();
    if bdds.len() != ladder.levels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} diagrams for {} ladder levels",
            bdds.len(),
            ladder.levels.len()
        )));
    }
    if ladder.num_edges != m || bdds.iter().any(|b| b.num_vars() != m) {
        return Err(Error::InvalidArgument(format!(
            "instance has {m} edges but the ladder or a diagram does not"
        )));
    }
    if let Some(i) = bdds.iter().position(|b| b.order() != bdds[0].order()) {
        return Err(Error::InvalidArgument(format!(
            "diagram of level {i} uses a different variable order than level 0; \
             model emission needs one shared order"
        )));
    }

    let mut model = MipModel::default();
    let unit = |name: String, kind, role| Variable {
        name,
        kind,
        role,
        lower: 0.0,
        upper: 1.0,
    };

    let mut node_base = Vec::with_capacity(bdds.len());
    for (l, b) in bdds.iter().enumerate() {
        node_base.push(model.variables.len());
        for id in 0..b.internal_nodes() {
            model.variables.push(unit(
                format!("pa{l}_n{id}"),
                VarKind::Continuous,
                VarRole::NodeProb { level: l, node: id },
            ));
        }
    }
    let mut decision = vec![None; m + 1];
    for e in inst.decidable_edges() {
        decision[e] = Some(model.variables.len());
        model
            .variables
            .push(unit(format!("x{e}"), VarKind::Binary, VarRole::Decision { edge: e }));
    }
    let peq_base = model.variables.len();
    for l in 0..bdds.len() {
        model
            .variables
            .push(unit(format!("peq{l}"), VarKind::Continuous, VarRole::LevelProb { level: l }));
    }
    let ppen = ladder.penalty.map(|_| {
        model
            .variables
            .push(unit("ppen".into(), VarKind::Continuous, VarRole::PenaltyProb));
        model.variables.len() - 1
    });

    let operand = |l: usize, r: NodeRef| match r {
        NodeRef::True => Operand::Const(1.0),
        NodeRef::False => Operand::Const(0.0),
        NodeRef::Node(i) => Operand::Var(node_base[l] + i as usize),
    };

    for (l, b) in bdds.iter().enumerate() {
        for id in 0..b.internal_nodes() {
            let n = b.node(id);
            let e = b.edge_of(id);
            let edge = inst.edge(e);
            let u = Operand::Var(node_base[l] + id);
            let (hi, lo) = (operand(l, n.hi), operand(l, n.lo));
            let p = edge.p;
            let role = RowRole::Node { level: l, node: id };
            let flow = |coef: f64| RowBuilder::new().add(&u, 1.0).add(&hi, -coef).add(&lo, coef - 1.0);
            match decision[e] {
                None => {
                    model
                        .constraints
                        .push(flow(p).finish(format!("c{l}_n{id}"), RowSense::Eq, 0.0, role));
                }
                Some(xj) => {
                    let q = (p + edge.delta).clamp(0.0, 1.0);
                    let xv = Operand::Var(xj);
                    let rows = [
                        flow(q).add(&xv, 1.0).finish(format!("c{l}_n{id}_a"), RowSense::Le, 1.0, role),
                        flow(p).add(&xv, -1.0).finish(format!("c{l}_n{id}_b"), RowSense::Le, 0.0, role),
                        flow(q).add(&xv, -1.0).finish(format!("c{l}_n{id}_c"), RowSense::Ge, -1.0, role),
                        flow(p).add(&xv, 1.0).finish(format!("c{l}_n{id}_d"), RowSense::Ge, 0.0, role),
                    ];
                    model.constraints.extend(rows);
                }
            }
        }
    }

    // peq_l = root_l − root_{l−1}
    for l in 0..bdds.len() {
        let mut row = RowBuilder::new()
            .add(&Operand::Var(peq_base + l), 1.0)
            .add(&operand(l, bdds[l].root()), -1.0);
        if l > 0 {
            row = row.add(&operand(l - 1, bdds[l - 1].root()), 1.0);
        }
        model
            .constraints
            .push(row.finish(format!("def{l}"), RowSense::Eq, 0.0, RowRole::LevelDef { level: l }));
    }
    // with no level at all, every scenario falls through to the penalty
    let last_root = match bdds.len() {
        0 => Operand::Const(0.0),
        n => operand(n - 1, bdds[n - 1].root()),
    };
    match ppen {
        Some(j) => {
            let row = RowBuilder::new().add(&Operand::Var(j), 1.0).add(&last_root, 1.0);
            model
                .constraints
                .push(row.finish("defpen".into(), RowSense::Eq, 1.0, RowRole::PenaltyDef));
        }
        None => match last_root {
            Operand::Const(1.0) => {}
            Operand::Const(_) => {
                return Err(Error::RecourseUndefined(
                    "no ladder level is reachable and no penalty is defined".into(),
                ))
            }
            Operand::Var(_) => {
                let row = RowBuilder::new().add(&last_root, 1.0);
                model
                    .constraints
                    .push(row.finish("complete".into(), RowSense::Eq, 1.0, RowRole::Complete));
            }
        },
    }
    let budget_terms: Vec<(usize, f64)> = inst
        .decidable_edges()
        .into_iter()
        .map(|e| (decision[e].expect("decidable edge has a column"), inst.edge(e).cost))
        .collect();
    if !budget_terms.is_empty() {
        model.constraints.push(Constraint {
            name: "budget".into(),
            terms: budget_terms,
            sense: RowSense::Le,
            rhs: inst.budget,
            role: RowRole::Budget,
        });
    }

    model.objective = ladder
        .levels
        .iter()
        .enumerate()
        .map(|(l, lv)| (peq_base + l, lv.alpha))
        .collect();
    if let (Some(j), Some(pen)) = (ppen, ladder.penalty) {
        model.objective.push((j, pen));
    }
    Ok(model)
}

/// Result of fixing the binaries and propagating bounds through the rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagation {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rounds: usize,
    /// Some row demanded a bound beyond the opposite one by more than 1e-9.
    pub infeasible: bool,
}

impl Propagation {
    /// Variables whose interval is wider than `tol`.
    pub fn unfixed(&self, tol: f64) -> Vec<usize> {
        (0..self.lower.len())
            .filter(|&j| self.upper[j] - self.lower[j] > tol)
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }
}

/// Fixes each decision column to `x` and tightens variable bounds row by
/// row until nothing moves. Uses the model alone, not the diagrams it was
/// built from.
pub fn propagate_fixed(model: &MipModel, x: &Decision) -> Result<Propagation> {
    let mut lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    for (j, v) in model.variables.iter().enumerate() {
        if let VarRole::Decision { edge } = v.role {
            if edge > x.len() {
                return Err(Error::InvalidArgument(format!(
                    "decision has {} entries, model references edge {edge}",
                    x.len()
                )));
            }
            let b = if x.get(edge) { 1.0 } else { 0.0 };
            lower[j] = b;
            upper[j] = b;
        }
    }
    // An LP over a DAG of rows settles within rows + 2 sweeps.
    let max_rounds = model.constraints.len() + 2;
    let mut rounds = 0;
    let mut infeasible = false;
    'sweeps: loop {
        rounds += 1;
        let mut moved = false;
        for c in &model.constraints {
            // activity bounds of the row
            let (mut amin, mut amax) = (0.0, 0.0);
            for &(j, a) in &c.terms {
                if a >= 0.0 {
                    amin += a * lower[j];
                    amax += a * upper[j];
                } else {
                    amin += a * upper[j];
                    amax += a * lower[j];
                }
            }
            for &(j, a) in &c.terms {
                if a == 0.0 {
                    continue;
                }
                let (own_min, own_max) = if a > 0.0 {
                    (a * lower[j], a * upper[j])
                } else {
                    (a * upper[j], a * lower[j])
                };
                let rest_min = amin - own_min;
                let rest_max = amax - own_max;
                // a·y ≤ rhs − rest_min and/or a·y ≥ rhs − rest_max
                let le = matches!(c.sense, RowSense::Le | RowSense::Eq).then(|| c.rhs - rest_min);
                let ge = matches!(c.sense, RowSense::Ge | RowSense::Eq).then(|| c.rhs - rest_max);
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                if let Some(t) = le {
                    if a > 0.0 {
                        hi = hi.min(t / a);
                    } else {
                        lo = lo.max(t / a);
                    }
                }
                if let Some(t) = ge {
                    if a > 0.0 {
                        lo = lo.max(t / a);
                    } else {
                        hi = hi.min(t / a);
                    }
                }
                if lo > upper[j] + 1e-9 || hi < lower[j] - 1e-9 {
                    infeasible = true;
                    break 'sweeps;
                }
                // rounding may cross the bounds slightly; never let it
                let (lo, hi) = (lo.min(upper[j]), hi.max(lower[j]));
                if lo > lower[j] + 1e-15 {
                    lower[j] = lo;
                    moved = true;
                }
                if hi < upper[j] - 1e-15 {
                    upper[j] = hi;
                    moved = true;
                }
            }
        }
        if !moved || rounds >= max_rounds {
            break;
        }
    }
    Ok(Propagation {
        lower,
        upper,
        rounds,
        infeasible,
    })
}
