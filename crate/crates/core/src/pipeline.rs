//! Compiling a whole ladder into one diagram per level.

use crate::bdd::{compile_monotone, Bdd};
use crate::error::{Error, Result};
use crate::instance::{Decision, NetworkInstance};
use crate::order::{order_edges, OrderingHeuristic};
use crate::probability::{report, ProbabilityReport};
use crate::recourse::CriticalLadder;

/// Whether all levels share one variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderScope {
    /// One order from the occurrence statistics of all levels; required for
    /// model emission.
    Shared,
    /// An order per level from that level's own family; sizes only.
    PerLevel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledLadder {
    pub scope: OrderScope,
    /// `bdds[i]` encodes "level `i` or better is reached".
    pub bdds: Vec<Bdd>,
}

impl CompiledLadder {
    /// The common order, if every diagram uses the same one.
    pub fn shared_order(&self) -> Option<&[usize]> {
        let first = self.bdds.first()?.order();
        self.bdds.iter().all(|b| b.order() == first).then_some(first)
    }

    /// Sum of per-level total sizes.
    pub fn total_size(&self) -> usize {
        self.bdds.iter().map(|b| b.stats().total_size).sum()
    }

    pub fn total_internal_nodes(&self) -> usize {
        self.bdds.iter().map(Bdd::internal_nodes).sum()
    }
}

pub fn compile_ladder(
    ladder: &CriticalLadder,
    heuristic: &OrderingHeuristic,
    scope: OrderScope,
    node_cap: usize,
) -> Result<CompiledLadder> {
    let m = ladder.num_edges;
    let shared = match scope {
        OrderScope::Shared => Some(order_edges(m, ladder.all_points(), heuristic)?),
        OrderScope::PerLevel => None,
    };
    let mut bdds = Vec::with_capacity(ladder.levels.len());
    for i in 0..ladder.levels.len() {
        let family = ladder.cumulative_family(i);
        let order = match &shared {
            Some(o) => o.clone(),
            None => order_edges(m, &family, heuristic)?,
        };
        bdds.push(compile_monotone(&family, &order, node_cap)?);
    }
    Ok(CompiledLadder { scope, bdds })
}

/// Expected recourse of `inst` under decision `x`, read from compiled diagrams.
pub fn evaluate(
    inst: &NetworkInstance,
    ladder: &CriticalLadder,
    compiled: &CompiledLadder,
    x: &Decision,
) -> Result<ProbabilityReport> {
    if x.len() != inst.num_edges() {
        return Err(Error::InvalidArgument(format!(
            "decision has {} entries, instance has {} edges",
            x.len(),
            inst.num_edges()
        )));
    }
    if let Some(e) = x.taken().find(|&e| !inst.edge(e).decidable) {
        return Err(Error::InvalidArgument(format!("edge {e} is not decidable")));
    }
    report(ladder, &compiled.bdds, &inst.probabilities(), &inst.deltas(), x)
}
