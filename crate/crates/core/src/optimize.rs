//! Exhaustive first-stage optimization over budget-feasible decisions.

use crate::error::{Error, Result};
use crate::instance::{Decision, NetworkInstance};
use crate::pipeline::{evaluate, CompiledLadder};
use crate::recourse::CriticalLadder;

/// Relative margin a later decision must beat to replace the incumbent.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: Decision,
    pub value: f64,
}

/// Budget-feasible decisions ordered lexicographically by their sorted
/// lists of taken edges: `{} < {1} < {1,2} < {2}`. Among equal values the
/// earliest wins, so ties go to the lowest edge indices.
/// Fails when more than `max_decidable` edges carry a decision.
pub fn feasible_decisions(inst: &NetworkInstance, max_decidable: usize) -> Result<Vec<Decision>> {
    let decidable = inst.decidable_edges();
    let k = decidable.len();
    if k > max_decidable {
        return Err(Error::SizeLimit(format!(
            "{k} decidable edges exceed the enumeration limit of {max_decidable}; \
             write the LP model and use an external MIP solver"
        )));
    }
    let m = inst.num_edges();
    let mut out: Vec<(Vec<usize>, Decision)> = Vec::new();
    for code in 0u64..1 << k {
        let taken: Vec<usize> = (0..k).filter(|&j| code >> j & 1 == 1).map(|j| decidable[j]).collect();
        let x = Decision::from_edges(m, taken.iter().copied());
        if inst.is_feasible(&x) {
            out.push((taken, x));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, x)| x).collect())
}

/// Minimizes `value` over `candidates`, keeping the earliest on ties.
/// Candidates whose evaluation reports undefined recourse are skipped.
pub fn argmin(candidates: Vec<Decision>, mut value: impl FnMut(&Decision) -> Result<f64>) -> Result<Solution> {
    let mut best: Option<Solution> = None;
    for x in candidates {
        let v = match value(&x) {
            Ok(v) => v,
            Err(Error::RecourseUndefined(_)) => continue,
            Err(e) => return Err(e),
        };
        let improves = match &best {
            None => true,
            Some(b) => v < b.value - TIE_TOL * b.value.abs().max(1.0),
        };
        if improves {
            best = Some(Solution { x, value: v });
        }
    }
    best.ok_or_else(|| {
        Error::RecourseUndefined("no feasible decision gives a recourse defined almost surely".into())
    })
}

/// Reference optimizer: evaluates every feasible decision on the compiled
/// diagrams and returns a minimizer of the expected recourse.
pub fn solve_by_enumeration(
    inst: &NetworkInstance,
    ladder: &CriticalLadder,
    compiled: &CompiledLadder,
    max_decidable: usize,
) -> Result<Solution> {
    let candidates = feasible_decisions(inst, max_decidable)?;
    argmin(candidates, |x| Ok(evaluate(inst, ladder, compiled, x)?.expected_value))
}
