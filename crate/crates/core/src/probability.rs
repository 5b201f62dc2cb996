//! Exact probabilities of BDD-encoded scenario classes under independent
//! edge survival, and the expected recourse assembled from them.

use std::fmt;

use crate::bdd::{Bdd, NodeRef};
use crate::error::{Error, Result};
use crate::instance::{shift, Decision};
use crate::recourse::CriticalLadder;

/// Tolerance on the nesting of cumulative probabilities.
pub const NESTING_TOL: f64 = 1e-9;

/// `P[Φ(ξ) = 1]` with `p[e - 1]` the survival probability of edge `e`.
pub fn prob(b: &Bdd, p: &[f64]) -> f64 {
    prob_counted(b, p).0
}

/// [`prob`] together with the number of internal nodes evaluated.
pub fn prob_counted(b: &Bdd, p: &[f64]) -> (f64, usize) {
    let mut value = vec![0.0; b.internal_nodes()];
    let mut visits = 0;
    let get = |value: &[f64], r: NodeRef| match r {
        NodeRef::True => 1.0,
        NodeRef::False => 0.0,
        NodeRef::Node(i) => value[i as usize],
    };
    // Children always sit on later layers, hence carry larger ids.
    for id in (0..b.internal_nodes()).rev() {
        let n = b.node(id);
        let pi = p[b.edge_of(id) - 1];
        value[id] = pi * get(&value, n.hi) + (1.0 - pi) * get(&value, n.lo);
        visits += 1;
    }
    (get(&value, b.root()), visits)
}

/// Probability after shifting each decided edge by its delta.
pub fn prob_conditioned(b: &Bdd, p: &[f64], delta: &[f64], x: &Decision) -> f64 {
    prob(b, &shift(p, delta, x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityReport {
    pub alphas: Vec<f64>,
    /// Probability that level `i` (or a better one) is reached.
    pub cumulative: Vec<f64>,
    /// Probability that the recourse equals `alphas[i]`.
    pub equality: Vec<f64>,
    pub penalty: Option<f64>,
    /// Mass reaching no level.
    pub penalty_mass: f64,
    pub expected_value: f64,
}

/// Evaluates every level's diagram under decision `x` and assembles the
/// distribution of the recourse value.
///
/// Fails if cumulative probabilities decrease (the diagrams do not encode a
/// nested family) or if mass is left over on a ladder without penalty.
pub fn report(
    ladder: &CriticalLadder,
    bdds: &[Bdd],
    p: &[f64],
    delta: &[f64],
    x: &Decision,
) -> Result<ProbabilityReport> {
    if bdds.len() != ladder.levels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} diagrams for {} ladder levels",
            bdds.len(),
            ladder.levels.len()
        )));
    }
    let shifted = shift(p, delta, x);
    let cumulative: Vec<f64> = bdds.iter().map(|b| prob(b, &shifted)).collect();
    let mut equality = Vec::with_capacity(cumulative.len());
    let mut prev = 0.0;
    for (i, &c) in cumulative.iter().enumerate() {
        if c < prev - NESTING_TOL {
            return Err(Error::Invariant(format!(
                "ladder/BDD mismatch: cumulative probability drops from {prev} to {c} at level {i}"
            )));
        }
        equality.push(c - prev);
        prev = c;
    }
    let penalty_mass = 1.0 - prev;
    let mut expected_value: f64 = ladder
        .levels
        .iter()
        .zip(&equality)
        .map(|(l, q)| l.alpha * q)
        .sum();
    match ladder.penalty {
        Some(pen) => expected_value += pen * penalty_mass,
        None if penalty_mass > NESTING_TOL => {
            return Err(Error::RecourseUndefined(format!(
                "probability {penalty_mass} of reaching no level and no penalty defined"
            )))
        }
        None => {}
    }
    Ok(ProbabilityReport {
        alphas: ladder.alphas(),
        cumulative,
        equality,
        penalty: ladder.penalty,
        penalty_mass,
        expected_value,
    })
}

/// `alpha cumulative equality` rows (the penalty as a final row with
/// cumulative 1), then `expected <value>`.
impl fmt::Display for ProbabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, c), q) in self.alphas.iter().zip(&self.cumulative).zip(&self.equality) {
            writeln!(f, "{a} {c} {q}")?;
        }
        if let Some(pen) = self.penalty {
            writeln!(f, "{pen} 1 {}", self.penalty_mass)?;
        }
        writeln!(f, "expected {}", self.expected_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::{compile_monotone, DEFAULT_NODE_CAP};
    use crate::recourse::{Level, Sense};
    use crate::scenario::Scenario;

    fn bdd(strs: &[&str]) -> Bdd {
        let fam: Vec<Scenario> = strs.iter().map(|t| Scenario::from_bitstring(t).unwrap()).collect();
        let n = fam[0].width();
        compile_monotone(&fam, &(1..=n).collect::<Vec<_>>(), DEFAULT_NODE_CAP).unwrap()
    }

    /// Sum of scenario probabilities over the truth table.
    fn brute(b: &Bdd, p: &[f64]) -> f64 {
        let n = b.num_vars();
        (0..1u64 << n)
            .map(|mask| {
                let xi = Scenario::from_mask(n, mask);
                let pr: f64 = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { p[i] } else { 1.0 - p[i] })
                    .product();
                if b.eval(&xi) { pr } else { 0.0 }
            })
            .sum()
    }

    #[test]
    fn single_series_parallel() {
        assert!((prob(&bdd(&["1"]), &[0.9]) - 0.9).abs() < 1e-15);
        assert!((prob(&bdd(&["11"]), &[0.9, 0.8]) - 0.72).abs() < 1e-15);
        let par = bdd(&["10", "01"]);
        let expected = brute(&par, &[0.9, 0.8]);
        assert!((expected - 0.98).abs() < 1e-12);
        assert!((prob(&par, &[0.9, 0.8]) - expected).abs() < 1e-15);
    }

    #[test]
    fn conditioned_shifts_decided_edges() {
        let one = bdd(&["1"]);
        let x1 = Decision::from_bitstring("1").unwrap();
        assert!((prob_conditioned(&one, &[0.9], &[0.05], &x1) - 0.95).abs() < 1e-15);
        let x0 = Decision::zeros(1);
        assert_eq!(prob_conditioned(&one, &[0.9], &[0.05], &x0), prob(&one, &[0.9]));

        let par = bdd(&["10", "01"]);
        let x = Decision::from_bitstring("11").unwrap();
        let expected = brute(&par, &[0.95, 0.7]);
        assert!((expected - 0.985).abs() < 1e-12);
        assert!((prob_conditioned(&par, &[0.9, 0.8], &[0.05, -0.1], &x) - expected).abs() < 1e-15);
    }

    #[test]
    fn each_node_visited_once() {
        let b = bdd(&["1100", "0110", "0011", "1001"]);
        let (_, visits) = prob_counted(&b, &[0.5; 4]);
        assert_eq!(visits, b.internal_nodes());
    }

    fn ladder(levels: &[(f64, &[&str])], penalty: Option<f64>) -> CriticalLadder {
        CriticalLadder {
            num_edges: levels[0].1[0].len(),
            sense: Sense::AtMost,
            levels: levels
                .iter()
                .map(|(a, pts)| Level {
                    alpha: *a,
                    min_true_points: pts.iter().map(|t| Scenario::from_bitstring(t).unwrap()).collect(),
                })
                .collect(),
            penalty,
        }
    }

    #[test]
    fn one_level_report() {
        let l = ladder(&[(7.0, &["1"])], Some(120.0));
        let r = report(&l, &[bdd(&["1"])], &[0.9], &[0.05], &Decision::zeros(1)).unwrap();
        assert!((r.expected_value - (0.9 * 7.0 + 0.1 * 120.0)).abs() < 1e-12);
        assert!((r.expected_value - 18.3).abs() < 1e-12);
        assert_eq!(r.to_string().lines().last(), Some(format!("expected {}", r.expected_value).as_str()));
    }

    #[test]
    fn full_mass_leaves_no_penalty() {
        let l = ladder(&[(1.0, &["1"])], Some(10.0));
        let r = report(&l, &[bdd(&["1"])], &[1.0], &[0.0], &Decision::zeros(1)).unwrap();
        assert_eq!(r.penalty_mass, 0.0);
        assert_eq!(r.expected_value, 1.0);
    }

    #[test]
    fn mismatch_and_undefined_are_errors() {
        let l = ladder(&[(1.0, &["11"]), (2.0, &["10"])], Some(10.0));
        // swapped diagrams: cumulative drops
        let bad = [bdd(&["10"]), bdd(&["11"])];
        let err = report(&l, &bad, &[0.5, 0.5], &[0.0, 0.0], &Decision::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));

        let l = ladder(&[(1.0, &["1"])], None);
        let err = report(&l, &[bdd(&["1"])], &[0.5], &[0.0], &Decision::zeros(1)).unwrap_err();
        assert!(matches!(err, Error::RecourseUndefined(_)));
    }
}
