//! Brute-force ground truth: every scenario enumerated, the recourse solved
//! directly on the surviving network, no aggregation anywhere.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::instance::{Decision, Mode, NetworkInstance};
use crate::optimize::{argmin, feasible_decisions, Solution};
use crate::probability::NESTING_TOL;
use crate::recourse::VALUE_TOL;

/// Largest edge count the oracle enumerates.
pub const ORACLE_EDGE_LIMIT: usize = 24;
/// Largest number of decidable edges for [`oracle_best_decision`].
pub const ORACLE_DECISION_LIMIT: usize = 20;

/// Recomputes the Gray-code running product from scratch this often.
const RESYNC: u64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// `(value, probability)` by increasing value, values merged within 1e-9.
    pub distribution: Vec<(f64, f64)>,
    pub expected_value: f64,
}

/// Recourse value of one scenario given by `alive`; `None` when undefined
/// (disconnected or beyond the cutoff without a penalty).
pub fn recourse_value(inst: &NetworkInstance, net: &Network, alive: impl Fn(usize) -> bool) -> Option<f64> {
    match inst.mode {
        Mode::MaxFlow => Some(net.max_flow(alive)),
        Mode::ShortestPath => {
            let limit = inst.cutoff.unwrap_or(f64::INFINITY);
            match net.shortest_distance(alive) {
                Some(d) if d <= limit + VALUE_TOL => Some(d),
                _ => inst.penalty,
            }
        }
    }
}

/// Recourse values of all `2^|E|` scenarios, computed once and reused for
/// any number of decisions.
pub struct Oracle<'a> {
    inst: &'a NetworkInstance,
    values: Vec<Option<f64>>,
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a NetworkInstance) -> Result<Self> {
        let m = inst.num_edges();
        if m > ORACLE_EDGE_LIMIT {
            return Err(Error::SizeLimit(format!(
                "{m} edges exceed the oracle limit of {ORACLE_EDGE_LIMIT}"
            )));
        }
        let net = Network::new(inst);
        let values = (0..1u64 << m)
            .map(|mask| recourse_value(inst, &net, |e| mask >> e & 1 == 1))
            .collect();
        Ok(Oracle { inst, values })
    }

    /// Recourse of the scenario whose bit `e - 1` marks edge `e` alive.
    pub fn value(&self, mask: u64) -> Option<f64> {
        self.values[mask as usize]
    }

    /// Visits every scenario in Gray-code order with its probability under `x`.
    pub fn for_each_scenario(&self, x: &Decision, mut visit: impl FnMut(u64, f64)) {
        let q = self.inst.shifted_probabilities(x);
        let m = q.len();
        let factor = |mask: u64, e: usize| if mask >> e & 1 == 1 { q[e] } else { 1.0 - q[e] };
        let recompute = |mask: u64| -> (f64, usize) {
            let mut prod = 1.0;
            let mut zeros = 0;
            for e in 0..m {
                let f = factor(mask, e);
                if f == 0.0 {
                    zeros += 1;
                } else {
                    prod *= f;
                }
            }
            (prod, zeros)
        };
        let (mut prod, mut zeros) = recompute(0);
        let mut gray = 0u64;
        visit(0, if zeros > 0 { 0.0 } else { prod });
        for i in 1u64..1 << m {
            let e = i.trailing_zeros() as usize;
            let old = factor(gray, e);
            gray ^= 1 << e;
            if i % RESYNC == 0 {
                (prod, zeros) = recompute(gray);
            } else {
                let new = factor(gray, e);
                if old == 0.0 {
                    zeros -= 1;
                } else {
                    prod /= old;
                }
                if new == 0.0 {
                    zeros += 1;
                } else {
                    prod *= new;
                }
            }
            visit(gray, if zeros > 0 { 0.0 } else { prod });
        }
    }

    /// Expected recourse and value distribution under `x`.
    pub fn expected(&self, x: &Decision) -> Result<OracleResult> {
        let mut expected = 0.0;
        let mut undefined = 0.0;
        let mut buckets: HashMap<u64, f64> = HashMap::new();
        self.for_each_scenario(x, |mask, pr| match self.values[mask as usize] {
            Some(v) => {
                expected += pr * v;
                *buckets.entry(v.to_bits()).or_insert(0.0) += pr;
            }
            None => undefined += pr,
        });
        if undefined > NESTING_TOL {
            return Err(Error::RecourseUndefined(format!(
                "probability {undefined} of scenarios without a recourse value"
            )));
        }
        let mut raw: Vec<(f64, f64)> = buckets.into_iter().map(|(b, p)| (f64::from_bits(b), p)).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut distribution: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (v, p) in raw {
            match distribution.last_mut() {
                Some(last) if v - last.0 <= VALUE_TOL => last.1 += p,
                _ => distribution.push((v, p)),
            }
        }
        Ok(OracleResult {
            distribution,
            expected_value: expected,
        })
    }
}

/// Expected recourse of `inst` under `x` by full scenario enumeration.
pub fn oracle_expected(inst: &NetworkInstance, x: &Decision) -> Result<OracleResult> {
    if x.len() != inst.num_edges() {
        return Err(Error::InvalidArgument(format!(
            "decision has {} entries, instance has {} edges",
            x.len(),
            inst.num_edges()
        )));
    }
    Oracle::new(inst)?.expected(x)
}

/// Optimal decision by enumerating every feasible `x` against the oracle.
pub fn oracle_best_decision(inst: &NetworkInstance) -> Result<Solution> {
    let oracle = Oracle::new(inst)?;
    let candidates = feasible_decisions(inst, ORACLE_DECISION_LIMIT)?;
    argmin(candidates, |x| Ok(oracle.expected(x)?.expected_value))
}

/// Writes `scenario-bitstring,probability,f-value` rows for every scenario.
/// Undefined recourse values are written as `undefined`.
pub fn write_csv(inst: &NetworkInstance, x: &Decision, mut out: impl Write) -> Result<()> {
    let oracle = Oracle::new(inst)?;
    let m = inst.num_edges();
    let mut rows = vec![(0.0, None); 1 << m];
    oracle.for_each_scenario(x, |mask, pr| rows[mask as usize] = (pr, oracle.value(mask)));
    writeln!(out, "scenario,probability,f")?;
    for (mask, (pr, v)) in rows.into_iter().enumerate() {
        let bits: String = (0..m).map(|e| if mask >> e & 1 == 1 { '1' } else { '0' }).collect();
        match v {
            Some(v) => writeln!(out, "{bits},{pr},{v}")?,
            None => writeln!(out, "{bits},{pr},undefined")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn one_edge(p: f64) -> NetworkInstance {
        parse_instance(&format!(
            "[meta] mode=shortest_path source=s sink=t penalty=120 budget=1\n[nodes]\ns\nt\n\
             [edges]\ns t 7 {p} 0 1 1\n"
        ))
        .unwrap()
    }

    #[test]
    fn single_edge_expectation() {
        let r = oracle_expected(&one_edge(0.9), &Decision::zeros(1)).unwrap();
        assert!((r.expected_value - 18.3).abs() < 1e-12);
        assert_eq!(r.distribution.len(), 2);
    }

    #[test]
    fn certain_and_impossible_survival() {
        assert_eq!(oracle_expected(&one_edge(1.0), &Decision::zeros(1)).unwrap().expected_value, 7.0);
        assert_eq!(oracle_expected(&one_edge(0.0), &Decision::zeros(1)).unwrap().expected_value, 120.0);
    }

    #[test]
    fn gray_code_probabilities_sum_to_one() {
        let inst = parse_instance(
            "[meta] mode=max_flow source=s sink=t\n[nodes]\ns\nt\n[edges]\n\
             s t 1 0.3 0 1 0\ns t 1 0 0 1 0\ns t 1 1 0 1 0\ns t 1 0.7 0 1 0\ns t 1 0.11 0 1 0\n",
        )
        .unwrap();
        let oracle = Oracle::new(&inst).unwrap();
        let mut total = 0.0;
        let mut seen = 0;
        oracle.for_each_scenario(&Decision::zeros(5), |_, p| {
            total += p;
            seen += 1;
        });
        assert_eq!(seen, 32);
        assert!((total - 1.0).abs() < 1e-12);
        let r = oracle.expected(&Decision::zeros(5)).unwrap();
        let mass: f64 = r.distribution.iter().map(|d| d.1).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        // arc 3 always survives, arc 2 never does
        assert!((r.expected_value - (0.3 + 1.0 + 0.7 + 0.11)).abs() < 1e-12);
    }

    #[test]
    fn best_decision_cases() {
        let mut inst = one_edge(0.9);
        inst.edges[0].delta = 0.05;
        assert_eq!(oracle_best_decision(&inst).unwrap().x.to_bitstring(), "1");
        inst.budget = 0.0;
        assert_eq!(oracle_best_decision(&inst).unwrap().x.to_bitstring(), "0");

        let sym = parse_instance(
            "[meta] mode=shortest_path source=s sink=t penalty=50 budget=1\n[nodes]\ns\nt\n\
             [edges]\ns t 5 0.5 0.3 1 1\ns t 5 0.5 0.3 1 1\n",
        )
        .unwrap();
        let best = oracle_best_decision(&sym).unwrap();
        assert_eq!(best.x.to_bitstring(), "10");
        let other = oracle_expected(&sym, &Decision::from_bitstring("01").unwrap()).unwrap();
        assert!((other.expected_value - best.value).abs() < 1e-12);
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_csv(&one_edge(0.9), &Decision::zeros(1), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "scenario,probability,f\n0,0.09999999999999998,120\n1,0.9,7\n");
    }
}
