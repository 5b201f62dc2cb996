//! Variable-ordering heuristics for compiling scenario families.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum OrderingHeuristic {
    /// Edges by ascending occurrence count across the family, ties by index.
    #[default]
    OccurrenceAscending,
    /// Breadth-first low-bandwidth order on the edge co-occurrence graph.
    CuthillMcKeeLike,
    Identity,
    /// A caller-supplied permutation of `1..=|E|`.
    Explicit(Vec<usize>),
}


/// Computes an edge order (1-based ids, first = top layer) for `family`.
pub fn order_edges<'a, I>(num_edges: usize, family: I, heuristic: &OrderingHeuristic) -> Result<Vec<usize>>
where
    I: IntoIterator<Item = &'a Scenario>,
{
    match heuristic {
        OrderingHeuristic::Identity => Ok((1..=num_edges).collect()),
        OrderingHeuristic::Explicit(perm) => {
            check_permutation(perm, num_edges)?;
            Ok(perm.clone())
        }
        OrderingHeuristic::OccurrenceAscending => {
            let counts = occurrences(num_edges, family);
            let mut order: Vec<usize> = (1..=num_edges).collect();
            order.sort_by_key(|&e| (counts[e - 1], e));
            Ok(order)
        }
        OrderingHeuristic::CuthillMcKeeLike => Ok(cuthill_mckee(num_edges, family)),
    }
}

pub fn check_permutation(perm: &[usize], num_edges: usize) -> Result<()> {
    let mut seen = vec![false; num_edges];
    if perm.len() != num_edges {
        return Err(Error::InvalidArgument(format!(
            "order has {} entries, expected {num_edges}",
            perm.len()
        )));
    }
    for &e in perm {
        if e == 0 || e > num_edges || std::mem::replace(&mut seen[e - 1], true) {
            return Err(Error::InvalidArgument(format!(
                "order is not a permutation of 1..={num_edges} (offending entry {e})"
            )));
        }
    }
    Ok(())
}

fn occurrences<'a>(num_edges: usize, family: impl IntoIterator<Item = &'a Scenario>) -> Vec<usize> {
    let mut counts = vec![0usize; num_edges];
    for s in family {
        for b in s.bits() {
            counts[b] += 1;
        }
    }
    counts
}

fn cuthill_mckee<'a>(num_edges: usize, family: impl IntoIterator<Item = &'a Scenario>) -> Vec<usize> {
    let mut adj = vec![vec![false; num_edges]; num_edges];
    let mut present = vec![false; num_edges];
    for s in family {
        let bits: Vec<usize> = s.bits().collect();
        for &a in &bits {
            present[a] = true;
            for &b in &bits {
                if a != b {
                    adj[a][b] = true;
                }
            }
        }
    }
    let degree: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();

    // Unused edges first: they create no nodes.
    let mut order: Vec<usize> = (0..num_edges).filter(|&e| !present[e]).collect();
    let mut placed = vec![false; num_edges];
    for &e in &order {
        placed[e] = true;
    }
    loop {
        let start = (0..num_edges)
            .filter(|&e| !placed[e])
            .min_by_key(|&e| (degree[e], e));
        let Some(start) = start else { break };
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = (0..num_edges).filter(|&w| adj[v][w] && !placed[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.into_iter().map(|e| e + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(strs: &[&str]) -> Vec<Scenario> {
        strs.iter().map(|t| Scenario::from_bitstring(t).unwrap()).collect()
    }

    #[test]
    fn occurrence_order_breaks_ties_by_index() {
        let f = fam(&["110", "011"]);
        let o = order_edges(3, &f, &OrderingHeuristic::OccurrenceAscending).unwrap();
        assert_eq!(o, vec![1, 3, 2]);
    }

    #[test]
    fn unused_edges_go_first() {
        let f = fam(&["010"]);
        let o = order_edges(3, &f, &OrderingHeuristic::OccurrenceAscending).unwrap();
        assert_eq!(o, vec![1, 3, 2]);
        let o = order_edges(3, &f, &OrderingHeuristic::CuthillMcKeeLike).unwrap();
        assert_eq!(o, vec![1, 3, 2]);
    }

    #[test]
    fn explicit_is_returned_unchanged_and_checked() {
        let o = order_edges(3, &[], &OrderingHeuristic::Explicit(vec![3, 1, 2])).unwrap();
        assert_eq!(o, vec![3, 1, 2]);
        assert!(order_edges(3, &[], &OrderingHeuristic::Explicit(vec![3, 3, 2])).is_err());
        assert!(order_edges(3, &[], &OrderingHeuristic::Explicit(vec![1, 2])).is_err());
    }

    #[test]
    fn cuthill_mckee_walks_a_chain() {
        // co-occurrence chain 1-2-3-4 from overlapping pairs
        let f = fam(&["1100", "0110", "0011"]);
        let o = order_edges(4, &f, &OrderingHeuristic::CuthillMcKeeLike).unwrap();
        assert_eq!(o, vec![1, 2, 3, 4]);
    }
}
