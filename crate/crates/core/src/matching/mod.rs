//! Maximum weight matchings, the singlet-matching state, and the fractional
//! matching LP.

mod blossom;
mod lp;

use serde::Serialize;

use crate::error::MatchingError;
use crate::graph::WeightedGraph;
use crate::scalar::Weight;

pub use lp::{
    check_lp_feasible, largest_odd_at_most, scale_to_feasible, sdp_to_fractional, Constraint, FractionalMatching,
    LpReport, Violation,
};

/// A set of vertex-disjoint edges, stored as sorted edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    n: usize,
    edges: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    unmatched: Vec<usize>,
}

impl Matching {
    pub fn new<W: Weight>(g: &WeightedGraph<W>, mut edges: Vec<usize>) -> Result<Self, MatchingError> {
        edges.sort_unstable();
        edges.dedup();
        let n = g.num_vertices();
        let mut owner = vec![None; n];
        let mut pairs = Vec::with_capacity(edges.len());
        for &k in &edges {
            if k >= g.num_edges() {
                return Err(MatchingError::EdgeOutOfRange(k));
            }
            let e = g.edge(k);
            for v in [e.u, e.v] {
                if let Some(other) = owner[v] {
                    return Err(MatchingError::Conflict(other, k));
                }
                owner[v] = Some(k);
            }
            pairs.push((e.u, e.v));
        }
        let unmatched = (0..n).filter(|&v| owner[v].is_none()).collect();
        Ok(Matching { n, edges, pairs, unmatched })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn matched_edges(&self) -> &[usize] {
        &self.edges
    }

    /// Endpoints of the matched edges, `u < v`, in edge-id order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn unmatched(&self) -> &[usize] {
        &self.unmatched
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    pub fn weight<W: Weight>(&self, g: &WeightedGraph<W>) -> W {
        self.edges.iter().fold(W::zero(), |a, &k| a + g.edge(k).w)
    }
}

fn optimum_weight<W: Weight>(n: usize, edges: &[(usize, usize, W)]) -> W {
    let mates = blossom::solve(n, edges);
    edges.iter().fold(W::zero(), |a, &(i, j, w)| if mates[i] == Some(j) { a + w } else { a })
}

/// Maximum weight matching. Among optimal matchings the one whose sorted
/// edge-id list is lexicographically smallest is returned.
///
/// Ties are resolved by walking the edges in id order and keeping an edge
/// whenever some optimum still contains it together with the edges kept so
/// far; optimality is compared with [`Weight::approx_ge`], so exact for
/// rationals and up to rounding slack for floats.
pub fn max_weight_matching<W: Weight>(g: &WeightedGraph<W>) -> Matching {
    let n = g.num_vertices();
    let all: Vec<(usize, usize, W)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let best = optimum_weight(n, &all);
    let mut covered = vec![false; n];
    let mut kept = Vec::new();
    let mut kept_weight = W::zero();
    for (k, &(u, v, w)) in all.iter().enumerate() {
        if covered[u] || covered[v] {
            continue;
        }
        let rest: Vec<(usize, usize, W)> = all
            .iter()
            .copied()
            .filter(|&(a, b, _)| !covered[a] && !covered[b] && a != u && a != v && b != u && b != v)
            .collect();
        let total = kept_weight + w + optimum_weight(n, &rest);
        if total.approx_ge(best) {
            covered[u] = true;
            covered[v] = true;
            kept.push(k);
            kept_weight = kept_weight + w;
        }
    }
    Matching::new(g, kept).expect("kept edges are disjoint")
}

/// Energy of singlets on the matched edges with every other qubit maximally
/// mixed: `Σ_e w_e (1/4 + 3/4·[e ∈ M])`.
pub fn matching_state_energy<W: Weight>(m: &Matching, g: &WeightedGraph<W>) -> Result<W, MatchingError> {
    if m.num_vertices() != g.num_vertices() {
        return Err(MatchingError::Precondition(format!(
            "matching over {} vertices, graph over {}",
            m.num_vertices(),
            g.num_vertices()
        )));
    }
    let four = W::two() * W::two();
    let three = W::two() + W::one();
    let total = g.edges().iter().enumerate().fold(W::zero(), |a, (k, e)| {
        let bonus = if m.contains(k) { three } else { W::zero() };
        a + e.w * (W::one() + bonus)
    });
    Ok(total / four)
}
