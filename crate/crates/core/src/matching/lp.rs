//! Feasibility checks for the matching polytope
//!
//! ```text
//! Σ_{j ∈ N(i)} x_ij ≤ 1                 every vertex i
//! Σ_{e ∈ E(S)} x_e ≤ (|S| − 1)/2        every odd S ⊆ V
//! x_e ≥ 0
//! ```
//!
//! Odd sets are enumerated exhaustively, which is only meant for small graphs.

use serde::Serialize;

use crate::error::MatchingError;
use crate::graph::WeightedGraph;
use crate::scalar::{Real, Weight};
use crate::sdp::SdpSolution;

/// Nonnegative value per edge, indexed like the graph's edge list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalMatching<W> {
    x: Vec<W>,
}

impl<W: Weight> FractionalMatching<W> {
    pub fn new(x: Vec<W>) -> Result<Self, MatchingError> {
        if let Some(k) = x.iter().position(|&v| !(v >= W::zero()) || !v.is_finite_value()) {
            return Err(MatchingError::Precondition(format!("x[{k}] = {} is not a finite nonnegative value", x[k])));
        }
        Ok(FractionalMatching { x })
    }

    pub fn values(&self) -> &[W] {
        &self.x
    }

    pub fn objective(&self, g: &WeightedGraph<W>) -> W {
        g.edges().iter().zip(&self.x).fold(W::zero(), |a, (e, &x)| a + e.w * x)
    }

    pub fn scaled(&self, factor: W) -> Self {
        FractionalMatching { x: self.x.iter().map(|&v| v * factor).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Vertex(usize),
    OddSet(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation<W> {
    pub constraint: Constraint,
    pub lhs: W,
    pub rhs: W,
}

impl<W: Weight> Violation<W> {
    /// `rhs − lhs`, negative for a violation.
    pub fn slack(&self) -> W {
        self.rhs - self.lhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpReport<W> {
    pub violations: Vec<Violation<W>>,
    pub vertex_constraints: usize,
    pub odd_set_constraints: usize,
    /// Smallest slack over all checked constraints (`None` if nothing was checked).
    pub min_slack: Option<W>,
}

impl<W> LpReport<W> {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn largest_odd_at_most(n: usize) -> usize {
    if n == 0 {
        1
    } else if n % 2 == 1 {
        n
    } else {
        n - 1
    }
}

/// Vertex constraints plus every odd-set constraint with `3 ≤ |S| ≤ max_odd_set`.
pub fn check_lp_feasible<W: Weight>(
    x: &FractionalMatching<W>,
    g: &WeightedGraph<W>,
    max_odd_set: usize,
) -> Result<LpReport<W>, MatchingError> {
    if max_odd_set.is_multiple_of(2) {
        return Err(MatchingError::EvenOddSetBound(max_odd_set));
    }
    if x.x.len() != g.num_edges() {
        return Err(MatchingError::DimensionMismatch { x: x.x.len(), edges: g.num_edges() });
    }
    let n = g.num_vertices();
    if n >= 64 && max_odd_set >= 3 {
        return Err(MatchingError::Precondition(format!("odd-set enumeration over {n} vertices")));
    }
    let mut report = LpReport { violations: Vec::new(), vertex_constraints: 0, odd_set_constraints: 0, min_slack: None };
    let record = |report: &mut LpReport<W>, constraint: Constraint, lhs: W, rhs: W| {
        let slack = rhs - lhs;
        report.min_slack = Some(report.min_slack.map_or(slack, |m: W| m.min_of(slack)));
        if !rhs.approx_ge(lhs) {
            report.violations.push(Violation { constraint, lhs, rhs });
        }
    };

    for v in 0..n {
        let lhs = g.edge_index().incident(v).iter().fold(W::zero(), |a, &k| a + x.x[k]);
        report.vertex_constraints += 1;
        record(&mut report, Constraint::Vertex(v), lhs, W::one());
    }

    let mut size = 3;
    while size <= max_odd_set.min(n) {
        let rhs = W::from_count((size - 1) / 2);
        // Gosper's hack over n-bit masks with `size` bits set.
        let mut mask: u64 = (1u64 << size) - 1;
        let limit: u64 = 1u64 << n;
        while mask < limit {
            let lhs = g.edges().iter().zip(&x.x).fold(W::zero(), |a, (e, &xe)| {
                if mask >> e.u & 1 == 1 && mask >> e.v & 1 == 1 {
                    a + xe
                } else {
                    a
                }
            });
            report.odd_set_constraints += 1;
            let set = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            record(&mut report, Constraint::OddSet(set), lhs, rhs);
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        size += 2;
    }
    Ok(report)
}

/// Returns `(4/5)·x` after checking that `x` meets the vertex and triangle
/// constraints, which is enough for the scaled vector to lie in the matching
/// polytope.
pub fn scale_to_feasible<W: Weight>(
    x: &FractionalMatching<W>,
    g: &WeightedGraph<W>,
) -> Result<FractionalMatching<W>, MatchingError> {
    let report = check_lp_feasible(x, g, 3)?;
    if let Some(v) = report.violations.first() {
        return Err(MatchingError::Precondition(format!(
            "{:?}: {} exceeds {}",
            v.constraint, v.lhs, v.rhs
        )));
    }
    let four = W::two() * W::two();
    Ok(x.scaled(four / (four + W::one())))
}

/// `x_e = 2h⁺_e` from an SDP solution.
///
/// The star and triangle inequalities on `h⁺` are exactly the vertex and
/// triangle constraints on `x`, so they are audited here: an excess above
/// `tol` means the solution is not a valid point of the relaxation.
pub fn sdp_to_fractional<T: Real>(
    sol: &SdpSolution<T>,
    g: &WeightedGraph<T>,
    tol: T,
) -> Result<FractionalMatching<T>, MatchingError> {
    if sol.num_qubits() != g.num_vertices() {
        return Err(MatchingError::Precondition(format!(
            "solution over {} qubits, graph over {} vertices",
            sol.num_qubits(),
            g.num_vertices()
        )));
    }
    let x: Vec<T> = g.edges().iter().map(|e| T::two() * sol.h_plus(e.u, e.v)).collect();
    let frac = FractionalMatching::new(x)?;
    let report = check_lp_feasible(&frac, g, 3)?;
    if let Some(v) = report.violations.iter().find(|v| v.lhs - v.rhs > tol) {
        return Err(MatchingError::Audit(format!("{:?}: 2h+ sum {} exceeds {}", v.constraint, v.lhs, v.rhs)));
    }
    Ok(frac)
}
