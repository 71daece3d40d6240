use rayon::prelude::*;
use serde::Serialize;

use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::sdp::SdpSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `Σ_{j∈N(i)} h⁺_ij ≤ 1/2`.
    Star,
    /// `g_ij + g_jk + g_ik ≥ 0`.
    TriangleLinearLower,
    /// `g_ij + g_jk + g_ik ≤ 3/2`.
    TriangleLinearUpper,
    /// `g_ij² + g_jk² + g_ik² ≤ 2(g_ij g_jk + g_ij g_ik + g_jk g_ik)`.
    TriangleQuadratic,
    /// `h⁺_ij + h⁺_jk + h⁺_ik ≤ 1/2`.
    TriangleHPlus,
    /// `(g_ij, g_jk)` inside the region cut out by the axes and the ellipse.
    Convexgamy,
}

/// One checked inequality `value ≤ bound`, violated when `bound − value < −tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditViolation<T> {
    pub inequality: Inequality,
    /// The vertex for star checks, the sorted triple, or the path `(i, j, k)`.
    pub vertices: Vec<usize>,
    /// Whether the triple is a triangle of the graph. Always true for star
    /// and path checks.
    pub in_graph: bool,
    pub value: T,
    pub bound: T,
    pub slack: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSection<T> {
    pub checked: usize,
    /// Smallest `bound − value` over all checks; `None` when nothing was checked.
    pub min_slack: Option<T>,
    pub violations: Vec<AuditViolation<T>>,
}

/// The triangle checks restricted to triangles of the graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphTriangleSummary<T> {
    pub triangles: usize,
    pub min_slack: Option<T>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport<T> {
    pub tol: T,
    pub star: AuditSection<T>,
    /// Every vertex triple, edge or not.
    pub triangle: AuditSection<T>,
    pub graph_triangles: GraphTriangleSummary<T>,
    pub convexgamy: AuditSection<T>,
}

impl<T: Real> AuditReport<T> {
    pub fn passed(&self) -> bool {
        self.star.violations.is_empty() && self.triangle.violations.is_empty() && self.convexgamy.violations.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.star.violations.len() + self.triangle.violations.len() + self.convexgamy.violations.len()
    }
}

struct Check<T> {
    inequality: Inequality,
    vertices: Vec<usize>,
    in_graph: bool,
    value: T,
    bound: T,
}

fn section<T: Real>(checks: Vec<Check<T>>, tol: T) -> AuditSection<T> {
    let mut min_slack: Option<T> = None;
    let mut violations = Vec::new();
    for c in &checks {
        let slack = c.bound - c.value;
        min_slack = Some(min_slack.map_or(slack, |m| m.min(slack)));
        if slack < -tol {
            violations.push(AuditViolation {
                inequality: c.inequality,
                vertices: c.vertices.clone(),
                in_graph: c.in_graph,
                value: c.value,
                bound: c.bound,
                slack,
            });
        }
    }
    AuditSection { checked: checks.len(), min_slack, violations }
}

pub fn audit_star<T: Real>(sol: &SdpSolution<T>, g: &WeightedGraph<T>, tol: T) -> AuditSection<T> {
    let half = T::lit(0.5);
    let checks = (0..g.num_vertices())
        .map(|i| {
            let value = g.edge_index().incident(i).iter().fold(T::zero(), |acc, &k| {
                let e = g.edge(k);
                acc + sol.h_plus(e.u, e.v)
            });
            Check { inequality: Inequality::Star, vertices: vec![i], in_graph: true, value, bound: half }
        })
        .collect();
    section(checks, tol)
}

fn triple_checks<T: Real>(sol: &SdpSolution<T>, [i, j, k]: [usize; 3], in_graph: bool) -> [Check<T>; 4] {
    let (a, b, c) = (sol.g(i, j), sol.g(j, k), sol.g(i, k));
    let sum = a + b + c;
    let two = T::two();
    let h_plus = sol.h_plus(i, j) + sol.h_plus(j, k) + sol.h_plus(i, k);
    let check = |inequality, value, bound| Check { inequality, vertices: vec![i, j, k], in_graph, value, bound };
    [
        check(Inequality::TriangleLinearLower, -sum, T::zero()),
        check(Inequality::TriangleLinearUpper, sum, T::lit(1.5)),
        check(Inequality::TriangleQuadratic, a * a + b * b + c * c, two * (a * b + a * c + b * c)),
        check(Inequality::TriangleHPlus, h_plus, T::lit(0.5)),
    ]
}

/// All three triangle inequalities (the linear one as two sides) on every
/// vertex triple, plus a summary over the triangles of `g`.
pub fn audit_triangle<T: Real>(
    sol: &SdpSolution<T>,
    g: &WeightedGraph<T>,
    tol: T,
) -> (AuditSection<T>, GraphTriangleSummary<T>) {
    let n = g.num_vertices();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push([i, j, k]);
            }
        }
    }
    let checks: Vec<Check<T>> = triples
        .par_iter()
        .flat_map_iter(|&t| {
            let in_graph = g.find_edge(t[0], t[1]).is_some()
                && g.find_edge(t[1], t[2]).is_some()
                && g.find_edge(t[0], t[2]).is_some();
            triple_checks(sol, t, in_graph)
        })
        .collect();
    let triangles = triples.len() - checks.iter().filter(|c| !c.in_graph).count() / 4;
    let mut min_slack: Option<T> = None;
    for c in checks.iter().filter(|c| c.in_graph) {
        let s = c.bound - c.value;
        min_slack = Some(min_slack.map_or(s, |m| m.min(s)));
    }
    let all = section(checks, tol);
    let violations = all.violations.iter().filter(|v| v.in_graph).count();
    (all, GraphTriangleSummary { triangles, min_slack, violations })
}

/// Membership of `(x, y)` in `{x, y ≥ 0, x + y − √(xy) ≤ 3/4}`, returned as
/// `(value, bound)` of the binding inequality.
///
/// On `x, y ≥ 0` the curve `x + y − √(xy) = 3/4` is exactly the arc of
/// `3(x+y−1)² + (x−y)² = 3/4` that runs from the tangency point `(0, 3/4)`
/// over `(3/4, 3/4)` to `(3/4, 0)`, and the set is the union of the ellipses
/// inscribed in the triangles `(0,0), (c,0), (0,c)` for `c ≤ 3/2`.
pub fn convexgamy_value<T: Real>(x: T, y: T) -> (T, T) {
    let neg = (-x).max(-y);
    if neg > T::zero() {
        return (neg, T::zero());
    }
    (x + y - (x * y).sqrt(), T::lit(0.75))
}

pub fn audit_convexgamy<T: Real>(sol: &SdpSolution<T>, g: &WeightedGraph<T>, tol: T) -> AuditSection<T> {
    let mut checks = Vec::new();
    for j in 0..g.num_vertices() {
        let nbrs = g.neighbors(j).expect("vertex in range");
        for &i in &nbrs {
            for &k in &nbrs {
                if i == k {
                    continue;
                }
                let (value, bound) = convexgamy_value(sol.g(i, j), sol.g(j, k));
                checks.push(Check { inequality: Inequality::Convexgamy, vertices: vec![i, j, k], in_graph: true, value, bound });
            }
        }
    }
    section(checks, tol)
}

pub fn audit<T: Real>(sol: &SdpSolution<T>, g: &WeightedGraph<T>, tol: T) -> AuditReport<T> {
    let (triangle, graph_triangles) = audit_triangle(sol, g, tol);
    AuditReport {
        tol,
        star: audit_star(sol, g, tol),
        triangle,
        graph_triangles,
        convexgamy: audit_convexgamy(sol, g, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::sdp::{build_moment_structure, Level};

    fn singlet_plus_mixed(n: usize) -> (WeightedGraph<f64>, SdpSolution<f64>) {
        let g = WeightedGraph::new(n, [(0, 1, 1.0)]).unwrap();
        let s = build_moment_structure(&g, Level::Two).unwrap();
        let y = s.values_from(|r| match r.to_string().as_str() {
            "X0*X1" | "Y0*Y1" | "Z0*Z1" => -1.0,
            _ => 0.0,
        });
        (g, SdpSolution::from_moments(&s, y).unwrap())
    }

    #[test]
    fn singlet_star_is_tight() {
        let (g, sol) = singlet_plus_mixed(2);
        let star = audit_star(&sol, &g, 1e-9);
        assert!(star.violations.is_empty());
        assert_eq!(star.min_slack, Some(0.0));
    }

    #[test]
    fn singlet_with_spectator_is_quadratically_tight() {
        let (g, sol) = singlet_plus_mixed(3);
        let (tri, summary) = audit_triangle(&sol, &g, 1e-12);
        assert!(tri.violations.is_empty());
        assert_eq!(tri.checked, 4);
        assert_eq!(summary.triangles, 0);
        assert_eq!(summary.min_slack, None);
        let (a, b, c) = (sol.g(0, 1), sol.g(1, 2), sol.g(0, 2));
        assert_eq!((a, b, c), (1.0, 0.25, 0.25));
        let lhs = a * a + b * b + c * c;
        let rhs = 2.0 * (a * b + a * c + b * c);
        assert_eq!(lhs, 1.125);
        assert_eq!(rhs, 1.125);
    }

    #[test]
    fn mixed_point_passes_strictly() {
        let g = complete(4, 1.0);
        let s = build_moment_structure(&g, Level::Two).unwrap();
        let sol = SdpSolution::from_moments(&s, vec![0.0; s.classes().len()]).unwrap();
        let rep = audit(&sol, &g, 0.0);
        assert!(rep.passed());
        assert_eq!(rep.star.min_slack, Some(0.5));
        assert_eq!(rep.graph_triangles.triangles, 4);
        assert!(rep.triangle.min_slack.unwrap() > 0.0);
        assert_eq!(rep.convexgamy.checked, 4 * 3 * 2);
    }

    #[test]
    fn convexgamy_points() {
        // On the arc.
        for (x, y) in [(1.0f64, 0.25f64), (0.25, 1.0), (0.75, 0.75), (0.0, 0.75), (0.75, 0.0)] {
            let (v, b) = convexgamy_value(x, y);
            assert!((v - b).abs() < 1e-15, "({x}, {y})");
        }
        let (v, b) = convexgamy_value(1.0f64, 1.0);
        assert!(v > b);
        let (v, b) = convexgamy_value(0.0f64, 0.0);
        assert!(v < b);
        // Beyond the tangency point on the axis.
        let (v, b) = convexgamy_value(0.8f64, 0.0);
        assert!(v > b);
        let (v, b) = convexgamy_value(-0.1f64, 0.2);
        assert_eq!((v, b), (0.1, 0.0));
    }

    #[test]
    fn arc_points_solve_the_ellipse() {
        for k in 0..=20 {
            let x = 0.05 * k as f64;
            // Solve x + y − √(xy) = 3/4 for √y on the upper branch.
            let (a, c) = (x.sqrt(), x - 0.75);
            let disc = a * a - 4.0 * c;
            if disc < 0.0 {
                continue;
            }
            let r = (a + disc.sqrt()) / 2.0;
            let y = r * r;
            let e = 3.0 * (x + y - 1.0).powi(2) + (x - y).powi(2);
            assert!((e - 0.75).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn triangle_violation_is_reported() {
        // g = 1 on all three pairs is not a valid point.
        let g = complete(3, 1.0);
        let s = build_moment_structure(&g, Level::Two).unwrap();
        let y = s.values_from(|r| {
            let text = r.to_string();
            let parts: Vec<&str> = text.split('*').collect();
            if parts.len() == 2 && parts[0][..1] == parts[1][..1] {
                -1.0
            } else {
                0.0
            }
        });
        let sol = SdpSolution::from_moments(&s, y).unwrap();
        let rep = audit(&sol, &g, 1e-6);
        assert!(!rep.passed());
        assert_eq!(rep.star.violations.len(), 3);
        assert!(rep.triangle.violations.iter().any(|v| v.inequality == Inequality::TriangleLinearUpper));
        assert_eq!(rep.graph_triangles.triangles, 1);
        assert!(rep.graph_triangles.violations > 0);
        assert_eq!(rep.convexgamy.violations.len(), 6);
    }
}
