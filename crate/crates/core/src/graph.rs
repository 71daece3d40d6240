//! Weighted simple graphs and the edge-list file format.
//!
//! ```text
//! # unit triangle
//! p 3 3
//! 0 1 1
//! 1 2 1
//! 0 2 1
//! ```
//!
//! The `p <n> <m>` header is optional; without it the vertex count is one
//! more than the largest index mentioned.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{GraphError, ParseError, ParseErrorKind};
use crate::scalar::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge<W> {
    pub u: usize,
    pub v: usize,
    pub w: W,
}

/// Dense edge ids plus vertex → incident edge ids.
#[derive(Clone, Debug, Default)]
pub struct EdgeIndex {
    adjacency: Vec<Vec<usize>>,
    lookup: HashMap<(usize, usize), usize>,
}

impl EdgeIndex {
    fn build<W>(n: usize, edges: &[Edge<W>]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        let mut lookup = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.u].push(id);
            adjacency[e.v].push(id);
            lookup.insert((e.u, e.v), id);
        }
        EdgeIndex { adjacency, lookup }
    }

    pub fn incident(&self, vertex: usize) -> &[usize] {
        &self.adjacency[vertex]
    }

    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.lookup.get(&key).copied()
    }
}

/// Simple undirected graph with strictly positive finite weights.
///
/// Edges are stored as `u < v` and duplicates are rejected.
#[derive(Clone, Debug)]
pub struct WeightedGraph<W> {
    n: usize,
    edges: Vec<Edge<W>>,
    index: EdgeIndex,
}

impl<W: Weight> WeightedGraph<W> {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, W)>,
    {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for (a, b, w) in edges {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { vertex, n });
                }
            }
            out.push(validate_edge(a, b, w, &mut seen)?);
        }
        let index = EdgeIndex::build(n, &out);
        Ok(WeightedGraph { n, edges: out, index })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new(), index: EdgeIndex::build::<W>(n, &[]) }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<W> {
        &self.edges[id]
    }

    pub fn edge_index(&self) -> &EdgeIndex {
        &self.index
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.index.find(a, b)
    }

    fn check_vertex(&self, vertex: usize) -> Result<(), GraphError> {
        if vertex >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex, n: self.n });
        }
        Ok(())
    }

    /// Sorted neighbor list of `vertex`.
    pub fn neighbors(&self, vertex: usize) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(vertex)?;
        let mut out: Vec<usize> = self
            .index
            .incident(vertex)
            .iter()
            .map(|&id| {
                let e = &self.edges[id];
                if e.u == vertex {
                    e.v
                } else {
                    e.u
                }
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn total_weight(&self) -> W {
        self.edges.iter().fold(W::zero(), |acc, e| acc + e.w)
    }

    /// Checks every wedge `a - v - b` for a closing edge `a - b`.
    pub fn is_triangle_free(&self) -> bool {
        (0..self.n).all(|v| {
            let nb = self.neighbors(v).expect("vertex in range");
            nb.iter()
                .enumerate()
                .all(|(i, &a)| nb[i + 1..].iter().all(|&b| self.find_edge(a, b).is_none()))
        })
    }

    /// All vertex triples `i < j < k` that span a triangle in the graph.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for e in &self.edges {
            for &id in self.index.incident(e.v) {
                let f = &self.edges[id];
                let k = if f.u == e.v { f.v } else { f.u };
                if k > e.v && self.find_edge(e.u, k).is_some() {
                    out.push([e.u, e.v, k]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Edge-list rendering with a header. `parse_graph` inverts it exactly
    /// for `f64` weights since `Display` prints the shortest round-trip form.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("p {} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
        }
        s
    }

    pub fn map_weights<V: Weight>(&self, f: impl Fn(W) -> V) -> Result<WeightedGraph<V>, GraphError> {
        WeightedGraph::new(self.n, self.edges.iter().map(|e| (e.u, e.v, f(e.w))))
    }
}

fn validate_edge<W: Weight>(
    a: usize,
    b: usize,
    w: W,
    seen: &mut HashMap<(usize, usize), ()>,
) -> Result<Edge<W>, GraphError> {
    if a == b {
        return Err(GraphError::SelfLoop(a));
    }
    let (u, v) = if a < b { (a, b) } else { (b, a) };
    if !w.is_finite_value() {
        return Err(GraphError::NonFiniteWeight(u, v));
    }
    if w <= W::zero() {
        return Err(GraphError::NonPositiveWeight(u, v));
    }
    if seen.insert((u, v), ()).is_some() {
        return Err(GraphError::DuplicateEdge(u, v));
    }
    Ok(Edge { u, v, w })
}

fn parse_index(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::Malformed(format!("bad vertex index {tok:?}")),
    })
}

/// Parses the edge-list format. Errors carry 1-based line numbers.
pub fn parse_graph<W: Weight + FromStr>(text: &str) -> Result<WeightedGraph<W>, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(Edge<W>, usize)> = Vec::new();
    let mut seen = HashMap::new();
    let mut max_vertex: Option<usize> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] == "p" {
            if header.is_some() || !edges.is_empty() {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::Header("header must appear once, before any edge".into()),
                });
            }
            if toks.len() != 3 {
                return Err(ParseError { line, kind: ParseErrorKind::Header(content.to_string()) });
            }
            let n = toks[1]
                .parse()
                .map_err(|_| ParseError { line, kind: ParseErrorKind::Header(content.to_string()) })?;
            let m = toks[2]
                .parse()
                .map_err(|_| ParseError { line, kind: ParseErrorKind::Header(content.to_string()) })?;
            header = Some((n, m, line));
            continue;
        }
        if toks.len() != 3 {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::Malformed(format!("expected `<u> <v> <w>`, got {content:?}")),
            });
        }
        let a = parse_index(toks[0], line)?;
        let b = parse_index(toks[1], line)?;
        let w: W = toks[2].parse().map_err(|_| ParseError {
            line,
            kind: ParseErrorKind::Malformed(format!("bad weight {:?}", toks[2])),
        })?;
        if let Some((n, _, _)) = header {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(ParseError { line, kind: GraphError::VertexOutOfRange { vertex, n }.into() });
                }
            }
        }
        let e = validate_edge(a, b, w, &mut seen).map_err(|e| ParseError { line, kind: e.into() })?;
        max_vertex = Some(max_vertex.map_or(e.v, |m: usize| m.max(e.v)));
        edges.push((e, line));
    }
    let n = match header {
        Some((n, m, line)) => {
            if m != edges.len() {
                return Err(ParseError { line, kind: ParseErrorKind::EdgeCount { declared: m, found: edges.len() } });
            }
            n
        }
        None => max_vertex.map_or(0, |m| m + 1),
    };
    WeightedGraph::new(n, edges.into_iter().map(|(e, _)| (e.u, e.v, e.w))).map_err(|e| ParseError { line: 0, kind: e.into() })
}

/// Reads and parses a graph from any byte stream.
pub fn read_graph<W: Weight + FromStr, R: Read>(mut reader: R) -> Result<WeightedGraph<W>, ParseError> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| ParseError { line: 0, kind: ParseErrorKind::Malformed(e.to_string()) })?;
    let text = String::from_utf8(bytes).map_err(|_| ParseError { line: 0, kind: ParseErrorKind::Encoding })?;
    parse_graph(&text)
}

/// Named instances used by tests and examples.
pub mod families {
    use super::*;

    pub fn complete<W: Weight>(n: usize, w: W) -> WeightedGraph<W> {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, w)));
        WeightedGraph::new(n, edges).expect("complete graph is valid")
    }

    pub fn cycle<W: Weight>(n: usize, w: W) -> WeightedGraph<W> {
        assert!(n >= 3, "cycle needs at least three vertices");
        WeightedGraph::new(n, (0..n).map(|u| (u, (u + 1) % n, w))).expect("cycle is valid")
    }

    /// Path `0 - 1 - ... - k` with the given edge weights.
    pub fn path<W: Weight>(weights: &[W]) -> WeightedGraph<W> {
        WeightedGraph::new(weights.len() + 1, weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)))
            .expect("path is valid")
    }

    /// Star with center 0 and `leaves` spokes of weight `w`.
    pub fn star<W: Weight>(leaves: usize, w: W) -> WeightedGraph<W> {
        WeightedGraph::new(leaves + 1, (1..=leaves).map(|v| (0, v, w))).expect("star is valid")
    }

    /// G(n, p) with weights uniform on (0, 1].
    pub fn random<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> WeightedGraph<f64> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < edge_prob {
                    // random() is uniform on [0, 1); flip it onto (0, 1].
                    edges.push((u, v, 1.0 - rng.random::<f64>()));
                }
            }
        }
        WeightedGraph::new(n, edges).expect("random graph is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn parses_single_edge() {
        let g: WeightedGraph<f64> = parse_graph("0 1 1.0").unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 1.0 }]);
    }

    #[test]
    fn parses_triangle_with_comments_and_header() {
        let g: WeightedGraph<f64> = parse_graph("# tri\np 3 3\n0 1 1\n1 2 1 # edge\n\n2 0 1\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.edge(2), &Edge { u: 0, v: 2, w: 1.0 });
        assert_eq!(g.neighbors(0).unwrap(), vec![1, 2]);
        assert_eq!(g.total_weight(), 3.0);
    }

    #[test]
    fn header_can_declare_isolated_vertices() {
        let g: WeightedGraph<f64> = parse_graph("p 5 1\n0 1 2.5\n").unwrap();
        assert_eq!(g.num_vertices(), 5);
    }

    #[test]
    fn diagnostics_are_distinct_and_located() {
        let kind = |s: &str| parse_graph::<f64>(s).unwrap_err();
        let e = kind("0 1 -1");
        assert_eq!(e.line, 1);
        assert_eq!(e.kind, ParseErrorKind::Graph(GraphError::NonPositiveWeight(0, 1)));
        assert_eq!(kind("0 1 0").kind, ParseErrorKind::Graph(GraphError::NonPositiveWeight(0, 1)));
        let e = kind("0 1 1\n2 2 1");
        assert_eq!((e.line, e.kind), (2, ParseErrorKind::Graph(GraphError::SelfLoop(2))));
        let e = kind("0 1 1\n# c\n1 0 2");
        assert_eq!((e.line, e.kind), (3, ParseErrorKind::Graph(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(kind("0 1").kind, ParseErrorKind::Malformed(_)));
        assert!(matches!(kind("0 x 1").kind, ParseErrorKind::Malformed(_)));
        assert!(matches!(kind("0 1 abc").kind, ParseErrorKind::Malformed(_)));
        assert_eq!(kind("0 1 inf").kind, ParseErrorKind::Graph(GraphError::NonFiniteWeight(0, 1)));
        assert!(matches!(kind("p 2 2\n0 1 1").kind, ParseErrorKind::EdgeCount { declared: 2, found: 1 }));
        assert!(matches!(
            kind("p 2 1\n0 3 1").kind,
            ParseErrorKind::Graph(GraphError::VertexOutOfRange { vertex: 3, n: 2 })
        ));
        assert!(matches!(kind("p 2\n").kind, ParseErrorKind::Header(_)));
    }

    #[test]
    fn read_graph_rejects_invalid_utf8() {
        let e = read_graph::<f64, _>(&[0xffu8, 0xfe][..]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Encoding);
    }

    #[test]
    fn neighbor_queries() {
        let g = complete(3, 1.0);
        assert_eq!(g.neighbors(0).unwrap(), vec![1, 2]);
        assert!(g.neighbors(3).is_err());
    }

    #[test]
    fn triangle_freeness() {
        assert!(cycle(5, 1.0).is_triangle_free());
        assert!(!complete(3, 1.0).is_triangle_free());
        assert!(star(4, 1.0).is_triangle_free());
        assert_eq!(complete(4, 1.0).triangles().len(), 4);
    }

    #[test]
    fn rational_weights() {
        use num_rational::Rational64;
        let g = path(&[Rational64::new(1, 3), Rational64::new(2, 3)]);
        assert_eq!(g.total_weight(), Rational64::from_integer(1));
    }

    proptest! {
        #[test]
        fn serialize_parse_is_identity(seed in any::<u64>(), n in 1usize..9, p in 0.0f64..1.0) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = random(n, p, &mut rng);
            let h: WeightedGraph<f64> = parse_graph(&g.to_edge_list()).unwrap();
            prop_assert_eq!(h.num_vertices(), g.num_vertices());
            prop_assert_eq!(h.edges(), g.edges());
        }

        #[test]
        fn adjacency_agrees_with_edges(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = random(n, 0.5, &mut rng);
            let mut degree_sum = 0;
            for v in 0..n {
                let nb = g.neighbors(v).unwrap();
                degree_sum += nb.len();
                for &u in &nb {
                    prop_assert!(g.find_edge(u, v).is_some());
                }
            }
            prop_assert_eq!(degree_sum, 2 * g.num_edges());
        }
    }
}
