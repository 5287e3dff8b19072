//! Primal graph construction and graph-based instance attributes.
//!
//! The primal graph has one vertex per CSP variable and an edge between two
//! variables iff they occur together in some constraint scope. All returned
//! attributes are normalised by the vertex count; degenerate graphs
//! (0 or 1 vertices) yield 0 for every attribute.

use crate::instance::{is_permutation, Instance};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct PrimalGraph {
    /// Sorted adjacency lists; no self-loops, no multi-edges.
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("ordering is not a permutation of the graph's vertices")]
    BadOrdering,
}

/// Normalised degree statistics (each degree divided by the vertex count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
}

impl PrimalGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> PrimalGraph {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        PrimalGraph {
            adj,
            edge_count: edge_count / 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }
}

/// Builds the primal graph: repeated co-occurrence of a pair in several
/// scopes still yields a single edge.
pub fn build_primal_graph(inst: &Instance) -> PrimalGraph {
    let n = inst.variables.len();
    let mut pairs = Vec::new();
    for c in &inst.constraints {
        for i in 0..c.scope.len() {
            for j in (i + 1)..c.scope.len() {
                pairs.push((c.scope[i], c.scope[j]));
            }
        }
    }
    PrimalGraph::from_edges(n, &pairs)
}

/// Edges divided by the number of distinct vertex pairs; 0 when n < 2.
pub fn edge_density(g: &PrimalGraph) -> f64 {
    let n = g.vertex_count();
    if n < 2 {
        return 0.0;
    }
    g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}

/// Mean over all vertices of the edge density among each vertex's
/// neighbourhood; vertices of degree < 2 contribute 0.
pub fn clustering_coefficient(g: &PrimalGraph) -> f64 {
    let n = g.vertex_count();
    if n == 0 {
        return 0.0;
    }
    // membership bitmap reused across vertices
    let mut member = vec![false; n];
    let mut total = 0.0;
    for v in 0..n {
        let deg = g.degree(v);
        if deg < 2 {
            continue;
        }
        for &u in g.neighbours(v) {
            member[u] = true;
        }
        // each neighbourhood edge (u,w) counted from both endpoints
        let mut twice_edges = 0usize;
        for &u in g.neighbours(v) {
            twice_edges += g.neighbours(u).iter().filter(|&&w| member[w]).count();
        }
        for &u in g.neighbours(v) {
            member[u] = false;
        }
        let pairs = deg * (deg - 1) / 2;
        total += (twice_edges / 2) as f64 / pairs as f64;
    }
    total / n as f64
}

/// Min/max/mean/median/standard deviation of vertex degree, each divided by
/// the vertex count. Population standard deviation; median is the midpoint
/// of the two central values for even n.
pub fn degree_stats(g: &PrimalGraph) -> DegreeStats {
    let n = g.vertex_count();
    if n == 0 {
        return DegreeStats {
            min: 0.0,
            max: 0.0,
            mean: 0.0,
            median: 0.0,
            sd: 0.0,
        };
    }
    let mut degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let nf = n as f64;
    let mean_raw = degrees.iter().sum::<usize>() as f64 / nf;
    let median_raw = if n % 2 == 1 {
        degrees[n / 2] as f64
    } else {
        (degrees[n / 2 - 1] + degrees[n / 2]) as f64 / 2.0
    };
    let variance = degrees
        .iter()
        .map(|&d| {
            let diff = d as f64 - mean_raw;
            diff * diff
        })
        .sum::<f64>()
        / nf;
    DegreeStats {
        min: degrees[0] as f64 / nf,
        max: degrees[n - 1] as f64 / nf,
        mean: mean_raw / nf,
        median: median_raw / nf,
        sd: variance.sqrt() / nf,
    }
}

/// Width of `ordering`: the maximum, over vertices, of the number of
/// neighbours that precede the vertex. Un-normalised.
pub fn ordering_width_raw(g: &PrimalGraph, ordering: &[usize]) -> Result<usize, GraphError> {
    let n = g.vertex_count();
    if !is_permutation(ordering, n) {
        return Err(GraphError::BadOrdering);
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in ordering.iter().enumerate() {
        pos[v] = i;
    }
    let mut width = 0;
    for v in 0..n {
        let parents = g.neighbours(v).iter().filter(|&&u| pos[u] < pos[v]).count();
        width = width.max(parents);
    }
    Ok(width)
}

/// [`ordering_width_raw`] divided by the vertex count; 0 for n < 2.
pub fn width_of_ordering(g: &PrimalGraph, ordering: &[usize]) -> Result<f64, GraphError> {
    let n = g.vertex_count();
    let raw = ordering_width_raw(g, ordering)?;
    if n < 2 {
        return Ok(0.0);
    }
    Ok(raw as f64 / n as f64)
}

/// Graph width (degeneracy) via greedy minimum-degree elimination: the
/// answer is the largest minimum degree seen while repeatedly removing a
/// minimum-degree vertex. Equals the minimum ordering width over all
/// orderings. Ties broken by lowest vertex index. Un-normalised.
pub fn graph_width_raw(g: &PrimalGraph) -> usize {
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut width = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .unwrap();
        width = width.max(degree[v]);
        removed[v] = true;
        for &u in g.neighbours(v) {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    width
}

/// [`graph_width_raw`] divided by the vertex count; 0 for n < 2.
pub fn width_of_graph(g: &PrimalGraph) -> f64 {
    let n = g.vertex_count();
    if n < 2 {
        return 0.0;
    }
    graph_width_raw(g) as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_instance;

    fn triangle() -> PrimalGraph {
        PrimalGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn path3() -> PrimalGraph {
        PrimalGraph::from_edges(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn scopes_induce_cliques() {
        let inst = parse_instance(
            "instance t\nvar x {0,1}\nvar y {0,1}\nvar z {0,1}\ncon alldifferent (x y z)",
        )
        .unwrap();
        let g = build_primal_graph(&inst);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(0, 2));
    }

    #[test]
    fn binary_relations_chain_into_a_path() {
        let inst = parse_instance(
            "instance t\nvar x 0..3\nvar y 0..3\nvar z 0..3\ncon rel x < y\ncon rel y < z",
        )
        .unwrap();
        let g = build_primal_graph(&inst);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn no_constraints_no_edges() {
        let inst = parse_instance("instance t\nvar x {0}\nvar y {0}\nvar z {0}").unwrap();
        let g = build_primal_graph(&inst);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn repeated_cooccurrence_is_idempotent() {
        let inst = parse_instance(
            "instance t\nvar x 0..3\nvar y 0..3\ncon rel x < y\ncon rel x != y\ncon alldifferent (x y)",
        )
        .unwrap();
        assert_eq!(build_primal_graph(&inst).edge_count(), 1);
    }

    #[test]
    fn edge_density_cases() {
        assert_eq!(edge_density(&triangle()), 1.0);
        assert!((edge_density(&path3()) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(edge_density(&PrimalGraph::from_edges(1, &[])), 0.0);
        assert_eq!(edge_density(&PrimalGraph::from_edges(0, &[])), 0.0);
    }

    /// Independent oracle: count neighbourhood edges by brute force.
    fn clustering_by_enumeration(g: &PrimalGraph) -> f64 {
        let n = g.vertex_count();
        if n == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for v in 0..n {
            let nb = g.neighbours(v);
            if nb.len() < 2 {
                continue;
            }
            let mut edges = 0;
            for i in 0..nb.len() {
                for j in (i + 1)..nb.len() {
                    if g.has_edge(nb[i], nb[j]) {
                        edges += 1;
                    }
                }
            }
            total += edges as f64 / (nb.len() * (nb.len() - 1) / 2) as f64;
        }
        total / n as f64
    }

    #[test]
    fn clustering_cases() {
        assert_eq!(clustering_coefficient(&triangle()), 1.0);
        // path: all locals 0 because of the deg < 2 rule on the endpoints
        // and the missing edge between the middle vertex's neighbours
        assert_eq!(clustering_coefficient(&path3()), 0.0);
        // K4 minus the (2,3) edge: the two degree-2 vertices see an edge
        // between their neighbours (local 1), the two degree-3 vertices see
        // 2 of 3 neighbour pairs connected (local 2/3); mean 5/6
        let g = PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!((clustering_coefficient(&g) - 5.0 / 6.0).abs() < 1e-12);
        assert!((clustering_by_enumeration(&g) - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_matches_enumeration_oracle() {
        let graphs = [
            PrimalGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]),
            PrimalGraph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (3, 5), (2, 3)]),
            PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        ];
        for g in &graphs {
            assert!(
                (clustering_coefficient(g) - clustering_by_enumeration(g)).abs() < 1e-12
            );
        }
    }

    #[test]
    fn degree_stats_triangle_is_regular() {
        let s = degree_stats(&triangle());
        for v in [s.min, s.max, s.mean, s.median] {
            assert!((v - 2.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(s.sd, 0.0);
    }

    #[test]
    fn degree_stats_star() {
        // K1,3: degrees (3,1,1,1), all divided by 4
        let g = PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let s = degree_stats(&g);
        assert!((s.min - 0.25).abs() < 1e-12);
        assert!((s.max - 0.75).abs() < 1e-12);
        assert!((s.mean - 0.375).abs() < 1e-12);
        assert!((s.median - 0.25).abs() < 1e-12);
        assert!((s.sd - 0.75f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn degree_stats_degenerate() {
        let s = degree_stats(&PrimalGraph::from_edges(1, &[]));
        assert_eq!((s.min, s.max, s.mean, s.median, s.sd), (0.0, 0.0, 0.0, 0.0, 0.0));
        let s = degree_stats(&PrimalGraph::from_edges(0, &[]));
        assert_eq!((s.min, s.max, s.mean, s.median, s.sd), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn ordering_width_cases() {
        assert_eq!(width_of_ordering(&path3(), &[0, 1, 2]).unwrap(), 1.0 / 3.0);
        let cycle4 = PrimalGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(width_of_ordering(&cycle4, &[0, 1, 2, 3]).unwrap(), 0.5);
        let k4 = PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(width_of_ordering(&k4, &[2, 0, 3, 1]).unwrap(), 0.75);
        assert_eq!(
            width_of_ordering(&k4, &[0, 0, 3, 1]),
            Err(GraphError::BadOrdering)
        );
    }

    #[test]
    fn graph_width_known_families() {
        // trees have width 1
        let tree = PrimalGraph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
        assert_eq!(graph_width_raw(&tree), 1);
        // cycles have width 2
        let c5 = PrimalGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(graph_width_raw(&c5), 2);
        assert!((width_of_graph(&c5) - 0.4).abs() < 1e-12);
        // complete graphs have width n-1
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j));
            }
        }
        let k5 = PrimalGraph::from_edges(5, &edges);
        assert_eq!(graph_width_raw(&k5), 4);
    }

    #[test]
    fn graph_width_never_exceeds_any_ordering_width() {
        // a fixed assortment of small graphs
        let graphs = [
            PrimalGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]),
            PrimalGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]),
            PrimalGraph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5)]),
        ];
        for g in &graphs {
            let orderings = [
                (0..g.vertex_count()).collect::<Vec<_>>(),
                (0..g.vertex_count()).rev().collect::<Vec<_>>(),
            ];
            for ord in &orderings {
                assert!(graph_width_raw(g) <= ordering_width_raw(g, ord).unwrap());
            }
        }
    }
}
