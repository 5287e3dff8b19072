//! Primal graph construction and the graph-based instance attributes.
//!
//! Run with:
//! ```bash
//! cargo run --example graph_attributes
//! ```

use cspsel::graph::{
    build_primal_graph, clustering_coefficient, degree_stats, edge_density, graph_width_raw,
    width_of_graph, width_of_ordering, PrimalGraph,
};
use cspsel::parse_instance;

fn describe(name: &str, g: &PrimalGraph) {
    let ds = degree_stats(g);
    println!(
        "{name:12} n={} m={}  density {:.3}  clustering {:.3}  deg mean {:.3}  width {:.3}",
        g.vertex_count(),
        g.edge_count(),
        edge_density(g),
        clustering_coefficient(g),
        ds.mean,
        width_of_graph(g),
    );
}

fn main() {
    // constraint scopes induce cliques in the primal graph
    let inst = parse_instance(
        "instance g\n\
         var a 0..4\nvar b 0..4\nvar c 0..4\nvar d 0..4\nvar e 0..4\n\
         con alldifferent ( a b c )\n\
         con rel c < d\n\
         con rel d < e\n",
    )
    .unwrap();
    let g = build_primal_graph(&inst);
    println!("primal graph of a 5-variable instance (triangle + tail):");
    describe("instance", &g);
    println!(
        "  width of the declared ordering: {:.3}",
        width_of_ordering(&g, &inst.ordering).unwrap()
    );

    println!("\nreference shapes:");
    let triangle = PrimalGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
    describe("triangle", &triangle);

    let star = PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
    describe("star K1,3", &star);

    let cycle5 = PrimalGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    describe("5-cycle", &cycle5);

    let mut k5 = Vec::new();
    for i in 0..5 {
        for j in (i + 1)..5 {
            k5.push((i, j));
        }
    }
    describe("K5", &PrimalGraph::from_edges(5, &k5));

    // graph width equals the minimum ordering width over all orderings;
    // the greedy minimum-degree elimination finds it in polynomial time
    println!("\nordering width vs graph width on the 5-cycle:");
    for ordering in [vec![0, 1, 2, 3, 4], vec![0, 2, 4, 1, 3]] {
        println!(
            "  ordering {ordering:?}: width {:.3}",
            width_of_ordering(&cycle5, &ordering).unwrap()
        );
    }
    println!(
        "  graph width (un-normalised): {} (cycles always have width 2)",
        graph_width_raw(&cycle5)
    );
}
