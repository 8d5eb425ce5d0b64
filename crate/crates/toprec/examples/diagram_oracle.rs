//! The trivalent-graph evaluator as a cross-oracle: enumerate the graphs,
//! evaluate their weights, and confirm the sum reproduces the recursion.

use toprec::catalog::make_kontsevich;
use toprec::diagrams::{enumerate_graphs, enumerate_graphs_relaxed, graph_weight, sum_of_weights};
use toprec::engine::OmegaTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("graph counts:");
    for (g, k) in [(0u32, 2usize), (0, 3), (1, 1), (2, 0)] {
        println!("  (g={g}, leaves={k}): {}", enumerate_graphs(g, k).len());
    }
    println!(
        "  (g=2, leaves=0) without the left-child rule: {}",
        enumerate_graphs_relaxed(2, 0).len()
    );

    let curve = make_kontsevich(&[])?;
    for graph in enumerate_graphs(2, 0) {
        let w = graph_weight(&curve, &graph)?;
        println!("{} -> {:?}", graph.notation(), w);
    }

    let total = sum_of_weights(&curve, 2, 0)?;
    let direct = OmegaTable::new(&curve).omega(2, 1)?;
    assert_eq!(&total, direct.stable().unwrap());
    println!("graph sum equals the recursion: {total:?}");
    Ok(())
}
