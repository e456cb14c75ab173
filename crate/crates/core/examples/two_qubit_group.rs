//! Random walk on the six-element group generated by two CNOTs.
//!
//! `cargo run --example two_qubit_group -- 0.3`

use cnotnet::groupwalk::{
    bipartiteness_check, build_walk_matrix, generate_group, graph_generators, occupation, two_generator_order,
    walk_spectrum,
};
use cnotnet::network::{InteractionGraph, Link};

fn main() -> cnotnet::Result<()> {
    let p: f64 = std::env::args().nth(1).map(|s| s.parse().expect("p in [0, 1]")).unwrap_or(0.5);
    let g = InteractionGraph::new(2, vec![Link::new(0, 1, p), Link::new(1, 0, 1.0 - p)])?;
    let (gens, probs) = graph_generators(&g)?;
    let gt = generate_group(&gens, 100)?;
    let w = build_walk_matrix(&gt, &probs)?;
    let order = two_generator_order(&gt)?;

    println!("group order {}", gt.order());
    println!("W in the order 1, U1, U2, U1U2, U2U1, U1U2U1:");
    for &a in &order {
        let row: Vec<String> = order.iter().map(|&b| format!("{:5.2}", w.get(a, b))).collect();
        println!("  [{}]", row.join(" "));
    }
    let eig = walk_spectrum(&w)?;
    println!("spectrum {:?}", eig.values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    println!("bipartite {}", bipartiteness_check(&gt, &w).bipartite);

    // Occupation of the identity decays to 1/|G| only when the walk is not bipartite.
    for n in [1, 2, 5, 10, 11] {
        println!("k({n:>2})[1] = {:.6}", occupation(&gt, &w, n)[gt.identity_index()]);
    }
    Ok(())
}
