//! Spectral gap of the induced graph, by Lanczos and by dense diagonalization.

use cnotnet::induced::build_induced_graph;
use cnotnet::network::Topology;
use cnotnet::spectral::{algebraic_connectivity, algebraic_connectivity_dense, LanczosConfig};

fn main() -> cnotnet::Result<()> {
    let cfg = LanczosConfig::default();
    println!("{:<20} {:>3} {:>14} {:>14} {:>10} {:>6}", "topology", "N", "gamma", "dense", "lambda_min", "iters");
    for topo in [Topology::Complete, Topology::Circle, Topology::CircleBidirectional, Topology::Unbalanced] {
        for n in topo.min_qubits().max(3)..=8 {
            let ig = build_induced_graph(&topo.build(n)?)?;
            let s = algebraic_connectivity(&ig, &cfg)?;
            let dense = if n <= 7 { format!("{:.10}", algebraic_connectivity_dense(&ig)?.gamma) } else { "-".into() };
            println!(
                "{:<20} {n:>3} {:>14.10} {:>14} {:>10.6} {:>6}",
                topo.as_str(),
                s.gamma,
                dense,
                s.lambda_min,
                s.iterations
            );
        }
    }
    Ok(())
}
