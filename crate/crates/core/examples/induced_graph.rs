//! Builds the weighted graph a CNOT network induces on basis states and
//! prints it as an edge list.
//!
//! `cargo run --example induced_graph -- 3`

use cnotnet::induced::{build_induced_graph, connectivity_check, unweighted_diameter};
use cnotnet::network::make_cycle;

fn main() -> cnotnet::Result<()> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().expect("qubit count")).unwrap_or(3);
    let g = make_cycle(n)?;
    let ig = build_induced_graph(&g)?;
    let conn = connectivity_check(&ig);

    println!("{} vertices, connected {}, diameter {}", ig.n_vertices(), conn.connected, unweighted_diameter(&ig)?);
    for v in 0..ig.n_vertices() {
        let s = ig.state_of(v);
        let nbrs: Vec<String> = ig
            .neighbors(v)
            .filter(|&u| u != v)
            .map(|u| format!("{} ({:.3})", ig.state_of(u).label(n), ig.weight(v, u)))
            .collect();
        println!("{}  loop {:.3}  -> {}", s.label(n), ig.loop_weight(v), nbrs.join(", "));
    }
    ig.write_edge_list(std::io::stdout().lock()).expect("stdout");
    Ok(())
}
