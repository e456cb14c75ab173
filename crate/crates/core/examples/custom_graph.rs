//! Loads an interaction graph from JSON and reports its connectivity.
//!
//! `cargo run --example custom_graph -- graph.json`; without an argument a
//! built-in four-qubit graph is used.

use cnotnet::analysis::BoundReport;
use cnotnet::induced::{build_induced_graph, connectivity_check, unweighted_diameter};
use cnotnet::network::{apply_noise, InteractionGraph, NoiseSpec};
use cnotnet::spectral::{algebraic_connectivity, LanczosConfig};

const DEFAULT: &str = r#"{"n_qubits": 4, "links": [[0, 1, 0.4], [1, 2, 0.3], [2, 3, 0.2], [3, 0, 0.1]]}"#;

fn main() -> cnotnet::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable graph file"),
        None => DEFAULT.to_string(),
    };
    let g = InteractionGraph::from_json(&text)?;
    for (name, graph) in [("as given", g.clone()), ("noisy", apply_noise(&g, &NoiseSpec::new(0.5, 1)?)?)] {
        let ig = build_induced_graph(&graph)?;
        let conn = connectivity_check(&ig);
        if !conn.connected {
            println!("{name}: induced graph is disconnected");
            continue;
        }
        let s = algebraic_connectivity(&ig, &LanczosConfig::default())?;
        let r = BoundReport::new(&graph, s.gamma, unweighted_diameter(&ig)?);
        println!("{name}: {}", serde_json::to_string(&r).unwrap());
    }
    Ok(())
}
