//! Subleading eigenvalue of the full channel against 1 − γ of the induced graph.

use cnotnet::channel::{attractor_projection, superoperator_beta_star};
use cnotnet::induced::build_induced_graph;
use cnotnet::network::make_complete;
use cnotnet::spectral::{algebraic_connectivity_dense, subleading_superoperator, LanczosConfig};

fn main() -> cnotnet::Result<()> {
    println!("{:>2} {:>6} {:>14} {:>14} {:>14}", "N", "attr", "1 - gamma", "beta* (dense)", "beta* (Lanczos)");
    for n in 2..=5 {
        let g = make_complete(n)?;
        let gamma = algebraic_connectivity_dense(&build_induced_graph(&g)?)?.gamma;
        let proj = attractor_projection(&g)?;
        let dense = if n <= 4 { format!("{:.10}", subleading_superoperator(&g)?) } else { "-".into() };
        let lanczos = superoperator_beta_star(&g, &proj, &LanczosConfig::default())?;
        println!("{n:>2} {:>6} {:>14.10} {:>14} {:>14.10}", proj.dimension(), 1.0 - gamma, dense, lanczos);
    }
    Ok(())
}
