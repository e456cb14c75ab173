//! Traces of powers of the induced map, computed three ways.
//!
//! Summing element traces over the walk occupation reproduces the direct trace
//! of the `2^N` permutation average and its spectral expansion.

use cnotnet::groupwalk::{
    build_walk_matrix, generate_group, graph_generators, trace_expansion, trace_phi_power, trace_phi_power_direct,
    trace_superoperator_power, walk_spectrum,
};
use cnotnet::network::make_cycle_bidirectional;

fn main() -> cnotnet::Result<()> {
    let g = make_cycle_bidirectional(3)?;
    let (gens, probs) = graph_generators(&g)?;
    let gt = generate_group(&gens, 10_000)?;
    let w = build_walk_matrix(&gt, &probs)?;
    let expansion = trace_expansion(&gt, &walk_spectrum(&w)?);

    println!("order {}", gt.order());
    println!("{:>3} {:>14} {:>14} {:>14} {:>14}", "n", "walk", "direct", "spectral", "Tr Phi^n");
    for n in 0..=8 {
        let spectral: f64 = expansion.iter().map(|(omega, c)| c * omega.powi(n as i32)).sum();
        println!(
            "{n:>3} {:>14.10} {:>14.10} {:>14.10} {:>14.6}",
            trace_phi_power(&gt, &w, n),
            trace_phi_power_direct(&g, n)?,
            spectral,
            trace_superoperator_power(&gt, &w, n),
        );
    }
    Ok(())
}
