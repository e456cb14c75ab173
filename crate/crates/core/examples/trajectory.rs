//! Distance of an evolving state from the attractor manifold, against the
//! geometric envelope set by the subleading eigenvalue of the channel.
//!
//! `cargo run --release --example trajectory -- 101010 30`

use cnotnet::channel::{trajectory, DensityMatrix};
use cnotnet::induced::BasisState;
use cnotnet::network::make_complete;

fn main() -> cnotnet::Result<()> {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or("000001".into());
    let steps: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(20);

    let g = make_complete(label.len())?;
    let rho0 = DensityMatrix::basis_projector(label.len(), BasisState::from_label(&label)?)?;
    let t = trajectory(&g, &rho0, steps, &label)?;
    println!("beta* = {:.10}", t.beta_star);
    println!("{:>4} {:>12} {:>12} {:>10}", "step", "distance", "bound", "min eig");
    for p in &t.points {
        println!("{:>4} {:>12.6e} {:>12.6e} {:>10.2e}", p.step, p.distance, p.bound, p.min_eigenvalue);
    }
    println!("worst excess {:.2e}", t.worst_bound_excess());
    Ok(())
}
