//! Compares γ with the diameter bound and the smallest-link bound.

use cnotnet::analysis::BoundReport;
use cnotnet::induced::{build_induced_graph, unweighted_diameter};
use cnotnet::network::Topology;
use cnotnet::spectral::{algebraic_connectivity, LanczosConfig};

fn main() -> cnotnet::Result<()> {
    println!(
        "{:<12} {:>3} {:>10} {:>5} {:>10} {:>10} {:>6}",
        "topology", "N", "gamma", "diam", "diam bnd", "min p", "holds"
    );
    for topo in [Topology::Complete, Topology::Circle, Topology::Unbalanced] {
        for n in 3..=9 {
            let g = topo.build(n)?;
            let ig = build_induced_graph(&g)?;
            let gamma = algebraic_connectivity(&ig, &LanczosConfig::default())?.gamma;
            let r = BoundReport::new(&g, gamma, unweighted_diameter(&ig)?);
            let mw = r.min_weight_bound.map_or("-".to_string(), |b| format!("{b:.6}"));
            println!(
                "{:<12} {n:>3} {:>10.6} {:>5} {:>10.6} {:>10} {:>6}",
                topo.as_str(),
                gamma,
                r.diameter,
                r.diameter_bound,
                mw,
                r.all_hold()
            );
        }
    }
    Ok(())
}
