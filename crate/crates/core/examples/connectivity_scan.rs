//! Scans γ over N for one topology and fits `a/N^e1 + b/N^e2` to the tail.
//!
//! `cargo run --release --example connectivity_scan -- circle 3 13`

use cnotnet::analysis::{power_law_fit, scan_connectivity, ScanConfig};
use cnotnet::network::Topology;

fn main() -> cnotnet::Result<()> {
    let mut args = std::env::args().skip(1);
    let topo: Topology = serde_json::from_value(serde_json::Value::String(args.next().unwrap_or("complete".into())))
        .expect("complete, circle, circle-bidirectional, star or unbalanced");
    let lo: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(3);
    let hi: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(12);

    let scan = scan_connectivity(&ScanConfig::new(topo, lo, hi))?;
    print!("{}", scan.to_csv());

    let exps = match topo {
        Topology::Circle | Topology::CircleBidirectional => (1.5, 2.5),
        Topology::Unbalanced => (2.0, 4.0),
        _ => (1.0, 2.0),
    };
    match power_law_fit(&scan.points(), exps, 8.min(hi - 2)) {
        Ok(f) => println!("fit N>={}: a = {:.4}, b = {:.4}, rss = {:.2e}", f.n_min, f.a, f.b, f.rss),
        Err(e) => println!("no fit: {e}"),
    }
    Ok(())
}
