//! CNOT gates as invertible matrices over GF(2) and the groups they generate.

use cnotnet::groupwalk::{cnot_gf2, element_trace, generate_group, graph_generators, Gf2Matrix};
use cnotnet::network::make_complete;

fn main() -> cnotnet::Result<()> {
    let u = cnot_gf2(0, 2, 3)?;
    println!("CNOT(0 -> 2) on 3 qubits, rows as bit masks: {:?}", u.rows());
    println!("involution {}", u.mul(&u) == Gf2Matrix::identity(3));
    println!("fixed basis states {}", element_trace(&u));

    for n in 2..=4 {
        let (gens, _) = graph_generators(&make_complete(n)?)?;
        let gt = generate_group(&gens, 1_000_000)?;
        let mut hist = std::collections::BTreeMap::new();
        for t in gt.traces() {
            *hist.entry(t).or_insert(0usize) += 1;
        }
        println!("N = {n}: order {}, fixed-point histogram {hist:?}", gt.order());
    }
    Ok(())
}
