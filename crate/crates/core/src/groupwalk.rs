//! Random walk on the matrix group generated by the CNOT gates.
//!
//! A CNOT is a linear map on `F₂^N` (bit vectors are basis-state indices, bit
//! `j` is qubit `j`). Group elements are stored as bit-packed rows: bit `j` of
//! `rows[i]` is entry `(i, j)`, and `(g x)_i = parity(rows[i] & x)`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::build_full_basis_graph;
use crate::network::InteractionGraph;
use crate::sparse::{CsrMatrix, LinearOperator};
use crate::spectral::{dense_symmetric_eigen_with, DenseMatrix, SymmetricEigen, DEFAULT_DENSE_CEILING};

pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Matrix {
    n: usize,
    rows: Vec<u32>,
}

impl Gf2Matrix {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 32, "at most 32 bits per row");
        Self { n, rows: (0..n).map(|i| 1u32 << i).collect() }
    }

    pub fn from_rows(n: usize, rows: Vec<u32>) -> Result<Self> {
        if n > 32 || rows.len() != n {
            return Err(Error::InvalidSize(format!("{} rows for a {n}x{n} bit matrix", rows.len())));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::InvalidArgument("row has bits beyond the matrix width".into()));
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn apply(&self, x: usize) -> usize {
        self.rows.iter().enumerate().fold(0, |acc, (i, r)| acc | ((((*r as usize) & x).count_ones() as usize & 1) << i))
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&r| (0..self.n).filter(|&j| r >> j & 1 == 1).fold(0u32, |acc, j| acc ^ other.rows[j]))
            .collect();
        Self { n: self.n, rows }
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> col & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    fn plus_identity(&self) -> Self {
        Self { n: self.n, rows: self.rows.iter().enumerate().map(|(i, r)| r ^ (1 << i)).collect() }
    }
}

/// CNOT with control `c` and target `t` as a bit matrix.
pub fn cnot_gf2(control: usize, target: usize, n_qubits: usize) -> Result<Gf2Matrix> {
    if n_qubits > 32 {
        return Err(Error::InvalidSize(format!("{n_qubits} qubits exceed 32-bit rows")));
    }
    for q in [control, target] {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    if control == target {
        return Err(Error::SameControlTarget(control));
    }
    let mut g = Gf2Matrix::identity(n_qubits);
    g.rows[target] |= 1 << control;
    Ok(g)
}

/// Operator trace of the permutation induced by `g`: its number of fixed
/// points, `2^(N − rank(g ⊕ I))`.
pub fn element_trace(g: &Gf2Matrix) -> u64 {
    1u64 << (g.n - g.plus_identity().rank())
}

#[derive(Clone, Debug)]
pub struct GroupTable {
    n: usize,
    elements: Vec<Gf2Matrix>,
    index: HashMap<Gf2Matrix, usize>,
    generators: Vec<Gf2Matrix>,
    /// `action[a][i]` is the index of `U_i · g_a`.
    action: Vec<Vec<usize>>,
}

/// Breadth-first closure under left multiplication. Element 0 is the identity
/// and the order is BFS discovery order.
pub fn generate_group(generators: &[Gf2Matrix], cap: usize) -> Result<GroupTable> {
    let n = generators.first().map(|g| g.n).ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    for g in generators {
        if g.n != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.n });
        }
        if !g.is_invertible() {
            return Err(Error::InvalidArgument("generator is not invertible".into()));
        }
    }
    let id = Gf2Matrix::identity(n);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut action: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let mut row = Vec::with_capacity(generators.len());
        for u in generators {
            let h = u.mul(&elements[a]);
            let k = match index.get(&h) {
                Some(&k) => k,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::GroupCapExceeded { cap });
                    }
                    let k = elements.len();
                    index.insert(h.clone(), k);
                    elements.push(h);
                    queue.push_back(k);
                    k
                }
            };
            row.push(k);
        }
        action.push(row);
    }
    // BFS pops in index order, so action is indexed by element.
    Ok(GroupTable { n, elements, index, generators: generators.to_vec(), action })
}

/// Generators and probabilities of every link with positive probability.
pub fn graph_generators(g: &InteractionGraph) -> Result<(Vec<Gf2Matrix>, Vec<f64>)> {
    let mut gens = Vec::new();
    let mut probs = Vec::new();
    for l in g.links().iter().filter(|l| l.probability > 0.0) {
        gens.push(cnot_gf2(l.control, l.target, g.n_qubits())?);
        probs.push(l.probability);
    }
    Ok((gens, probs))
}

impl GroupTable {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Gf2Matrix] {
        &self.elements
    }

    pub fn element(&self, a: usize) -> &Gf2Matrix {
        &self.elements[a]
    }

    pub fn generators(&self) -> &[Gf2Matrix] {
        &self.generators
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn index_of(&self, g: &Gf2Matrix) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Index of `U_i · g_a`.
    pub fn left_multiply(&self, generator: usize, a: usize) -> usize {
        self.action[a][generator]
    }

    pub fn generators_are_involutions(&self) -> bool {
        let id = Gf2Matrix::identity(self.n);
        self.generators.iter().all(|g| g.mul(g) == id)
    }

    /// Operator traces of all elements, in table order.
    pub fn traces(&self) -> Vec<u64> {
        self.elements.iter().map(element_trace).collect()
    }
}

/// `W[a, b] = Σ_i p_i [g_a = U_i g_b]`, stored sparse.
#[derive(Clone, Debug)]
pub struct WalkMatrix {
    matrix: CsrMatrix,
}

pub fn build_walk_matrix(gt: &GroupTable, probabilities: &[f64]) -> Result<WalkMatrix> {
    if probabilities.len() != gt.generators.len() {
        return Err(Error::DimensionMismatch { expected: gt.generators.len(), got: probabilities.len() });
    }
    if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument("probabilities must lie in [0, 1]".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
    }
    let m = gt.order();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for b in 0..m {
        for (i, &p) in probabilities.iter().enumerate() {
            rows[gt.action[b][i]].push((b, p));
        }
    }
    for row in &mut rows {
        row.sort_by_key(|e| e.0);
        row.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
    }
    let w = WalkMatrix { matrix: CsrMatrix::from_rows(rows) };
    if gt.generators_are_involutions() {
        let dev = w.max_asymmetry();
        if dev != 0.0 {
            return Err(Error::NotSymmetric { row: 0, col: 0, deviation: dev });
        }
    }
    Ok(w)
}

impl WalkMatrix {
    pub fn order(&self) -> usize {
        self.matrix.n()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_rows(&self.matrix.to_dense()).expect("square by construction")
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.order()];
        for a in 0..self.order() {
            for (b, w) in self.matrix.row(a) {
                sums[b] += w;
            }
        }
        sums
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.order() {
            for (b, w) in self.matrix.row(a) {
                worst = worst.max((w - self.matrix.get(b, a)).abs());
            }
        }
        worst
    }
}

impl LinearOperator for WalkMatrix {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.apply(x, y)
    }
}

/// Full dense spectrum of `W` (group order at most [`DEFAULT_DENSE_CEILING`]).
pub fn walk_spectrum(w: &WalkMatrix) -> Result<SymmetricEigen> {
    let dev = w.max_asymmetry();
    if dev > 1e-12 {
        return Err(Error::NotSymmetric { row: 0, col: 0, deviation: dev });
    }
    if w.order() > DEFAULT_DENSE_CEILING {
        return Err(Error::CeilingExceeded {
            what: "dense walk spectrum",
            n: w.order(),
            ceiling: DEFAULT_DENSE_CEILING,
        });
    }
    dense_symmetric_eigen_with(&w.to_dense(), DEFAULT_DENSE_CEILING)
}

/// `k(n) = Wⁿ e_identity` by repeated multiplication.
pub fn occupation(gt: &GroupTable, w: &WalkMatrix, n: usize) -> Vec<f64> {
    let m = gt.order();
    let mut k = vec![0.0; m];
    k[gt.identity_index()] = 1.0;
    let mut next = vec![0.0; m];
    for _ in 0..n {
        w.apply(&k, &mut next);
        std::mem::swap(&mut k, &mut next);
    }
    k
}

/// `k_a(n) = Σ_b ω_bⁿ ⟨g_a|ω_b⟩⟨ω_b|1⟩` from a dense eigendecomposition.
pub fn occupation_spectral(gt: &GroupTable, eig: &SymmetricEigen, n: usize) -> Vec<f64> {
    let id = gt.identity_index();
    let mut k = vec![0.0; gt.order()];
    for (b, &omega) in eig.values.iter().enumerate() {
        let v = eig.vector(b);
        let c = omega.powi(n as i32) * v[id];
        for (ka, va) in k.iter_mut().zip(v) {
            *ka += c * va;
        }
    }
    k
}

/// `Σ_a k_a(n) Tr(g_a)`.
pub fn trace_phi_power(gt: &GroupTable, w: &WalkMatrix, n: usize) -> f64 {
    occupation(gt, w, n).iter().zip(gt.traces()).map(|(k, t)| k * t as f64).sum()
}

/// `Σ_a k_a(n) Tr(g_a ⊗ g_a) = Σ_a k_a(n) Tr(g_a)²`.
pub fn trace_superoperator_power(gt: &GroupTable, w: &WalkMatrix, n: usize) -> f64 {
    occupation(gt, w, n).iter().zip(gt.traces()).map(|(k, t)| k * (t * t) as f64).sum()
}

/// `Tr φⁿ` by powering the full `2^N` basis-state map directly.
pub fn trace_phi_power_direct(g: &InteractionGraph, n: usize) -> Result<f64> {
    let full = build_full_basis_graph(g)?;
    let d = full.n_vertices();
    let mut total = 0.0;
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    for s in 0..d {
        x.fill(0.0);
        x[s] = 1.0;
        for _ in 0..n {
            full.apply(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
        }
        total += x[s];
    }
    Ok(total)
}

/// Per distinct eigenvalue `ω` of `W`, the coefficient `c_ω` in
/// `Tr φⁿ = Σ_ω c_ω ωⁿ`. Eigenvalues closer than `1e−9` are merged.
pub fn trace_expansion(gt: &GroupTable, eig: &SymmetricEigen) -> Vec<(f64, f64)> {
    let id = gt.identity_index();
    let traces = gt.traces();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (b, &omega) in eig.values.iter().enumerate() {
        let v = eig.vector(b);
        let c = v[id] * v.iter().zip(&traces).map(|(x, &t)| x * t as f64).sum::<f64>();
        match out.last_mut() {
            Some(last) if (last.0 - omega).abs() < 1e-9 => last.1 += c,
            _ => out.push((omega, c)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bipartiteness {
    pub bipartite: bool,
    /// Parity per element (identity has 0) when a 2-coloring exists.
    pub parity: Option<Vec<u8>>,
}

/// Attempts a 2-coloring of the walk graph (nonzero off-diagonal entries of `W`).
/// A nonzero diagonal entry is a loop and rules out bipartiteness.
pub fn bipartiteness_check(gt: &GroupTable, w: &WalkMatrix) -> Bipartiteness {
    let m = gt.order();
    let mut color = vec![u8::MAX; m];
    let mut ok = true;
    for start in 0..m {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for (b, wt) in w.matrix.row(a) {
                if wt == 0.0 {
                    continue;
                }
                if color[b] == u8::MAX {
                    color[b] = 1 - color[a];
                    queue.push_back(b);
                } else if color[b] == color[a] {
                    ok = false;
                }
            }
        }
    }
    Bipartiteness { bipartite: ok, parity: ok.then_some(color) }
}

/// Table indices of `(1, U₁, U₂, U₁U₂, U₂U₁, U₁U₂U₁)` for a two-generator group,
/// with `U₁, U₂` the first and second generators.
pub fn two_generator_order(gt: &GroupTable) -> Result<Vec<usize>> {
    if gt.generators.len() != 2 {
        return Err(Error::InvalidArgument(format!("need two generators, got {}", gt.generators.len())));
    }
    let (u1, u2) = (&gt.generators[0], &gt.generators[1]);
    let words = [Gf2Matrix::identity(gt.n), u1.clone(), u2.clone(), u1.mul(u2), u2.mul(u1), u1.mul(u2).mul(u1)];
    words.iter().map(|g| gt.index_of(g).ok_or_else(|| Error::InvalidArgument("word not in group".into()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{make_complete, Link};

    fn two_qubit(p: f64) -> (GroupTable, WalkMatrix) {
        let g = InteractionGraph::new(2, vec![Link::new(0, 1, p), Link::new(1, 0, 1.0 - p)]).unwrap();
        let (gens, probs) = graph_generators(&g).unwrap();
        let gt = generate_group(&gens, DEFAULT_GROUP_CAP).unwrap();
        let w = build_walk_matrix(&gt, &probs).unwrap();
        (gt, w)
    }

    #[test]
    fn cnot_bits() {
        let u = cnot_gf2(0, 1, 2).unwrap();
        // |10> is index 1; CNOT(0->1) sends it to |11>, index 3.
        assert_eq!(u.apply(1), 3);
        assert_eq!(u.apply(2), 2);
        assert_eq!(u.mul(&u), Gf2Matrix::identity(2));
        let a = cnot_gf2(0, 1, 3).unwrap();
        let b = cnot_gf2(1, 2, 3).unwrap();
        assert_ne!(a.mul(&b), b.mul(&a));
        // Hand product: a·b has rows {001, 011, 110} as bit sets {0}, {0,1}, {1,2}.
        assert_eq!(a.mul(&b).rows(), &[0b001, 0b011, 0b110]);
        assert!(cnot_gf2(1, 1, 2).is_err());
        assert!(cnot_gf2(0, 2, 2).is_err());
    }

    #[test]
    fn apply_matches_basis_cnot() {
        for n in 2..=5 {
            for c in 0..n {
                for t in (0..n).filter(|&t| t != c) {
                    let u = cnot_gf2(c, t, n).unwrap();
                    for x in 0..1usize << n {
                        assert_eq!(u.apply(x), crate::induced::cnot_index(x, c, t));
                    }
                }
            }
        }
    }

    #[test]
    fn group_orders() {
        for (n, order) in [(2, 6), (3, 168)] {
            let (gens, _) = graph_generators(&make_complete(n).unwrap()).unwrap();
            let gt = generate_group(&gens, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(gt.order(), order);
            assert_eq!(gt.element(0), &Gf2Matrix::identity(n));
            assert!(gt.elements().iter().all(Gf2Matrix::is_invertible));
        }
        let (gens, _) = graph_generators(&make_complete(3).unwrap()).unwrap();
        assert!(matches!(generate_group(&gens, 100), Err(Error::GroupCapExceeded { cap: 100 })));
    }

    #[test]
    fn two_qubit_walk_matrix() {
        let p = 0.3;
        let (gt, w) = two_qubit(p);
        let ord = two_generator_order(&gt).unwrap();
        let q = 1.0 - p;
        let want = [
            [0.0, p, q, 0.0, 0.0, 0.0],
            [p, 0.0, 0.0, 0.0, q, 0.0],
            [q, 0.0, 0.0, p, 0.0, 0.0],
            [0.0, 0.0, p, 0.0, 0.0, q],
            [0.0, q, 0.0, 0.0, 0.0, p],
            [0.0, 0.0, 0.0, q, p, 0.0],
        ];
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(w.get(ord[a], ord[b]), want[a][b]);
            }
        }
        assert!(w.column_sums().iter().all(|s| (s - 1.0).abs() < 1e-15));
        let traces: Vec<u64> = ord.iter().map(|&a| element_trace(gt.element(a))).collect();
        assert_eq!(traces, vec![4, 2, 2, 1, 1, 2]);
    }

    #[test]
    fn two_qubit_spectrum_and_parity() {
        let p = 0.5;
        let (gt, w) = two_qubit(p);
        let eig = walk_spectrum(&w).unwrap();
        let s = (1.0 - 3.0 * p + 3.0 * p * p).sqrt();
        let want = [-1.0, -s, -s, s, s, 1.0];
        for (a, b) in eig.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let bip = bipartiteness_check(&gt, &w);
        assert!(bip.bipartite);
        let parity = bip.parity.unwrap();
        let ord = two_generator_order(&gt).unwrap();
        let by_order: Vec<u8> = ord.iter().map(|&a| parity[a]).collect();
        assert_eq!(by_order, vec![0, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn trace_identity_small() {
        for n in 2..=3 {
            let g = make_complete(n).unwrap();
            let (gens, probs) = graph_generators(&g).unwrap();
            let gt = generate_group(&gens, DEFAULT_GROUP_CAP).unwrap();
            let w = build_walk_matrix(&gt, &probs).unwrap();
            let eig = walk_spectrum(&w).unwrap();
            for k in 0..=10 {
                let via_group = trace_phi_power(&gt, &w, k);
                let direct = trace_phi_power_direct(&g, k).unwrap();
                assert!((via_group - direct).abs() < 1e-10, "N={n} n={k}");
                let a = occupation(&gt, &w, k);
                let b = occupation_spectral(&gt, &eig, k);
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
            }
            let expansion = trace_expansion(&gt, &eig);
            for k in 0..=6 {
                let series: f64 = expansion.iter().map(|(o, c)| c * o.powi(k)).sum();
                assert!((series - trace_phi_power(&gt, &w, k as usize)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn three_qubit_group_is_not_bipartite() {
        let g = make_complete(3).unwrap();
        let (gens, probs) = graph_generators(&g).unwrap();
        let gt = generate_group(&gens, DEFAULT_GROUP_CAP).unwrap();
        let w = build_walk_matrix(&gt, &probs).unwrap();
        assert!(!bipartiteness_check(&gt, &w).bipartite);
    }

    #[test]
    fn single_generator_is_bipartite() {
        let gt = generate_group(&[cnot_gf2(0, 1, 2).unwrap()], 10).unwrap();
        assert_eq!(gt.order(), 2);
        let w = build_walk_matrix(&gt, &[1.0]).unwrap();
        assert!(bipartiteness_check(&gt, &w).bipartite);
    }

    #[test]
    fn misaligned_probabilities() {
        let (gt, _) = two_qubit(0.5);
        assert!(build_walk_matrix(&gt, &[1.0]).is_err());
        assert!(build_walk_matrix(&gt, &[0.7, 0.7]).is_err());
    }

    #[test]
    fn element_trace_values() {
        assert_eq!(element_trace(&Gf2Matrix::identity(2)), 4);
        assert_eq!(element_trace(&cnot_gf2(0, 1, 2).unwrap()), 2);
        let u1u2 = cnot_gf2(0, 1, 2).unwrap().mul(&cnot_gf2(1, 0, 2).unwrap());
        assert_eq!(element_trace(&u1u2), 1);
    }
}
