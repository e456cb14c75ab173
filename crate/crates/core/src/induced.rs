//! The weighted graph that a CNOT network induces on computational basis
//! states.
//!
//! Every gate maps a basis state `x` either to itself (control unexcited),
//! which adds the gate's probability to the loop at `x`, or to the state with
//! the target bit flipped, which adds it to the undirected edge between the two.
//! Row sums are therefore 1 and the adjacency matrix is exactly the reduced map
//! `φ = Σ p_i U_i` restricted to the vertex set. The all-zeros state is fixed by
//! every CNOT and forms its own component; [`build_induced_graph`] drops it.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::InteractionGraph;
use crate::sparse::{CsrMatrix, LinearOperator};

/// Default qubit ceiling for induced-graph construction (65535 vertices).
pub const DEFAULT_MAX_QUBITS: usize = 16;

/// Up to this many vertices the diameter is found by BFS from every vertex.
const ALL_PAIRS_LIMIT: usize = 4096;

/// A computational basis state; bit `j` of the index is qubit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(pub usize);

impl BasisState {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn excitations(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_excited(self, qubit: usize) -> bool {
        (self.0 >> qubit) & 1 == 1
    }

    /// Parses a label like `"101010"`, qubit 0 first.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut index = 0usize;
        for (j, ch) in label.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << j,
                other => {
                    return Err(Error::InvalidArgument(format!("bad basis label character {other:?} in {label:?}")))
                }
            }
        }
        if label.is_empty() || label.len() > 63 {
            return Err(Error::InvalidArgument(format!("bad basis label {label:?}")));
        }
        Ok(Self(index))
    }

    pub fn label(self, n_qubits: usize) -> String {
        (0..n_qubits).map(|j| if self.is_excited(j) { '1' } else { '0' }).collect()
    }
}

#[inline]
pub(crate) fn cnot_index(x: usize, control: usize, target: usize) -> usize {
    x ^ (((x >> control) & 1) << target)
}

/// Flips `target` iff `control` is excited.
pub fn apply_cnot(state: BasisState, control: usize, target: usize, n_qubits: usize) -> Result<BasisState> {
    for q in [control, target] {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    if control == target {
        return Err(Error::SameControlTarget(control));
    }
    if state.0 >> n_qubits != 0 {
        return Err(Error::InvalidArgument(format!("state {} has bits beyond {n_qubits} qubits", state.0)));
    }
    Ok(BasisState(cnot_index(state.0, control, target)))
}

/// Symmetric, row-stochastic adjacency on basis states, loops on the diagonal.
#[derive(Clone, Debug)]
pub struct InducedGraph {
    n_qubits: usize,
    /// Basis index of vertex 0: 1 when the zero state is removed, else 0.
    offset: usize,
    adjacency: CsrMatrix,
}

/// Induced graph on the `2^N − 1` nonzero basis states.
pub fn build_induced_graph(g: &InteractionGraph) -> Result<InducedGraph> {
    build_with(g, 1, DEFAULT_MAX_QUBITS)
}

/// As [`build_induced_graph`] with an explicit qubit ceiling.
pub fn build_induced_graph_with_ceiling(g: &InteractionGraph, max_qubits: usize) -> Result<InducedGraph> {
    build_with(g, 1, max_qubits)
}

/// Graph on all `2^N` basis states, zero state included (the full map `φ`).
pub fn build_full_basis_graph(g: &InteractionGraph) -> Result<InducedGraph> {
    build_with(g, 0, DEFAULT_MAX_QUBITS)
}

fn build_with(g: &InteractionGraph, offset: usize, max_qubits: usize) -> Result<InducedGraph> {
    let n = g.n_qubits();
    if n > max_qubits {
        return Err(Error::CeilingExceeded { what: "induced graph", n, ceiling: max_qubits });
    }
    let n_states = 1usize << n;
    let rows: Vec<Vec<(usize, f64)>> = (offset..n_states)
        .into_par_iter()
        .map(|x| {
            let mut loop_weight = 0.0;
            // Neighbours differ from x in exactly one bit, indexed by that bit.
            let mut flip = vec![0.0; n];
            for link in g.links().iter().filter(|l| l.probability > 0.0) {
                let y = cnot_index(x, link.control, link.target);
                if y == x {
                    loop_weight += link.probability;
                } else {
                    flip[link.target] += link.probability;
                }
            }
            let mut row = Vec::with_capacity(n + 1);
            if loop_weight > 0.0 {
                row.push((x - offset, loop_weight));
            }
            for (b, &w) in flip.iter().enumerate() {
                if w > 0.0 {
                    row.push(((x ^ (1 << b)) - offset, w));
                }
            }
            row
        })
        .collect();
    let adjacency = CsrMatrix::from_rows(rows);
    for v in 0..adjacency.n() {
        for (w, a) in adjacency.row(v) {
            let back = adjacency.get(w, v);
            assert!((a - back).abs() <= 1e-15, "asymmetric assembly at ({v}, {w}): {a} vs {back}");
        }
    }
    Ok(InducedGraph { n_qubits: n, offset, adjacency })
}

impl InducedGraph {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.n()
    }

    pub fn includes_zero_state(&self) -> bool {
        self.offset == 0
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn state_of(&self, vertex: usize) -> BasisState {
        BasisState(vertex + self.offset)
    }

    pub fn vertex_of(&self, state: BasisState) -> Option<usize> {
        state.0.checked_sub(self.offset).filter(|&v| v < self.n_vertices())
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency.get(u, v)
    }

    pub fn loop_weight(&self, v: usize) -> f64 {
        self.adjacency.get(v, v)
    }

    pub fn row_sum(&self, v: usize) -> f64 {
        self.adjacency.row(v).map(|(_, w)| w).sum()
    }

    /// Off-diagonal neighbours of `v` in the unweighted skeleton.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.row(v).filter(move |&(w, a)| w != v && a > 0.0).map(|(w, _)| w)
    }

    /// Undirected skeleton edges `(u, v)` with `u < v`, as vertex ids.
    pub fn skeleton_edges(&self) -> Vec<(usize, usize)> {
        (0..self.n_vertices()).flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn laplacian(&self) -> LaplacianView<'_> {
        LaplacianView { graph: self }
    }

    /// Writes `state state weight` lines, each undirected edge once and loops
    /// as self-edges, using basis-state indices as vertex ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for u in 0..self.n_vertices() {
            for (v, w) in self.adjacency.row(u) {
                if v >= u {
                    writeln!(out, "{} {} {}", self.state_of(u).0, self.state_of(v).0, w)?;
                }
            }
        }
        Ok(())
    }
}

impl LinearOperator for InducedGraph {
    fn dim(&self) -> usize {
        self.n_vertices()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency.apply(x, y)
    }
}

/// `L = I − A`, applied without materializing.
#[derive(Clone, Copy)]
pub struct LaplacianView<'a> {
    graph: &'a InducedGraph,
}

impl LaplacianView<'_> {
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = self.graph.adjacency.to_dense();
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j { 1.0 - *v } else { -*v };
            }
        }
        d
    }
}

impl LinearOperator for LaplacianView<'_> {
    fn dim(&self) -> usize {
        self.graph.n_vertices()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.graph.adjacency.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi - *yi;
        }
    }
}

/// Connected-component summary of the skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connectivity {
    pub connected: bool,
    pub components: usize,
    /// Component label per vertex, numbered in order of first appearance.
    pub labels: Vec<usize>,
}

pub fn connectivity_check(ig: &InducedGraph) -> Connectivity {
    let n = ig.n_vertices();
    let mut labels = vec![usize::MAX; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = components;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for v in ig.neighbors(u) {
                if labels[v] == usize::MAX {
                    labels[v] = components;
                    queue.push_back(v);
                }
            }
        }
        components += 1;
    }
    Connectivity { connected: components <= 1, components, labels }
}

/// BFS distances from `source`; `u32::MAX` marks unreachable vertices.
fn bfs(ig: &InducedGraph, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; ig.n_vertices()];
    let mut queue = VecDeque::with_capacity(ig.n_vertices());
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        for v in ig.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = d;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn eccentricity(ig: &InducedGraph, source: usize) -> Result<(u32, Vec<u32>)> {
    let dist = bfs(ig, source);
    if let Some(to) = dist.iter().position(|&d| d == u32::MAX) {
        return Err(Error::Disconnected { from: ig.state_of(source).0, to: ig.state_of(to).0 });
    }
    let ecc = dist.iter().copied().max().unwrap_or(0);
    Ok((ecc, dist))
}

/// Diameter of the loop-stripped unweighted skeleton.
///
/// Eccentricity is constant on orbits of the qubit permutations that preserve
/// the set of links, so BFS runs from one state per orbit (transpositions,
/// the rotation and the reflection are tried as generators). When the orbits
/// are still too many, eccentricity bounding (Takes–Kosters) takes over.
/// Disconnected skeletons yield [`Error::Disconnected`] naming an unreachable
/// pair by basis index.
pub fn unweighted_diameter(ig: &InducedGraph) -> Result<usize> {
    let reps = orbit_representatives(ig);
    if reps.len() <= ALL_PAIRS_LIMIT {
        let eccs: Result<Vec<u32>> = reps.into_par_iter().map(|s| eccentricity(ig, s).map(|e| e.0)).collect();
        Ok(eccs?.into_iter().max().unwrap_or(0) as usize)
    } else {
        bounding_diameter(ig)
    }
}

/// Directed links `(control, target)` visible in the skeleton: state `1 << c`
/// has an edge to `1 << c | 1 << t` exactly when link `c → t` has weight.
pub fn skeleton_links(ig: &InducedGraph) -> Vec<(usize, usize)> {
    let n = ig.n_qubits();
    let mut links = Vec::new();
    for c in 0..n {
        let Some(u) = ig.vertex_of(BasisState(1 << c)) else { continue };
        for t in (0..n).filter(|&t| t != c) {
            if let Some(v) = ig.vertex_of(BasisState(1 << c | 1 << t)) {
                if ig.weight(u, v) > 0.0 {
                    links.push((c, t));
                }
            }
        }
    }
    links
}

fn permute_bits(x: usize, perm: &[usize]) -> usize {
    perm.iter().enumerate().fold(0, |acc, (q, &to)| acc | ((x >> q & 1) << to))
}

/// One vertex per orbit of the skeleton-preserving qubit permutations found
/// among transpositions, the rotation `q → q+1` and the reflection `q → N−1−q`.
pub fn orbit_representatives(ig: &InducedGraph) -> Vec<usize> {
    let n = ig.n_qubits();
    let links = skeleton_links(ig);
    let mut set = vec![false; n * n];
    for &(c, t) in &links {
        set[c * n + t] = true;
    }
    let preserves = |perm: &[usize]| links.iter().all(|&(c, t)| set[perm[c] * n + perm[t]]);
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            candidates.push(p);
        }
    }
    candidates.push((0..n).map(|q| (q + 1) % n).collect());
    candidates.push((0..n).map(|q| n - 1 - q).collect());
    let gens: Vec<Vec<usize>> = candidates.into_iter().filter(|p| preserves(p)).collect();

    let nv = ig.n_vertices();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in &gens {
        for v in 0..nv {
            let Some(w) = ig.vertex_of(BasisState(permute_bits(ig.state_of(v).index(), p))) else { continue };
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..nv).filter(|&v| find(&mut parent, v) == v).collect()
}

pub fn all_pairs_diameter(ig: &InducedGraph) -> Result<usize> {
    let n = ig.n_vertices();
    if n == 0 {
        return Ok(0);
    }
    let eccs: Result<Vec<u32>> = (0..n).into_par_iter().map(|s| eccentricity(ig, s).map(|e| e.0)).collect();
    Ok(eccs?.into_iter().max().unwrap_or(0) as usize)
}

pub fn bounding_diameter(ig: &InducedGraph) -> Result<usize> {
    let n = ig.n_vertices();
    if n == 0 {
        return Ok(0);
    }
    let mut lower = vec![0u32; n];
    let mut upper = vec![u32::MAX; n];
    let mut active = vec![true; n];
    let mut remaining = n;
    let (mut d_lo, mut d_hi) = (0u32, u32::MAX);
    let mut pick_high = true;
    while remaining > 0 && d_lo < d_hi {
        // Alternate between the largest upper bound and the smallest lower bound.
        let v = (0..n)
            .filter(|&i| active[i])
            .max_by_key(|&i| if pick_high { (upper[i], lower[i]) } else { (u32::MAX - lower[i], upper[i]) })
            .expect("remaining > 0");
        pick_high = !pick_high;
        let (ecc, dist) = eccentricity(ig, v)?;
        d_lo = d_lo.max(ecc);
        d_hi = d_hi.min(2 * ecc);
        for w in 0..n {
            if !active[w] {
                continue;
            }
            let dw = dist[w];
            lower[w] = lower[w].max(ecc.saturating_sub(dw)).max(dw);
            upper[w] = upper[w].min(ecc + dw);
            if upper[w] <= d_lo || (lower[w] == upper[w]) || lower[w] >= d_hi {
                d_lo = d_lo.max(lower[w]);
                active[w] = false;
                remaining -= 1;
            }
        }
        if active[v] {
            active[v] = false;
            remaining -= 1;
        }
        d_hi = d_hi.min((0..n).filter(|&i| active[i]).map(|i| upper[i]).max().unwrap_or(d_lo).max(d_lo));
    }
    Ok(d_lo as usize)
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} component(s)", self.components)
    }
}
