//! Iterating the random CNOT channel on density matrices.
//!
//! Vectorization is row-major: `vec(ρ)[x·D + y] = ρ[x][y]` with `D = 2^N`.
//! Under this convention the channel acts as `Φ = Σ p_i U_i ⊗ U_i`. Every CNOT
//! is a real symmetric permutation, so states stay real and `Φ` is a real
//! symmetric matrix; conjugation is applied as an index permutation and no
//! gate matrix is ever formed.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::{cnot_index, BasisState};
use crate::network::InteractionGraph;
use crate::sparse::{norm, LinearOperator};
use crate::spectral::{
    dense_symmetric_eigen_with, dense_symmetric_eigenvalues, subleading_modulus_lanczos, DenseMatrix, LanczosConfig,
    UNIT_MODULUS_GAP,
};

/// Largest `N` for which states are iterated.
pub const DEFAULT_ITERATION_CEILING: usize = 8;
/// Largest `N` for which the attractor projection is built.
pub const DEFAULT_PROJECTION_CEILING: usize = 6;

/// Real symmetric density matrix on `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DensityMatrix {
    /// `|x⟩⟨x|`.
    pub fn basis_projector(n_qubits: usize, state: BasisState) -> Result<Self> {
        let dim = check_dim(n_qubits, DEFAULT_ITERATION_CEILING)?;
        if state.index() >= dim {
            return Err(Error::InvalidArgument(format!("state {} outside {n_qubits} qubits", state.index())));
        }
        let mut data = vec![0.0; dim * dim];
        data[state.index() * dim + state.index()] = 1.0;
        Ok(Self { n_qubits, dim, data })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = check_dim(n_qubits, DEFAULT_ITERATION_CEILING)?;
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0 / dim as f64;
        }
        Ok(Self { n_qubits, dim, data })
    }

    /// Validates symmetry (1e−12), unit trace (1e−12) and positivity (−1e−10).
    pub fn from_rows(n_qubits: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = check_dim(n_qubits, DEFAULT_ITERATION_CEILING)?;
        if rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
        }
        let m = DenseMatrix::from_rows(rows)?;
        let rho = Self { n_qubits, dim, data: m.as_slice().to_vec() };
        let (asym, row, col) = m.max_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric { row, col, deviation: asym });
        }
        if (rho.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {} is not 1", rho.trace())));
        }
        if rho.min_eigenvalue()? < -1e-10 {
            return Err(Error::InvalidArgument("density matrix is not positive semidefinite".into()));
        }
        Ok(rho)
    }

    /// Builds from a row-major vector without validation.
    pub fn from_vec_unchecked(n_qubits: usize, data: Vec<f64>) -> Self {
        let dim = 1 << n_qubits;
        assert_eq!(data.len(), dim * dim);
        Self { n_qubits, dim, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Row-major `vec(ρ)`.
    pub fn as_vec(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let m = DenseMatrix::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)));
        Ok(dense_symmetric_eigenvalues(&m)?[0])
    }
}

fn check_dim(n_qubits: usize, ceiling: usize) -> Result<usize> {
    if n_qubits == 0 {
        return Err(Error::InvalidSize("need at least one qubit".into()));
    }
    if n_qubits > ceiling {
        return Err(Error::CeilingExceeded { what: "density matrix", n: n_qubits, ceiling });
    }
    Ok(1 << n_qubits)
}

/// Basis-state permutation of every link with positive probability.
fn gate_permutations(g: &InteractionGraph) -> Vec<(Vec<usize>, f64)> {
    let dim = 1usize << g.n_qubits();
    g.links()
        .iter()
        .filter(|l| l.probability > 0.0)
        .map(|l| ((0..dim).map(|x| cnot_index(x, l.control, l.target)).collect(), l.probability))
        .collect()
}

/// `Φ(ρ) = Σ p_i U_i ρ U_i†`.
pub fn apply_channel(g: &InteractionGraph, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if g.n_qubits() != rho.n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << g.n_qubits(), got: rho.dim });
    }
    Ok(apply_with(&gate_permutations(g), rho))
}

fn apply_with(perms: &[(Vec<usize>, f64)], rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim;
    let mut out = vec![0.0; d * d];
    for (perm, p) in perms {
        for x in 0..d {
            let src = &rho.data[perm[x] * d..(perm[x] + 1) * d];
            let dst = &mut out[x * d..(x + 1) * d];
            for (y, o) in dst.iter_mut().enumerate() {
                *o += p * src[perm[y]];
            }
        }
    }
    DensityMatrix { n_qubits: rho.n_qubits, dim: d, data: out }
}

/// `√Tr (r1 − r2)²`.
pub fn hs_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim != r2.dim {
        return Err(Error::DimensionMismatch { expected: r1.dim, got: r2.dim });
    }
    // For symmetric matrices Tr(Δ²) is the squared Frobenius norm.
    Ok(r1.data.iter().zip(&r2.data).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

/// The channel as a matrix-free operator on `4^N`-dimensional vectors.
pub struct Superoperator {
    n_qubits: usize,
    dim: usize,
    perms: Vec<(Vec<usize>, f64)>,
}

impl Superoperator {
    pub fn new(g: &InteractionGraph) -> Self {
        Self { n_qubits: g.n_qubits(), dim: 1 << g.n_qubits(), perms: gate_permutations(g) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Dense `Σ p_i U_i ⊗ U_i`.
    pub fn to_dense(&self) -> DenseMatrix {
        let d = self.dim;
        let mut m = DenseMatrix::zeros(d * d);
        for (perm, p) in &self.perms {
            for x in 0..d {
                for y in 0..d {
                    m[(x * d + y, perm[x] * d + perm[y])] += p;
                }
            }
        }
        m
    }
}

impl LinearOperator for Superoperator {
    fn dim(&self) -> usize {
        self.dim * self.dim
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let d = self.dim;
        out.fill(0.0);
        for (perm, p) in &self.perms {
            for x in 0..d {
                let src = &v[perm[x] * d..(perm[x] + 1) * d];
                for (y, o) in out[x * d..(x + 1) * d].iter_mut().enumerate() {
                    *o += p * src[perm[y]];
                }
            }
        }
    }
}

/// Orthonormal basis of the unit-modulus eigenspaces of `Φ`.
///
/// `Φ` permutes operator-basis pairs `(x, y) ↦ (U x, U y)`, so it is block
/// diagonal over the connected components of that action. On each component it
/// is a symmetric irreducible stochastic matrix: eigenvalue 1 is simple with a
/// constant eigenvector, and −1 occurs exactly when the component is bipartite
/// (loops excluded), with the ±1 coloring as eigenvector. The basis holds one
/// normalized indicator per component plus one signed indicator per bipartite
/// component.
#[derive(Clone, Debug)]
pub struct AttractorProjection {
    n_qubits: usize,
    /// Component label per vectorized index.
    component: Vec<u32>,
    /// ±1 coloring per index (meaningful on bipartite components).
    color: Vec<i8>,
    sizes: Vec<usize>,
    bipartite: Vec<bool>,
}

pub fn attractor_projection(g: &InteractionGraph) -> Result<AttractorProjection> {
    attractor_projection_with(g, DEFAULT_PROJECTION_CEILING)
}

pub fn attractor_projection_with(g: &InteractionGraph, max_qubits: usize) -> Result<AttractorProjection> {
    if g.n_qubits() > max_qubits {
        return Err(Error::CeilingExceeded { what: "attractor projection", n: g.n_qubits(), ceiling: max_qubits });
    }
    let d = 1usize << g.n_qubits();
    let total = d * d;
    let perms = gate_permutations(g);
    let image = |k: usize, perm: &[usize]| perm[k / d] * d + perm[k % d];
    let mut component = vec![u32::MAX; total];
    let mut color = vec![0i8; total];
    let mut sizes = Vec::new();
    let mut bipartite = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..total {
        if component[start] != u32::MAX {
            continue;
        }
        let label = sizes.len() as u32;
        component[start] = label;
        color[start] = 1;
        queue.push_back(start);
        let (mut size, mut two_colorable) = (0usize, true);
        while let Some(k) = queue.pop_front() {
            size += 1;
            for (perm, _) in &perms {
                let j = image(k, perm);
                if component[j] == u32::MAX {
                    component[j] = label;
                    color[j] = -color[k];
                    queue.push_back(j);
                } else if color[j] == color[k] {
                    // Includes loops (j == k).
                    two_colorable = false;
                }
            }
        }
        sizes.push(size);
        bipartite.push(two_colorable);
    }
    Ok(AttractorProjection { n_qubits: g.n_qubits(), component, color, sizes, bipartite })
}

impl AttractorProjection {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Dimension of the attractor manifold.
    pub fn dimension(&self) -> usize {
        self.sizes.len() + self.bipartite.iter().filter(|&&b| b).count()
    }

    /// Dimension of the eigenvalue-1 eigenspace.
    pub fn fixed_dimension(&self) -> usize {
        self.sizes.len()
    }

    /// Dimension of the eigenvalue −1 eigenspace.
    pub fn oscillating_dimension(&self) -> usize {
        self.dimension() - self.fixed_dimension()
    }

    /// Explicit basis vectors with their eigenvalue.
    pub fn basis(&self) -> Vec<(f64, Vec<f64>)> {
        let mut out = Vec::with_capacity(self.dimension());
        for (c, &size) in self.sizes.iter().enumerate() {
            let scale = 1.0 / (size as f64).sqrt();
            let v = self.component.iter().map(|&l| if l as usize == c { scale } else { 0.0 }).collect();
            out.push((1.0, v));
            if self.bipartite[c] {
                let v = self
                    .component
                    .iter()
                    .zip(&self.color)
                    .map(|(&l, &s)| if l as usize == c { scale * s as f64 } else { 0.0 })
                    .collect();
                out.push((-1.0, v));
            }
        }
        out
    }

    pub fn basis_vectors(&self) -> Vec<Vec<f64>> {
        self.basis().into_iter().map(|(_, v)| v).collect()
    }

    /// `P v`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let c = self.sizes.len();
        let mut sum = vec![0.0; c];
        let mut signed = vec![0.0; c];
        for ((&l, &s), &x) in self.component.iter().zip(&self.color).zip(v) {
            sum[l as usize] += x;
            signed[l as usize] += s as f64 * x;
        }
        self.component
            .iter()
            .zip(&self.color)
            .map(|(&l, &s)| {
                let l = l as usize;
                let mut y = sum[l] / self.sizes[l] as f64;
                if self.bipartite[l] {
                    y += s as f64 * signed[l] / self.sizes[l] as f64;
                }
                y
            })
            .collect()
    }

    /// `d(ρ, Π) = ‖(I − P) vec ρ‖`.
    pub fn distance(&self, rho: &DensityMatrix) -> f64 {
        let v = rho.as_vec();
        let p = self.project(v);
        v.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }
}

/// Unit-modulus eigenvectors of the dense superoperator, straight from a full
/// eigendecomposition. Serves as an independent check of
/// [`attractor_projection`]; practical up to `N = 4`.
pub fn attractor_basis_dense(g: &InteractionGraph, max_qubits: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    if g.n_qubits() > max_qubits {
        return Err(Error::CeilingExceeded { what: "dense attractor basis", n: g.n_qubits(), ceiling: max_qubits });
    }
    let phi = Superoperator::new(g).to_dense();
    let eig = dense_symmetric_eigen_with(&phi, phi.n())?;
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, l)| (l.abs() - 1.0).abs() < UNIT_MODULUS_GAP)
        .map(|(k, &l)| (l, eig.vector(k).to_vec()))
        .collect())
}

/// Subleading modulus `β*` of the superoperator: Lanczos on the complement of
/// the attractor manifold.
pub fn superoperator_beta_star(g: &InteractionGraph, proj: &AttractorProjection, cfg: &LanczosConfig) -> Result<f64> {
    let phi = Superoperator::new(g);
    subleading_modulus_lanczos(&phi, &proj.basis_vectors(), cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub distance: f64,
    /// `β*ⁿ · d(ρ(0), Π)`.
    pub bound: f64,
    pub trace_error: f64,
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub label: String,
    pub beta_star: f64,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.distance).collect()
    }

    /// Largest `distance − bound` over all steps.
    pub fn worst_bound_excess(&self) -> f64 {
        self.points.iter().map(|p| p.distance - p.bound).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Convenience: builds the projection and `β*`, then iterates.
pub fn trajectory(g: &InteractionGraph, rho0: &DensityMatrix, steps: usize, label: &str) -> Result<Trajectory> {
    let proj = attractor_projection(g)?;
    let beta = superoperator_beta_star(g, &proj, &LanczosConfig::default())?;
    trajectory_with(g, &proj, beta, rho0, steps, label)
}

/// Iterates the channel `steps` times, recording the distance to the attractor
/// manifold and the state invariants after every step (step 0 included).
pub fn trajectory_with(
    g: &InteractionGraph,
    proj: &AttractorProjection,
    beta_star: f64,
    rho0: &DensityMatrix,
    steps: usize,
    label: &str,
) -> Result<Trajectory> {
    if steps < 1 {
        return Err(Error::InvalidArgument("trajectory needs at least one step".into()));
    }
    if proj.n_qubits != g.n_qubits() || rho0.n_qubits != g.n_qubits() {
        return Err(Error::DimensionMismatch { expected: g.n_qubits(), got: rho0.n_qubits });
    }
    let perms = gate_permutations(g);
    let d0 = proj.distance(rho0);
    let mut rho = rho0.clone();
    let mut points = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        if step > 0 {
            rho = apply_with(&perms, &rho);
        }
        points.push(TrajectoryPoint {
            step,
            distance: proj.distance(&rho),
            bound: beta_star.powi(step as i32) * d0,
            trace_error: (rho.trace() - 1.0).abs(),
            asymmetry: rho.max_asymmetry(),
            min_eigenvalue: rho.min_eigenvalue()?,
        });
    }
    Ok(Trajectory { label: label.to_string(), beta_star, points })
}

/// Norm helper exposed for tests comparing projector actions.
pub fn vector_norm(v: &[f64]) -> f64 {
    norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{make_complete, make_cycle, InteractionGraph, Link};
    use crate::spectral::subleading_modulus_of;
    use crate::spectral::superoperator_spectrum;

    fn dense_conjugation(g: &InteractionGraph, rho: &DensityMatrix) -> DensityMatrix {
        let d = rho.dim();
        let mut out = DenseMatrix::zeros(d);
        let r = DenseMatrix::from_fn(d, |i, j| rho.get(i, j));
        for l in g.links() {
            let u = DenseMatrix::from_fn(d, |i, j| if i == cnot_index(j, l.control, l.target) { 1.0 } else { 0.0 });
            let t = u.matmul(&r).matmul(&u.transpose());
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += l.probability * t[(i, j)];
                }
            }
        }
        DensityMatrix::from_vec_unchecked(rho.n_qubits(), out.as_slice().to_vec())
    }

    #[test]
    fn maximally_mixed_is_fixed() {
        let g = make_complete(3).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(hs_distance(&apply_channel(&g, &rho).unwrap(), &rho).unwrap() < 1e-15);
    }

    #[test]
    fn two_qubit_projector_by_hand() {
        let g = make_complete(2).unwrap();
        let s10 = BasisState::from_label("10").unwrap();
        let s11 = BasisState::from_label("11").unwrap();
        let out = apply_channel(&g, &DensityMatrix::basis_projector(2, s10).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && (i == s10.index() || i == s11.index()) { 0.5 } else { 0.0 };
                assert_eq!(out.get(i, j), want);
            }
        }
    }

    #[test]
    fn matches_dense_conjugation() {
        for g in [make_complete(3).unwrap(), make_cycle(4).unwrap(), make_complete(4).unwrap()] {
            let n = g.n_qubits();
            let d = 1 << n;
            // A valid mixed state: normalized Gram matrix of fixed vectors.
            let rows: Vec<Vec<f64>> = (0..d)
                .map(|i| (0..d).map(|j| ((i * 3 + j * 5) % 7) as f64 / 7.0 + if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let a = DenseMatrix::from_rows(&rows).unwrap();
            let gram = a.matmul(&a.transpose());
            let tr = gram.trace();
            let rho = DensityMatrix::from_vec_unchecked(n, gram.as_slice().iter().map(|x| x / tr).collect());
            let fast = apply_channel(&g, &rho).unwrap();
            let slow = dense_conjugation(&g, &rho);
            assert!(hs_distance(&fast, &slow).unwrap() < 1e-12);
            assert!((fast.trace() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hs_distance_examples() {
        let a = DensityMatrix::basis_projector(2, BasisState(0)).unwrap();
        let b = DensityMatrix::basis_projector(2, BasisState(3)).unwrap();
        assert_eq!(hs_distance(&a, &a).unwrap(), 0.0);
        assert!((hs_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let c = DensityMatrix::basis_projector(3, BasisState(0)).unwrap();
        assert!(hs_distance(&a, &c).is_err());
    }

    #[test]
    fn from_rows_validation() {
        assert!(DensityMatrix::from_rows(1, &[vec![0.5, 0.0], vec![0.0, 0.5]]).is_ok());
        assert!(DensityMatrix::from_rows(1, &[vec![0.5, 0.1], vec![0.0, 0.5]]).is_err());
        assert!(DensityMatrix::from_rows(1, &[vec![0.6, 0.0], vec![0.0, 0.5]]).is_err());
        assert!(DensityMatrix::from_rows(1, &[vec![1.5, 0.0], vec![0.0, -0.5]]).is_err());
    }

    #[test]
    fn two_qubit_attractor_dimensions() {
        let g = make_complete(2).unwrap();
        let proj = attractor_projection(&g).unwrap();
        let dense = attractor_basis_dense(&g, 4).unwrap();
        assert_eq!(proj.dimension(), dense.len());
        assert_eq!(proj.fixed_dimension(), dense.iter().filter(|(l, _)| *l > 0.0).count());
        assert!(proj.oscillating_dimension() > 0);
    }

    #[test]
    fn projection_matches_dense_eigenspaces() {
        for g in
            [make_complete(2).unwrap(), make_complete(3).unwrap(), make_cycle(3).unwrap(), make_complete(4).unwrap()]
        {
            let proj = attractor_projection(&g).unwrap();
            let dense = attractor_basis_dense(&g, 4).unwrap();
            assert_eq!(proj.dimension(), dense.len());
            let total = 1 << (2 * g.n_qubits());
            let v: Vec<f64> = (0..total).map(|k| ((k * 37 % 101) as f64).sin()).collect();
            let p1 = proj.project(&v);
            let mut p2 = vec![0.0; total];
            for (_, b) in &dense {
                let c: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (o, x) in p2.iter_mut().zip(b) {
                    *o += c * x;
                }
            }
            let diff: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| a - b).collect();
            assert!(vector_norm(&diff) < 1e-10, "N={}", g.n_qubits());
        }
    }

    #[test]
    fn projector_is_idempotent_and_basis_orthonormal() {
        let g = make_complete(3).unwrap();
        let proj = attractor_projection(&g).unwrap();
        let total = 64;
        let v: Vec<f64> = (0..total).map(|k| (k as f64 * 0.77).cos()).collect();
        let p = proj.project(&v);
        let pp = proj.project(&p);
        let diff: Vec<f64> = p.iter().zip(&pp).map(|(a, b)| a - b).collect();
        assert!(vector_norm(&diff) < 1e-12);
        let basis = proj.basis();
        let phi = Superoperator::new(&g);
        for (i, (lambda, a)) in basis.iter().enumerate() {
            for (j, (_, b)) in basis.iter().enumerate() {
                let ip: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
            let mut out = vec![0.0; total];
            phi.apply(a, &mut out);
            let r: Vec<f64> = out.iter().zip(a).map(|(x, y)| x - lambda * y).collect();
            assert!(vector_norm(&r) < 1e-9);
        }
    }

    #[test]
    fn beta_star_matches_dense_spectrum() {
        for g in [make_complete(2).unwrap(), make_complete(3).unwrap(), make_cycle(3).unwrap()] {
            let proj = attractor_projection(&g).unwrap();
            let lanczos = superoperator_beta_star(&g, &proj, &LanczosConfig::default()).unwrap();
            let dense = subleading_modulus_of(&superoperator_spectrum(&g).unwrap());
            assert!((lanczos - dense).abs() < 1e-9, "{lanczos} vs {dense}");
        }
    }

    #[test]
    fn trajectory_in_manifold_stays_flat() {
        let g = make_complete(3).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let t = trajectory(&g, &rho, 10, "mixed").unwrap();
        assert!(t.points.iter().all(|p| p.distance <= 1e-9));
        // |000> is fixed by every CNOT.
        let zero = DensityMatrix::basis_projector(3, BasisState(0)).unwrap();
        let t = trajectory(&g, &zero, 5, "000").unwrap();
        assert!(t.points.iter().all(|p| p.distance <= 1e-9));
    }

    #[test]
    fn trajectory_respects_bound_and_decreases() {
        let g = make_complete(4).unwrap();
        let rho = DensityMatrix::basis_projector(4, BasisState::from_label("1000").unwrap()).unwrap();
        let t = trajectory(&g, &rho, 40, "1000").unwrap();
        assert_eq!(t.points.len(), 41);
        assert!(t.worst_bound_excess() <= 1e-9);
        assert!(t.distances().windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(t.points.iter().all(|p| p.trace_error < 1e-12 && p.min_eigenvalue > -1e-10));
    }

    #[test]
    fn gate_with_zero_probability_is_ignored() {
        let g = InteractionGraph::new(2, vec![Link::new(0, 1, 1.0), Link::new(1, 0, 0.0)]).unwrap();
        assert_eq!(Superoperator::new(&g).perms.len(), 1);
    }
}
