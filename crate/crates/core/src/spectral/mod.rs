//! Algebraic connectivity of the induced graph and the subleading eigenvalue
//! of the channel.
//!
//! The induced adjacency `A` is symmetric and doubly stochastic, so the
//! uniform vector spans its eigenvalue 1 on a connected graph. Deflating it
//! turns the second-largest eigenvalue into an extreme one, which Lanczos finds
//! directly; `γ = 1 − λ₂`.

pub mod dense;
pub mod lanczos;

use serde::{Deserialize, Serialize};

pub use dense::{
    dense_symmetric_eigen, dense_symmetric_eigen_with, dense_symmetric_eigenvalues, dense_symmetric_eigenvalues_with,
    DenseMatrix, SymmetricEigen, DEFAULT_DENSE_CEILING,
};
pub use lanczos::{lanczos_extreme, LanczosConfig, LanczosResult, Reorthogonalization, Which};

use crate::channel::Superoperator;
use crate::error::{Error, Result};
use crate::induced::{connectivity_check, InducedGraph};
use crate::network::InteractionGraph;
use crate::sparse::{axpy, dot, norm, LinearOperator};

/// Eigenvalues within this distance of modulus one count as unit-modulus.
pub const UNIT_MODULUS_GAP: f64 = 1e-9;

/// Default qubit ceiling for the dense `4^N` superoperator.
pub const DEFAULT_SUPEROPERATOR_CEILING: usize = 6;

/// Spectral data of an induced adjacency matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda_max: f64,
    pub lambda_2: f64,
    pub lambda_min: f64,
    /// `1 − lambda_2`.
    pub gamma: f64,
    /// Largest modulus strictly inside the unit disk among `lambda_2`, `lambda_min`.
    pub beta_star: f64,
    /// `‖A v − λ v‖` for `lambda_max`, `lambda_2`, `lambda_min`.
    pub residual_norms: [f64; 3],
    pub iterations: usize,
    /// `|lambda_min| > lambda_2`: the subleading eigenvalue is negative.
    pub positivity_violation: bool,
    /// `lambda_min` sits at −1 (bipartite component) and was excluded from `beta_star`.
    pub negative_unit_eigenvalue: bool,
}

impl SpectralSummary {
    fn from_parts(
        lambda_max: f64,
        lambda_2: f64,
        lambda_min: f64,
        residual_norms: [f64; 3],
        iterations: usize,
    ) -> Self {
        let negative_unit_eigenvalue = lambda_min <= -1.0 + UNIT_MODULUS_GAP;
        let positivity_violation = !negative_unit_eigenvalue && lambda_min.abs() > lambda_2 + 1e-12;
        let beta_star = if negative_unit_eigenvalue { lambda_2.abs() } else { lambda_2.abs().max(lambda_min.abs()) };
        Self {
            lambda_max,
            lambda_2,
            lambda_min,
            gamma: 1.0 - lambda_2,
            beta_star,
            residual_norms,
            iterations,
            positivity_violation,
            negative_unit_eigenvalue,
        }
    }
}

fn require_connected(ig: &InducedGraph) -> Result<()> {
    let c = connectivity_check(ig);
    if !c.connected {
        let to = c.labels.iter().position(|&l| l != c.labels[0]).unwrap_or(0);
        return Err(Error::Disconnected { from: ig.state_of(0).index(), to: ig.state_of(to).index() });
    }
    Ok(())
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

/// `γ` and companions via Lanczos with the uniform vector deflated.
pub fn algebraic_connectivity(ig: &InducedGraph, cfg: &LanczosConfig) -> Result<SpectralSummary> {
    require_connected(ig)?;
    let n = ig.n_vertices();
    if n < 2 {
        return Err(Error::InvalidArgument("algebraic connectivity needs at least two vertices".into()));
    }
    let u = uniform(n);
    let mut au = vec![0.0; n];
    ig.apply(&u, &mut au);
    let lambda_max = dot(&u, &au);
    axpy(-lambda_max, &u, &mut au);
    let res_max = norm(&au);

    let deflate = [u];
    let top = lanczos_extreme(ig, Which::Largest, &deflate, cfg)?;
    let bottom = lanczos_extreme(ig, Which::Smallest, &deflate, cfg)?;
    Ok(SpectralSummary::from_parts(
        lambda_max,
        top.eigenvalue,
        bottom.eigenvalue,
        [res_max, top.residual, bottom.residual],
        1 + top.iterations + bottom.iterations,
    ))
}

/// Same quantities from the dense oracle (dimension ≤ [`DEFAULT_DENSE_CEILING`]).
pub fn algebraic_connectivity_dense(ig: &InducedGraph) -> Result<SpectralSummary> {
    require_connected(ig)?;
    let m = DenseMatrix::from_rows(&ig.adjacency().to_dense())?;
    let eig = dense_symmetric_eigenvalues(&m)?;
    let n = eig.len();
    if n < 2 {
        return Err(Error::InvalidArgument("algebraic connectivity needs at least two vertices".into()));
    }
    Ok(SpectralSummary::from_parts(eig[n - 1], eig[n - 2], eig[0], [0.0; 3], 0))
}

/// Full spectrum of the `4^N × 4^N` superoperator, ascending.
pub fn superoperator_spectrum(g: &InteractionGraph) -> Result<Vec<f64>> {
    superoperator_spectrum_with(g, DEFAULT_SUPEROPERATOR_CEILING)
}

pub fn superoperator_spectrum_with(g: &InteractionGraph, max_qubits: usize) -> Result<Vec<f64>> {
    if g.n_qubits() > max_qubits {
        return Err(Error::CeilingExceeded { what: "dense superoperator", n: g.n_qubits(), ceiling: max_qubits });
    }
    let phi = Superoperator::new(g).to_dense();
    dense_symmetric_eigenvalues_with(&phi, phi.n())
}

/// Largest eigenvalue of the channel superoperator with modulus below
/// `1 − 1e−9`, from the dense spectrum.
pub fn subleading_superoperator(g: &InteractionGraph) -> Result<f64> {
    subleading_superoperator_with(g, DEFAULT_SUPEROPERATOR_CEILING)
}

pub fn subleading_superoperator_with(g: &InteractionGraph, max_qubits: usize) -> Result<f64> {
    let spectrum = superoperator_spectrum_with(g, max_qubits)?;
    Ok(subleading_of(&spectrum))
}

/// Largest value with `|λ| < 1 − UNIT_MODULUS_GAP`.
pub fn subleading_of(spectrum: &[f64]) -> f64 {
    spectrum.iter().copied().filter(|l| l.abs() < 1.0 - UNIT_MODULUS_GAP).fold(f64::NEG_INFINITY, f64::max)
}

/// Largest modulus below `1 − UNIT_MODULUS_GAP`.
pub fn subleading_modulus_of(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|l| l.abs()).filter(|&l| l < 1.0 - UNIT_MODULUS_GAP).fold(0.0, f64::max)
}

/// Largest `|λ|` of `op` on the complement of an orthonormal set spanning
/// all of its unit-modulus eigenvectors.
pub fn subleading_modulus_lanczos(
    op: &dyn LinearOperator,
    attractors: &[Vec<f64>],
    cfg: &LanczosConfig,
) -> Result<f64> {
    let cfg = LanczosConfig { num_deflation_vectors: cfg.num_deflation_vectors.max(attractors.len()), ..cfg.clone() };
    let hi = lanczos_extreme(op, Which::Largest, attractors, &cfg)?;
    let lo = lanczos_extreme(op, Which::Smallest, attractors, &cfg)?;
    Ok(hi.eigenvalue.abs().max(lo.eigenvalue.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induced::build_induced_graph;
    use crate::network::{make_complete, make_cycle, make_star, make_unbalanced, InteractionGraph, Link};

    #[test]
    fn two_qubit_complete_gamma_is_half() {
        // Hand oracle: loops 1/2 at |01>,|10>, edges to |11> of 1/2 -> {1, 1/2, -1/2}.
        let ig = build_induced_graph(&make_complete(2).unwrap()).unwrap();
        let dense = algebraic_connectivity_dense(&ig).unwrap();
        assert!((dense.gamma - 0.5).abs() < 1e-14);
        assert!((dense.lambda_min + 0.5).abs() < 1e-14);
        let s = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap();
        assert!((s.gamma - 0.5).abs() < 1e-10);
        assert!((s.lambda_max - 1.0).abs() < 1e-12);
        assert!(!s.positivity_violation);
    }

    #[test]
    fn two_qubit_general_weights() {
        for k in 1..10 {
            let p = k as f64 / 10.0;
            let g = InteractionGraph::new(2, vec![Link::new(0, 1, p), Link::new(1, 0, 1.0 - p)]).unwrap();
            let ig = build_induced_graph(&g).unwrap();
            let s = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap();
            let want = (1.0 - 3.0 * p + 3.0 * p * p).sqrt();
            assert!((s.beta_star - want).abs() < 1e-10, "p={p}: {} vs {want}", s.beta_star);
        }
    }

    #[test]
    fn lanczos_matches_dense_small_graphs() {
        for n in 2..=8 {
            let mut graphs = vec![make_complete(n).unwrap(), make_star(n).unwrap()];
            if n >= 3 {
                graphs.push(make_cycle(n).unwrap());
                graphs.push(make_unbalanced(n).unwrap());
            }
            for g in graphs {
                let ig = build_induced_graph(&g).unwrap();
                if !connectivity_check(&ig).connected {
                    continue;
                }
                let a = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap();
                let b = algebraic_connectivity_dense(&ig).unwrap();
                assert!((a.lambda_2 - b.lambda_2).abs() < 1e-8, "N={n}");
                assert!((a.lambda_min - b.lambda_min).abs() < 1e-8, "N={n}");
                assert!((b.lambda_max - 1.0).abs() < 1e-10);
                assert!(b.lambda_min >= -1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn complete_three_matches_dense_and_superoperator() {
        let g = make_complete(3).unwrap();
        let ig = build_induced_graph(&g).unwrap();
        let s = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap();
        let d = algebraic_connectivity_dense(&ig).unwrap();
        assert!((s.gamma - d.gamma).abs() < 1e-10);
        let beta = subleading_superoperator(&g).unwrap();
        assert!((beta - (1.0 - s.gamma)).abs() < 1e-9);
    }

    #[test]
    fn two_qubit_superoperator() {
        let g = make_complete(2).unwrap();
        let spec = superoperator_spectrum(&g).unwrap();
        assert!((subleading_of(&spec) - 0.5).abs() < 1e-12);
        let ones = spec.iter().filter(|l| (*l - 1.0).abs() < 1e-9).count();
        assert!(ones >= 2);
    }

    #[test]
    fn star_is_disconnected() {
        // Star: the hub is never a target, so states with the hub unexcited are isolated.
        let ig = build_induced_graph(&make_star(3).unwrap()).unwrap();
        assert!(matches!(algebraic_connectivity(&ig, &LanczosConfig::default()), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn gamma_decreases_with_size() {
        let cfg = LanczosConfig::default();
        let gammas: Vec<f64> = (3..=10)
            .map(|n| {
                algebraic_connectivity(&build_induced_graph(&make_complete(n).unwrap()).unwrap(), &cfg).unwrap().gamma
            })
            .collect();
        assert!(gammas.windows(2).all(|w| w[1] < w[0]), "{gammas:?}");
    }

    #[test]
    fn superoperator_ceiling() {
        let g = make_complete(3).unwrap();
        assert!(matches!(subleading_superoperator_with(&g, 2), Err(Error::CeilingExceeded { .. })));
    }
}
