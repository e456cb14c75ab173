//! Relaxation to equilibrium of random CNOT qubit networks.
//!
//! A network of `N` qubits evolves under the random unitary channel
//! `ρ ↦ Σ p_i U_i ρ U_i†`, where every `U_i` is a CNOT acting on one ordered
//! pair of qubits. The rate at which iterated states approach the attractor
//! manifold is governed by the subleading eigenvalue of the channel, which for
//! CNOT networks equals `1 − γ`, where `γ` is the algebraic connectivity of a
//! weighted graph on the nonzero computational basis states.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`network`] | interaction graphs (complete, cycle, star, unbalanced, noisy) |
//! | [`induced`] | the induced basis-state graph, its Laplacian and diameter |
//! | [`spectral`] | dense oracle, Lanczos, algebraic connectivity, superoperator spectrum |
//! | [`channel`] | density-matrix iteration, attractor projection, trajectories |
//! | [`groupwalk`] | GF(2) matrix groups, the group random walk and trace expansion |
//! | [`analysis`] | analytic bounds, connectivity scans and power-law fits |
//! | [`cli`] | configuration and output plumbing behind the `cnotnet` binary |
//!
//! Basis-state convention: qubit `j` is bit `j` of the state index, and a
//! label such as `"100"` lists qubit 0 first (so `"100"` is index 1).

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod error;
pub mod groupwalk;
pub mod induced;
pub mod network;
pub mod rng;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
