//! Restarted symmetric Lanczos for one extreme eigenvalue, restricted to the
//! orthogonal complement of a set of known eigenvectors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{tridiagonal_ql, DenseMatrix};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::sparse::{axpy, dot, norm, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reorthogonalization {
    /// Gram–Schmidt (applied twice) against every stored Lanczos vector.
    Full,
    /// Only against Ritz vectors whose error bound has dropped below
    /// `sqrt(eps)·‖A‖` (Parlett–Scott), plus the two local vectors.
    Selective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosConfig {
    /// Cap on operator applications across all restarts.
    pub max_iterations: usize,
    /// Required `‖A v − λ v‖` for the returned pair.
    pub tolerance: f64,
    pub reorthogonalization: Reorthogonalization,
    pub seed: u64,
    /// Largest number of deflation vectors accepted.
    pub num_deflation_vectors: usize,
    /// Krylov basis length before an explicit restart.
    pub restart_dim: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            tolerance: 1e-10,
            reorthogonalization: Reorthogonalization::Full,
            seed: 0x5eed,
            num_deflation_vectors: 64,
            restart_dim: 160,
        }
    }
}

impl LanczosConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations < 1 || self.restart_dim < 2 {
            return Err(Error::InvalidArgument("max_iterations >= 1 and restart_dim >= 2 required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    /// Operator applications used.
    pub iterations: usize,
    pub restarts: usize,
}

const CHECK_EVERY: usize = 8;
const BREAKDOWN: f64 = 1e-13;

/// Extreme eigenpair of `op` on the complement of `deflate`.
///
/// `deflate` must be orthonormal. The result is deterministic for a given
/// `cfg.seed`. Non-convergence returns [`Error::NoConvergence`] carrying the
/// best estimate and its residual.
pub fn lanczos_extreme(
    op: &dyn LinearOperator,
    which: Which,
    deflate: &[Vec<f64>],
    cfg: &LanczosConfig,
) -> Result<LanczosResult> {
    cfg.validate()?;
    let n = op.dim();
    check_deflation(n, deflate, cfg.num_deflation_vectors)?;
    let mut rng = rng_from_seed(cfg.seed);
    probe_symmetry(op, &mut rng)?;
    if deflate.len() >= n {
        return Err(Error::InvalidArgument("deflation spans the whole space".into()));
    }
    let sign = match which {
        Which::Largest => 1.0,
        Which::Smallest => -1.0,
    };
    let apply = |x: &[f64], y: &mut [f64]| {
        op.apply(x, y);
        if sign < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        project_out(deflate, y);
    };

    let mut start = random_unit(n, &mut rng);
    project_out(deflate, &mut start);
    project_out(deflate, &mut start);
    normalize(&mut start);

    if cfg.reorthogonalization == Reorthogonalization::Full {
        let r = thick_restart(&apply, n, deflate, cfg, start, &mut rng)?;
        return Ok(LanczosResult { eigenvalue: sign * r.eigenvalue, ..r });
    }

    let m = cfg.restart_dim.min(n - deflate.len());
    let mut used = 0usize;
    let mut restarts = 0usize;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut w = vec![0.0; n];
    let anorm_guess = {
        apply(&start, &mut w);
        used += 1;
        norm(&w).max(1e-300)
    };

    loop {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut locked: Vec<Vec<f64>> = Vec::new();
        let mut finished_cycle = None;
        let mut broke_down = false;

        for j in 0..m {
            if used >= cfg.max_iterations {
                return Err(Error::NoConvergence { iterations: used, estimate: sign * best.0, residual: best.1 });
            }
            apply(&basis[j], &mut w);
            used += 1;
            let a = dot(&w, &basis[j]);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            alpha.push(a);
            match cfg.reorthogonalization {
                Reorthogonalization::Full => {
                    for _ in 0..2 {
                        project_out(deflate, &mut w);
                        for v in &basis {
                            let c = dot(&w, v);
                            axpy(-c, v, &mut w);
                        }
                    }
                }
                Reorthogonalization::Selective => {
                    project_out(deflate, &mut w);
                    for y in &locked {
                        let c = dot(&w, y);
                        axpy(-c, y, &mut w);
                    }
                    for v in basis.iter().rev().take(2) {
                        let c = dot(&w, v);
                        axpy(-c, v, &mut w);
                    }
                }
            }
            let b = norm(&w);
            let breakdown = b <= BREAKDOWN * anorm_guess.max(a.abs());
            let last = j + 1 == m;
            if breakdown || last || (j + 1) % CHECK_EVERY == 0 {
                let ritz = tridiagonal_ritz(&alpha, &beta)?;
                let (theta, s) = ritz.extreme();
                let bound = b * s[s.len() - 1].abs();
                if cfg.reorthogonalization == Reorthogonalization::Selective {
                    locked = ritz.converged_vectors(&basis, b, f64::EPSILON.sqrt() * anorm_guess);
                }
                if bound <= cfg.tolerance || breakdown || last {
                    let y = combine(&basis, s);
                    let res = residual(&apply, &y, theta, n);
                    used += 1;
                    if res < best.1 {
                        best = (theta, res);
                    }
                    if res <= cfg.tolerance {
                        return Ok(LanczosResult {
                            eigenvalue: sign * theta,
                            eigenvector: y,
                            residual: res,
                            iterations: used,
                            restarts,
                        });
                    }
                    if breakdown || last {
                        finished_cycle = Some(y);
                        broke_down = breakdown;
                        break;
                    }
                }
            }
            let mut next = w.clone();
            next.iter_mut().for_each(|v| *v /= b);
            beta.push(b);
            basis.push(next);
        }

        // Explicit restart from the current Ritz vector. After a breakdown the
        // Krylov space is invariant, so a random component is mixed in.
        let mut y = finished_cycle.unwrap_or_else(|| basis[0].clone());
        if broke_down {
            let mut r = random_unit(n, &mut rng);
            project_out(deflate, &mut r);
            axpy(1e-3, &r, &mut y);
        }
        project_out(deflate, &mut y);
        normalize(&mut y);
        start = y;
        restarts += 1;
        if used >= cfg.max_iterations {
            return Err(Error::NoConvergence { iterations: used, estimate: sign * best.0, residual: best.1 });
        }
    }
}

/// Thick-restart Lanczos with full (CGS2) reorthogonalization.
///
/// The basis `V` satisfies `A V = V H + b v e_last^T` with `H` the projected
/// matrix, which is tridiagonal apart from an arrowhead after each restart. On
/// restart the `restart_dim / 2` largest Ritz pairs are kept together with the
/// current residual direction.
fn thick_restart(
    apply: &impl Fn(&[f64], &mut [f64]),
    n: usize,
    deflate: &[Vec<f64>],
    cfg: &LanczosConfig,
    start: Vec<f64>,
    rng: &mut impl Rng,
) -> Result<LanczosResult> {
    let m = cfg.restart_dim.min(n - deflate.len());
    let keep = (m / 2).max(1);
    let mut h = vec![vec![0.0; m + 1]; m + 1];
    let mut basis = vec![start];
    let mut w = vec![0.0; n];
    let mut used = 0usize;
    let mut restarts = 0usize;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut anorm: f64 = 0.0;
    loop {
        if used >= cfg.max_iterations {
            return Err(Error::NoConvergence { iterations: used, estimate: best.0, residual: best.1 });
        }
        let j = basis.len() - 1;
        apply(&basis[j], &mut w);
        used += 1;
        let mut coeffs = vec![0.0; basis.len()];
        for _ in 0..2 {
            project_out(deflate, &mut w);
            for (c, v) in coeffs.iter_mut().zip(&basis) {
                let d = dot(&w, v);
                axpy(-d, v, &mut w);
                *c += d;
            }
        }
        for (i, &c) in coeffs.iter().enumerate() {
            h[i][j] = c;
            h[j][i] = c;
        }
        anorm = anorm.max(coeffs.iter().map(|c| c.abs()).sum::<f64>());
        let b = norm(&w);
        let size = j + 1;
        let breakdown = b <= BREAKDOWN * anorm.max(1e-300);
        let full = size == m;
        let mut next: Option<Vec<f64>> = None;
        if breakdown || full || size % CHECK_EVERY == 0 {
            let hm = DenseMatrix::from_fn(size, |a, c| 0.5 * (h[a][c] + h[c][a]));
            let eig = super::dense::dense_symmetric_eigen_with(&hm, size.max(1))?;
            let top = size - 1;
            let s = eig.vector(top);
            let theta = eig.values[top];
            if b * s[size - 1].abs() <= cfg.tolerance || breakdown || full {
                let y = combine(&basis, s);
                let res = residual(apply, &y, theta, n);
                used += 1;
                if res < best.1 {
                    best = (theta, res);
                }
                if res <= cfg.tolerance {
                    return Ok(LanczosResult {
                        eigenvalue: theta,
                        eigenvector: y,
                        residual: res,
                        iterations: used,
                        restarts,
                    });
                }
            }
            if breakdown {
                // Invariant subspace: continue from a fresh orthogonal direction.
                match fresh_direction(n, deflate, &basis, rng) {
                    Some(r) => next = Some(r),
                    None => {
                        return Err(Error::NoConvergence { iterations: used, estimate: best.0, residual: best.1 });
                    }
                }
            }
            if full {
                let coupling = if breakdown { 0.0 } else { b };
                let residual_dir = match next.take() {
                    Some(r) => r,
                    None => w.iter().map(|x| x / b).collect(),
                };
                let kept: Vec<usize> = (size - keep..size).collect();
                let mut new_basis: Vec<Vec<f64>> = kept.iter().map(|&k| combine(&basis, eig.vector(k))).collect();
                for row in h.iter_mut() {
                    row.fill(0.0);
                }
                for (i, &k) in kept.iter().enumerate() {
                    h[i][i] = eig.values[k];
                    let c = coupling * eig.vector(k)[size - 1];
                    h[i][keep] = c;
                    h[keep][i] = c;
                }
                new_basis.push(residual_dir);
                basis = new_basis;
                restarts += 1;
                continue;
            }
        }
        let v = match next {
            Some(r) => r,
            None => {
                h[j + 1][j] = b;
                h[j][j + 1] = b;
                w.iter().map(|x| x / b).collect()
            }
        };
        basis.push(v);
    }
}

/// Random unit vector orthogonal to `deflate` and `basis`, if one exists.
fn fresh_direction(n: usize, deflate: &[Vec<f64>], basis: &[Vec<f64>], rng: &mut impl Rng) -> Option<Vec<f64>> {
    let mut r = random_unit(n, rng);
    for _ in 0..2 {
        project_out(deflate, &mut r);
        project_out(basis, &mut r);
    }
    if norm(&r) < 1e-8 {
        return None;
    }
    normalize(&mut r);
    Some(r)
}

struct Ritz {
    values: Vec<f64>,
    vectors: DenseMatrix,
}

impl Ritz {
    fn extreme(&self) -> (f64, &[f64]) {
        let k = (0..self.values.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b])).unwrap();
        (self.values[k], self.vectors.row(k))
    }

    fn converged_vectors(&self, basis: &[Vec<f64>], b: f64, threshold: f64) -> Vec<Vec<f64>> {
        (0..self.values.len())
            .filter(|&k| {
                let s = self.vectors.row(k);
                b * s[s.len() - 1].abs() <= threshold
            })
            .map(|k| {
                let mut y = combine(basis, self.vectors.row(k));
                normalize(&mut y);
                y
            })
            .collect()
    }
}

fn tridiagonal_ritz(alpha: &[f64], beta: &[f64]) -> Result<Ritz> {
    let k = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; k];
    e[1..k].copy_from_slice(&beta[..k - 1]);
    let mut z = DenseMatrix::identity(k);
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;
    Ok(Ritz { values: d, vectors: z })
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; basis[0].len()];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut y);
    }
    y
}

fn residual(apply: &impl Fn(&[f64], &mut [f64]), y: &[f64], theta: f64, n: usize) -> f64 {
    let mut ay = vec![0.0; n];
    apply(y, &mut ay);
    axpy(-theta, y, &mut ay);
    norm(&ay) / norm(y)
}

fn project_out(deflate: &[Vec<f64>], w: &mut [f64]) {
    for u in deflate {
        let c = dot(w, u);
        axpy(-c, u, w);
    }
}

fn normalize(v: &mut [f64]) {
    let nv = norm(v);
    v.iter_mut().for_each(|x| *x /= nv);
}

fn random_unit(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);
    v
}

fn check_deflation(n: usize, deflate: &[Vec<f64>], max: usize) -> Result<()> {
    if deflate.len() > max {
        return Err(Error::InvalidArgument(format!("{} deflation vectors exceed the configured {max}", deflate.len())));
    }
    let mut worst: f64 = 0.0;
    for (i, u) in deflate.iter().enumerate() {
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        for (j, v) in deflate.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(u, v) - target).abs());
        }
    }
    if worst > 1e-10 {
        return Err(Error::DeflationNotOrthonormal(worst));
    }
    Ok(())
}

fn probe_symmetry(op: &dyn LinearOperator, rng: &mut impl Rng) -> Result<()> {
    let n = op.dim();
    let x = random_unit(n, rng);
    let y = random_unit(n, rng);
    let mut ax = vec![0.0; n];
    let mut ay = vec![0.0; n];
    op.apply(&x, &mut ax);
    op.apply(&y, &mut ay);
    let dev = (dot(&x, &ay) - dot(&ax, &y)).abs();
    if dev > 1e-10 {
        return Err(Error::OperatorNotSymmetric(dev));
    }
    Ok(())
}
