//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit-shift QL iteration.
//!
//! This is the reference against which every sparse result is checked, so it
//! shares no code with the Lanczos path beyond the tridiagonal QL step.

use crate::error::{Error, Result};
use crate::sparse::LinearOperator;

/// Default dimension ceiling for dense eigenproblems.
pub const DEFAULT_DENSE_CEILING: usize = 4096;

/// Symmetry tolerance checked on input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const MAX_QL_SWEEPS: usize = 64;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|a_ij − a_ji|` with its location.
    pub fn max_asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = (self[(i, j)] - self[(j, i)]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Eigenvalues in ascending order; `vectors` row `k` is the unit eigenvector
/// for `values[k]`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        self.vectors.row(k)
    }
}

fn check_input(m: &DenseMatrix, ceiling: usize) -> Result<()> {
    if m.n > ceiling {
        return Err(Error::CeilingExceeded { what: "dense eigenproblem dimension", n: m.n, ceiling });
    }
    let (dev, row, col) = m.max_asymmetry();
    if dev > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { row, col, deviation: dev });
    }
    Ok(())
}

/// All eigenvalues, ascending, with the default dimension ceiling.
pub fn dense_symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    dense_symmetric_eigenvalues_with(m, DEFAULT_DENSE_CEILING)
}

pub fn dense_symmetric_eigenvalues_with(m: &DenseMatrix, ceiling: usize) -> Result<Vec<f64>> {
    check_input(m, ceiling)?;
    let (mut d, mut e) = householder_tridiagonal(m, None);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues and orthonormal eigenvectors.
pub fn dense_symmetric_eigen(m: &DenseMatrix) -> Result<SymmetricEigen> {
    dense_symmetric_eigen_with(m, DEFAULT_DENSE_CEILING)
}

pub fn dense_symmetric_eigen_with(m: &DenseMatrix, ceiling: usize) -> Result<SymmetricEigen> {
    check_input(m, ceiling)?;
    let n = m.n;
    let mut q = DenseMatrix::zeros(n);
    let (mut d, mut e) = householder_tridiagonal(m, Some(&mut q));
    // Rows of `z` are the columns of the accumulated transform.
    let mut z = q.transpose();
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.data[dst * n..(dst + 1) * n].copy_from_slice(z.row(src));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Householder tridiagonalization of the lower triangle of `m`.
///
/// Returns `(diagonal, subdiagonal)` with `subdiagonal[i]` coupling rows `i−1`
/// and `i` (`subdiagonal[0] = 0`). When `transform` is given it receives the
/// orthogonal `Q` with `m = Q T Qᵀ`.
fn householder_tridiagonal(m: &DenseMatrix, transform: Option<&mut DenseMatrix>) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return (d, e);
    }
    let want = transform.is_some();
    // Working copy; `v[(i, j)]` for j <= i holds the lower triangle.
    let mut v = m.clone();
    d.copy_from_slice(v.row(n - 1));

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    let vkj = v[(k, j)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if want {
        for i in 0..n - 1 {
            v[(n - 1, i)] = v[(i, i)];
            v[(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[(k, i + 1)] * v[(k, j)];
                    }
                    for k in 0..=i {
                        v[(k, j)] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
            v[(n - 1, j)] = 0.0;
        }
        v[(n - 1, n - 1)] = 1.0;
    } else {
        // Without accumulation the diagonal still sits on v's diagonal.
        for j in 0..n {
            d[j] = v[(j, j)];
        }
    }
    e[0] = 0.0;
    if let Some(q) = transform {
        *q = v;
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `d` is the diagonal, `e[i]` (for `i ≥ 1`) the element coupling `i−1` and
/// `i`; on return `d` holds the (unsorted) eigenvalues. If `z` is given, its
/// rows are rotated along, so starting from the identity they end up as the
/// eigenvectors (row `k` ↔ `d[k]`).
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DenseMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence { iterations: sweeps, estimate: d[l], residual: e[l].abs() });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[(l + 2)..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let nn = z.n;
                        let (lo, hi) = z.data.split_at_mut((i + 1) * nn);
                        let zi = &mut lo[i * nn..];
                        let zi1 = &mut hi[..nn];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
