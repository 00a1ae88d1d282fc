//! Dense symmetric-matrix primitives: inner products, norms, eigendecomposition
//! and PSD flooring.
//!
//! All values are immutable after construction and safe to share between
//! threads. Construction symmetrizes via `(A + Aᵀ)/2` instead of rejecting
//! asymmetric input, since gradients produced by numerical solvers can drift
//! asymmetric by rounding.

use crate::error::{Error, Result};

/// Maximum number of Jacobi sweeps before reporting non-convergence.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Off-diagonal convergence threshold, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;

/// A dense symmetric real matrix stored row-major.
///
/// Entries are exactly symmetric (`a[i][j] == a[j][i]`) and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from row-major entries, symmetrizing
    /// `(A + Aᵀ)/2`. Fails if any resulting entry is non-finite.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(data.len(), n * n));
        }
        let mut m = Self { n, data };
        m.symmetrize();
        m.check_finite()?;
        Ok(m)
    }

    /// Builds from an entry function; the result is symmetrized.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        Self::new(n, data)
    }

    pub fn zero(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = diag[i];
        }
        m
    }

    /// Rank-one matrix `c · v vᵀ`.
    pub fn outer(v: &[f64], c: f64) -> Self {
        let n = v.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = c * v[i] * v[j];
            }
        }
        Self { n, data }
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.data[i * self.n + j].is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.n + i]).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self { n: self.n, data })
    }

    /// Frobenius norm computed directly from the entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `‖vec(A)‖₁`, the entrywise absolute sum.
    pub fn vec_l1_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).fold(f64::NEG_INFINITY, |m, i| m.max(self.data[i * self.n + i]))
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_abs_offdiag(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.data[i * self.n + j].abs());
                }
            }
        }
        m
    }

    /// Dense product `self * other`, row-major. The result is generally not
    /// symmetric.
    pub fn matmul(&self, other: &Self) -> Result<Vec<f64>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0_f64, |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// Frobenius inner product `Σᵢⱼ aᵢⱼ·bᵢⱼ`.
pub fn frobenius_inner(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    Ok(a.data.iter().zip(b.data.iter()).map(|(&x, &y)| x * y).sum())
}

/// Eigendecomposition of a symmetric matrix: descending eigenvalues and an
/// orthogonal matrix whose columns are the corresponding eigenvectors.
#[derive(Debug, Clone)]
pub struct EigPair {
    n: usize,
    values: Vec<f64>,
    /// Row-major `V`; `vectors[i*n + k]` is component `i` of eigenvector `k`.
    vectors: Vec<f64>,
}

impl EigPair {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Eigenvalues in descending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn max_value(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }

    /// Copy of eigenvector `k` (column `k` of `V`).
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    /// `V · diag(f(λ)) · Vᵀ`, the spectral map. This is the workhorse behind
    /// flooring, inverses and matrix exponentials; it preserves symmetry
    /// exactly.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.apply_values(&mapped)
    }

    /// `V · diag(w) · Vᵀ` for explicit replacement eigenvalues `w`.
    pub fn apply_values(&self, mapped: &[f64]) -> SymMatrix {
        let n = self.n;
        assert_eq!(mapped.len(), n);
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            let w = mapped[k];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[i * n + k] * w;
                if vik == 0.0 {
                    continue;
                }
                for j in i..n {
                    data[i * n + j] += vik * self.vectors[j * n + k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                data[j * n + i] = data[i * n + j];
            }
        }
        SymMatrix { n, data }
    }

    /// `V · diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.apply(|l| l)
    }

    /// Largest absolute entry of `VᵀV − E`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += self.vectors[i * n + a] * self.vectors[i * n + b];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `w` in the eigenbasis: `Vᵀ · w · V`, row-major.
    pub fn conjugate(&self, w: &SymMatrix) -> Result<Vec<f64>> {
        if w.n != self.n {
            return Err(Error::DimensionMismatch(w.n, self.n));
        }
        let n = self.n;
        // tmp = w * V
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = w.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    tmp[i * n + j] += a * self.vectors[k * n + j];
                }
            }
        }
        // out = Vᵀ * tmp
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.vectors[k * n + i];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * tmp[k * n + j];
                }
            }
        }
        Ok(out)
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Simple and accurate for the orders in scope (N ≤ a few hundred). Stops when
/// the sum of absolute off-diagonal entries drops below
/// `1e-12 · ‖A‖_Fr`; errors out after 100 sweeps.
pub fn sym_eig(a: &SymMatrix) -> Result<EigPair> {
    let n = a.n;
    if n == 0 {
        return Ok(EigPair { n, values: vec![], vectors: vec![] });
    }
    let mut m = a.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let mut d = a.diag();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    let tol = JACOBI_TOL * a.frobenius_norm();

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut sm = 0.0;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                sm += m[p * n + q].abs();
            }
        }
        if sm <= tol {
            return Ok(sorted_eig(n, d, v));
        }
        let tresh = if sweep < 3 { 0.2 * sm / (n * n) as f64 } else { 0.0 };
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = 100.0 * m[p * n + q].abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    m[p * n + q] = 0.0;
                } else if m[p * n + q].abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        m[p * n + q] / h
                    } else {
                        let theta = 0.5 * h / m[p * n + q];
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * m[p * n + q];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    m[p * n + q] = 0.0;
                    let rot = |m: &mut [f64], i1: usize, j1: usize, i2: usize, j2: usize| {
                        let g = m[i1 * n + j1];
                        let h = m[i2 * n + j2];
                        m[i1 * n + j1] = g - s * (h + g * tau);
                        m[i2 * n + j2] = h + s * (g - h * tau);
                    };
                    for j in 0..p {
                        rot(&mut m, j, p, j, q);
                    }
                    for j in (p + 1)..q {
                        rot(&mut m, p, j, j, q);
                    }
                    for j in (q + 1)..n {
                        rot(&mut m, p, j, q, j);
                    }
                    for j in 0..n {
                        rot(&mut v, j, p, j, q);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    Err(Error::EigNoConvergence(JACOBI_MAX_SWEEPS))
}

fn sorted_eig(n: usize, d: Vec<f64>, v: Vec<f64>) -> EigPair {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite eigenvalues"));
    let values: Vec<f64> = idx.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in idx.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + col] = v[i * n + k];
        }
    }
    EigPair { n, values, vectors }
}

/// Trace, spectral and Frobenius norms, computed from the singular values of
/// the symmetric matrix (the absolute eigenvalues).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub trace: f64,
    pub spectral: f64,
    pub frobenius: f64,
}

pub fn norms(a: &SymMatrix) -> Result<Norms> {
    let eig = sym_eig(a)?;
    let mut trace = 0.0;
    let mut spectral = 0.0_f64;
    let mut sumsq = 0.0;
    for &l in eig.values() {
        trace += l.abs();
        spectral = spectral.max(l.abs());
        sumsq += l * l;
    }
    Ok(Norms { trace, spectral, frobenius: sumsq.sqrt() })
}

/// Frobenius-nearest matrix whose eigenvalues are at least `floor`: the
/// eigenvalues are clamped from below, the eigenvectors are kept.
pub fn psd_floor(a: &SymMatrix, floor: f64) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    Ok(eig.apply(|l| l.max(floor)))
}

/// A dense rectangular matrix, used as the target of matrix-prediction
/// problems.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(data.len(), rows * cols));
        }
        for (k, x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite(k / cols, k % cols));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn scale_in_place(&mut self, c: f64) {
        for x in &mut self.data {
            *x *= c;
        }
    }
}
