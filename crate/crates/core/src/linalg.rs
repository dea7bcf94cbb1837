//! Dense complex linear algebra.
//!
//! Everything downstream (states, Kraus operators, Choi matrices) is carried
//! by [`ComplexMatrix`]. The eigensolver is a cyclic Jacobi scheme for
//! Hermitian matrices and the Schmidt decomposition uses a one-sided Jacobi
//! SVD; both are accurate to a few ulps at the sizes used here (up to about
//! 64x64).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Shorthand constructor for a complex number.
#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ZERO: C64 = c64(0.0, 0.0);
const ONE: C64 = c64(1.0, 0.0);

/// Admission tolerance for Hermitian input, measured as the largest entry of `m - m†`.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Tolerance on the norm of a state vector handed to [`schmidt_decompose`].
pub const UNIT_VECTOR_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Which factor of a bipartite system to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidDimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Convenience for literal real matrices. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| c64(rows[i].as_ref()[j], 0.0))
    }

    /// Convenience for literal complex matrices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j])
    }

    pub fn column(entries: Vec<C64>) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// `|v⟩⟨w|` for column vectors given as slices.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// `|i⟩⟨j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = ONE;
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        multiply(self, other)
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        tensor_product(self, other)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude of `self - self†`; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Frobenius norm of `self† self - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = &self.adjoint() * self;
        frobenius_distance(&gram, &Self::identity(self.cols)).unwrap_or(f64::INFINITY)
    }

    /// Copies out the `(bi, bj)` block of a matrix partitioned into
    /// `block_rows x block_cols` tiles.
    pub fn block(&self, bi: usize, bj: usize, block_rows: usize, block_cols: usize) -> Self {
        Self::from_fn(block_rows, block_cols, |r, c| {
            self[(bi * block_rows + r, bj * block_cols + c)]
        })
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(bi * block.rows + r, bj * block.cols + c)] = block[(r, c)];
            }
        }
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator impls panic on shape mismatch, like ndarray; use the `try_*`
// methods or the free functions when shapes come from untrusted input.

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        multiply(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

pub fn multiply(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "multiply",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == ZERO {
                continue;
            }
            let b_row = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols, a.rows, |i, j| a[(j, i)].conj())
}

/// Kronecker product; block `(i, j)` of the result is `a[i, j] * b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Traces out one factor of a `(dim_a * dim_b)`-square bipartite matrix.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if m.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            op: "partial_trace",
            left: m.shape(),
            right: (d, d),
        });
    }
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(dim_b, dim_b, |k, l| {
            (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum()
        }),
    };
    Ok(out)
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b, "frobenius_distance")?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Eigenvalues (descending) and unit eigenvectors (as columns) of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.col(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            weights
                .iter()
                .enumerate()
                .map(|(k, &w)| v[(i, k)] * v[(j, k)].conj() * w)
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reassemble_with(|l| l)
    }
}

/// The 2x2 unitary `g` (acting on columns `p`, `q`) that diagonalises the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` via `g† · block · g`.
///
/// The phase of `apq` is first rotated away so the block is real symmetric,
/// then a classical Jacobi rotation (smaller-angle root) is applied.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [[C64; 2]; 2] {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph = phase.conj();
    [[c64(c, 0.0), c64(s, 0.0)], [ph * (-s), ph * c]]
}

/// `m ← m · g` restricted to columns `p`, `q`.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[C64; 2]; 2]) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * g[0][0] + mq * g[1][0];
        m[(k, q)] = mp * g[0][1] + mq * g[1][1];
    }
}

/// `m ← g† · m` restricted to rows `p`, `q`.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[C64; 2]; 2]) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = g[0][0].conj() * mp + g[1][0].conj() * mq;
        m[(q, k)] = g[0][1].conj() * mp + g[1][1].conj() * mq;
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrised as `(m + m†)/2` after the Hermiticity check.
/// Eigenvalues come back in descending order; within a degenerate eigenspace
/// the basis is whatever the rotations produce.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "hermitian_eig",
            rows: m.rows,
            cols: m.cols,
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off.sqrt() <= f64::EPSILON * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.norm() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let g = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                    rotate_columns(&mut a, p, q, &g);
                    rotate_rows(&mut a, p, q, &g);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)] = c64(a[(p, p)].re, 0.0);
                    a[(q, q)] = c64(a[(q, q)].re, 0.0);
                    rotate_columns(&mut v, p, q, &g);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `|ψ⟩ = Σᵢ αᵢ (U|i⟩) ⊗ (V|i⟩)`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, length `min(dim_a, dim_b)`.
    pub coefficients: Vec<f64>,
    /// `dim_a x dim_a` unitary.
    pub left_basis: ComplexMatrix,
    /// `dim_b x dim_b` unitary.
    pub right_basis: ComplexMatrix,
}

impl SchmidtDecomposition {
    pub fn reassemble(&self) -> ComplexMatrix {
        let da = self.left_basis.rows();
        let db = self.right_basis.rows();
        let mut psi = vec![ZERO; da * db];
        for (k, &alpha) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                let u = self.left_basis[(i, k)] * alpha;
                for j in 0..db {
                    psi[i * db + j] += u * self.right_basis[(j, k)];
                }
            }
        }
        ComplexMatrix::column(psi)
    }
}

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`).
///
/// Returns `(U, σ, W)` with `U` a full `rows x rows` unitary, `σ` descending of
/// length `cols` and `W` a `cols x cols` unitary such that `a = U[:, :cols] diag(σ) W†`.
fn thin_svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut work = a.clone();
    let mut w = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..m {
                    let x = work[(k, p)];
                    let y = work[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut work, p, q, &g);
                rotate_columns(&mut w, p, q, &g);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| work.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let w_sorted = ComplexMatrix::from_fn(n, n, |r, c| w[(r, order[c])]);

    let cutoff = 1e-13 * sigma.first().copied().unwrap_or(0.0);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m);
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > cutoff && sigma[k] > 0.0 {
            basis.push(work.col(j).iter().map(|z| z / sigma[k]).collect());
        } else {
            break;
        }
    }
    complete_orthonormal_basis(&mut basis, m);
    let mut u = ComplexMatrix::zeros(m, m);
    for (j, col) in basis.iter().enumerate() {
        u.set_col(j, col);
    }
    (u, sigma, w_sorted)
}

/// Extends an orthonormal list of vectors in `C^dim` to a full basis using
/// Gram-Schmidt against the standard basis.
fn complete_orthonormal_basis(basis: &mut Vec<Vec<C64>>, dim: usize) {
    let mut candidate = 0;
    while basis.len() < dim && candidate < dim {
        let mut v = vec![ZERO; dim];
        v[candidate] = ONE;
        candidate += 1;
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in basis.iter() {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
}

/// Schmidt decomposition of a unit vector in `C^dim_a ⊗ C^dim_b`, computed from
/// the SVD of its `dim_a x dim_b` reshaping.
pub fn schmidt_decompose(
    state: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<SchmidtDecomposition> {
    if dim_a == 0 || dim_b == 0 || state.shape() != (dim_a * dim_b, 1) {
        return Err(Error::DimensionMismatch {
            op: "schmidt_decompose",
            left: state.shape(),
            right: (dim_a * dim_b, 1),
        });
    }
    let norm = state.frobenius_norm();
    if (norm - 1.0).abs() > UNIT_VECTOR_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    let psi = state.as_slice();
    let reshaped = ComplexMatrix::from_fn(dim_a, dim_b, |i, j| psi[i * dim_b + j]);

    // ψ_ij = Σ_k U_ik σ_k conj(W_jk), so the right factor is conj(W).
    if dim_a >= dim_b {
        let (u, sigma, w) = thin_svd(&reshaped);
        Ok(SchmidtDecomposition {
            coefficients: sigma,
            left_basis: u,
            right_basis: w.conj(),
        })
    } else {
        let (u, sigma, w) = thin_svd(&reshaped.transpose());
        Ok(SchmidtDecomposition {
            coefficients: sigma,
            left_basis: w.conj(),
            right_basis: u,
        })
    }
}
