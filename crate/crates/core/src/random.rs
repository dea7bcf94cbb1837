//! Seeded random matrices for tests, the channel zoo, and benchmarks.
//!
//! Every generator takes the RNG explicitly; nothing here touches global state.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, ComplexMatrix, C64};

/// Complex Gaussian with independent standard-normal real and imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    gaussian_matrix(n, n, rng).hermitian_part()
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let v = gaussian_matrix(n, 1, rng);
    let norm = v.frobenius_norm();
    v.scale_real(1.0 / norm)
}

/// Orthonormalises the columns of `m` (modified Gram-Schmidt, two passes).
///
/// Panics if the columns are numerically dependent, which does not happen for
/// Gaussian input of full column rank.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    assert!(
        cols <= rows,
        "cannot orthonormalize {cols} columns in C^{rows}"
    );
    let mut out = m.clone();
    for j in 0..cols {
        let mut v = out.col(j);
        for _ in 0..2 {
            for k in 0..j {
                let u = out.col(k);
                let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(&u) {
                    *vi -= overlap * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "columns are linearly dependent");
        let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
        out.set_col(j, &v);
    }
    out
}

/// `rows x cols` isometry (`V†V = I`) from a Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    orthonormalize_columns(&gaussian_matrix(rows, cols, rng))
}

/// Haar-distributed unitary (Gram-Schmidt of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}
