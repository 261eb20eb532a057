// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra helpers shared across the crate.
//!
//! Everything here operates on `Array2<Complex64>` and wraps LAPACK
//! (via `ndarray-linalg`) with the crate's error taxonomy. Matrices in
//! this problem domain are tiny (N modes ≤ a handful; Hilbert spaces up
//! to a few thousand), so no attention is paid to blocking or workspace
//! reuse.

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{QnmError, Result};
use crate::tol;

/// Conjugate transpose M†.
pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Frobenius norm.
pub fn fro_norm(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry magnitude.
pub fn max_abs(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Relative Hermiticity defect ‖M − M†‖_F / ‖M‖_F (0 for the zero matrix).
pub fn hermiticity_defect(m: &Array2<Complex64>) -> f64 {
    let norm = fro_norm(m);
    if norm == 0.0 {
        return 0.0;
    }
    fro_norm(&(m - &dagger(m))) / norm
}

/// Symmetrize a nominally Hermitian matrix as (M + M†)/2.
///
/// Asymmetry up to [`tol::HERMITICITY_REL`] (relative, Frobenius) is
/// treated as quadrature noise and averaged away; anything larger is
/// rejected so it cannot cascade into spurious complex eigenvalues.
pub fn hermitize(label: &str, m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let defect = hermiticity_defect(m);
    if defect > tol::HERMITICITY_REL {
        return Err(QnmError::NotHermitian { label: label.to_string(), asymmetry: defect });
    }
    Ok((m + &dagger(m)).mapv(|z| 0.5 * z))
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors in columns.
///
/// The backend reads the buffer column-major, which silently conjugates
/// the eigenvectors of a row-major input; a Fortran-layout copy keeps
/// the column convention for every caller.
pub fn eigh_ascending(m: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>)> {
    let mut f = Array2::<Complex64>::zeros(m.raw_dim().f());
    f.assign(m);
    f.eigh(UPLO::Lower)
        .map_err(|e| QnmError::NoConvergence(format!("Hermitian eigensolve failed: {e}")))
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &Array2<Complex64>) -> Result<Array1<f64>> {
    Ok(eigh_ascending(m)?.0)
}

/// Apply a real function to a Hermitian matrix through its spectral
/// decomposition: f(M) = V diag(f(λ)) V†.
fn spectral_map(
    vals: &Array1<f64>,
    vecs: &Array2<Complex64>,
    f: impl Fn(f64) -> f64,
) -> Array2<Complex64> {
    let n = vals.len();
    let mut fd = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        fd[(i, i)] = Complex64::new(f(vals[i]), 0.0);
    }
    vecs.dot(&fd).dot(&dagger(vecs))
}

/// Principal square root and inverse square root of a Hermitian positive
/// definite matrix, via the spectral decomposition with the positive
/// branch on every eigenvalue.
///
/// Returns `NotPositiveDefinite` if any eigenvalue is ≤ 0.
pub fn principal_sqrt(
    label: &str,
    m: &Array2<Complex64>,
) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let (vals, vecs) = eigh_ascending(m)?;
    let min = vals[0];
    if min <= 0.0 {
        return Err(QnmError::NotPositiveDefinite {
            label: label.to_string(),
            min_eigenvalue: min,
        });
    }
    let half = spectral_map(&vals, &vecs, f64::sqrt);
    let inv_half = spectral_map(&vals, &vecs, |x| 1.0 / x.sqrt());
    Ok((half, inv_half))
}

/// Inverse of a Hermitian matrix through its spectral decomposition.
///
/// `rel_floor` rejects near-singular inputs: |λ|_min < rel_floor·|λ|_max.
pub fn hermitian_inverse(m: &Array2<Complex64>, rel_floor: f64) -> Result<Array2<Complex64>> {
    let (vals, vecs) = eigh_ascending(m)?;
    let max = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min = vals.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    if max == 0.0 || min < rel_floor * max {
        return Err(QnmError::SingularSPrime(if max == 0.0 { 0.0 } else { min / max }));
    }
    Ok(spectral_map(&vals, &vecs, |x| 1.0 / x))
}

/// Assert that a computed quantity is real up to the crate's imaginary
/// residue tolerance (relative to `scale`) and return its real part.
pub fn real_part_checked(label: &str, z: Complex64, scale: f64) -> Result<f64> {
    let scale = scale.abs().max(f64::MIN_POSITIVE);
    let residue = z.im.abs() / scale;
    if residue > tol::IMAG_RESIDUE_REL {
        return Err(QnmError::ConventionViolation { label: label.to_string(), residue });
    }
    Ok(z.re)
}

/// Trace of a complex matrix.
pub fn trace(m: &Array2<Complex64>) -> Complex64 {
    m.diag().sum()
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = aij * b[(p, q)];
                }
            }
        }
    }
    out
}
