// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space operators.
//!
//! A model's Hilbert space is the tensor product of one truncated
//! oscillator per mode (cutoffs in [`HilbertSpec`]) with a two-level
//! system as the last factor. Kronecker products follow row-major
//! convention: the first factor varies slowest.

use ndarray::Array2;
use crate::linalg::kron;
use num_complex::Complex64;

use crate::error::{QnmError, Result};
use crate::tol;

/// Hilbert-space layout: per-oscillator photon cutoffs plus the implicit
/// trailing two-level system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpec {
    pub n_max: Vec<usize>,
    pub budget: usize,
}

impl HilbertSpec {
    pub fn new(n_max: Vec<usize>) -> Self {
        Self { n_max, budget: tol::DIMENSION_BUDGET_DEFAULT }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn n_oscillators(&self) -> usize {
        self.n_max.len()
    }

    /// Dimensions of the tensor factors, two-level system last.
    pub fn subsystem_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.n_max.iter().map(|n| n + 1).collect();
        d.push(2);
        d
    }

    pub fn dim(&self) -> usize {
        self.subsystem_dims().iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if dim > self.budget {
            return Err(QnmError::DimensionBudget { dim, budget: self.budget });
        }
        Ok(())
    }
}

/// Annihilation operator on an (n_max+1)-dimensional truncated oscillator.
pub fn destroy(n_max: usize) -> Array2<Complex64> {
    let d = n_max + 1;
    let mut a = Array2::<Complex64>::zeros((d, d));
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn identity(dim: usize) -> Array2<Complex64> {
    Array2::<Complex64>::eye(dim)
}

/// σ⁻ = |g⟩⟨e| in the basis {|g⟩, |e⟩}.
pub fn sigma_minus() -> Array2<Complex64> {
    let mut s = Array2::<Complex64>::zeros((2, 2));
    s[(0, 1)] = Complex64::new(1.0, 0.0);
    s
}

/// Embed a single-factor operator at `site` of the tensor chain.
pub fn embed(op: &Array2<Complex64>, site: usize, dims: &[usize]) -> Array2<Complex64> {
    debug_assert_eq!(op.nrows(), dims[site]);
    let mut full: Option<Array2<Complex64>> = None;
    for (i, &d) in dims.iter().enumerate() {
        let factor = if i == site { op.clone() } else { identity(d) };
        full = Some(match full {
            None => factor,
            Some(acc) => kron(&acc, &factor),
        });
    }
    full.expect("non-empty dims")
}

/// Full-space annihilation operator of oscillator `mode`.
pub fn mode_lowering(spec: &HilbertSpec, mode: usize) -> Array2<Complex64> {
    let dims = spec.subsystem_dims();
    embed(&destroy(spec.n_max[mode]), mode, &dims)
}

/// Full-space σ⁻ of the trailing two-level system.
pub fn tls_lowering(spec: &HilbertSpec) -> Array2<Complex64> {
    let dims = spec.subsystem_dims();
    embed(&sigma_minus(), dims.len() - 1, &dims)
}

/// Pure product state |n_0, n_1, …; g/e⟩ as a density matrix.
pub fn fock_state(spec: &HilbertSpec, occupations: &[usize], excited: bool) -> Result<Array2<Complex64>> {
    if occupations.len() != spec.n_oscillators() {
        return Err(QnmError::DimensionMismatch(format!(
            "{} occupations for {} oscillators",
            occupations.len(),
            spec.n_oscillators()
        )));
    }
    let mut index = 0usize;
    for (i, (&n, &cap)) in occupations.iter().zip(&spec.n_max).enumerate() {
        if n > cap {
            return Err(QnmError::ValidationError(format!(
                "oscillator {i}: occupation {n} exceeds cutoff {cap}"
            )));
        }
        index = index * (cap + 1) + n;
    }
    index = index * 2 + usize::from(excited);
    let dim = spec.dim();
    let mut rho = Array2::<Complex64>::zeros((dim, dim));
    rho[(index, index)] = Complex64::new(1.0, 0.0);
    Ok(rho)
}

/// Maximally mixed state I/dim (a convenient steady-state seed).
pub fn maximally_mixed(spec: &HilbertSpec) -> Array2<Complex64> {
    let dim = spec.dim();
    Array2::<Complex64>::eye(dim).mapv(|z| z / dim as f64)
}
