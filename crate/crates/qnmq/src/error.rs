// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error taxonomy.
//!
//! Errors are grouped by how a front end should report them:
//! input/configuration problems (exit code 2), physics-validity
//! violations (exit code 3), and numerical failures (exit code 4).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, QnmError>;

#[derive(Debug, Error)]
pub enum QnmError {
    // ---- input / configuration ----
    /// A file could not be parsed at all.
    #[error("parse error in {path}: {detail}")]
    ParseError { path: String, detail: String },

    /// A file parsed but its contents violate a documented contract.
    #[error("validation error: {0}")]
    ValidationError(String),

    /// A run configuration is incomplete or inconsistent.
    #[error("configuration error: {0}")]
    ConfigError(String),

    /// A matrix required to be Hermitian is not, beyond tolerance.
    #[error("matrix '{label}' is not Hermitian: relative asymmetry {asymmetry:.3e}")]
    NotHermitian { label: String, asymmetry: f64 },

    /// A field grid was used with an operation for the other region.
    #[error("region mismatch: expected {expected}, grid is {actual}")]
    RegionMismatch { expected: String, actual: String },

    /// Vector/matrix dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The requested Hilbert space exceeds the configured budget.
    #[error("Hilbert dimension {dim} exceeds budget {budget}")]
    DimensionBudget { dim: usize, budget: usize },

    /// Projected LDOS needs Im G_B > 0.
    #[error("background Green function Im G_B = {0:.3e} must be positive")]
    NonPositiveBackground(f64),

    // ---- physics validity ----
    /// Gain exceeds loss; the requested steady state does not exist.
    #[error("above threshold: {0}")]
    AboveThreshold(String),

    /// S' is not positive definite; the unified picture does not apply.
    #[error(
        "unified picture invalid: S' has eigenvalue {min_eigenvalue:.3e} ≤ 0; \
         use the separated gain-loss picture for this system"
    )]
    UnifiedInvalid { min_eigenvalue: f64 },

    /// A matrix required to be positive definite is not.
    #[error("matrix '{label}' is not positive definite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { label: String, min_eigenvalue: f64 },

    /// Hybrid eigenvectors coalesce (exceptional point); the mode
    /// coefficients are self-orthogonal and cannot be normalized.
    #[error("degenerate hybrid modes (exceptional point): |denominator| = {0:.3e}")]
    DegenerateHybrid(f64),

    /// A matrix that must be diagonalizable is defective.
    #[error("defective matrix: {0}")]
    DefectiveMatrix(String),

    /// Green-function evaluation requested at a pole.
    #[error("evaluation at a pole: |ω̃ − ω| = {0:.3e}")]
    PoleHit(f64),

    // ---- numerical failures ----
    /// An iterative method did not converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// The adaptive integrator step size underflowed.
    #[error("step underflow at t = {t:.6e}: step {step:.3e} below minimum")]
    StepUnderflow { t: f64, step: f64 },

    /// The evolved state lost physicality beyond the hard floor.
    #[error("non-physical state at t = {t:.6e}: min eigenvalue {min_eigenvalue:.3e}")]
    NonPhysicalState { t: f64, min_eigenvalue: f64 },

    /// S' is numerically singular where its inverse is required.
    #[error("S' is singular: |λ|_min/|λ|_max = {0:.3e}")]
    SingularSPrime(f64),

    /// A quantity that must be real carries a large imaginary residue,
    /// signalling a broken sign/conjugation convention.
    #[error("convention violation in {label}: imaginary residue {residue:.3e} (relative)")]
    ConventionViolation { label: String, residue: f64 },
}

impl QnmError {
    /// Process exit code a front end should use for this error:
    /// 2 input/configuration, 3 physics validity, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use QnmError::*;
        match self {
            ParseError { .. }
            | ValidationError(_)
            | ConfigError(_)
            | NotHermitian { .. }
            | RegionMismatch { .. }
            | DimensionMismatch(_)
            | DimensionBudget { .. }
            | NonPositiveBackground(_) => 2,
            AboveThreshold(_)
            | UnifiedInvalid { .. }
            | NotPositiveDefinite { .. }
            | DegenerateHybrid(_)
            | DefectiveMatrix(_)
            | PoleHit(_) => 3,
            NoConvergence(_)
            | StepUnderflow { .. }
            | NonPhysicalState { .. }
            | SingularSPrime(_)
            | ConventionViolation { .. } => 4,
        }
    }
}
