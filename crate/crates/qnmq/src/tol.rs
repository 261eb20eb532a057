// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Named tolerances and physical constants used across the crate.
//!
//! The numerical contracts of this library are stated against these
//! constants; tests reference them by name rather than repeating literals.

/// Relative asymmetry below which a nominally Hermitian input is
/// symmetrized as (M + M†)/2; above it the input is rejected.
pub const HERMITICITY_REL: f64 = 1e-9;

/// Relative scale for detecting an exceptional point: the coupled-mode
/// discriminant is considered degenerate when
/// |4 κ_LG κ_GL + (ω̃_L − ω̃_G)²| < EP_DISCRIMINANT_REL · |ω̃_L + ω̃_G|².
pub const EP_DISCRIMINANT_REL: f64 = 1e-12;

/// Relative scale for the hybrid-coefficient denominator
/// (ω̃_± − ω̃_G)² + κ_GL²; below this the hybrid mode is self-orthogonal.
pub const DEGENERATE_HYBRID_REL: f64 = 1e-12;

/// Relative scale for pole proximity in Green-function evaluation:
/// |ω̃_μ − ω| < POLE_REL · max(|ω̃_μ|, |ω|) is rejected.
pub const POLE_REL: f64 = 1e-12;

/// Contract tolerance for principal square roots: ‖M^{1/2}M^{1/2} − M‖
/// and ‖M^{-1/2} M M^{-1/2} − 1‖ must stay below this, relative.
pub const SQRT_RECONSTRUCT: f64 = 1e-10;

/// Relative imaginary residue allowed on quantities that are real by
/// construction (rates, vacuum occupation); larger residues signal a
/// transcription bug in a sign or conjugation convention.
pub const IMAG_RESIDUE_REL: f64 = 1e-9;

/// Relative eigenvalue floor below which a symmetrization matrix counts
/// as singular when it must be inverted.
pub const SINGULAR_S_REL: f64 = 1e-12;

/// Null-space steady state: the residual ‖L v‖ must satisfy
/// ‖L v‖ ≤ NULLSPACE_RESIDUAL_REL · ‖L‖ · ‖v‖.
pub const NULLSPACE_RESIDUAL_REL: f64 = 1e-10;

/// Long-time steady state: integrate until ‖dρ/dt‖₁ · window < this × ‖ρ‖₁.
pub const LONGTIME_RESIDUAL_REL: f64 = 1e-12;

/// Ceiling for accepting a long-time run whose residual has stopped
/// contracting. The exact-generator drift of the integrator's numerical
/// fixed point plateaus near the local error tolerance, so a stalled
/// residual below this bound is noise, not an unconverged transient.
pub const LONGTIME_PLATEAU_REL: f64 = 1e-6;

/// Default relative tolerance of the adaptive integrator.
pub const RTOL_DEFAULT: f64 = 1e-9;

/// Default absolute tolerance of the adaptive integrator.
pub const ATOL_DEFAULT: f64 = 1e-12;

/// Density-matrix validity: |trace − 1| and Hermiticity defect bounds.
pub const RHO_TRACE_TOL: f64 = 1e-9;
pub const RHO_HERMITICITY_TOL: f64 = 1e-9;

/// Density-matrix validity: eigenvalues may dip to this (numerical PSD).
pub const RHO_EIGENVALUE_FLOOR: f64 = -1e-8;

/// Evolution positivity: diagnostic floor (warn) and hard-error floor.
pub const POSITIVITY_DIAGNOSTIC_FLOOR: f64 = -1e-6;
pub const POSITIVITY_HARD_FLOOR: f64 = -1e-5;

/// Default Hilbert-space dimension budget (modes ⊗ TLS).
pub const DIMENSION_BUDGET_DEFAULT: usize = 4096;

/// Largest Hilbert dimension for which the dense vectorized-Liouvillian
/// null-space solve is attempted by default; above it the long-time
/// integrator is used instead. An explicit null-space request is honored
/// up to [`NULLSPACE_DIM_MAX`] (the dense Liouvillian is dim² × dim²).
pub const NULLSPACE_DIM_DEFAULT: usize = 64;

/// Hard cap for explicit null-space requests (memory bound).
pub const NULLSPACE_DIM_MAX: usize = 100;

/// ħ in eV·fs: with energies in eV and ħ = 1, one unit of time is
/// ħ/eV ≈ 0.658 fs.
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;
