// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantized quasinormal-mode (QNM) models for coupled lossy and
//! amplifying resonators.
//!
//! The crate builds the full chain from classical coupled-mode theory to
//! quantum master equations for a pair of coupled microdisk resonators,
//! one lossy and one with linear gain:
//!
//! * [`cmt`] — hybridization of two bare QNMs, Green-function expansions,
//!   and the projected local density of states;
//! * [`fields`] — mode-field grids and the pole-level overlap integrals;
//! * [`symm`] — symmetrization matrices S, quantum consistency
//!   diagnostics, and the χ matrices entering the master equations;
//! * [`dynamics`] — Lindblad models (separated loss/gain picture, unified
//!   picture, and the phenomenological coupled-oscillator model), a
//!   Dormand–Prince time stepper, and steady-state solvers;
//! * [`badcavity`] — adiabatic-elimination rates, quantum LDOS, and
//!   two-level-system population dynamics.
//!
//! Energies are in eV throughout (ħ = 1); one unit of time is
//! ħ/eV ≈ 0.658 fs.

extern crate blas_src;

pub mod badcavity;
pub mod cmt;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod symm;
pub mod tol;

pub use error::{QnmError, Result};

/// Crate version string, embedded in CLI output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
