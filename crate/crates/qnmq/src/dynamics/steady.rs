// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Steady states of the assembled master equations.
//!
//! Two routes: a direct null-space solve of the vectorized Liouvillian
//! (exact, memory-bound at dimension d by the d²×d² matrix) and
//! windowed long-time integration (matrix-free, for larger spaces).
//! Both refuse models flagged above their instability threshold, where
//! no stationary density matrix exists. A unique stationary state
//! (ergodic model) is assumed; if the kernel is degenerate — e.g. a
//! subsystem with no channels attached — each route returns some member
//! of the stationary family and they need not agree.

use ndarray::{Array1, Array2};
use crate::linalg::kron;
use ndarray_linalg::Solve;
use num_complex::Complex64;

use super::{fock, rk45, LindbladModel};
use crate::error::{QnmError, Result};
use crate::linalg::{dagger, fro_norm};
use crate::tol;

/// Maximum number of relaxation windows before long-time integration
/// gives up.
const LONGTIME_MAX_WINDOWS: usize = 200;

/// Solution strategy for [`steady_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    /// Bordered linear solve on the vectorized Liouvillian.
    NullSpace,
    /// Integrate from the maximally mixed state until dρ/dt vanishes.
    LongTime,
}

/// Diagnostics attached to a steady-state solution.
#[derive(Debug, Clone, Copy)]
pub struct SteadyInfo {
    pub method: SteadyMethod,
    /// ‖L vec(ρ)‖₂ (null space) or entrywise ‖dρ/dt‖₁ (long time).
    pub residual: f64,
    /// Relaxation windows consumed (0 for the direct solve).
    pub windows: usize,
}

/// Dense matrix of the generator acting on row-major-vectorized states:
/// vec(ρ)[i·d + j] = ρ_{ij}, so vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
pub fn liouvillian_matrix(model: &LindbladModel) -> Array2<Complex64> {
    let d = model.dim();
    let eye = Array2::<Complex64>::eye(d);
    let a_conj = model.a_op.mapv(|z| z.conj());
    let mut l = kron(&model.a_op, &eye) + kron(&eye, &a_conj);
    for per_mu in &model.jump_pre {
        for (m, k_dag) in per_mu {
            let k_conj = k_dag.t().to_owned();
            l.scaled_add(Complex64::new(2.0, 0.0), &kron(m, &k_conj));
        }
    }
    l
}

fn vec_of(rho: &Array2<Complex64>) -> Array1<Complex64> {
    Array1::from_iter(rho.iter().cloned())
}

fn mat_of(x: &Array1<Complex64>, d: usize) -> Array2<Complex64> {
    Array2::from_shape_vec((d, d), x.to_vec()).expect("vectorized state has d² entries")
}

fn hermitize_and_normalize(rho: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let mut sym = (rho + &dagger(rho)).mapv(|z| 0.5 * z);
    let tr: Complex64 = (0..sym.nrows()).map(|i| sym[(i, i)]).sum();
    if tr.norm() < 1e-300 {
        return Err(QnmError::NoConvergence(
            "steady-state candidate has vanishing trace".into(),
        ));
    }
    sym.mapv_inplace(|z| z / tr);
    Ok(sym)
}

fn solve_nullspace(model: &LindbladModel) -> Result<(Array2<Complex64>, SteadyInfo)> {
    let d = model.dim();
    if d > tol::NULLSPACE_DIM_MAX {
        return Err(QnmError::DimensionBudget { dim: d, budget: tol::NULLSPACE_DIM_MAX });
    }
    let l = liouvillian_matrix(model);
    let n2 = d * d;

    // Bordered system: the trace functional is a left null vector of L,
    // so replacing one row (the ρ_{00} slot) with the trace row gives a
    // nonsingular system whose solution is the unit-trace kernel vector.
    let mut bordered = l.clone();
    for k in 0..n2 {
        bordered[(0, k)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        bordered[(0, i * d + i)] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = Array1::<Complex64>::zeros(n2);
    rhs[0] = Complex64::new(1.0, 0.0);
    let x = bordered
        .solve(&rhs)
        .map_err(|e| QnmError::NoConvergence(format!("bordered Liouvillian solve: {e}")))?;

    let l_scale = fro_norm(&l).max(1e-300);
    let residual_of = |rho: &Array2<Complex64>| -> f64 {
        let v = vec_of(rho);
        let r = l.dot(&v);
        let num = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let den = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        num / (l_scale * den)
    };

    let mut rho = hermitize_and_normalize(&mat_of(&x, d))?;
    let mut rel = residual_of(&rho);
    if rel > tol::NULLSPACE_RESIDUAL_REL {
        // Inverse iteration with a tiny regularizing shift sharpens the
        // kernel vector when the border solve came back noisy.
        let delta = Complex64::new(1e-14 * l_scale, 0.0);
        let mut shifted = l.clone();
        for k in 0..n2 {
            shifted[(k, k)] -= delta;
        }
        let mut v = vec_of(&rho);
        for _ in 0..3 {
            let y = shifted
                .solve(&v)
                .map_err(|e| QnmError::NoConvergence(format!("inverse iteration: {e}")))?;
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
            v = y.mapv(|z| z / norm);
            let candidate = hermitize_and_normalize(&mat_of(&v, d))?;
            let r = residual_of(&candidate);
            if r < rel {
                rho = candidate;
                rel = r;
            }
            if rel <= tol::NULLSPACE_RESIDUAL_REL {
                break;
            }
        }
        if rel > tol::NULLSPACE_RESIDUAL_REL {
            return Err(QnmError::NoConvergence(format!(
                "null-space residual {rel:.3e} exceeds {:.1e}",
                tol::NULLSPACE_RESIDUAL_REL
            )));
        }
    }
    super::validate_density(&rho, d)?;
    Ok((rho, SteadyInfo { method: SteadyMethod::NullSpace, residual: rel, windows: 0 }))
}

fn l1_norm(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).sum()
}

fn solve_longtime(model: &LindbladModel) -> Result<(Array2<Complex64>, SteadyInfo)> {
    let mut rho = fock::maximally_mixed(&model.spec);
    let window = 2.0 / model.min_decay_scale();
    let mut t = 0.0;
    let mut best_drift = f64::INFINITY;
    let mut stalled = 0usize;
    for w in 1..=LONGTIME_MAX_WINDOWS {
        let (next, _) = rk45::integrate_adaptive(
            |y| model.rhs(y),
            t,
            &rho,
            t + window,
            tol::RTOL_DEFAULT,
            tol::ATOL_DEFAULT,
            |_, _| Ok(()),
        )?;
        t += window;
        rho = hermitize_and_normalize(&next)?;
        let drift = l1_norm(&model.rhs(&rho)) * window;
        let scale = l1_norm(&rho);
        // Stalled contraction means the remaining signal sits at the
        // integrator's noise floor; accept it only when small enough to
        // be noise rather than a genuinely unconverged transient.
        let converged = drift < tol::LONGTIME_RESIDUAL_REL * scale
            || (w >= 8
                && stalled >= 4
                && drift <= tol::LONGTIME_PLATEAU_REL * scale);
        if converged {
            super::validate_density(&rho, model.dim())?;
            let info = SteadyInfo {
                method: SteadyMethod::LongTime,
                residual: drift / window,
                windows: w,
            };
            return Ok((rho, info));
        }
        if drift < 0.7 * best_drift {
            stalled = 0;
        } else {
            stalled += 1;
        }
        best_drift = best_drift.min(drift);
    }
    Err(QnmError::NoConvergence(format!(
        "long-time integration did not stabilize within {LONGTIME_MAX_WINDOWS} windows \
         (final drift {best_drift:.3e})"
    )))
}

/// Stationary density matrix of a stable model.
pub fn steady_state(
    model: &LindbladModel,
    method: SteadyMethod,
) -> Result<(Array2<Complex64>, SteadyInfo)> {
    model.require_stable()?;
    match method {
        SteadyMethod::NullSpace => solve_nullspace(model),
        SteadyMethod::LongTime => solve_longtime(model),
    }
}

/// Pick the direct solve for small spaces, long-time integration above
/// the default null-space dimension.
pub fn steady_state_auto(model: &LindbladModel) -> Result<(Array2<Complex64>, SteadyInfo)> {
    let method = if model.dim() <= tol::NULLSPACE_DIM_DEFAULT {
        SteadyMethod::NullSpace
    } else {
        SteadyMethod::LongTime
    };
    steady_state(model, method)
}
