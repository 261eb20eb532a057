// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bad-cavity (weak-coupling) limit: analytic emitter rates.
//!
//! When the emitter–mode couplings are small against the mode
//! linewidths, the photonic degrees of freedom can be adiabatically
//! eliminated and the two-level system obeys a rate equation with an
//! enhanced decay rate Γ^loss, an incoherent pump rate Γ^gain, and the
//! background rate Γ^B. The rates are quadratic forms of the raw
//! couplings in the loss/gain symmetrization matrices, evaluated on
//! resonance kernels with the detuning convention Δ_η = ω_η − ω_a.
//!
//! The same limit applied to the phenomenological two-oscillator model
//! gives rates from the eigendecomposition of its dynamic matrix Ω̃;
//! those reproduce the normal-mode Green function exactly, which pins
//! the −κ coupling sign.
//!
//! Ref: H.-P. Breuer & F. Petruccione, "The Theory of Open Quantum
//!      Systems" (2002), Ch. 3 (weak-coupling limit).

use ndarray::Array2;
use num_complex::Complex64;

use crate::cmt::ComplexFreq;
use crate::dynamics::PhenParams;
use crate::error::{QnmError, Result};
use crate::linalg::{hermitize, real_part_checked};
use crate::symm::SymmSet;
use crate::tol;

/// Gain slot of the phenomenological 2×2 problem (loss occupies slot 0).
const G: usize = 1;

/// Analytic TLS rates in the bad-cavity limit (all in eV).
#[derive(Debug, Clone, Copy)]
pub struct TlsRates {
    pub gamma_loss: f64,
    pub gamma_gain: f64,
    pub gamma_b: f64,
    /// Photonic Lamb shifts; reported, never fed into populations.
    pub lamb_loss: f64,
    pub lamb_gain: f64,
}

fn check_inputs(
    raw: &[Complex64],
    s: &Array2<Complex64>,
    freqs: &[ComplexFreq],
) -> Result<Array2<Complex64>> {
    let n = freqs.len();
    if raw.len() != n || s.nrows() != n || s.ncols() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "{} couplings, {}×{} symmetrization matrix, {n} modes",
            raw.len(),
            s.nrows(),
            s.ncols()
        )));
    }
    for (i, f) in freqs.iter().enumerate() {
        f.require_decaying(&format!("mode {i}"))?;
    }
    hermitize("S", s)
}

/// Shared resonance kernel of the double-sum rate expressions. `swap`
/// selects the transposed matrix lookup used by the gain rate: the gain
/// symmetrization matrix carries the mirrored pole prefactor (see
/// [`crate::symm::s_gain`]), and S^G_{η′η} is the pairing under which
/// the numerator cancels it, leaving a nonnegative quadratic form.
fn rate_double_sum(
    raw: &[Complex64],
    s: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
    swap: bool,
) -> (Complex64, f64) {
    let n = freqs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for eta in 0..n {
        let (w_e, g_e) = (freqs[eta].omega, freqs[eta].gamma);
        let d_e = w_e - omega_a;
        for etap in 0..n {
            let (w_p, g_p) = (freqs[etap].omega, freqs[etap].gamma);
            let d_p = w_p - omega_a;
            let num = Complex64::new(g_e + g_p, w_e - w_p);
            let den = Complex64::new(d_e, -g_e) * Complex64::new(d_p, g_p);
            let s_el = if swap { s[(etap, eta)] } else { s[(eta, etap)] };
            let term = raw[eta] * s_el * raw[etap].conj() * num / den;
            acc += term;
            scale += term.norm();
        }
    }
    (acc, scale)
}

/// Half-rate form Γ̃ = Γ/2 + i ω_LS built on the single-resolvent
/// kernel −i/(Δ_η − iγ_η); its real part doubles to the full rate and
/// its imaginary part is the photonic Lamb shift.
fn rate_tilde_sum(
    raw: &[Complex64],
    s: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
    swap: bool,
) -> Complex64 {
    let n = freqs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for eta in 0..n {
        let d_e = freqs[eta].omega - omega_a;
        let kernel = -Complex64::i() / Complex64::new(d_e, -freqs[eta].gamma);
        for etap in 0..n {
            let s_el = if swap { s[(etap, eta)] } else { s[(eta, etap)] };
            acc += raw[eta] * s_el * raw[etap].conj() * kernel;
        }
    }
    acc
}

fn finalized_rate(label: &str, sum: Complex64, scale: f64) -> Result<f64> {
    let value = real_part_checked(label, sum, scale.max(1e-300))?;
    if value < -tol::IMAG_RESIDUE_REL * scale {
        return Err(QnmError::ValidationError(format!(
            "{label} = {value:.6e} is negative; symmetrization matrix and mode \
             frequencies are mutually inconsistent"
        )));
    }
    Ok(value.max(0.0))
}

/// Enhanced emitter decay rate Γ^loss from the loss symmetrization
/// matrix S^L.
pub fn gamma_loss(
    raw: &[Complex64],
    s_l: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
) -> Result<f64> {
    let s = check_inputs(raw, s_l, freqs)?;
    let (sum, scale) = rate_double_sum(raw, &s, freqs, omega_a, false);
    finalized_rate("gamma_loss", sum, scale)
}

/// Incoherent pump rate Γ^gain from the gain symmetrization matrix S^G
/// (entered with swapped indices, S^G_{η′η}).
pub fn gamma_gain(
    raw: &[Complex64],
    s_g: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
) -> Result<f64> {
    let s = check_inputs(raw, s_g, freqs)?;
    let (sum, scale) = rate_double_sum(raw, &s, freqs, omega_a, true);
    finalized_rate("gamma_gain", sum, scale)
}

/// Complex half-rate Γ̃^loss = Γ^loss/2 + i ω_LS^loss.
pub fn gamma_tilde_loss(
    raw: &[Complex64],
    s_l: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
) -> Result<Complex64> {
    let s = check_inputs(raw, s_l, freqs)?;
    Ok(rate_tilde_sum(raw, &s, freqs, omega_a, false))
}

/// Complex half-rate Γ̃^gain = Γ^gain/2 + i ω_LS^gain.
pub fn gamma_tilde_gain(
    raw: &[Complex64],
    s_g: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    omega_a: f64,
) -> Result<Complex64> {
    let s = check_inputs(raw, s_g, freqs)?;
    Ok(rate_tilde_sum(raw, &s, freqs, omega_a, true))
}

/// Full rate set for an emitter at frequency ω_a with background rate
/// Γ^B, evaluated on a symmetrization set. Lamb shifts come from the
/// half-rate forms; populations never use them.
pub fn tls_rates(
    set: &SymmSet,
    raw: &[Complex64],
    gamma_b: f64,
    omega_a: f64,
) -> Result<TlsRates> {
    if gamma_b < 0.0 || !gamma_b.is_finite() {
        return Err(QnmError::ValidationError(format!(
            "background rate must be ≥ 0 and finite, got {gamma_b}"
        )));
    }
    let loss = gamma_loss(raw, &set.s_l, &set.freqs, omega_a)?;
    let lamb_loss = gamma_tilde_loss(raw, &set.s_l, &set.freqs, omega_a)?.im;
    let (gain, lamb_gain) = if set.has_gain {
        (
            gamma_gain(raw, &set.s_g, &set.freqs, omega_a)?,
            gamma_tilde_gain(raw, &set.s_g, &set.freqs, omega_a)?.im,
        )
    } else {
        (0.0, 0.0)
    };
    Ok(TlsRates { gamma_loss: loss, gamma_gain: gain, gamma_b, lamb_loss, lamb_gain })
}

/// Quantum LDOS seen by the emitter: 1 + (Γ^loss − Γ^gain)/Γ^B. May be
/// below one, or negative, in amplifying regions.
pub fn quantum_ldos(rates: &TlsRates) -> Result<f64> {
    if rates.gamma_b <= 0.0 {
        return Err(QnmError::NonPositiveBackground(rates.gamma_b));
    }
    Ok(1.0 + (rates.gamma_loss - rates.gamma_gain) / rates.gamma_b)
}

fn total_rate(rates: &TlsRates) -> Result<f64> {
    for (label, v) in [
        ("gamma_loss", rates.gamma_loss),
        ("gamma_gain", rates.gamma_gain),
        ("gamma_B", rates.gamma_b),
    ] {
        if v < 0.0 || !v.is_finite() {
            return Err(QnmError::ValidationError(format!(
                "{label} must be ≥ 0 and finite, got {v}"
            )));
        }
    }
    let g = rates.gamma_loss + rates.gamma_gain + rates.gamma_b;
    if g <= 0.0 {
        return Err(QnmError::ValidationError(
            "total rate vanishes; excited-state dynamics undefined".into(),
        ));
    }
    Ok(g)
}

/// Excited-state population at time t (eV⁻¹), from the closed-form
/// solution of the two-level rate equation.
pub fn n_excited(t: f64, rates: &TlsRates, n_e0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n_e0) {
        return Err(QnmError::ValidationError(format!(
            "initial population must lie in [0, 1], got {n_e0}"
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(QnmError::ValidationError(format!("time must be ≥ 0, got {t}")));
    }
    let g = total_rate(rates)?;
    let decay = (-g * t).exp();
    Ok(decay * n_e0 + (rates.gamma_gain / g) * (1.0 - decay))
}

/// Steady-state population Γ^gain/(Γ^loss + Γ^gain + Γ^B), equal to
/// δ/(1+δ) with δ = Γ^gain/(Γ^loss + Γ^B). Always in [0, 1).
pub fn n_excited_ss(rates: &TlsRates) -> Result<f64> {
    let g = total_rate(rates)?;
    Ok(rates.gamma_gain / g)
}

/// Bad-cavity rates of the phenomenological model.
#[derive(Debug, Clone, Copy)]
pub struct PhenRates {
    /// Net LDOS-type rate; equals 2s²·Im G_phen under the coupling
    /// identification g_i = √(ω_a/2)·s·f_i.
    pub gamma_ldos_phen: f64,
    pub gamma_gain_phen: f64,
    /// Γ^loss_phen = Γ^LDOS_phen + Γ^gain_phen.
    pub gamma_loss_phen: f64,
}

struct Eigensystem {
    vals: [Complex64; 2],
    v: [[Complex64; 2]; 2],
    v_inv: [[Complex64; 2]; 2],
}

/// Closed-form eigendecomposition of the 2×2 dynamic matrix, refusing
/// the defective (exceptional) point where the eigenvectors collapse.
fn eigensystem(m: &Array2<Complex64>) -> Result<Eigensystem> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm()).max(1e-300);
    if b.norm() <= 1e-14 * scale && c.norm() <= 1e-14 * scale {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return Ok(Eigensystem {
            vals: [a, d],
            v: [[one, zero], [zero, one]],
            v_inv: [[one, zero], [zero, one]],
        });
    }
    let mean = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc.norm() < tol::EP_DISCRIMINANT_REL * scale * scale {
        return Err(QnmError::DefectiveMatrix(format!(
            "dynamic matrix is defective (discriminant {:.3e})",
            disc.norm()
        )));
    }
    let root = disc.sqrt();
    let vals = [mean + root, mean - root];
    let mut v = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j, lam) in vals.iter().enumerate() {
        // Two algebraic forms of the eigenvector; keep the better-conditioned.
        let cand1 = [b, *lam - a];
        let cand2 = [*lam - d, c];
        let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        let cand = if n1 >= n2 { cand1 } else { cand2 };
        let norm = (cand[0].norm_sqr() + cand[1].norm_sqr()).sqrt();
        v[0][j] = cand[0] / norm;
        v[1][j] = cand[1] / norm;
    }
    let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
    if det.norm() < 1e-12 {
        return Err(QnmError::DefectiveMatrix(format!(
            "eigenvector matrix is singular (det {:.3e})",
            det.norm()
        )));
    }
    let v_inv = [[v[1][1] / det, -v[0][1] / det], [-v[1][0] / det, v[0][0] / det]];
    Ok(Eigensystem { vals, v, v_inv })
}

/// Bad-cavity rates of the phenomenological two-oscillator model at
/// emitter frequency ω_a.
pub fn phen_rates(params: &PhenParams, omega_a: f64) -> Result<PhenRates> {
    if !(omega_a > 0.0) || !omega_a.is_finite() {
        return Err(QnmError::ValidationError(format!(
            "omega_a must be positive and finite, got {omega_a}"
        )));
    }
    let omega = params.stability_matrix();
    let eig = eigensystem(&omega)?;
    let pole_scale = eig.vals[0].norm().max(eig.vals[1].norm());
    let g = [params.g_l, params.g_g];
    let resolvent =
        |j: usize| Complex64::i() / (Complex64::new(omega_a, 0.0) - eig.vals[j]);

    let mut ldos = 0.0;
    let mut gain = 0.0;
    for i in 0..2 {
        for k in 0..2 {
            let weight = 2.0 * g[i] * g[k];
            if weight == 0.0 {
                continue;
            }
            for j in 0..2 {
                let t = eig.v[i][j] * eig.v_inv[j][k];
                ldos += weight * (t * resolvent(j)).re;
                if params.gamma_g > 0.0 {
                    let mut t_prime = Complex64::new(0.0, 0.0);
                    for n in 0..2 {
                        let coef = eig.v[i][j]
                            * eig.v[k][n].conj()
                            * eig.v_inv[j][G]
                            * eig.v_inv[n][G].conj();
                        if coef.norm_sqr() == 0.0 {
                            continue;
                        }
                        let denom = Complex64::i() * (eig.vals[j] - eig.vals[n].conj());
                        if denom.norm() < 1e-12 * pole_scale {
                            return Err(QnmError::AboveThreshold(format!(
                                "gain kernel is singular: poles {} and {} sit on \
                                 the real axis (lasing threshold)",
                                eig.vals[j], eig.vals[n]
                            )));
                        }
                        t_prime += coef * (2.0 * params.gamma_g) / denom;
                    }
                    gain += weight * (t_prime * resolvent(j)).re;
                }
            }
        }
    }
    Ok(PhenRates {
        gamma_ldos_phen: ldos,
        gamma_gain_phen: gain,
        gamma_loss_phen: ldos + gain,
    })
}

/// Normal-mode (phenomenological) Green function projected on real mode
/// amplitudes f = (f_L, f_G) at the emitter: −(ω/2)·fᵀ(ω − Ω̃)⁻¹f.
pub fn green_phen(params: &PhenParams, f_l: f64, f_g: f64, omega: f64) -> Result<Complex64> {
    let m = params.stability_matrix();
    let eig = eigensystem(&m)?;
    for lam in &eig.vals {
        let dist = (lam - Complex64::new(omega, 0.0)).norm();
        if dist < tol::POLE_REL * lam.norm().max(omega.abs()) {
            return Err(QnmError::PoleHit(dist));
        }
    }
    let w = Complex64::new(omega, 0.0);
    // adj(ω − Ω̃) / det(ω − Ω̃), written out for the 2×2 case.
    let r = [[w - m[(0, 0)], -m[(0, 1)]], [-m[(1, 0)], w - m[(1, 1)]]];
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    let adj = [[r[1][1], -r[0][1]], [-r[1][0], r[0][0]]];
    let f = [Complex64::new(f_l, 0.0), Complex64::new(f_g, 0.0)];
    let mut quad = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            quad += f[i] * adj[i][j] * f[j];
        }
    }
    Ok(-0.5 * w * quad / det)
}

/// One row of a model-comparison sweep.
#[derive(Debug, Clone, Copy)]
pub struct CompareRow {
    pub omega_a: f64,
    pub gamma_loss: f64,
    pub gamma_gain: f64,
    pub gamma_loss_phen: f64,
    pub gamma_gain_phen: f64,
    pub ldos_quantum: f64,
    pub ldos_phen: f64,
    pub n_ss: f64,
    pub n_ss_phen: f64,
}

/// Sweep the emitter frequency and tabulate both models' bad-cavity
/// rates, LDOS, and steady-state populations.
pub fn compare_models(
    set: &SymmSet,
    raw: &[Complex64],
    phen: &PhenParams,
    gamma_b: f64,
    omega_as: &[f64],
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::with_capacity(omega_as.len());
    for &omega_a in omega_as {
        let rates = tls_rates(set, raw, gamma_b, omega_a)?;
        let ph = phen_rates(phen, omega_a)?;
        let phen_as_tls = TlsRates {
            gamma_loss: ph.gamma_loss_phen,
            gamma_gain: ph.gamma_gain_phen,
            gamma_b,
            lamb_loss: 0.0,
            lamb_gain: 0.0,
        };
        rows.push(CompareRow {
            omega_a,
            gamma_loss: rates.gamma_loss,
            gamma_gain: rates.gamma_gain,
            gamma_loss_phen: ph.gamma_loss_phen,
            gamma_gain_phen: ph.gamma_gain_phen,
            ldos_quantum: quantum_ldos(&rates)?,
            ldos_phen: 1.0 + ph.gamma_ldos_phen / gamma_b,
            n_ss: n_excited_ss(&rates)?,
            n_ss_phen: n_excited_ss(&phen_as_tls)?,
        });
    }
    Ok(rows)
}
