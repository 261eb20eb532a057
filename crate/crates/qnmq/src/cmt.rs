// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical coupled-mode theory (CMT) for two coupled open resonators.
//!
//! Two bare quasinormal modes (QNMs) with complex eigenfrequencies
//! ω̃_L = ω_L − iγ_L (lossy disk) and ω̃_G = ω_G − iγ_G (gain disk,
//! γ_G < 0 when amplifying) hybridize through the effective non-Hermitian
//! matrix
//!
//! ```text
//!     M = [ ω̃_L   −κ_LG ]
//!         [ −κ_GL  ω̃_G  ]
//! ```
//!
//! whose eigenvalues ω̃_± = (ω̃_L+ω̃_G)/2 ± √(4κ_LG κ_GL + (ω̃_L−ω̃_G)²)/2
//! are the hybrid frequencies. The hybrid mode fields are
//! f̃_± = c_L f̃_L + c_G f̃_G with the unconjugated normalization
//! c_L² + c_G² = 1, and the scalar (zz) Green function is expanded over
//! the hybrid poles or equivalently written directly over the bare-mode
//! fields.
//!
//! Ref: H. A. Haus, "Waves and Fields in Optoelectronics" (1984), Ch. 7.
//! Ref: L. Novotny & B. Hecht, "Principles of Nano-Optics" (2012), Ch. 8
//!      (local density of states and dyadic Green functions).

use std::collections::HashMap;

use ndarray::{array, Array2};
use num_complex::Complex64;

use crate::error::{QnmError, Result};
use crate::symm::EmitterParams;
use crate::tol;

/// A QNM eigenfrequency ω̃ = ω − iγ in energy units (eV).
///
/// `gamma > 0` is a decaying (lossy) mode and is required by every
/// quantum-model constructor; a bare amplifying mode carries `gamma < 0`
/// and may only enter classical CMT operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFreq {
    /// Real part ω (eV); must be > 0.
    pub omega: f64,
    /// Half-width γ (eV); sign convention ω̃ = ω − iγ.
    pub gamma: f64,
}

impl ComplexFreq {
    /// Checked constructor: requires ω > 0 (γ of either sign is allowed
    /// at this level).
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() || !gamma.is_finite() {
            return Err(QnmError::ValidationError(format!(
                "complex frequency needs finite ω > 0, got ω = {omega}, γ = {gamma}"
            )));
        }
        Ok(Self { omega, gamma })
    }

    /// Build from ω̃ = ω − iγ without validation (used for computed
    /// hybrid outputs, which inherit validity from their inputs).
    pub fn from_complex(z: Complex64) -> Self {
        Self { omega: z.re, gamma: -z.im }
    }

    /// ω̃ = ω − iγ as a complex number.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.omega, -self.gamma)
    }

    /// Quality factor Q = ω/(2γ).
    pub fn q_factor(&self) -> f64 {
        self.omega / (2.0 * self.gamma)
    }

    /// Enforce the linear-amplification condition γ > 0 required of every
    /// mode entering a quantum-model constructor.
    pub fn require_decaying(&self, label: &str) -> Result<()> {
        if self.gamma <= 0.0 {
            return Err(QnmError::ValidationError(format!(
                "mode '{label}' has γ = {:.3e} ≤ 0; quantum pictures need decaying hybrid modes",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Which resonator a bare mode lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRole {
    Loss,
    Gain,
}

/// A bare (uncoupled) resonator mode: eigenfrequency, sampled field
/// values at named positions, and the resonator's refractive index.
#[derive(Debug, Clone)]
pub struct BareMode {
    pub freq: ComplexFreq,
    pub role: ModeRole,
    pub label: String,
    /// Complex mode amplitude f̃(r) at named positions (z-component of
    /// the TM field; per-length units in 2-D, fixed by normalization).
    pub field_at: HashMap<String, Complex64>,
    pub refractive_index: Complex64,
}

impl BareMode {
    /// Checked constructor: a lossy resonator needs Im n ≥ 0, an
    /// amplifying one Im n < 0.
    pub fn new(
        freq: ComplexFreq,
        role: ModeRole,
        label: impl Into<String>,
        field_at: HashMap<String, Complex64>,
        refractive_index: Complex64,
    ) -> Result<Self> {
        let ok = match role {
            ModeRole::Loss => refractive_index.im >= 0.0,
            ModeRole::Gain => refractive_index.im < 0.0,
        };
        let label = label.into();
        if !ok {
            return Err(QnmError::ValidationError(format!(
                "mode '{label}': role {role:?} is inconsistent with Im n = {:.3e}",
                refractive_index.im
            )));
        }
        Ok(Self { freq, role, label, field_at, refractive_index })
    }

    /// Field value at a named position.
    pub fn field(&self, position: &str) -> Result<Complex64> {
        self.field_at.get(position).copied().ok_or_else(|| {
            QnmError::ValidationError(format!(
                "mode '{}' has no field sample at position '{position}'",
                self.label
            ))
        })
    }
}

/// CMT coupling parameters κ̃_LG, κ̃_GL (eV). No symmetry is assumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmtCoupling {
    pub kappa_lg: Complex64,
    pub kappa_gl: Complex64,
}

impl CmtCoupling {
    pub fn new(kappa_lg: Complex64, kappa_gl: Complex64) -> Self {
        Self { kappa_lg, kappa_gl }
    }
}

/// Two hybrid QNMs: frequencies, bare-mode expansion coefficients, and
/// raw (unsymmetrized) emitter couplings g̃_±.
#[derive(Debug, Clone)]
pub struct HybridSystem {
    pub freq_plus: ComplexFreq,
    pub freq_minus: ComplexFreq,
    /// Rows are hybrid {+,−}, columns bare {L,G}; each row satisfies the
    /// unconjugated normalization c_L² + c_G² = 1.
    pub coeffs: Array2<Complex64>,
    /// Raw coupling g̃_μ = −i √(ω_μ/2) · s · f̃_μ(r_a) (eV) per hybrid
    /// mode, with s = d/√(ħ ε₀) the lumped dipole scale.
    pub raw_couplings: [Complex64; 2],
}

impl HybridSystem {
    /// Hybridize two bare modes and evaluate the raw emitter couplings at
    /// a named position. `dipole_scale` is s = d/√(ħ ε₀), lumping the
    /// dipole moment and vacuum permittivity into one factor so that g̃
    /// comes out in eV for fields in the grid's units.
    pub fn from_bare(
        bare_l: &BareMode,
        bare_g: &BareMode,
        k: &CmtCoupling,
        dipole_scale: f64,
        position: &str,
    ) -> Result<Self> {
        let (wp, wm) = hybrid_frequencies(bare_l.freq, bare_g.freq, k);
        let fl = bare_l.field(position)?;
        let fg = bare_g.field(position)?;
        let mut coeffs = Array2::<Complex64>::zeros((2, 2));
        let mut raw = [Complex64::new(0.0, 0.0); 2];
        for (row, w) in [(0usize, wp), (1usize, wm)] {
            let (cl, cg) = hybrid_coefficients(w, bare_g.freq, k.kappa_gl)?;
            coeffs[(row, 0)] = cl;
            coeffs[(row, 1)] = cg;
            let f_hybrid = cl * fl + cg * fg;
            raw[row] = -Complex64::i() * (w.omega / 2.0).sqrt() * dipole_scale * f_hybrid;
        }
        Ok(Self { freq_plus: wp, freq_minus: wm, coeffs, raw_couplings: raw })
    }
}

/// The effective 2×2 CMT matrix M (see module docs).
pub fn cmt_matrix(wl: ComplexFreq, wg: ComplexFreq, k: &CmtCoupling) -> Array2<Complex64> {
    array![
        [wl.as_complex(), -k.kappa_lg],
        [-k.kappa_gl, wg.as_complex()]
    ]
}

/// Discriminant 4 κ_LG κ_GL + (ω̃_L − ω̃_G)² of the hybridization.
pub fn discriminant(wl: ComplexFreq, wg: ComplexFreq, k: &CmtCoupling) -> Complex64 {
    let d = wl.as_complex() - wg.as_complex();
    4.0 * k.kappa_lg * k.kappa_gl + d * d
}

/// Whether the system sits numerically at an exceptional point.
pub fn at_exceptional_point(wl: ComplexFreq, wg: ComplexFreq, k: &CmtCoupling) -> bool {
    let scale = (wl.as_complex() + wg.as_complex()).norm_sqr();
    discriminant(wl, wg, k).norm() < tol::EP_DISCRIMINANT_REL * scale
}

/// Hybrid eigenfrequencies
/// ω̃_± = (ω̃_L + ω̃_G)/2 ± √(4 κ_LG κ_GL + (ω̃_L − ω̃_G)²)/2,
/// principal branch, sorted so the first value has the larger real part
/// (larger imaginary part on a tie).
pub fn hybrid_frequencies(
    wl: ComplexFreq,
    wg: ComplexFreq,
    k: &CmtCoupling,
) -> (ComplexFreq, ComplexFreq) {
    let mean = 0.5 * (wl.as_complex() + wg.as_complex());
    let half_root = 0.5 * discriminant(wl, wg, k).sqrt();
    let a = mean + half_root;
    let b = mean - half_root;
    let a_first = (a.re, a.im) > (b.re, b.im);
    let (plus, minus) = if a_first { (a, b) } else { (b, a) };
    (ComplexFreq::from_complex(plus), ComplexFreq::from_complex(minus))
}

/// CMT coupling parameters from the unconjugated overlap integrals
/// ⟨⟨f̃_X|Δε̂_X|f̃_Y⟩⟩: κ_LG = (ω̃_G/2)·overlap_LG, κ_GL = (ω̃_L/2)·overlap_GL.
pub fn cmt_coupling(
    wl: ComplexFreq,
    wg: ComplexFreq,
    overlap_lg: Complex64,
    overlap_gl: Complex64,
) -> CmtCoupling {
    CmtCoupling {
        kappa_lg: 0.5 * wg.as_complex() * overlap_lg,
        kappa_gl: 0.5 * wl.as_complex() * overlap_gl,
    }
}

/// Expansion coefficients of one hybrid mode over the bare modes:
/// c_L = (ω̃_± − ω̃_G)/√((ω̃_± − ω̃_G)² + κ_GL²), c_G = −κ_GL/√(...),
/// satisfying the unconjugated normalization c_L² + c_G² = 1.
///
/// The square-root branch (a pure gauge: the coefficients enter every
/// observable quadratically) is fixed by Re c_L > 0, with Im c_L > 0 on
/// the boundary; a vanishing c_L keeps the principal branch.
///
/// A decoupled gain branch (κ_GL = 0 with ω̃_± = ω̃_G) is the bare gain
/// mode itself and yields (0, −1). At a genuine exceptional point the
/// denominator vanishes with κ_GL ≠ 0 (self-orthogonal eigenvector) and
/// `DegenerateHybrid` is returned.
pub fn hybrid_coefficients(
    w_pm: ComplexFreq,
    wg: ComplexFreq,
    kappa_gl: Complex64,
) -> Result<(Complex64, Complex64)> {
    let d = w_pm.as_complex() - wg.as_complex();
    let den_sq = d * d + kappa_gl * kappa_gl;
    let scale = w_pm.as_complex().norm_sqr();
    if den_sq.norm() < tol::DEGENERATE_HYBRID_REL * scale {
        if kappa_gl.norm_sqr() < tol::DEGENERATE_HYBRID_REL * scale {
            return Ok((Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)));
        }
        return Err(QnmError::DegenerateHybrid(den_sq.norm()));
    }
    let den = den_sq.sqrt();
    let (cl, cg) = (d / den, -kappa_gl / den);
    if cl.re < 0.0 || (cl.re == 0.0 && cl.im < 0.0) {
        Ok((-cl, -cg))
    } else {
        Ok((cl, cg))
    }
}

/// Which expansion of the Green function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenForm {
    /// Sum over hybrid poles: G = Σ_± A_±(ω) f̃_±(r) f̃_±(r0) with
    /// A_μ(ω) = ω/[2(ω̃_μ − ω)].
    HybridDiagonal,
    /// Non-diagonal form over bare-mode fields with the hybrid poles in
    /// the denominator (exact for reciprocal couplings κ_LG = κ_GL):
    ///
    /// ```text
    /// G = [ ω(ω̃_G−ω) f̃_L(r)f̃_L(r0) + ω κ_LG f̃_L(r)f̃_G(r0)
    ///     + ω κ_GL f̃_G(r)f̃_L(r0) + ω(ω̃_L−ω) f̃_G(r)f̃_G(r0) ]
    ///     / [ 2 (ω̃_+−ω)(ω̃_−−ω) ]
    /// ```
    BareNondiagonal,
}

fn check_pole(w: ComplexFreq, omega: f64) -> Result<()> {
    let dist = (w.as_complex() - Complex64::new(omega, 0.0)).norm();
    let scale = w.as_complex().norm().max(omega.abs());
    if dist < tol::POLE_REL * scale {
        return Err(QnmError::PoleHit(dist));
    }
    Ok(())
}

/// Scalar G_zz(r, r0, ω) of the two-mode system, with r and r0 given as
/// named positions carried by the bare modes.
///
/// The two forms agree identically (in exact arithmetic) for reciprocal
/// couplings; see [`GreenForm::BareNondiagonal`].
pub fn green_function(
    bare_l: &BareMode,
    bare_g: &BareMode,
    k: &CmtCoupling,
    r: &str,
    r0: &str,
    omega: f64,
    form: GreenForm,
) -> Result<Complex64> {
    let fl_r = bare_l.field(r)?;
    let fl_r0 = bare_l.field(r0)?;
    let fg_r = bare_g.field(r)?;
    let fg_r0 = bare_g.field(r0)?;
    let (wp, wm) = hybrid_frequencies(bare_l.freq, bare_g.freq, k);
    check_pole(wp, omega)?;
    check_pole(wm, omega)?;
    let w = Complex64::new(omega, 0.0);
    match form {
        GreenForm::HybridDiagonal => {
            let mut g = Complex64::new(0.0, 0.0);
            for wh in [wp, wm] {
                let (cl, cg) = hybrid_coefficients(wh, bare_g.freq, k.kappa_gl)?;
                let f_r = cl * fl_r + cg * fg_r;
                let f_r0 = cl * fl_r0 + cg * fg_r0;
                g += w / (2.0 * (wh.as_complex() - w)) * f_r * f_r0;
            }
            Ok(g)
        }
        GreenForm::BareNondiagonal => {
            let wl = bare_l.freq.as_complex();
            let wg = bare_g.freq.as_complex();
            let num = w * (wg - w) * fl_r * fl_r0
                + w * k.kappa_lg * fl_r * fg_r0
                + w * k.kappa_gl * fg_r * fl_r0
                + w * (wl - w) * fg_r * fg_r0;
            let den = 2.0 * (wp.as_complex() - w) * (wm.as_complex() - w);
            Ok(num / den)
        }
    }
}

/// Projected (normalized) local density of states at the emitter
/// position: ρ_a = Im[G(r_a, r_a, ω)]/Im G_B with the homogeneous
/// background included, i.e. ρ_a = 1 + Im[G_QNM]/Im G_B.
///
/// ρ_a < 0 is physically meaningful in gain-dominated regions and is not
/// an error.
pub fn projected_ldos(
    bare_l: &BareMode,
    bare_g: &BareMode,
    k: &CmtCoupling,
    omega: f64,
    emitter: &EmitterParams,
    im_gb: f64,
    form: GreenForm,
) -> Result<f64> {
    if im_gb <= 0.0 {
        return Err(QnmError::NonPositiveBackground(im_gb));
    }
    let g = green_function(bare_l, bare_g, k, &emitter.position_label, &emitter.position_label, omega, form)?;
    Ok(1.0 + g.im / im_gb)
}
