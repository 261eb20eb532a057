// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Symmetrization of the quantized hybrid modes.
//!
//! Quantizing lossy/amplifying QNMs produces non-bosonic mode operators
//! whose commutators are fixed by overlap ("symmetrization") matrices:
//!
//! ```text
//! S^L_{μη} = √(ω_μ ω_η)/[i(ω̃_μ − ω̃*_η)] · (I^{nrad,p}_{μη} + sym. radiative part)
//! S^G_{μη} = √(ω_μ ω_η)/[i(ω̃_μ − ω̃*_η)] · I^{G,p}_{μη}
//! S′       = S^L − conj(S^G)          (entrywise; the unified commutator)
//! ```
//!
//! A symmetrizing (Bogoliubov-like) transformation with S^{±1/2} then
//! yields true bosonic operators and the frequency matrices
//!
//! ```text
//! χ^L = S^{L,−1/2} diag(ω̃_ν) S^{L,1/2},    χ^G = S^{G,−1/2} diag(ω̃*_ν) S^{G,1/2},
//! ```
//!
//! split into Hermitian parts χ⁺ (coherent evolution) and positive parts
//! χ⁻ (dissipation rates). The unified picture replaces S^{L/G} by S′ and
//! carries separate loss/gain rate matrices built from Hadamard products
//! (see [`chi_unified`]). All energies in eV.
//!
//! Ref: H.-P. Breuer & F. Petruccione, "The Theory of Open Quantum
//!      Systems" (2002), Ch. 3 (structure of generators).

use ndarray::Array2;
use num_complex::Complex64;

use crate::cmt::ComplexFreq;
use crate::error::{QnmError, Result};
pub use crate::linalg::principal_sqrt;
use crate::linalg::{dagger, eigh_ascending, hermitian_inverse, hermitize, real_part_checked};
use crate::tol;

/// Two-level emitter parameters: transition energy ω_a, background decay
/// Γ^B (both eV), raw mode couplings g̃_μ, and the named grid position.
#[derive(Debug, Clone)]
pub struct EmitterParams {
    pub omega_a: f64,
    pub gamma_b: f64,
    pub raw_couplings: Vec<Complex64>,
    pub position_label: String,
}

impl EmitterParams {
    pub fn new(
        omega_a: f64,
        gamma_b: f64,
        raw_couplings: Vec<Complex64>,
        position_label: impl Into<String>,
    ) -> Result<Self> {
        if !(omega_a > 0.0) || !omega_a.is_finite() {
            return Err(QnmError::ValidationError(format!(
                "emitter energy must be positive, got ω_a = {omega_a}"
            )));
        }
        if gamma_b < 0.0 || !gamma_b.is_finite() {
            return Err(QnmError::ValidationError(format!(
                "background decay must be ≥ 0, got Γ_B = {gamma_b}"
            )));
        }
        Ok(Self { omega_a, gamma_b, raw_couplings, position_label: position_label.into() })
    }
}

/// Which mode operators a symmetrized quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// Loss oscillators of the separated picture (S^L, reversed index
    /// order in the coupling transform).
    SeparatedLoss,
    /// Gain oscillators of the separated picture (S^G, direct order).
    SeparatedGain,
    /// Unified oscillators (S′, same index order as the loss case).
    Unified,
}

/// χ matrix of one separated picture with its Hermitian split.
#[derive(Debug, Clone)]
pub struct ChiSet {
    pub chi: Array2<Complex64>,
    /// χ⁺ = (χ + χ†)/2: mode energies.
    pub plus: Array2<Complex64>,
    /// χ⁻: decay-rate matrix, defined so χ = χ⁺ − iχ⁻ (loss) or
    /// χ = χ⁺ + iχ⁻ (gain). Positive semidefinite for a valid model.
    pub minus: Array2<Complex64>,
}

/// The three matrices of the unified picture.
#[derive(Debug, Clone)]
pub struct ChiUnified {
    /// χ′⁺: Hermitian energy matrix.
    pub plus: Array2<Complex64>,
    /// χ′^{L−}: loss-rate matrix.
    pub l_minus: Array2<Complex64>,
    /// χ′^{G−}: gain-rate matrix.
    pub g_minus: Array2<Complex64>,
}

/// Eigenvalue summary of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DefinitenessReport {
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// λ_min/λ_max (NaN when λ_max ≤ 0).
    pub min_over_max: f64,
    /// λ_min > 0.
    pub positive: bool,
}

fn check_square(label: &str, m: &Array2<Complex64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "{label} is {}×{}, expected {n}×{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_freqs(freqs: &[ComplexFreq]) -> Result<()> {
    for (i, f) in freqs.iter().enumerate() {
        f.require_decaying(&format!("hybrid {i}"))?;
    }
    Ok(())
}

/// √(ω_μ ω_η) / [i(ω̃_μ − ω̃*_η)]; on the diagonal this is ω_μ/(2γ_μ).
fn s_prefactor(freqs: &[ComplexFreq], mu: usize, eta: usize) -> Complex64 {
    let num = (freqs[mu].omega * freqs[eta].omega).sqrt();
    let den = Complex64::i() * (freqs[mu].as_complex() - freqs[eta].as_complex().conj());
    num / den
}

/// Loss symmetrization matrix from the nonradiative pole overlap and an
/// optional radiative part (symmetrized as I^{rad}_{μη} + conj(I^{rad}_{ημ})).
pub fn s_loss(
    i_nrad: &Array2<Complex64>,
    i_rad: Option<&Array2<Complex64>>,
    freqs: &[ComplexFreq],
) -> Result<Array2<Complex64>> {
    let n = freqs.len();
    check_freqs(freqs)?;
    check_square("I_nrad", i_nrad, n)?;
    if let Some(r) = i_rad {
        check_square("I_rad", r, n)?;
    }
    let mut s = Array2::<Complex64>::zeros((n, n));
    for mu in 0..n {
        for eta in 0..n {
            let mut overlap = i_nrad[(mu, eta)];
            if let Some(r) = i_rad {
                overlap += r[(mu, eta)] + r[(eta, mu)].conj();
            }
            s[(mu, eta)] = s_prefactor(freqs, mu, eta) * overlap;
        }
    }
    hermitize("S_L", &s)
}

/// Gain symmetrization matrix from the gain-medium pole overlap. The
/// gain overlap conjugates the first field rather than the second, so
/// the pole sits on the opposite amplitude: the prefactor here is
/// √(ω_μω_η)/[i(ω̃_η − ω̃*_μ)], the mirror of the loss orientation.
/// Diagonals are unaffected; getting the off-diagonal orientation wrong
/// silently breaks the LDOS identity Γ^loss − Γ^gain = 2s²·Im G.
pub fn s_gain(i_gain: &Array2<Complex64>, freqs: &[ComplexFreq]) -> Result<Array2<Complex64>> {
    let n = freqs.len();
    check_freqs(freqs)?;
    check_square("I_gain", i_gain, n)?;
    let mut s = Array2::<Complex64>::zeros((n, n));
    for mu in 0..n {
        for eta in 0..n {
            s[(mu, eta)] = s_prefactor(freqs, eta, mu) * i_gain[(mu, eta)];
        }
    }
    hermitize("S_G", &s)
}

/// Unified commutator matrix S′ = S^L − conj(S^G) (entrywise conjugate;
/// for Hermitian S^G this equals S^L − (S^G)ᵀ).
pub fn s_unified(s_l: &Array2<Complex64>, s_g: &Array2<Complex64>) -> Array2<Complex64> {
    s_l - &s_g.mapv(|z| z.conj())
}

/// Eigenvalue report of a Hermitian matrix (input is hermitized first;
/// a strongly non-Hermitian input is an error).
pub fn definiteness_report(m: &Array2<Complex64>, label: &str) -> Result<DefinitenessReport> {
    let h = hermitize(label, m)?;
    let (vals, _) = eigh_ascending(&h)?;
    let eigenvalues = vals.to_vec();
    let min = eigenvalues[0];
    let max = *eigenvalues.last().expect("non-empty spectrum");
    let min_over_max = if max > 0.0 { min / max } else { f64::NAN };
    Ok(DefinitenessReport { eigenvalues, min_over_max, positive: min > 0.0 })
}

/// Thermal-like vacuum occupation of the unified modes,
/// n^vac = tr(S^G · S′^{−1}).
pub fn vacuum_occupation(s_g: &Array2<Complex64>, s_prime: &Array2<Complex64>) -> Result<f64> {
    let inv = hermitian_inverse(s_prime, tol::SINGULAR_S_REL)?;
    let prod = s_g.dot(&inv);
    let tr: Complex64 = (0..prod.nrows()).map(|i| prod[(i, i)]).sum();
    let scale = crate::linalg::fro_norm(&prod).max(1.0);
    real_part_checked("tr(S_G S'^-1)", tr, scale)
}

fn freq_diag(freqs: &[ComplexFreq], conjugated: bool) -> Array2<Complex64> {
    let n = freqs.len();
    let mut d = Array2::<Complex64>::zeros((n, n));
    for (i, f) in freqs.iter().enumerate() {
        let w = f.as_complex();
        d[(i, i)] = if conjugated { w.conj() } else { w };
    }
    d
}

/// Separated-picture χ matrix: χ = S^{−1/2} diag(ω̃_ν) S^{1/2} for the
/// loss modes, with conjugated frequencies for the gain modes. Requires
/// the corresponding S to be positive definite.
pub fn chi_separated(
    s: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    which: Picture,
) -> Result<ChiSet> {
    check_freqs(freqs)?;
    check_square("S", s, freqs.len())?;
    let (conjugated, label, minus_sign) = match which {
        Picture::SeparatedLoss => (false, "S_L", Complex64::i()),
        Picture::SeparatedGain => (true, "S_G", -Complex64::i()),
        Picture::Unified => {
            return Err(QnmError::ValidationError(
                "chi_separated applies to the separated pictures; use chi_unified".into(),
            ))
        }
    };
    let (half, inv_half) = principal_sqrt(label, s)?;
    let chi = inv_half.dot(&freq_diag(freqs, conjugated)).dot(&half);
    let chi_dag = dagger(&chi);
    let plus = (&chi + &chi_dag).mapv(|z| 0.5 * z);
    let minus = (&chi - &chi_dag).mapv(|z| 0.5 * minus_sign * z);
    Ok(ChiSet { chi, plus, minus })
}

/// Unified-picture matrices via Hadamard products:
///
/// ```text
/// χ′⁺      = ½  S′^{−1/2} [ (ω̃_ν + ω̃*_ν′) ∘ S′  ]       S′^{−1/2}
/// χ′^{L−}  = i/2 S′^{−1/2} [ (ω̃_ν − ω̃*_ν′) ∘ S^L ]       S′^{−1/2}
/// χ′^{G−}  = i/2 S′^{−1/2} [ (ω̃_ν − ω̃*_ν′) ∘ S^G_{ν′ν} ] S′^{−1/2}
/// ```
///
/// These satisfy χ′^{L−} − χ′^{G−} = i(χ′ − χ′†)/2 with
/// χ′ = S′^{−1/2} diag(ω̃_ν) S′^{1/2}, and χ′⁺ is its Hermitian part.
pub fn chi_unified(
    s_l: &Array2<Complex64>,
    s_g: &Array2<Complex64>,
    s_prime: &Array2<Complex64>,
    freqs: &[ComplexFreq],
) -> Result<ChiUnified> {
    let n = freqs.len();
    check_freqs(freqs)?;
    check_square("S_L", s_l, n)?;
    check_square("S_G", s_g, n)?;
    check_square("S'", s_prime, n)?;
    let (_, inv_half) = principal_sqrt("S'", s_prime)?;
    let w: Vec<Complex64> = freqs.iter().map(|f| f.as_complex()).collect();
    let mut plus_core = Array2::<Complex64>::zeros((n, n));
    let mut l_core = Array2::<Complex64>::zeros((n, n));
    let mut g_core = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let sum = w[i] + w[j].conj();
            let diff = w[i] - w[j].conj();
            plus_core[(i, j)] = 0.5 * sum * s_prime[(i, j)];
            l_core[(i, j)] = 0.5 * Complex64::i() * diff * s_l[(i, j)];
            g_core[(i, j)] = 0.5 * Complex64::i() * diff * s_g[(j, i)];
        }
    }
    Ok(ChiUnified {
        plus: inv_half.dot(&plus_core).dot(&inv_half),
        l_minus: inv_half.dot(&l_core).dot(&inv_half),
        g_minus: inv_half.dot(&g_core).dot(&inv_half),
    })
}

/// Full (non-Hermitian) unified frequency matrix
/// χ′ = S′^{−1/2} diag(ω̃_ν) S′^{1/2}.
pub fn chi_unified_full(
    s_prime: &Array2<Complex64>,
    freqs: &[ComplexFreq],
) -> Result<Array2<Complex64>> {
    check_freqs(freqs)?;
    check_square("S'", s_prime, freqs.len())?;
    let (half, inv_half) = principal_sqrt("S'", s_prime)?;
    Ok(inv_half.dot(&freq_diag(freqs, false)).dot(&half))
}

/// Excess-gain scalar C^gain = tr(χ′^{L+}) − tr(χ′⁺), where χ′^{L+} is
/// the Hadamard energy matrix built on S^L alone. Reported as a
/// diagnostic; it does not enter any generator.
pub fn c_gain(
    s_l: &Array2<Complex64>,
    s_prime: &Array2<Complex64>,
    freqs: &[ComplexFreq],
) -> Result<f64> {
    let n = freqs.len();
    check_freqs(freqs)?;
    check_square("S_L", s_l, n)?;
    check_square("S'", s_prime, n)?;
    let (_, inv_half) = principal_sqrt("S'", s_prime)?;
    let w: Vec<Complex64> = freqs.iter().map(|f| f.as_complex()).collect();
    let mut diff_core = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            // tr(χ′^{L+}) − tr(χ′⁺) needs only S^L − S′ in the Hadamard core.
            diff_core[(i, j)] = 0.5 * (w[i] + w[j].conj()) * (s_l[(i, j)] - s_prime[(i, j)]);
        }
    }
    let m = inv_half.dot(&diff_core).dot(&inv_half);
    let tr: Complex64 = (0..n).map(|i| m[(i, i)]).sum();
    let scale = crate::linalg::fro_norm(&m).max(freqs[0].omega);
    real_part_checked("C_gain", tr, scale)
}

/// Symmetrized emitter couplings. Index order follows the picture:
///
/// ```text
/// loss/unified: g̃^s_μ = Σ_η [S^{1/2}]_{ημ} √(ω_η/ω_μ) g̃_η
/// gain:         g̃^s_μ = Σ_η [S^{1/2}]_{μη} √(ω_η/ω_μ) g̃_η
/// ```
pub fn symmetrized_couplings(
    raw: &[Complex64],
    s_half: &Array2<Complex64>,
    freqs: &[ComplexFreq],
    picture: Picture,
) -> Result<Vec<Complex64>> {
    let n = freqs.len();
    check_freqs(freqs)?;
    check_square("S^{1/2}", s_half, n)?;
    if raw.len() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "{} raw couplings for {n} modes",
            raw.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for mu in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for eta in 0..n {
            let weight = match picture {
                Picture::SeparatedLoss | Picture::Unified => s_half[(eta, mu)],
                Picture::SeparatedGain => s_half[(mu, eta)],
            };
            acc += weight * (freqs[eta].omega / freqs[mu].omega).sqrt() * raw[eta];
        }
        out[mu] = acc;
    }
    Ok(out)
}

/// The full set of symmetrization data for one hybrid system.
#[derive(Debug, Clone)]
pub struct SymmSet {
    pub freqs: Vec<ComplexFreq>,
    pub s_l: Array2<Complex64>,
    /// Zero matrix when the system has no gain medium.
    pub s_g: Array2<Complex64>,
    pub s_prime: Array2<Complex64>,
    pub has_gain: bool,
}

impl SymmSet {
    /// Assemble from overlap integrals (the computational route).
    pub fn build_from_overlaps(
        i_nrad: &Array2<Complex64>,
        i_rad: Option<&Array2<Complex64>>,
        i_gain: Option<&Array2<Complex64>>,
        freqs: &[ComplexFreq],
    ) -> Result<Self> {
        let s_l = s_loss(i_nrad, i_rad, freqs)?;
        let (s_g, has_gain) = match i_gain {
            Some(ig) => (s_gain(ig, freqs)?, true),
            None => (Array2::zeros((freqs.len(), freqs.len())), false),
        };
        let s_prime = s_unified(&s_l, &s_g);
        Ok(Self { freqs: freqs.to_vec(), s_l, s_g, s_prime, has_gain })
    }

    /// Assemble from externally supplied S matrices (the data route, used
    /// for published tables and CLI input). Inputs must be Hermitian to
    /// the library tolerance.
    pub fn from_s_matrices(
        s_l: Array2<Complex64>,
        s_g: Option<Array2<Complex64>>,
        freqs: &[ComplexFreq],
    ) -> Result<Self> {
        let n = freqs.len();
        check_freqs(freqs)?;
        check_square("S_L", &s_l, n)?;
        let s_l = hermitize("S_L", &s_l)?;
        let (s_g, has_gain) = match s_g {
            Some(g) => {
                check_square("S_G", &g, n)?;
                (hermitize("S_G", &g)?, true)
            }
            None => (Array2::zeros((n, n)), false),
        };
        let s_prime = s_unified(&s_l, &s_g);
        Ok(Self { freqs: freqs.to_vec(), s_l, s_g, s_prime, has_gain })
    }

    pub fn n_modes(&self) -> usize {
        self.freqs.len()
    }

    pub fn chi_loss(&self) -> Result<ChiSet> {
        chi_separated(&self.s_l, &self.freqs, Picture::SeparatedLoss)
    }

    /// Gain-mode χ; an all-zero S^G (no gain medium) has no gain
    /// oscillators and is rejected here.
    pub fn chi_gain(&self) -> Result<ChiSet> {
        if !self.has_gain {
            return Err(QnmError::ValidationError(
                "system has no gain medium: no separated gain picture exists".into(),
            ));
        }
        chi_separated(&self.s_g, &self.freqs, Picture::SeparatedGain)
    }

    pub fn chi_unified(&self) -> Result<ChiUnified> {
        chi_unified(&self.s_l, &self.s_g, &self.s_prime, &self.freqs)
    }

    /// Symmetrized couplings for one picture. Without a gain medium the
    /// separated-gain couplings are structurally zero.
    pub fn couplings(&self, raw: &[Complex64], picture: Picture) -> Result<Vec<Complex64>> {
        let s = match picture {
            Picture::SeparatedLoss => &self.s_l,
            Picture::SeparatedGain => {
                if !self.has_gain {
                    return Ok(vec![Complex64::new(0.0, 0.0); self.n_modes()]);
                }
                &self.s_g
            }
            Picture::Unified => &self.s_prime,
        };
        let label = match picture {
            Picture::SeparatedLoss => "S_L",
            Picture::SeparatedGain => "S_G",
            Picture::Unified => "S'",
        };
        let (half, _) = principal_sqrt(label, s)?;
        symmetrized_couplings(raw, &half, &self.freqs, picture)
    }

    pub fn vacuum_occupation(&self) -> Result<f64> {
        if !self.has_gain {
            return Ok(0.0);
        }
        vacuum_occupation(&self.s_g, &self.s_prime)
    }

    pub fn c_gain(&self) -> Result<f64> {
        if !self.has_gain {
            return Ok(0.0);
        }
        c_gain(&self.s_l, &self.s_prime, &self.freqs)
    }

    pub fn report_loss(&self) -> Result<DefinitenessReport> {
        definiteness_report(&self.s_l, "S_L")
    }

    pub fn report_gain(&self) -> Result<DefinitenessReport> {
        definiteness_report(&self.s_g, "S_G")
    }

    pub fn report_prime(&self) -> Result<DefinitenessReport> {
        definiteness_report(&self.s_prime, "S'")
    }
}
