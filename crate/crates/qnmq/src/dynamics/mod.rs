// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad master equations for the quantized hybrid modes.
//!
//! All three model flavors share one generator structure,
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_c Σ_{μη} R^c_{μη} (2 K_η ρ K†_μ − K†_μ K_η ρ − ρ K†_μ K_η),
//! ```
//!
//! with Hermitian, positive-semidefinite rate matrices R^c. A lowering
//! channel uses K = a; a raising (pump) channel is the same form with
//! K = a† and R → conj(R). The right-hand side is evaluated in regrouped
//! form, dρ/dt = Aρ + (Aρ)† + Σ_c 2 Σ_μ (Σ_η R_{μη} K_η ρ) K†_μ with
//! A = −iH − Σ_c Σ_{μη} R_{μη} K†_μ K_η, which keeps Hermiticity exact.
//!
//! Ref: H.-P. Breuer & F. Petruccione, "The Theory of Open Quantum
//!      Systems" (2002), Ch. 3.

pub mod fock;
pub mod rk45;
pub mod steady;

pub use fock::HilbertSpec;
pub use rk45::StepperStats;
pub use steady::{steady_state, SteadyInfo, SteadyMethod};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{QnmError, Result};
use crate::linalg::{dagger, eigh_ascending, eigvalsh, fro_norm, hermiticity_defect, hermitize};
use crate::symm::{EmitterParams, Picture, SymmSet};
use crate::tol;

/// How a dissipation channel couples to its mode operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Relaxation through the lowering operators (loss).
    Lower,
    /// Pumping through the raising operators (linear gain).
    Raise,
    /// Two-level-system relaxation (σ⁻).
    TlsLower,
}

/// One dissipation channel: a Hermitian rate matrix over a set of mode
/// lowering operators.
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: String,
    pub rate: Array2<Complex64>,
    /// Lowering operators the channel acts through (raising channels
    /// dagger them internally).
    pub ops: Vec<Array2<Complex64>>,
    pub kind: ChannelKind,
}

impl Channel {
    pub fn new(
        label: impl Into<String>,
        rate: Array2<Complex64>,
        ops: Vec<Array2<Complex64>>,
        kind: ChannelKind,
    ) -> Self {
        Self { label: label.into(), rate, ops, kind }
    }

    /// Effective (rate, jump) pair of the lower-form evaluator: raising
    /// channels conjugate the rate matrix and dagger the operators.
    fn resolved(&self) -> (Array2<Complex64>, Vec<Array2<Complex64>>) {
        match self.kind {
            ChannelKind::Lower | ChannelKind::TlsLower => (self.rate.clone(), self.ops.clone()),
            ChannelKind::Raise => (
                self.rate.mapv(|z| z.conj()),
                self.ops.iter().map(dagger).collect(),
            ),
        }
    }
}

/// A fully assembled master equation with precomputed evaluation data.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub spec: HilbertSpec,
    pub hamiltonian: Array2<Complex64>,
    pub channels: Vec<Channel>,
    /// Diagonal charge operator generating the rotating frame
    /// (H → H − ω_r Q leaves every dissipator invariant).
    pub charge: Array2<Complex64>,
    /// False when the model sits at or above its instability threshold;
    /// steady-state solvers refuse such models.
    pub stable: bool,
    pub threshold_detail: String,
    /// A = −iH − Σ_c C_c.
    a_op: Array2<Complex64>,
    a_dag: Array2<Complex64>,
    /// Per channel, per μ: (Σ_η R_{μη} K_η, K†_μ).
    jump_pre: Vec<Vec<(Array2<Complex64>, Array2<Complex64>)>>,
}

impl LindbladModel {
    /// Validate inputs and precompute the regrouped evaluation operators.
    pub fn assemble(
        spec: HilbertSpec,
        hamiltonian: Array2<Complex64>,
        channels: Vec<Channel>,
        charge: Array2<Complex64>,
        stable: bool,
        threshold_detail: impl Into<String>,
    ) -> Result<Self> {
        spec.validate()?;
        let dim = spec.dim();
        if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
            return Err(QnmError::DimensionMismatch(format!(
                "Hamiltonian is {}×{}, Hilbert space has dimension {dim}",
                hamiltonian.nrows(),
                hamiltonian.ncols()
            )));
        }
        let hamiltonian = hermitize("H", &hamiltonian)?;
        let mut channels_checked = Vec::with_capacity(channels.len());
        for ch in channels {
            let n = ch.ops.len();
            if ch.rate.nrows() != n || ch.rate.ncols() != n {
                return Err(QnmError::DimensionMismatch(format!(
                    "channel '{}': rate matrix {}×{} for {n} operators",
                    ch.label,
                    ch.rate.nrows(),
                    ch.rate.ncols()
                )));
            }
            for (i, op) in ch.ops.iter().enumerate() {
                if op.nrows() != dim || op.ncols() != dim {
                    return Err(QnmError::DimensionMismatch(format!(
                        "channel '{}': operator {i} is {}×{}, expected {dim}×{dim}",
                        ch.label,
                        op.nrows(),
                        op.ncols()
                    )));
                }
            }
            let rate = hermitize(&format!("rate[{}]", ch.label), &ch.rate)?;
            channels_checked.push(Channel { rate, ..ch });
        }

        let mut a_op = hamiltonian.mapv(|z| -Complex64::i() * z);
        let mut jump_pre = Vec::with_capacity(channels_checked.len());
        for ch in &channels_checked {
            let (rate, ks) = ch.resolved();
            let n = ks.len();
            let k_dags: Vec<Array2<Complex64>> = ks.iter().map(dagger).collect();
            let mut per_mu = Vec::with_capacity(n);
            for mu in 0..n {
                let mut m = Array2::<Complex64>::zeros((dim, dim));
                for (eta, k_eta) in ks.iter().enumerate() {
                    let r = rate[(mu, eta)];
                    if r.norm() > 0.0 {
                        m.scaled_add(r, k_eta);
                    }
                }
                // C_c = Σ_μ K†_μ M_μ accumulates into A.
                a_op = a_op - k_dags[mu].dot(&m);
                per_mu.push((m, k_dags[mu].clone()));
            }
            jump_pre.push(per_mu);
        }
        let a_dag = dagger(&a_op);
        Ok(Self {
            spec,
            hamiltonian,
            channels: channels_checked,
            charge,
            stable,
            threshold_detail: threshold_detail.into(),
            a_op,
            a_dag,
            jump_pre,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// dρ/dt in the regrouped form. The adjoint factor must be applied as
    /// a right-multiplication by A†, never as `(Aρ)†`: the latter agrees
    /// on Hermitian ρ but is antilinear, so the roundoff-populated
    /// anti-Hermitian sector would evolve under a different flow — one
    /// with anti-damped directions that amplify the noise exponentially.
    pub fn rhs(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut d = self.a_op.dot(rho) + rho.dot(&self.a_dag);
        for per_mu in &self.jump_pre {
            for (m, k_dag) in per_mu {
                let t = m.dot(rho).dot(k_dag);
                d.scaled_add(Complex64::new(2.0, 0.0), &t);
            }
        }
        d
    }

    /// Reference evaluator that first diagonalizes every rate matrix into
    /// scalar Lindblad operators L_k = Σ_η conj(v_k[η]) K_η. Slower;
    /// used to cross-check [`Self::rhs`].
    pub fn rhs_diagonalized(&self, rho: &Array2<Complex64>) -> Result<Array2<Complex64>> {
        let h_rho = self.hamiltonian.dot(rho);
        let rho_h = rho.dot(&self.hamiltonian);
        let mut d = (&h_rho - &rho_h).mapv(|z| -Complex64::i() * z);
        for ch in &self.channels {
            let (rate, ks) = ch.resolved();
            let (vals, vecs) = eigh_ascending(&rate)?;
            for (kidx, lam) in vals.iter().enumerate() {
                if lam.abs() == 0.0 {
                    continue;
                }
                let mut l = Array2::<Complex64>::zeros(rho.raw_dim());
                for (eta, k_eta) in ks.iter().enumerate() {
                    l.scaled_add(vecs[(eta, kidx)].conj(), k_eta);
                }
                let l_dag = dagger(&l);
                let ldl = l_dag.dot(&l);
                let jump = l.dot(rho).dot(&l_dag);
                let anti = ldl.dot(rho) + rho.dot(&ldl);
                d.scaled_add(Complex64::new(2.0 * lam, 0.0), &jump);
                d.scaled_add(Complex64::new(-lam, 0.0), &anti);
            }
        }
        Ok(d)
    }

    /// Refuse models at or above their instability threshold.
    pub fn require_stable(&self) -> Result<()> {
        if !self.stable {
            return Err(QnmError::AboveThreshold(self.threshold_detail.clone()));
        }
        Ok(())
    }

    /// Smallest strictly positive diagonal rate, used to scale
    /// convergence windows.
    pub fn min_decay_scale(&self) -> f64 {
        let mut min = f64::INFINITY;
        for ch in &self.channels {
            for i in 0..ch.rate.nrows() {
                let r = ch.rate[(i, i)].re;
                if r > 0.0 {
                    min = min.min(r);
                }
            }
        }
        if min.is_finite() {
            min
        } else {
            1e-6
        }
    }
}

/// Free-function form of the generator evaluation.
pub fn lindblad_rhs(model: &LindbladModel, rho: &Array2<Complex64>) -> Array2<Complex64> {
    model.rhs(rho)
}

/// ⟨O⟩ = tr(O ρ).
pub fn expectation(op: &Array2<Complex64>, rho: &Array2<Complex64>) -> Complex64 {
    let n = op.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    acc
}

/// Health summary of a density matrix.
#[derive(Debug, Clone, Copy)]
pub struct DensityReport {
    pub trace_deviation: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

/// Eigenvalue-level check of a density matrix.
pub fn density_report(rho: &Array2<Complex64>) -> Result<DensityReport> {
    let tr: Complex64 = (0..rho.nrows()).map(|i| rho[(i, i)]).sum();
    let herm = hermiticity_defect(rho);
    let symm = (rho + &dagger(rho)).mapv(|z| 0.5 * z);
    let vals = eigvalsh(&symm)?;
    Ok(DensityReport {
        trace_deviation: (tr - Complex64::new(1.0, 0.0)).norm(),
        hermiticity_defect: herm,
        min_eigenvalue: vals[0],
    })
}

/// Validate an input state: unit trace, Hermitian, eigenvalues above the
/// numerical floor.
pub fn validate_density(rho: &Array2<Complex64>, dim: usize) -> Result<DensityReport> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(QnmError::DimensionMismatch(format!(
            "state is {}×{}, expected {dim}×{dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let report = density_report(rho)?;
    if report.trace_deviation > tol::RHO_TRACE_TOL {
        return Err(QnmError::ValidationError(format!(
            "state trace deviates from 1 by {:.3e}",
            report.trace_deviation
        )));
    }
    if report.hermiticity_defect > tol::RHO_HERMITICITY_TOL {
        return Err(QnmError::ValidationError(format!(
            "state is not Hermitian (defect {:.3e})",
            report.hermiticity_defect
        )));
    }
    if report.min_eigenvalue < tol::RHO_EIGENVALUE_FLOOR {
        return Err(QnmError::ValidationError(format!(
            "state has eigenvalue {:.3e} below the physical floor",
            report.min_eigenvalue
        )));
    }
    Ok(report)
}

/// Map a model into the frame rotating at ω_r: H → H − ω_r Q. All
/// dissipators are invariant because every jump operator changes the
/// charge Q by exactly one quantum (the phases cancel in each R-weighted
/// pair).
pub fn rotating_frame(model: &LindbladModel, omega_r: f64) -> Result<LindbladModel> {
    let h = &model.hamiltonian - &model.charge.mapv(|z| omega_r * z);
    LindbladModel::assemble(
        model.spec.clone(),
        h,
        model.channels.clone(),
        model.charge.clone(),
        model.stable,
        model.threshold_detail.clone(),
    )
}

/// Options for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Named operators whose expectations are recorded at every sample.
    pub observables: Vec<(String, Array2<Complex64>)>,
    /// Number of evenly spaced samples including both endpoints (≥ 2).
    pub n_samples: usize,
    /// Full positivity check every this many accepted steps (0 disables
    /// periodic checks; the final state is always checked).
    pub positivity_stride: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: tol::RTOL_DEFAULT,
            atol: tol::ATOL_DEFAULT,
            observables: Vec::new(),
            n_samples: 2,
            positivity_stride: 25,
        }
    }
}

/// Time-domain result.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observable_names: Vec<String>,
    /// `expectations[sample][observable]`.
    pub expectations: Vec<Vec<Complex64>>,
    pub final_rho: Array2<Complex64>,
    pub stats: StepperStats,
    pub min_eigenvalue_seen: f64,
}

/// Integrate the master equation from `rho0` to `t_end` (eV⁻¹ units of
/// time), sampling observables on a uniform grid and enforcing the
/// density-matrix contracts along the way.
pub fn evolve(
    model: &LindbladModel,
    rho0: &Array2<Complex64>,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(QnmError::ValidationError(format!(
            "evolution horizon must be positive, got {t_end}"
        )));
    }
    validate_density(rho0, model.dim())?;
    let n_samples = opts.n_samples.max(2);
    let times: Vec<f64> = (0..n_samples)
        .map(|i| t_end * i as f64 / (n_samples - 1) as f64)
        .collect();

    let names: Vec<String> = opts.observables.iter().map(|(n, _)| n.clone()).collect();
    let record = |rho: &Array2<Complex64>| -> Vec<Complex64> {
        opts.observables.iter().map(|(_, op)| expectation(op, rho)).collect()
    };

    let mut expectations = vec![record(rho0)];
    let mut rho = rho0.clone();
    let mut stats = StepperStats::default();
    let mut min_eig_seen = f64::INFINITY;
    let mut since_check = 0usize;

    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (next, seg_stats) = rk45::integrate_adaptive(
            |y| model.rhs(y),
            t0,
            &rho,
            t1,
            opts.rtol,
            opts.atol,
            // Only accepted steps reach the observer, so rejected trial
            // states never alarm the contract checks.
            |t, y| {
                since_check += 1;
                if opts.positivity_stride > 0 && since_check >= opts.positivity_stride {
                    since_check = 0;
                    let report = density_report(y)?;
                    min_eig_seen = min_eig_seen.min(report.min_eigenvalue);
                    if report.min_eigenvalue < tol::POSITIVITY_HARD_FLOOR {
                        return Err(QnmError::NonPhysicalState {
                            t,
                            min_eigenvalue: report.min_eigenvalue,
                        });
                    }
                    if report.trace_deviation > tol::RHO_TRACE_TOL {
                        return Err(QnmError::NoConvergence(format!(
                            "trace drifted by {:.3e} at t = {t:.6e}",
                            report.trace_deviation
                        )));
                    }
                }
                Ok(())
            },
        )?;
        rho = next;
        stats.accepted += seg_stats.accepted;
        stats.rejected += seg_stats.rejected;
        stats.rhs_evals += seg_stats.rhs_evals;
        stats.final_step = seg_stats.final_step;
        expectations.push(record(&rho));
    }

    let final_report = density_report(&rho)?;
    min_eig_seen = min_eig_seen.min(final_report.min_eigenvalue);
    if final_report.min_eigenvalue < tol::POSITIVITY_HARD_FLOOR {
        return Err(QnmError::NonPhysicalState {
            t: t_end,
            min_eigenvalue: final_report.min_eigenvalue,
        });
    }
    if final_report.trace_deviation > tol::RHO_TRACE_TOL {
        return Err(QnmError::NoConvergence(format!(
            "trace drifted by {:.3e} over the full horizon",
            final_report.trace_deviation
        )));
    }
    Ok(Trajectory {
        times,
        observable_names: names,
        expectations,
        final_rho: rho,
        stats,
        min_eigenvalue_seen: min_eig_seen,
    })
}

fn quadratic_block(
    coef: &Array2<Complex64>,
    ops: &[Array2<Complex64>],
    dim: usize,
) -> Array2<Complex64> {
    let mut h = Array2::<Complex64>::zeros((dim, dim));
    let dags: Vec<Array2<Complex64>> = ops.iter().map(dagger).collect();
    for mu in 0..ops.len() {
        for eta in 0..ops.len() {
            let cmat = coef[(mu, eta)];
            if cmat.norm() > 0.0 {
                h.scaled_add(cmat, &dags[mu].dot(&ops[eta]));
            }
        }
    }
    h
}

fn charge_operator(spec: &HilbertSpec, osc_signs: &[f64]) -> Array2<Complex64> {
    let dim = spec.dim();
    let mut q = Array2::<Complex64>::zeros((dim, dim));
    for (i, &s) in osc_signs.iter().enumerate() {
        let a = fock::mode_lowering(spec, i);
        q.scaled_add(Complex64::new(s, 0.0), &dagger(&a).dot(&a));
    }
    let sm = fock::tls_lowering(spec);
    q = q + dagger(&sm).dot(&sm);
    q
}

fn rate_definiteness(rate: &Array2<Complex64>) -> Result<f64> {
    let vals = eigvalsh(&hermitize("rate", rate)?)?;
    Ok(vals[0])
}

/// Separated-picture master equation: loss and gain oscillators carry
/// their own symmetrized operators; the gain block enters the
/// Hamiltonian with a negative sign and relaxes through its own lowering
/// channel. Oscillator order: loss modes first, then gain modes.
pub fn build_separated(
    set: &SymmSet,
    emitter: &EmitterParams,
    spec: HilbertSpec,
) -> Result<LindbladModel> {
    let n = set.n_modes();
    let expected = if set.has_gain { 2 * n } else { n };
    if spec.n_max.len() != expected {
        return Err(QnmError::DimensionMismatch(format!(
            "separated picture needs {expected} oscillators ({n} loss{}), got {}",
            if set.has_gain { format!(" + {n} gain") } else { String::new() },
            spec.n_max.len()
        )));
    }
    if emitter.raw_couplings.len() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "{} raw couplings for {n} hybrid modes",
            emitter.raw_couplings.len()
        )));
    }
    spec.validate()?;
    let dim = spec.dim();

    let chi_l = set.chi_loss()?;
    let g_l = set.couplings(&emitter.raw_couplings, Picture::SeparatedLoss)?;
    let a_loss: Vec<Array2<Complex64>> = (0..n).map(|i| fock::mode_lowering(&spec, i)).collect();
    let sm = fock::tls_lowering(&spec);
    let sp = dagger(&sm);

    let mut h = quadratic_block(&chi_l.plus, &a_loss, dim);
    let mut coupling_sum = Array2::<Complex64>::zeros((dim, dim));
    for mu in 0..n {
        coupling_sum.scaled_add(g_l[mu], &a_loss[mu]);
    }
    let mut channels = vec![Channel::new("loss", chi_l.minus.clone(), a_loss, ChannelKind::Lower)];
    let mut signs = vec![1.0; n];

    if set.has_gain {
        let chi_g = set.chi_gain()?;
        let g_g = set.couplings(&emitter.raw_couplings, Picture::SeparatedGain)?;
        let a_gain: Vec<Array2<Complex64>> =
            (0..n).map(|i| fock::mode_lowering(&spec, n + i)).collect();
        h = h - quadratic_block(&chi_g.plus, &a_gain, dim);
        for mu in 0..n {
            coupling_sum.scaled_add(g_g[mu], &dagger(&a_gain[mu]));
        }
        channels.push(Channel::new("gain", chi_g.minus.clone(), a_gain, ChannelKind::Lower));
        signs.extend(std::iter::repeat(-1.0).take(n));
    }

    let inter = coupling_sum.dot(&sp);
    h = h + &inter + &dagger(&inter);
    h = h + dagger(&sm).dot(&sm).mapv(|z| emitter.omega_a * z);
    if emitter.gamma_b > 0.0 {
        let rate = Array2::from_elem((1, 1), Complex64::new(emitter.gamma_b / 2.0, 0.0));
        channels.push(Channel::new("background", rate, vec![sm], ChannelKind::TlsLower));
    }
    let charge = charge_operator(&spec, &signs);
    LindbladModel::assemble(
        spec,
        h,
        channels,
        charge,
        true,
        "separated picture: unconditionally contractive",
    )
}

/// Unified-picture master equation on the S′-symmetrized oscillators,
/// with a lowering loss channel and a raising gain channel. Requires S′
/// to be positive definite; the model is flagged unstable at or above
/// the lasing threshold min eig(χ′^{L−} − χ′^{G−}) ≤ 0.
pub fn build_unified(
    set: &SymmSet,
    emitter: &EmitterParams,
    spec: HilbertSpec,
) -> Result<LindbladModel> {
    let n = set.n_modes();
    if spec.n_max.len() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "unified picture needs {n} oscillators, got {}",
            spec.n_max.len()
        )));
    }
    if emitter.raw_couplings.len() != n {
        return Err(QnmError::DimensionMismatch(format!(
            "{} raw couplings for {n} hybrid modes",
            emitter.raw_couplings.len()
        )));
    }
    spec.validate()?;
    let prime = set.report_prime()?;
    if !prime.positive {
        return Err(QnmError::UnifiedInvalid { min_eigenvalue: prime.eigenvalues[0] });
    }
    let dim = spec.dim();

    let u = set.chi_unified()?;
    let g_u = set.couplings(&emitter.raw_couplings, Picture::Unified)?;
    let a_ops: Vec<Array2<Complex64>> = (0..n).map(|i| fock::mode_lowering(&spec, i)).collect();
    let sm = fock::tls_lowering(&spec);
    let sp = dagger(&sm);

    let mut h = quadratic_block(&u.plus, &a_ops, dim);
    let mut coupling_sum = Array2::<Complex64>::zeros((dim, dim));
    for mu in 0..n {
        coupling_sum.scaled_add(g_u[mu], &a_ops[mu]);
    }
    let inter = coupling_sum.dot(&sp);
    h = h + &inter + &dagger(&inter);
    h = h + dagger(&sm).dot(&sm).mapv(|z| emitter.omega_a * z);

    let mut channels =
        vec![Channel::new("loss", u.l_minus.clone(), a_ops.clone(), ChannelKind::Lower)];
    if set.has_gain {
        channels.push(Channel::new("gain", u.g_minus.clone(), a_ops, ChannelKind::Raise));
    }
    if emitter.gamma_b > 0.0 {
        let rate = Array2::from_elem((1, 1), Complex64::new(emitter.gamma_b / 2.0, 0.0));
        channels.push(Channel::new("background", rate, vec![sm], ChannelKind::TlsLower));
    }

    // Threshold: net dissipation must stay positive definite.
    let net = &u.l_minus - &u.g_minus;
    let net_min = rate_definiteness(&net)?;
    let l_min = rate_definiteness(&u.l_minus)?;
    let g_min = rate_definiteness(&u.g_minus)?;
    let scale = fro_norm(&u.l_minus).max(fro_norm(&u.g_minus)).max(1e-300);
    let mut stable = net_min > 0.0;
    let mut detail = format!("min eig(chi'_L- - chi'_G-) = {net_min:.6e}");
    if l_min < -1e-10 * scale || g_min < -1e-10 * scale {
        stable = false;
        detail = format!(
            "indefinite rate matrix: min eig(chi'_L-) = {l_min:.6e}, min eig(chi'_G-) = {g_min:.6e}"
        );
    }
    let charge = charge_operator(&spec, &vec![1.0; n]);
    LindbladModel::assemble(spec, h, channels, charge, stable, detail)
}

/// Sign convention of the phenomenological inter-resonator coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhenCoupling {
    /// H ∋ −κ (b†_L b_G + b†_G b_L): matches the CMT matrix and makes the
    /// adiabatic rates reproduce the classical Green function.
    #[default]
    MinusKappa,
    /// H ∋ iκ (b†_L b_G − b†_G b_L): an older convention, kept selectable
    /// for comparison runs only.
    LegacyIKappa,
}

/// Parameters of the two-oscillator phenomenological model.
#[derive(Debug, Clone, Copy)]
pub struct PhenParams {
    pub omega_l: f64,
    pub omega_g: f64,
    /// Loss-oscillator relaxation rate γ_L > 0 (eV).
    pub gamma_l: f64,
    /// Gain-oscillator pump rate γ_G ≥ 0 (eV).
    pub gamma_g: f64,
    /// Real inter-resonator coupling κ (eV).
    pub kappa: f64,
    pub g_l: f64,
    pub g_g: f64,
    pub coupling: PhenCoupling,
}

impl PhenParams {
    /// Non-Hermitian 2×2 stability matrix Ω̃ of the coupled amplitudes.
    pub fn stability_matrix(&self) -> Array2<Complex64> {
        let wl = Complex64::new(self.omega_l, -self.gamma_l);
        let wg = Complex64::new(self.omega_g, self.gamma_g);
        let (c_lg, c_gl) = match self.coupling {
            PhenCoupling::MinusKappa => {
                (Complex64::new(-self.kappa, 0.0), Complex64::new(-self.kappa, 0.0))
            }
            PhenCoupling::LegacyIKappa => (
                Complex64::new(0.0, self.kappa),
                Complex64::new(0.0, -self.kappa),
            ),
        };
        ndarray::array![[wl, c_lg], [c_gl, wg]]
    }
}

/// Phenomenological coupled-oscillator master equation: a lossy and an
/// amplifying single-mode resonator with real coupling κ and real
/// emitter couplings, dissipating through scalar lower/raise channels.
pub fn build_phenomenological(
    params: &PhenParams,
    omega_a: f64,
    gamma_b: f64,
    spec: HilbertSpec,
) -> Result<LindbladModel> {
    if spec.n_max.len() != 2 {
        return Err(QnmError::DimensionMismatch(format!(
            "phenomenological model has exactly two oscillators, got {}",
            spec.n_max.len()
        )));
    }
    for (label, v, min) in [
        ("omega_L", params.omega_l, 0.0),
        ("omega_G", params.omega_g, 0.0),
        ("gamma_L", params.gamma_l, 0.0),
        ("omega_a", omega_a, 0.0),
    ] {
        if !(v > min) || !v.is_finite() {
            return Err(QnmError::ValidationError(format!(
                "{label} must be positive and finite, got {v}"
            )));
        }
    }
    if params.gamma_g < 0.0 || gamma_b < 0.0 {
        return Err(QnmError::ValidationError(format!(
            "pump and background rates must be ≥ 0, got γ_G = {}, Γ_B = {}",
            params.gamma_g, gamma_b
        )));
    }
    spec.validate()?;

    let b_l = fock::mode_lowering(&spec, 0);
    let b_g = fock::mode_lowering(&spec, 1);
    let sm = fock::tls_lowering(&spec);
    let sp = dagger(&sm);
    let (bd_l, bd_g) = (dagger(&b_l), dagger(&b_g));

    let mut h = bd_l.dot(&b_l).mapv(|z| params.omega_l * z)
        + bd_g.dot(&b_g).mapv(|z| params.omega_g * z)
        + dagger(&sm).dot(&sm).mapv(|z| omega_a * z);
    match params.coupling {
        PhenCoupling::MinusKappa => {
            let t = bd_l.dot(&b_g);
            h = h - (&t + &dagger(&t)).mapv(|z| params.kappa * z);
        }
        PhenCoupling::LegacyIKappa => {
            let t = bd_l.dot(&b_g);
            h = h + (&t - &dagger(&t)).mapv(|z| Complex64::i() * params.kappa * z);
        }
    }
    // i g (b σ⁺ − b† σ⁻) per oscillator.
    for (g, b) in [(params.g_l, &b_l), (params.g_g, &b_g)] {
        if g != 0.0 {
            let t = b.dot(&sp).mapv(|z| Complex64::i() * g * z);
            h = h + &t + &dagger(&t);
        }
    }

    let mut channels = vec![Channel::new(
        "loss",
        Array2::from_elem((1, 1), Complex64::new(params.gamma_l, 0.0)),
        vec![b_l],
        ChannelKind::Lower,
    )];
    if params.gamma_g > 0.0 {
        channels.push(Channel::new(
            "gain",
            Array2::from_elem((1, 1), Complex64::new(params.gamma_g, 0.0)),
            vec![b_g],
            ChannelKind::Raise,
        ));
    }
    if gamma_b > 0.0 {
        let rate = Array2::from_elem((1, 1), Complex64::new(gamma_b / 2.0, 0.0));
        channels.push(Channel::new("background", rate, vec![sm], ChannelKind::TlsLower));
    }

    let omega_tilde = params.stability_matrix();
    let (vals, _) = ndarray_linalg::Eig::eig(&omega_tilde)
        .map_err(|e| QnmError::NoConvergence(format!("stability eigenproblem: {e}")))?;
    let max_im = vals.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
    let stable = max_im < 0.0;
    let detail = format!("max Im(eig Omega~) = {max_im:.6e}");
    let charge = charge_operator(&spec, &[1.0, 1.0]);
    LindbladModel::assemble(spec, h, channels, charge, stable, detail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmt::ComplexFreq;
    use crate::linalg::max_abs;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn freq(omega: f64, gamma: f64) -> ComplexFreq {
        ComplexFreq::new(omega, gamma).unwrap()
    }

    fn tls_model(omega_a: f64, gamma_b: f64) -> LindbladModel {
        let spec = HilbertSpec::new(vec![]);
        let sm = fock::tls_lowering(&spec);
        let h = dagger(&sm).dot(&sm).mapv(|z| omega_a * z);
        let rate = Array2::from_elem((1, 1), c(gamma_b / 2.0, 0.0));
        let charge = charge_operator(&spec, &[]);
        LindbladModel::assemble(
            spec,
            h,
            vec![Channel::new("background", rate, vec![sm], ChannelKind::TlsLower)],
            charge,
            true,
            "",
        )
        .unwrap()
    }

    #[test]
    fn test_tls_decay_matches_analytic_exponential() {
        let gamma_b = 0.05;
        let model = tls_model(1.0, gamma_b);
        let rho0 = fock::fock_state(&model.spec, &[], true).unwrap();
        let sm = fock::tls_lowering(&model.spec);
        let n_op = dagger(&sm).dot(&sm);
        let opts = EvolveOptions {
            observables: vec![("n_e".into(), n_op)],
            n_samples: 5,
            ..Default::default()
        };
        let t_end = 40.0;
        let traj = evolve(&model, &rho0, t_end, &opts).unwrap();
        for (t, row) in traj.times.iter().zip(&traj.expectations) {
            let expect = (-gamma_b * t).exp();
            assert!((row[0].re - expect).abs() < 1e-8, "t={t}: {} vs {expect}", row[0].re);
        }
    }

    #[test]
    fn test_single_mode_photon_number_decay() {
        // One lossy oscillator: ⟨n⟩(t) = n₀ e^{−2γt}.
        let gamma = 0.02;
        let spec = HilbertSpec::new(vec![3]);
        let a = fock::mode_lowering(&spec, 0);
        let h = dagger(&a).dot(&a).mapv(|z| 1.0 * z);
        let rate = Array2::from_elem((1, 1), c(gamma, 0.0));
        let charge = charge_operator(&spec, &[1.0]);
        let model = LindbladModel::assemble(
            spec.clone(),
            h,
            vec![Channel::new("loss", rate, vec![a.clone()], ChannelKind::Lower)],
            charge,
            true,
            "",
        )
        .unwrap();
        // Work in the frame rotating at the mode frequency: stiffness-free.
        let model = rotating_frame(&model, 1.0).unwrap();
        let rho0 = fock::fock_state(&spec, &[2], false).unwrap();
        let n_op = dagger(&a).dot(&a);
        let opts = EvolveOptions {
            observables: vec![("n".into(), n_op)],
            n_samples: 4,
            ..Default::default()
        };
        let traj = evolve(&model, &rho0, 30.0, &opts).unwrap();
        for (t, row) in traj.times.iter().zip(&traj.expectations) {
            let expect = 2.0 * (-2.0 * gamma * t).exp();
            assert!((row[0].re - expect).abs() < 1e-7);
        }
    }

    #[test]
    fn test_regrouped_rhs_matches_diagonalized_and_is_trace_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let spec = HilbertSpec::new(vec![1, 1]);
        let dim = spec.dim();
        let a0 = fock::mode_lowering(&spec, 0);
        let a1 = fock::mode_lowering(&spec, 1);
        let sm = fock::tls_lowering(&spec);
        // Random Hermitian H and a random PSD 2×2 rate matrix.
        let mut h = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let h = (&h + &dagger(&h)).mapv(|z| 0.5 * z);
        let mut b = Array2::<Complex64>::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                b[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rate = dagger(&b).dot(&b);
        let channels = vec![
            Channel::new("pair", rate.clone(), vec![a0, a1], ChannelKind::Lower),
            Channel::new("pump", rate, vec![fock::mode_lowering(&spec, 0), fock::mode_lowering(&spec, 1)], ChannelKind::Raise),
            Channel::new(
                "tls",
                Array2::from_elem((1, 1), c(0.3, 0.0)),
                vec![sm],
                ChannelKind::TlsLower,
            ),
        ];
        let charge = charge_operator(&spec, &[1.0, 1.0]);
        let model = LindbladModel::assemble(spec.clone(), h, channels, charge, true, "").unwrap();
        // Random Hermitian unit-trace state.
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rho = {
            let p = dagger(&m).dot(&m);
            let tr: Complex64 = (0..dim).map(|i| p[(i, i)]).sum();
            p.mapv(|z| z / tr)
        };
        let fast = model.rhs(&rho);
        let slow = model.rhs_diagonalized(&rho).unwrap();
        let scale = fro_norm(&fast).max(1e-300);
        assert!(max_abs(&(&fast - &slow)) <= 1e-10 * scale);
        let tr: Complex64 = (0..dim).map(|i| fast[(i, i)]).sum();
        assert!(tr.norm() <= 1e-12 * scale);

        // Off the Hermitian slice the two evaluators must still agree:
        // an evaluator that is merely real-linear (e.g. one forming
        // (Aρ)† instead of ρA†) matches on Hermitian states but sends
        // the roundoff-populated anti-Hermitian sector through a
        // different, anti-damped flow. `m` is a generic complex matrix.
        let fast_g = model.rhs(&m);
        let slow_g = model.rhs_diagonalized(&m).unwrap();
        let scale_g = fro_norm(&fast_g).max(1e-300);
        assert!(max_abs(&(&fast_g - &slow_g)) <= 1e-10 * scale_g);
        let tr_g: Complex64 = (0..dim).map(|i| fast_g[(i, i)]).sum();
        assert!(tr_g.norm() <= 1e-12 * scale_g);
    }

    #[test]
    fn test_rotating_frame_leaves_populations_invariant() {
        let gamma = 0.01;
        let spec = HilbertSpec::new(vec![2]);
        let a = fock::mode_lowering(&spec, 0);
        let h = dagger(&a).dot(&a).mapv(|z| 0.9 * z);
        let rate = Array2::from_elem((1, 1), c(gamma, 0.0));
        let charge = charge_operator(&spec, &[1.0]);
        let model = LindbladModel::assemble(
            spec.clone(),
            h,
            vec![Channel::new("loss", rate, vec![a.clone()], ChannelKind::Lower)],
            charge,
            true,
            "",
        )
        .unwrap();
        let rotated = rotating_frame(&model, 0.9).unwrap();
        let rho0 = {
            // Superposition state so coherences matter.
            let dim = spec.dim();
            let mut psi = Array2::<Complex64>::zeros((dim, 1));
            psi[(0, 0)] = c(0.6f64.sqrt(), 0.0);
            psi[(2, 0)] = c(0.4f64.sqrt(), 0.0);
            psi.dot(&dagger(&psi))
        };
        let n_op = dagger(&a).dot(&a);
        let opts = EvolveOptions {
            observables: vec![("n".into(), n_op)],
            n_samples: 3,
            ..Default::default()
        };
        let lab = evolve(&model, &rho0, 25.0, &opts).unwrap();
        let rot = evolve(&rotated, &rho0, 25.0, &opts).unwrap();
        for (a_row, b_row) in lab.expectations.iter().zip(&rot.expectations) {
            assert!((a_row[0].re - b_row[0].re).abs() < 1e-8);
        }
    }

    #[test]
    fn test_assemble_rejects_bad_shapes() {
        let spec = HilbertSpec::new(vec![1]);
        let dim = spec.dim();
        let h = Array2::<Complex64>::zeros((dim, dim));
        let a = fock::mode_lowering(&spec, 0);
        // 2×2 rate for one operator.
        let bad = Channel::new("x", Array2::zeros((2, 2)), vec![a], ChannelKind::Lower);
        let q = Array2::<Complex64>::zeros((dim, dim));
        assert!(matches!(
            LindbladModel::assemble(spec, h, vec![bad], q, true, ""),
            Err(QnmError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn test_evolve_flags_nonphysical_evolution() {
        // A negative-rate "loss" channel inverts dissipation and drives
        // eigenvalues negative; evolve must stop with a diagnosis.
        let spec = HilbertSpec::new(vec![1]);
        let a = fock::mode_lowering(&spec, 0);
        let h = Array2::<Complex64>::zeros((spec.dim(), spec.dim()));
        let rate = Array2::from_elem((1, 1), c(-0.1, 0.0));
        let charge = charge_operator(&spec, &[1.0]);
        let model = LindbladModel::assemble(
            spec.clone(),
            h,
            vec![Channel::new("antiloss", rate, vec![a], ChannelKind::Lower)],
            charge,
            true,
            "",
        )
        .unwrap();
        let rho0 = fock::fock_state(&spec, &[1], false).unwrap();
        let opts = EvolveOptions { positivity_stride: 5, ..Default::default() };
        let result = evolve(&model, &rho0, 50.0, &opts);
        assert!(matches!(result, Err(QnmError::NonPhysicalState { .. })), "{result:?}");
    }

    #[test]
    fn test_validate_density_rejects_bad_states() {
        let spec = HilbertSpec::new(vec![]);
        let good = fock::fock_state(&spec, &[], false).unwrap();
        assert!(validate_density(&good, 2).is_ok());
        let traceless = good.mapv(|z| 0.5 * z);
        assert!(validate_density(&traceless, 2).is_err());
        let negative = array![[c(1.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]];
        assert!(validate_density(&negative, 2).is_err());
    }

    fn separated_fixture() -> (SymmSet, EmitterParams) {
        let s_l = array![[c(2.2, 0.0), c(-0.3, -1.1)], [c(-0.3, 1.1), c(2.4, 0.0)]];
        let s_g = array![[c(0.4, 0.0), c(-0.25, 0.05)], [c(-0.25, -0.05), c(0.42, 0.0)]];
        let freqs = vec![freq(0.8338, 3.1e-6), freq(0.8336, 1.2e-6)];
        let set = SymmSet::from_s_matrices(s_l, Some(s_g), &freqs).unwrap();
        let emitter =
            EmitterParams::new(0.8337, 1e-7, vec![c(1e-6, 5e-7), c(-8e-7, 2e-7)], "ra").unwrap();
        (set, emitter)
    }

    #[test]
    fn test_build_separated_pins_hamiltonian_blocks() {
        let (set, emitter) = separated_fixture();
        let spec = HilbertSpec::new(vec![1, 1, 1, 1]);
        let model = build_separated(&set, &emitter, spec.clone()).unwrap();
        assert!(model.stable);
        let chi_l = set.chi_loss().unwrap();
        let chi_g = set.chi_gain().unwrap();
        let g_l = set.couplings(&emitter.raw_couplings, Picture::SeparatedLoss).unwrap();
        let g_g = set.couplings(&emitter.raw_couplings, Picture::SeparatedGain).unwrap();
        // Basis bookkeeping: |1_μ; g⟩ single-photon states.
        let one = |mode: usize| fock::fock_state(&spec, &{
            let mut occ = vec![0; 4];
            occ[mode] = 1;
            occ
        }, false)
        .unwrap();
        let idx = |rho: &Array2<Complex64>| (0..rho.nrows()).find(|&i| rho[(i, i)].re > 0.5).unwrap();
        let h = &model.hamiltonian;
        for mu in 0..2 {
            for eta in 0..2 {
                let (i, j) = (idx(&one(mu)), idx(&one(eta)));
                assert!((h[(i, j)] - chi_l.plus[(mu, eta)]).norm() < 1e-12);
                let (i, j) = (idx(&one(2 + mu)), idx(&one(2 + eta)));
                assert!((h[(i, j)] + chi_g.plus[(mu, eta)]).norm() < 1e-12);
            }
        }
        // ⟨vac; e|H|1_Lμ; g⟩ = g̃^{s,L}_μ and ⟨1_Gμ; e... the gain coupling
        // connects |vac; g⟩ → |1_Gμ; e⟩.
        let vac_e = idx(&fock::fock_state(&spec, &[0; 4], true).unwrap());
        for mu in 0..2 {
            let i_l = idx(&one(mu));
            assert!((h[(vac_e, i_l)] - g_l[mu]).norm() < 1e-12);
            let g_state = {
                let mut occ = vec![0; 4];
                occ[2 + mu] = 1;
                idx(&fock::fock_state(&spec, &occ, true).unwrap())
            };
            let vac_g = {
                let occ = vec![0; 4];
                idx(&fock::fock_state(&spec, &occ, false).unwrap())
            };
            assert!((h[(g_state, vac_g)] - g_g[mu]).norm() < 1e-12);
        }
    }

    #[test]
    fn test_build_unified_pins_chi_prime_plus() {
        let (set, emitter) = separated_fixture();
        let spec = HilbertSpec::new(vec![1, 1]);
        let model = build_unified(&set, &emitter, spec.clone()).unwrap();
        let u = set.chi_unified().unwrap();
        let g_u = set.couplings(&emitter.raw_couplings, Picture::Unified).unwrap();
        let idx = |occ: &[usize], e: bool| {
            let rho = fock::fock_state(&spec, occ, e).unwrap();
            (0..rho.nrows()).find(|&i| rho[(i, i)].re > 0.5).unwrap()
        };
        let h = &model.hamiltonian;
        for mu in 0..2 {
            for eta in 0..2 {
                let mut occ_m = vec![0; 2];
                occ_m[mu] = 1;
                let mut occ_e = vec![0; 2];
                occ_e[eta] = 1;
                let (i, j) = (idx(&occ_m, false), idx(&occ_e, false));
                // The quadratic block is the Hermitian χ′⁺ — not χ′^{L+}.
                assert!((h[(i, j)] - u.plus[(mu, eta)]).norm() < 1e-12);
            }
            let mut occ = vec![0; 2];
            occ[mu] = 1;
            let (e0, g1) = (idx(&[0, 0], true), idx(&occ, false));
            assert!((h[(e0, g1)] - g_u[mu]).norm() < 1e-12);
        }
    }

    #[test]
    fn test_build_unified_rejects_indefinite_s_prime() {
        // S^G ≥ S^L in one direction makes S′ indefinite.
        let s_l = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let s_g = array![[c(1.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.2, 0.0)]];
        let freqs = vec![freq(0.83, 2e-6), freq(0.84, 3e-6)];
        let set = SymmSet::from_s_matrices(s_l, Some(s_g), &freqs).unwrap();
        let emitter = EmitterParams::new(0.83, 0.0, vec![c(0.0, 0.0); 2], "ra").unwrap();
        let spec = HilbertSpec::new(vec![1, 1]);
        assert!(matches!(
            build_unified(&set, &emitter, spec),
            Err(QnmError::UnifiedInvalid { .. })
        ));
    }

    #[test]
    fn test_unified_threshold_flag_trips_on_detuned_overlap() {
        // Strong real off-diagonal S′ with large detuning: the Hermitian
        // rate difference goes indefinite although every γ_ν > 0.
        let s_g = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]];
        let s_l = array![[c(2.5, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(2.5, 0.0)]];
        let freqs = vec![freq(0.8337, 1e-6), freq(0.8347, 1e-6)];
        let set = SymmSet::from_s_matrices(s_l, Some(s_g), &freqs).unwrap();
        assert!(set.report_prime().unwrap().positive);
        let emitter = EmitterParams::new(0.8337, 1e-7, vec![c(0.0, 0.0); 2], "ra").unwrap();
        let model = build_unified(&set, &emitter, HilbertSpec::new(vec![1, 1])).unwrap();
        assert!(!model.stable, "detail: {}", model.threshold_detail);
        assert!(matches!(model.require_stable(), Err(QnmError::AboveThreshold(_))));
    }

    #[test]
    fn test_phenomenological_coupling_conventions() {
        let spec = HilbertSpec::new(vec![1, 1]);
        let base = PhenParams {
            omega_l: 0.834,
            omega_g: 0.834,
            gamma_l: 4e-6,
            gamma_g: 1e-6,
            kappa: 2e-5,
            g_l: 1e-7,
            g_g: 5e-8,
            coupling: PhenCoupling::MinusKappa,
        };
        let m1 = build_phenomenological(&base, 0.834, 1e-8, spec.clone()).unwrap();
        assert!(m1.stable);
        let legacy = PhenParams { coupling: PhenCoupling::LegacyIKappa, ..base };
        let m2 = build_phenomenological(&legacy, 0.834, 1e-8, spec.clone()).unwrap();
        // ⟨1_L;g|H|1_G;g⟩: −κ vs +iκ.
        let idx = |occ: &[usize]| {
            let rho = fock::fock_state(&spec, occ, false).unwrap();
            (0..rho.nrows()).find(|&i| rho[(i, i)].re > 0.5).unwrap()
        };
        let (il, ig) = (idx(&[1, 0]), idx(&[0, 1]));
        assert!((m1.hamiltonian[(il, ig)] - c(-2e-5, 0.0)).norm() < 1e-18);
        assert!((m2.hamiltonian[(il, ig)] - c(0.0, 2e-5)).norm() < 1e-18);
        // Both conventions share the same hybrid eigenvalues (identical
        // characteristic polynomials), up to eigensolver noise on an
        // O(1)-norm matrix.
        let e1 = ndarray_linalg::Eig::eig(&base.stability_matrix()).unwrap().0;
        let e2 = ndarray_linalg::Eig::eig(&legacy.stability_matrix()).unwrap().0;
        let mut s1: Vec<f64> = e1.iter().map(|z| z.im).collect();
        let mut s2: Vec<f64> = e2.iter().map(|z| z.im).collect();
        s1.sort_by(f64::total_cmp);
        s2.sort_by(f64::total_cmp);
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn test_phenomenological_above_threshold_flag() {
        // Pump exceeding loss at κ = 0: the gain eigenvalue has Im ≥ 0.
        let params = PhenParams {
            omega_l: 0.834,
            omega_g: 0.834,
            gamma_l: 2e-6,
            gamma_g: 3e-6,
            kappa: 0.0,
            g_l: 0.0,
            g_g: 0.0,
            coupling: PhenCoupling::MinusKappa,
        };
        let model =
            build_phenomenological(&params, 0.834, 0.0, HilbertSpec::new(vec![1, 1])).unwrap();
        assert!(!model.stable);
    }
}
