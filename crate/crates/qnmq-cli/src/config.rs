// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a versioned JSON schema plus an optional per-point
//! companion CSV for inputs that vary along the sweep.
//!
//! Units are fixed — energies and rates in eV, the sweep variable in
//! whatever unit the caller labels it with — and never inferred. Complex
//! numbers are `[re, im]` pairs. Hermitian matrices are given in full and
//! validated on load.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qnmq::cmt::{cmt_coupling, CmtCoupling, ComplexFreq};
use qnmq::dynamics::HilbertSpec;
use qnmq::symm::{EmitterParams, SymmSet};
use qnmq::{QnmError, Result};

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn config_err(msg: impl Into<String>) -> QnmError {
    QnmError::ConfigError(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    /// Resonance energy ω (eV), > 0.
    pub omega: f64,
    /// Half-width γ (eV); negative for an amplifying mode.
    pub gamma: f64,
}

impl ModeConfig {
    pub fn freq(&self) -> Result<ComplexFreq> {
        ComplexFreq::new(self.omega, self.gamma)
    }
}

/// Inter-resonator coupling: either κ values directly or the
/// unconjugated CMT overlap integrals they derive from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_lg: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_gl: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_lg: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_gl: Option<[f64; 2]>,
}

impl CouplingConfig {
    fn validate(&self) -> Result<()> {
        let kappa = (self.kappa_lg.is_some(), self.kappa_gl.is_some());
        let overlap = (self.overlap_lg.is_some(), self.overlap_gl.is_some());
        match (kappa, overlap) {
            ((true, true), (false, false)) | ((false, false), (true, true)) => Ok(()),
            _ => Err(config_err(
                "coupling needs both kappa_lg and kappa_gl, or both overlap_lg \
                 and overlap_gl (and not a mix)",
            )),
        }
    }

    pub fn resolve(&self, wl: ComplexFreq, wg: ComplexFreq) -> Result<CmtCoupling> {
        self.validate()?;
        if let (Some(lg), Some(gl)) = (self.kappa_lg, self.kappa_gl) {
            Ok(CmtCoupling::new(c(lg), c(gl)))
        } else {
            let (lg, gl) = (self.overlap_lg.unwrap(), self.overlap_gl.unwrap());
            Ok(cmt_coupling(wl, wg, c(lg), c(gl)))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Hybrid (or bare, for `hybridize`) mode frequencies. For two-mode
    /// CMT inputs the loss mode comes first, the gain mode second.
    pub modes: Vec<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingConfig>,
    /// Full Hermitian loss symmetrization matrix, entries `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_loss: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_gain: Option<Vec<Vec<[f64; 2]>>>,
    /// Companion CSV with per-sweep-point inputs, relative to the config
    /// file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_point: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    /// Transition energy ω_a (eV).
    pub omega_a: f64,
    /// Background decay rate Γ_B (eV).
    pub gamma_b: f64,
    /// Raw emitter–mode couplings g̃_η, one `[re, im]` pair per mode.
    #[serde(default)]
    pub couplings: Vec<[f64; 2]>,
    #[serde(default = "default_position")]
    pub position: String,
}

fn default_position() -> String {
    "emitter".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Separated,
    Unified,
    Phenomenological,
    BadcavityOnly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Name of the single sweep variable; `omega_a` additionally
    /// overrides the emitter frequency point by point.
    pub variable: String,
    /// Sweep grid; may be empty when a per-point file supplies it.
    #[serde(default)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertConfig {
    /// Maximum Fock occupation per oscillator (level count − 1).
    pub n_max: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_rtol() -> f64 {
    qnmq::tol::RTOL_DEFAULT
}

fn default_atol() -> f64 {
    qnmq::tol::ATOL_DEFAULT
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: default_rtol(), atol: default_atol() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rho0Config {
    /// Initial Fock occupation per oscillator; missing entries are 0.
    #[serde(default)]
    pub occupations: Vec<usize>,
    #[serde(default = "default_true")]
    pub tls_excited: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Horizon in eV⁻¹ time units; 0 reports the initial observables.
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub rho0: Rho0Config,
    /// Rotating-frame frequency (eV); defaults to the emitter frequency,
    /// 0 integrates in the lab frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<f64>,
    #[serde(default = "default_stride")]
    pub positivity_stride: usize,
}

fn default_samples() -> usize {
    41
}

fn default_stride() -> usize {
    25
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhenCouplingKind {
    #[default]
    MinusKappa,
    LegacyIKappa,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhenConfig {
    pub omega_l: f64,
    pub omega_g: f64,
    pub gamma_l: f64,
    pub gamma_g: f64,
    pub kappa: f64,
    pub g_l: f64,
    pub g_g: f64,
    #[serde(default)]
    pub coupling: PhenCouplingKind,
}

impl PhenConfig {
    pub fn params(&self) -> qnmq::dynamics::PhenParams {
        qnmq::dynamics::PhenParams {
            omega_l: self.omega_l,
            omega_g: self.omega_g,
            gamma_l: self.gamma_l,
            gamma_g: self.gamma_g,
            kappa: self.kappa,
            g_l: self.g_l,
            g_g: self.g_g,
            coupling: match self.coupling {
                PhenCouplingKind::MinusKappa => qnmq::dynamics::PhenCoupling::MinusKappa,
                PhenCouplingKind::LegacyIKappa => qnmq::dynamics::PhenCoupling::LegacyIKappa,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Config schema version; this build reads schema 1.
    pub schema: u32,
    pub system: SystemConfig,
    pub emitter: EmitterConfig,
    pub model: ModelKind,
    pub sweep: SweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phenomenological: Option<PhenConfig>,
    /// Reference frequency ω̃₀ that `hybridize` reports against;
    /// defaults to the isolated-ring reference of the coupled-microdisk
    /// system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// One sweep point with whatever inputs the companion file overrides.
#[derive(Debug, Clone)]
pub struct PointRow {
    pub value: f64,
    pub kappa: Option<CmtCoupling>,
    pub s_loss: Option<Array2<Complex64>>,
    pub s_gain: Option<Array2<Complex64>>,
    pub couplings: Option<Vec<Complex64>>,
}

impl PointRow {
    fn bare(value: f64) -> Self {
        Self { value, kappa: None, s_loss: None, s_gain: None, couplings: None }
    }
}

impl RunConfig {
    /// Read, parse, and validate a config file. Returns the config and
    /// the FNV-1a 64 hash of the raw bytes (stamped into every output).
    pub fn load(path: &Path) -> Result<(Self, u64)> {
        let bytes = std::fs::read(path).map_err(|e| QnmError::ParseError {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let cfg: RunConfig =
            serde_json::from_slice(&bytes).map_err(|e| QnmError::ParseError {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
        cfg.validate()?;
        Ok((cfg, fnv1a64(&bytes)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(config_err(format!(
                "unsupported config schema {}; this build reads schema 1",
                self.schema
            )));
        }
        if self.system.modes.is_empty() {
            return Err(config_err("system.modes must not be empty"));
        }
        for m in &self.system.modes {
            m.freq()?;
        }
        if self.sweep.variable.trim().is_empty() {
            return Err(config_err("sweep.variable must be a non-empty name"));
        }
        if self.sweep.values.is_empty() && self.system.per_point.is_none() {
            return Err(config_err(
                "sweep.values is empty and no per-point file is given",
            ));
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(config_err("sweep.values must be finite"));
        }
        if let Some(cc) = &self.system.coupling {
            cc.validate()?;
        }
        let n = self.system.modes.len();
        for (label, m) in [("s_loss", &self.system.s_loss), ("s_gain", &self.system.s_gain)] {
            if let Some(rows) = m {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(config_err(format!(
                        "system.{label} must be {n}×{n} to match system.modes"
                    )));
                }
            }
        }
        if self.system.s_gain.is_some() && self.system.s_loss.is_none() {
            return Err(config_err("system.s_gain without system.s_loss"));
        }
        if !(self.tolerances.rtol > 0.0) || !(self.tolerances.atol > 0.0) {
            return Err(config_err("tolerances must be positive"));
        }
        if self.model == ModelKind::Phenomenological {
            if self.phenomenological.is_none() {
                return Err(config_err(
                    "model \"phenomenological\" needs the phenomenological section",
                ));
            }
            match &self.hilbert {
                Some(h) if h.n_max.len() == 2 => {}
                _ => {
                    return Err(config_err(
                        "model \"phenomenological\" needs hilbert.n_max with two oscillators",
                    ))
                }
            }
        }
        if let Some(ev) = &self.evolve {
            if !(ev.t_end >= 0.0) || !ev.t_end.is_finite() {
                return Err(config_err("evolve.t_end must be finite and ≥ 0"));
            }
            if ev.n_samples == 0 {
                return Err(config_err("evolve.n_samples must be ≥ 1"));
            }
        }
        Ok(())
    }

    pub fn freqs(&self) -> Result<Vec<ComplexFreq>> {
        self.system.modes.iter().map(|m| m.freq()).collect()
    }

    pub fn emitter_params(&self, omega_a: f64, couplings: Vec<Complex64>) -> Result<EmitterParams> {
        EmitterParams::new(omega_a, self.emitter.gamma_b, couplings, &self.emitter.position)
    }

    /// Raw couplings at a sweep point: per-point columns win over the
    /// config constants.
    pub fn raw_at(&self, pt: &PointRow) -> Result<Vec<Complex64>> {
        let raw: Vec<Complex64> = match &pt.couplings {
            Some(g) => g.clone(),
            None => self.emitter.couplings.iter().map(|&p| c(p)).collect(),
        };
        if raw.len() != self.system.modes.len() {
            return Err(config_err(format!(
                "{} emitter couplings for {} modes",
                raw.len(),
                self.system.modes.len()
            )));
        }
        Ok(raw)
    }

    /// Symmetrization matrices at a sweep point (per-point columns win),
    /// assembled into a validated `SymmSet`.
    pub fn symm_set_at(&self, pt: &PointRow) -> Result<SymmSet> {
        let s_l = match (&pt.s_loss, &self.system.s_loss) {
            (Some(m), _) => m.clone(),
            (None, Some(rows)) => matrix_from_rows(rows),
            (None, None) => {
                return Err(config_err(
                    "no loss symmetrization matrix: give system.s_loss or per-point sl_ columns",
                ))
            }
        };
        let s_g = match (&pt.s_gain, &self.system.s_gain) {
            (Some(m), _) => Some(m.clone()),
            (None, Some(rows)) => Some(matrix_from_rows(rows)),
            (None, None) => None,
        };
        SymmSet::from_s_matrices(s_l, s_g, &self.freqs()?)
    }

    pub fn coupling_at(&self, pt: &PointRow) -> Result<CmtCoupling> {
        if let Some(k) = &pt.kappa {
            return Ok(k.clone());
        }
        let wl = self.system.modes[0].freq()?;
        let wg = self.system.modes[1].freq()?;
        match &self.system.coupling {
            Some(cc) => cc.resolve(wl, wg),
            None => Err(config_err(
                "no coupling: give system.coupling or per-point kappa columns",
            )),
        }
    }

    pub fn hilbert_spec(&self) -> Result<HilbertSpec> {
        match &self.hilbert {
            Some(h) => Ok(HilbertSpec::new(h.n_max.clone())),
            None => Err(config_err("this command needs the hilbert section")),
        }
    }

    /// Resolve the sweep grid, merging the companion per-point file when
    /// one is configured. `config_dir` anchors the relative path.
    pub fn resolve_points(&self, config_dir: &Path) -> Result<Vec<PointRow>> {
        match &self.system.per_point {
            None => Ok(self.sweep.values.iter().map(|&v| PointRow::bare(v)).collect()),
            Some(rel) => {
                let path = config_dir.join(rel);
                let points = load_points(&path, self.system.modes.len())?;
                if !self.sweep.values.is_empty() {
                    if self.sweep.values.len() != points.len() {
                        return Err(config_err(format!(
                            "sweep.values has {} entries but {} has {} rows",
                            self.sweep.values.len(),
                            path.display(),
                            points.len()
                        )));
                    }
                    for (v, p) in self.sweep.values.iter().zip(&points) {
                        if (v - p.value).abs() > 1e-12 * v.abs().max(1.0) {
                            return Err(config_err(format!(
                                "sweep.values entry {v} disagrees with per-point value {}",
                                p.value
                            )));
                        }
                    }
                }
                Ok(points)
            }
        }
    }
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Array2<Complex64> {
    let n = rows.len();
    Array2::from_shape_fn((n, n), |(i, j)| c(rows[i][j]))
}

/// FNV-1a 64-bit over the raw config bytes; identifies a config in the
/// output metadata, no security claim.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

const KAPPA_COLS: [&str; 4] = ["kappa_lg_re", "kappa_lg_im", "kappa_gl_re", "kappa_gl_im"];
const SL_COLS: [&str; 4] = ["sl_00", "sl_11", "sl_01_re", "sl_01_im"];
const SG_COLS: [&str; 4] = ["sg_00", "sg_11", "sg_01_re", "sg_01_im"];

/// Load the companion per-point CSV. Recognized columns: `value`
/// (required), the κ group, the two-mode S-matrix groups, and emitter
/// coupling pairs `g0_re,g0_im,…`. Each group is all-or-nothing and any
/// unknown column is rejected.
fn load_points(path: &Path, n_modes: usize) -> Result<Vec<PointRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| QnmError::ParseError {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    let parse_err = |detail: String| QnmError::ParseError {
        path: path.display().to_string(),
        detail,
    };

    let headers: Vec<String> =
        reader.headers().map_err(|e| parse_err(e.to_string()))?.iter().map(String::from).collect();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let g_cols: Vec<(String, String)> =
        (0..n_modes).map(|i| (format!("g{i}_re"), format!("g{i}_im"))).collect();

    let mut known: HashSet<String> = HashSet::from(["value".to_string()]);
    known.extend(KAPPA_COLS.iter().map(|s| s.to_string()));
    known.extend(SL_COLS.iter().map(|s| s.to_string()));
    known.extend(SG_COLS.iter().map(|s| s.to_string()));
    for (re, im) in &g_cols {
        known.insert(re.clone());
        known.insert(im.clone());
    }
    for h in &headers {
        if !known.contains(h) {
            return Err(config_err(format!(
                "unknown per-point column '{h}' in {}",
                path.display()
            )));
        }
    }

    let group = |cols: &[&str], label: &str| -> Result<Option<Vec<usize>>> {
        let found: Vec<_> = cols.iter().filter_map(|c| col(c)).collect();
        match found.len() {
            0 => Ok(None),
            n if n == cols.len() => Ok(Some(found)),
            _ => Err(config_err(format!(
                "per-point {label} columns are incomplete: need all of {}",
                cols.join(", ")
            ))),
        }
    };
    let value_col = col("value")
        .ok_or_else(|| config_err(format!("per-point file {} needs a value column", path.display())))?;
    let kappa_idx = group(&KAPPA_COLS, "kappa")?;
    let sl_idx = group(&SL_COLS, "s_loss")?;
    let sg_idx = group(&SG_COLS, "s_gain")?;
    if (sl_idx.is_some() || sg_idx.is_some()) && n_modes != 2 {
        return Err(config_err("per-point S-matrix columns support two-mode systems"));
    }
    if sg_idx.is_some() && sl_idx.is_none() {
        return Err(config_err("per-point sg_ columns without sl_ columns"));
    }
    let g_found: Vec<_> = g_cols
        .iter()
        .map(|(re, im)| (col(re), col(im)))
        .collect();
    let any_g = g_found.iter().any(|(a, b)| a.is_some() || b.is_some());
    let g_idx: Option<Vec<(usize, usize)>> = if any_g {
        let mut pairs = Vec::with_capacity(n_modes);
        for (i, (re, im)) in g_found.iter().enumerate() {
            match (re, im) {
                (Some(a), Some(b)) => pairs.push((*a, *b)),
                _ => {
                    return Err(config_err(format!(
                        "per-point coupling columns are incomplete: need g{i}_re and g{i}_im"
                    )))
                }
            }
        }
        Some(pairs)
    } else {
        None
    };

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let field = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .ok_or_else(|| parse_err(format!("row {} is short", points.len() + 1)))?
                .parse::<f64>()
                .map_err(|e| parse_err(format!("row {}: {e}", points.len() + 1)))
        };
        let mut pt = PointRow::bare(field(value_col)?);
        if let Some(idx) = &kappa_idx {
            pt.kappa = Some(CmtCoupling::new(
                Complex64::new(field(idx[0])?, field(idx[1])?),
                Complex64::new(field(idx[2])?, field(idx[3])?),
            ));
        }
        if let Some(idx) = &sl_idx {
            pt.s_loss = Some(hermitian2(field(idx[0])?, field(idx[1])?, field(idx[2])?, field(idx[3])?));
        }
        if let Some(idx) = &sg_idx {
            pt.s_gain = Some(hermitian2(field(idx[0])?, field(idx[1])?, field(idx[2])?, field(idx[3])?));
        }
        if let Some(pairs) = &g_idx {
            let mut g = Vec::with_capacity(pairs.len());
            for (re, im) in pairs {
                g.push(Complex64::new(field(*re)?, field(*im)?));
            }
            pt.couplings = Some(g);
        }
        points.push(pt);
    }
    if points.is_empty() {
        return Err(config_err(format!("per-point file {} has no rows", path.display())));
    }
    Ok(points)
}

fn hermitian2(d0: f64, d1: f64, off_re: f64, off_im: f64) -> Array2<Complex64> {
    let off = Complex64::new(off_re, off_im);
    ndarray::array![
        [Complex64::new(d0, 0.0), off],
        [off.conj(), Complex64::new(d1, 0.0)]
    ]
}

/// Default ω̃₀ that `hybridize` reports against when the config gives no
/// reference: the isolated-ring frequency of the coupled-microdisk
/// system, ω̃₀ = 0.833717 − 4.120496×10⁻⁶ i eV.
pub fn default_reference() -> ModeConfig {
    ModeConfig { omega: 0.833717, gamma: 4.120496e-6 }
}

/// Directory the config file lives in, for resolving companion paths.
pub fn parent_dir(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}
