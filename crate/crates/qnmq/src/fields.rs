// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mode-field grids and pole-level overlap integrals.
//!
//! A [`FieldGrid`] holds sampled QNM field values f̃_k(r_c) on a set of
//! quadrature cells (position, weight, permittivity). The overlap
//! integrals evaluated here are the pole approximations entering the
//! symmetrization matrices:
//!
//! ```text
//! I^{nrad,p}_{μη} = Σ_c w_c √(ε_I^{(μ)}(r_c) ε_I^{(η)}(r_c)) f̃_μ(r_c) f̃*_η(r_c)   (lossy medium)
//! I^{G,p}_{μη}    = Σ_c w_c √|ε_I^{(μ)}(r_c) ε_I^{(η)}(r_c)| f̃*_μ(r_c) f̃_η(r_c)   (gain medium)
//! ```
//!
//! where ε_I^{(k)}(r) = Im ε(r, ω_k) is the imaginary permittivity seen
//! by mode k (mode-resolved when the grid carries dispersive columns,
//! otherwise the static Im ε). Both integrals are Hermitian in (μ, η) by
//! construction; the lossy one conjugates the second field, the gain one
//! the first.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{QnmError, Result};

/// Material region of a quadrature cell, inferred from the sign of the
/// imaginary permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Im ε > 0: absorbing medium (enters the nonradiative overlap).
    Loss,
    /// Im ε < 0: linear-gain medium (enters the gain overlap).
    Gain,
    /// Im ε = 0: transparent; contributes to neither pole integral.
    Neutral,
}

/// Region of a single imaginary-permittivity value.
pub fn region_of(eps_i: f64) -> Region {
    if eps_i > 0.0 {
        Region::Loss
    } else if eps_i < 0.0 {
        Region::Gain
    } else {
        Region::Neutral
    }
}

/// Supported on-disk grid encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    /// Header `x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im,...` with
    /// optional trailing mode-resolved `epsI0,epsI1,...` columns.
    Csv,
}

/// Quadrature grid with per-cell geometry and mode-major field samples.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    x_nm: Vec<f64>,
    y_nm: Vec<f64>,
    area_nm2: Vec<f64>,
    eps: Vec<Complex64>,
    /// `fields[k][c]`: field of mode k at cell c.
    fields: Vec<Vec<Complex64>>,
    /// `eps_i[k][c]`: Im ε(r_c, ω_k).
    eps_i: Vec<Vec<f64>>,
}

/// Deterministic chunked summation: cells are accumulated in fixed blocks
/// of 256 and the block totals summed, keeping roundoff mild on large
/// grids without any data-dependent ordering.
fn chunked_sum(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut block = Complex64::new(0.0, 0.0);
    let mut in_block = 0usize;
    for v in values {
        block += v;
        in_block += 1;
        if in_block == 256 {
            total += block;
            block = Complex64::new(0.0, 0.0);
            in_block = 0;
        }
    }
    total + block
}

impl FieldGrid {
    /// Build a grid from raw per-cell arrays. `fields` and `eps_i` are
    /// mode-major (`[mode][cell]`); every inner vector must match the
    /// cell count and all weights must be positive and finite.
    pub fn from_parts(
        x_nm: Vec<f64>,
        y_nm: Vec<f64>,
        area_nm2: Vec<f64>,
        eps: Vec<Complex64>,
        fields: Vec<Vec<Complex64>>,
        eps_i: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = x_nm.len();
        if y_nm.len() != n || area_nm2.len() != n || eps.len() != n {
            return Err(QnmError::DimensionMismatch(format!(
                "grid columns disagree on cell count: x {}, y {}, area {}, eps {}",
                n,
                y_nm.len(),
                area_nm2.len(),
                eps.len()
            )));
        }
        if fields.len() != eps_i.len() {
            return Err(QnmError::DimensionMismatch(format!(
                "{} field columns but {} eps_I columns",
                fields.len(),
                eps_i.len()
            )));
        }
        for (k, col) in fields.iter().enumerate() {
            if col.len() != n {
                return Err(QnmError::DimensionMismatch(format!(
                    "field column {k} has {} cells, expected {n}",
                    col.len()
                )));
            }
        }
        for (k, col) in eps_i.iter().enumerate() {
            if col.len() != n {
                return Err(QnmError::DimensionMismatch(format!(
                    "eps_I column {k} has {} cells, expected {n}",
                    col.len()
                )));
            }
        }
        for (c, w) in area_nm2.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(QnmError::ValidationError(format!(
                    "cell {c}: quadrature weight must be positive and finite, got {w}"
                )));
            }
        }
        Ok(Self { x_nm, y_nm, area_nm2, eps, fields, eps_i })
    }

    /// Convenience constructor for non-dispersive grids: every mode sees
    /// the cell's static Im ε.
    pub fn from_parts_nondispersive(
        x_nm: Vec<f64>,
        y_nm: Vec<f64>,
        area_nm2: Vec<f64>,
        eps: Vec<Complex64>,
        fields: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let shared: Vec<f64> = eps.iter().map(|e| e.im).collect();
        let eps_i = vec![shared; fields.len()];
        Self::from_parts(x_nm, y_nm, area_nm2, eps, fields, eps_i)
    }

    pub fn n_cells(&self) -> usize {
        self.x_nm.len()
    }

    pub fn n_modes(&self) -> usize {
        self.fields.len()
    }

    pub fn x_nm(&self) -> &[f64] {
        &self.x_nm
    }

    pub fn y_nm(&self) -> &[f64] {
        &self.y_nm
    }

    pub fn area_nm2(&self) -> &[f64] {
        &self.area_nm2
    }

    pub fn eps(&self) -> &[Complex64] {
        &self.eps
    }

    /// Field samples of one mode.
    pub fn field(&self, mode: usize) -> Result<&[Complex64]> {
        self.fields
            .get(mode)
            .map(|v| v.as_slice())
            .ok_or_else(|| self.mode_range_error(mode))
    }

    /// Mode-resolved imaginary permittivity of one mode.
    pub fn eps_i(&self, mode: usize) -> Result<&[f64]> {
        self.eps_i
            .get(mode)
            .map(|v| v.as_slice())
            .ok_or_else(|| self.mode_range_error(mode))
    }

    fn mode_range_error(&self, mode: usize) -> QnmError {
        QnmError::DimensionMismatch(format!(
            "mode index {mode} out of range for a {}-mode grid",
            self.n_modes()
        ))
    }
}

/// Load a [`FieldGrid`] from disk. Errors carry the offending row.
pub fn load_field_grid(path: &Path, format: GridFormat) -> Result<FieldGrid> {
    match format {
        GridFormat::Csv => load_csv(path),
    }
}

fn parse_err(path: &Path, detail: impl Into<String>) -> QnmError {
    QnmError::ParseError { path: path.display().to_string(), detail: detail.into() }
}

fn load_csv(path: &Path) -> Result<FieldGrid> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| parse_err(path, e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    const FIXED: [&str; 5] = ["x_nm", "y_nm", "area_nm2", "eps_re", "eps_im"];
    if headers.len() < FIXED.len() || headers[..FIXED.len()] != FIXED {
        return Err(parse_err(
            path,
            format!(
                "header must start with {}, got {}",
                FIXED.join(","),
                headers.join(",")
            ),
        ));
    }
    // Count f<k>_re/f<k>_im pairs, then optional epsI<k> columns.
    let rest = &headers[FIXED.len()..];
    let mut n_modes = 0usize;
    while 2 * n_modes + 1 < rest.len()
        && rest[2 * n_modes] == format!("f{n_modes}_re")
        && rest[2 * n_modes + 1] == format!("f{n_modes}_im")
    {
        n_modes += 1;
    }
    if n_modes == 0 {
        return Err(parse_err(path, "no f0_re/f0_im field columns found"));
    }
    let tail = &rest[2 * n_modes..];
    let dispersive = !tail.is_empty();
    if dispersive {
        let expect: Vec<String> = (0..n_modes).map(|k| format!("epsI{k}")).collect();
        if tail != expect.as_slice() {
            return Err(parse_err(
                path,
                format!(
                    "trailing columns must be {}, got {}",
                    expect.join(","),
                    tail.join(",")
                ),
            ));
        }
    }
    let n_cols = FIXED.len() + 2 * n_modes + if dispersive { n_modes } else { 0 };

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut area = Vec::new();
    let mut eps = Vec::new();
    let mut fields = vec![Vec::new(); n_modes];
    let mut eps_i = vec![Vec::new(); n_modes];
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header line
        let record = record.map_err(|e| parse_err(path, format!("row {row}: {e}")))?;
        if record.len() != n_cols {
            return Err(parse_err(
                path,
                format!("row {row}: expected {n_cols} columns, got {}", record.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| {
                parse_err(
                    path,
                    format!("row {row}: column '{}' is not a number: '{}'", headers[i], &record[i]),
                )
            })
        };
        x.push(num(0)?);
        y.push(num(1)?);
        area.push(num(2)?);
        let e = Complex64::new(num(3)?, num(4)?);
        eps.push(e);
        for k in 0..n_modes {
            let re = num(FIXED.len() + 2 * k)?;
            let im = num(FIXED.len() + 2 * k + 1)?;
            fields[k].push(Complex64::new(re, im));
            let ei = if dispersive { num(FIXED.len() + 2 * n_modes + k)? } else { e.im };
            eps_i[k].push(ei);
        }
    }
    FieldGrid::from_parts(x, y, area, eps, fields, eps_i).map_err(|e| match e {
        QnmError::ValidationError(d) | QnmError::DimensionMismatch(d) => parse_err(path, d),
        other => other,
    })
}

fn check_mode(grid: &FieldGrid, mode: usize) -> Result<()> {
    if mode >= grid.n_modes() {
        return Err(QnmError::DimensionMismatch(format!(
            "mode index {mode} out of range for a {}-mode grid",
            grid.n_modes()
        )));
    }
    Ok(())
}

/// Nonradiative (absorptive-medium) pole overlap I^{nrad,p}_{μη}; the
/// sum runs over cells where both modes see Im ε > 0. A cell where the
/// two modes disagree on the sign of Im ε is malformed input.
pub fn overlap_nrad_pole(grid: &FieldGrid, mu: usize, eta: usize) -> Result<Complex64> {
    check_mode(grid, mu)?;
    check_mode(grid, eta)?;
    overlap_region(grid, mu, eta, Region::Loss)
}

/// Gain-medium pole overlap I^{G,p}_{μη}; the sum runs over cells where
/// both modes see Im ε < 0, with |ε_I| under the square root and the
/// conjugation on the first field.
pub fn overlap_gain_pole(grid: &FieldGrid, mu: usize, eta: usize) -> Result<Complex64> {
    check_mode(grid, mu)?;
    check_mode(grid, eta)?;
    overlap_region(grid, mu, eta, Region::Gain)
}

fn overlap_region(grid: &FieldGrid, mu: usize, eta: usize, want: Region) -> Result<Complex64> {
    let ei_mu = grid.eps_i(mu)?;
    let ei_eta = grid.eps_i(eta)?;
    let f_mu = grid.field(mu)?;
    let f_eta = grid.field(eta)?;
    let w = grid.area_nm2();
    // Sign consistency across modes first, so the integral is well defined.
    for c in 0..grid.n_cells() {
        let (a, b) = (region_of(ei_mu[c]), region_of(ei_eta[c]));
        if a != Region::Neutral && b != Region::Neutral && a != b {
            return Err(QnmError::RegionMismatch {
                expected: format!("cell {c}: mode {mu} sees {a:?}"),
                actual: format!("mode {eta} sees {b:?}"),
            });
        }
    }
    let sum = chunked_sum((0..grid.n_cells()).filter_map(|c| {
        if region_of(ei_mu[c]) != want || region_of(ei_eta[c]) != want {
            return None;
        }
        let root = (ei_mu[c] * ei_eta[c]).abs().sqrt();
        let pair = match want {
            Region::Loss => f_mu[c] * f_eta[c].conj(),
            Region::Gain => f_mu[c].conj() * f_eta[c],
            Region::Neutral => unreachable!(),
        };
        Some(w[c] * root * pair)
    }));
    Ok(sum)
}

/// Unconjugated normalization residual ∫ ε f̃_μ² dV − 1 over the whole
/// grid, with the full complex ε seen by mode μ. A well-normalized
/// high-Q mode on an adequate grid gives |residual| ≪ 1; the value is
/// reported, not asserted, because the pole approximation drops the
/// radiative correction.
pub fn normalization_residual(grid: &FieldGrid, mu: usize) -> Result<Complex64> {
    check_mode(grid, mu)?;
    let f = grid.field(mu)?;
    let ei = grid.eps_i(mu)?;
    let eps = grid.eps();
    let w = grid.area_nm2();
    let sum = chunked_sum((0..grid.n_cells()).map(|c| {
        let e = Complex64::new(eps[c].re, ei[c]);
        w[c] * e * f[c] * f[c]
    }));
    Ok(sum - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two-cell, two-mode grid: cell 0 lossy, cell 1 gain.
    fn small_grid() -> FieldGrid {
        FieldGrid::from_parts_nondispersive(
            vec![0.0, 100.0],
            vec![0.0, 0.0],
            vec![2.0, 3.0],
            vec![c(4.0, 0.5), c(4.0, -0.25)],
            vec![vec![c(1.0, 0.5), c(0.2, -0.1)], vec![c(-0.3, 0.4), c(0.6, 0.2)]],
        )
        .unwrap()
    }

    #[test]
    fn test_from_parts_rejects_ragged_columns() {
        let bad = FieldGrid::from_parts_nondispersive(
            vec![0.0, 1.0],
            vec![0.0],
            vec![1.0, 1.0],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![vec![c(0.0, 0.0); 2]],
        );
        assert!(matches!(bad, Err(QnmError::DimensionMismatch(_))));
    }

    #[test]
    fn test_from_parts_rejects_nonpositive_weight() {
        let bad = FieldGrid::from_parts_nondispersive(
            vec![0.0],
            vec![0.0],
            vec![0.0],
            vec![c(1.0, 0.1)],
            vec![vec![c(1.0, 0.0)]],
        );
        assert!(matches!(bad, Err(QnmError::ValidationError(_))));
    }

    #[test]
    fn test_overlap_nrad_hand_value() {
        // Only cell 0 (Im ε = 0.5 > 0) contributes:
        // w √(ε_I ε_I) f_0 f*_1 = 2 · 0.5 · (1+0.5i)(−0.3−0.4i).
        let g = small_grid();
        let i01 = overlap_nrad_pole(&g, 0, 1).unwrap();
        let expect = 2.0 * 0.5 * c(1.0, 0.5) * c(-0.3, 0.4).conj();
        assert!((i01 - expect).norm() < 1e-15);
    }

    #[test]
    fn test_overlap_gain_hand_value() {
        // Only cell 1 (Im ε = −0.25 < 0) contributes, conjugation on the
        // first field: w |ε_I| f*_0 f_1 = 3 · 0.25 · (0.2+0.1i)(0.6+0.2i).
        let g = small_grid();
        let i01 = overlap_gain_pole(&g, 0, 1).unwrap();
        let expect = 3.0 * 0.25 * c(0.2, -0.1).conj() * c(0.6, 0.2);
        assert!((i01 - expect).norm() < 1e-15);
    }

    #[test]
    fn test_overlaps_are_hermitian_and_nonnegative_on_diagonal() {
        let g = small_grid();
        for f in [overlap_nrad_pole, overlap_gain_pole] {
            let i01 = f(&g, 0, 1).unwrap();
            let i10 = f(&g, 1, 0).unwrap();
            assert!((i01 - i10.conj()).norm() < 1e-15);
            for m in 0..2 {
                let d = f(&g, m, m).unwrap();
                assert!(d.im.abs() < 1e-15);
                assert!(d.re >= 0.0);
            }
        }
    }

    #[test]
    fn test_region_mismatch_between_modes_is_rejected() {
        let g = FieldGrid::from_parts(
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![c(4.0, 0.1)],
            vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]],
            vec![vec![0.1], vec![-0.1]],
        )
        .unwrap();
        assert!(matches!(
            overlap_nrad_pole(&g, 0, 1),
            Err(QnmError::RegionMismatch { .. })
        ));
    }

    #[test]
    fn test_normalization_residual_exact() {
        // Single cell with w ε f² = 1 exactly.
        let eps = c(2.0, 0.5);
        let f = (1.0 / eps).sqrt();
        let g = FieldGrid::from_parts_nondispersive(
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![eps],
            vec![vec![f]],
        )
        .unwrap();
        let r = normalization_residual(&g, 0).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn test_dispersive_grid_overrides_static_eps_im() {
        // Static Im ε = 0 but the mode-resolved column is lossy.
        let g = FieldGrid::from_parts(
            vec![0.0],
            vec![0.0],
            vec![1.5],
            vec![c(4.0, 0.0)],
            vec![vec![c(2.0, 0.0)]],
            vec![vec![0.3]],
        )
        .unwrap();
        let d = overlap_nrad_pole(&g, 0, 0).unwrap();
        assert_relative_eq!(d.re, 1.5 * 0.3 * 4.0, epsilon = 1e-14);
        // The residual uses the mode-resolved imaginary part too.
        let r = normalization_residual(&g, 0).unwrap();
        let expect = 1.5 * c(4.0, 0.3) * 4.0 - 1.0;
        assert!((r - expect).norm() < 1e-13);
    }

    #[test]
    fn test_chunked_sum_matches_naive_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<Complex64> = (0..10_000)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let chunked = chunked_sum(vals.iter().copied());
        let naive: Complex64 = vals.iter().sum();
        assert!((chunked - naive).norm() <= 1e-12 * naive.norm().max(1.0));
    }

    #[test]
    fn test_csv_round_trip() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "# synthetic two-mode grid").unwrap();
        writeln!(tmp, "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im,f1_re,f1_im").unwrap();
        writeln!(tmp, "0.0,0.0,2.0,4.0,0.5,1.0,0.5,-0.3,0.4").unwrap();
        writeln!(tmp, "100.0,0.0,3.0,4.0,-0.25,0.2,-0.1,0.6,0.2").unwrap();
        tmp.flush().unwrap();
        let g = load_field_grid(tmp.path(), GridFormat::Csv).unwrap();
        assert_eq!(g.n_cells(), 2);
        assert_eq!(g.n_modes(), 2);
        let reference = small_grid();
        let a = overlap_nrad_pole(&g, 0, 1).unwrap();
        let b = overlap_nrad_pole(&reference, 0, 1).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn test_csv_dispersive_columns() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im,epsI0").unwrap();
        writeln!(tmp, "0.0,0.0,1.5,4.0,0.0,2.0,0.0,0.3").unwrap();
        tmp.flush().unwrap();
        let g = load_field_grid(tmp.path(), GridFormat::Csv).unwrap();
        let d = overlap_nrad_pole(&g, 0, 0).unwrap();
        assert_relative_eq!(d.re, 1.5 * 0.3 * 4.0, epsilon = 1e-14);
    }

    #[test]
    fn test_csv_bad_header_is_reported() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "x_nm,y_nm,weight,eps_re,eps_im,f0_re,f0_im").unwrap();
        writeln!(tmp, "0,0,1,1,0,1,0").unwrap();
        tmp.flush().unwrap();
        match load_field_grid(tmp.path(), GridFormat::Csv) {
            Err(QnmError::ParseError { detail, .. }) => assert!(detail.contains("header")),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn test_csv_bad_number_names_row_and_column() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im").unwrap();
        writeln!(tmp, "0.0,0.0,1.0,4.0,0.5,1.0,0.0").unwrap();
        writeln!(tmp, "1.0,0.0,1.0,4.0,oops,1.0,0.0").unwrap();
        tmp.flush().unwrap();
        match load_field_grid(tmp.path(), GridFormat::Csv) {
            Err(QnmError::ParseError { detail, .. }) => {
                assert!(detail.contains("row 3"), "detail: {detail}");
                assert!(detail.contains("eps_im"), "detail: {detail}");
            }
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn test_csv_short_row_is_reported() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im").unwrap();
        writeln!(tmp, "0.0,0.0,1.0,4.0,0.5").unwrap();
        tmp.flush().unwrap();
        assert!(matches!(
            load_field_grid(tmp.path(), GridFormat::Csv),
            Err(QnmError::ParseError { .. })
        ));
    }
}
