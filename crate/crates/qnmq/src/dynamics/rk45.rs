// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

//! Embedded Dormand–Prince 5(4) stepper for autonomous matrix ODEs.
//!
//! Ref: E. Hairer, S. P. Nørsett & G. Wanner, "Solving Ordinary
//!      Differential Equations I" (1993), Sec. II.4–II.5.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{QnmError, Result};

/// Accepted/rejected step counts and the last step size.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepperStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub final_step: f64,
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// 5th-order weights (identical to the last A row: FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn scaled_err(err: &Array2<Complex64>, y0: &Array2<Complex64>, y1: &Array2<Complex64>, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    let n = err.len() as f64;
    for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
        let sc = atol + rtol * a.norm().max(b.norm());
        let r = e.norm() / sc;
        acc += r * r;
    }
    (acc / n).sqrt()
}

fn rms(y: &Array2<Complex64>) -> f64 {
    (y.iter().map(|z| z.norm_sqr()).sum::<f64>() / y.len() as f64).sqrt()
}

/// Integrate dy/dt = rhs(y) from `t0` to `t_end`, calling `on_accept`
/// after every accepted step (and once for the initial state).
pub fn integrate_adaptive<F, O>(
    rhs: F,
    t0: f64,
    y0: &Array2<Complex64>,
    t_end: f64,
    rtol: f64,
    atol: f64,
    mut on_accept: O,
) -> Result<(Array2<Complex64>, StepperStats)>
where
    F: Fn(&Array2<Complex64>) -> Array2<Complex64>,
    O: FnMut(f64, &Array2<Complex64>) -> Result<()>,
{
    let mut stats = StepperStats::default();
    let span = t_end - t0;
    if span <= 0.0 {
        return Err(QnmError::ValidationError(format!(
            "integration span must be positive, got [{t0}, {t_end}]"
        )));
    }
    let mut y = y0.clone();
    let mut t = t0;
    on_accept(t, &y)?;
    let mut k1 = rhs(&y);
    stats.rhs_evals += 1;
    // Initial step: balance solution and derivative scale.
    let d0 = rms(&y).max(atol);
    let d1 = rms(&k1);
    let mut h = if d1 > 0.0 { (0.01 * d0 / d1).min(span) } else { span * 1e-3 };

    let mut k = vec![Array2::<Complex64>::zeros(y.raw_dim()); 7];
    while t < t_end {
        if h < 1e-15 * t.abs().max(1.0) {
            return Err(QnmError::StepUnderflow { t, step: h });
        }
        h = h.min(t_end - t);
        k[0] = k1.clone();
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s - 1][j];
                if a != 0.0 {
                    ys.scaled_add(Complex64::new(h * a, 0.0), kj);
                }
            }
            k[s] = rhs(&ys);
            stats.rhs_evals += 1;
        }
        // k[6] was evaluated at y5 (the last A row equals B5): FSAL.
        let mut y5 = y.clone();
        let mut err = Array2::<Complex64>::zeros(y.raw_dim());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5.scaled_add(Complex64::new(h * B5[j], 0.0), kj);
            }
            let d = B5[j] - B4[j];
            if d != 0.0 {
                err.scaled_add(Complex64::new(h * d, 0.0), kj);
            }
        }
        let e = scaled_err(&err, &y, &y5, rtol, atol);
        if e.is_finite() && e <= 1.0 {
            t += h;
            y = y5;
            k1 = k[6].clone();
            stats.accepted += 1;
            stats.final_step = h;
            on_accept(t, &y)?;
        } else {
            stats.rejected += 1;
        }
        let factor = if e.is_finite() && e > 0.0 {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        } else if e == 0.0 {
            5.0
        } else {
            0.2
        };
        h *= factor;
    }
    Ok((y, stats))
}
