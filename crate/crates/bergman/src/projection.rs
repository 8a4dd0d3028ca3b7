//! The weighted Bergman projection and its kernel, in coefficient space.
//!
//! For a radial weight the projection acts monomial by monomial:
//!
//!   B (z^a zbar^b) = (alpha_{a-b} / alpha_a) z^{a-b}   for a >= b, else 0,
//!
//! because pairing z^a zbar^b against w^k survives only at k = a - b, where it
//! equals mu_{2a+1}. Summing over the terms of a series gives the coefficient
//! rule implemented here; no quadrature is involved beyond the moment table.
//!
//! The kernel is B(z, w) = sum_n alpha_n (z wbar)^n. Truncating at N leaves a
//! tail dominated by a geometric series: moment log-convexity makes the ratio
//! alpha_{n+1}/alpha_n non-increasing, so its maximum over n >= N (taken over
//! the rest of the table) gives a certified bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::series::{HoloSeries, MonomialSeries};

/// A truncated kernel evaluation together with its certificate.
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: Complex64,
    /// Index the series was truncated at (inclusive).
    pub truncation: usize,
    /// Upper bound on the dropped tail; +inf when the geometric-domination
    /// window cannot certify convergence at this |z wbar|.
    pub tail_bound: f64,
}

/// Apply the projection to a monomial series.
pub fn project(f: &MonomialSeries, table: &MomentTable) -> Result<HoloSeries> {
    let lm = table.log_mu_all();
    let mut needed = 0usize;
    for (&(a, b), _) in f.terms() {
        if a >= b {
            needed = needed.max(a as usize);
        }
    }
    if needed >= lm.len() {
        return Err(Error::InsufficientRange {
            needed,
            available: lm.len() - 1,
        });
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); needed + 1];
    let mut any = false;
    for (&(a, b), &c) in f.terms() {
        if a < b {
            continue;
        }
        let k = (a - b) as usize;
        // alpha_k / alpha_a = mu_{2a+1} / mu_{2k+1}
        coeffs[k] += c * (lm[a as usize] - lm[k]).exp();
        any = true;
    }
    if !any {
        return Ok(HoloSeries::new());
    }
    Ok(HoloSeries::from_coeffs(coeffs))
}

/// Evaluate the kernel series truncated at `truncation`, with a tail bound.
pub fn kernel_eval(
    table: &MomentTable,
    z: Complex64,
    w: Complex64,
    truncation: usize,
) -> Result<KernelValue> {
    if z.norm_sqr() >= 1.0 || w.norm_sqr() >= 1.0 {
        return Err(Error::Domain(
            "kernel arguments must lie in the open disc".into(),
        ));
    }
    let lm = table.log_mu_all();
    if truncation >= lm.len() {
        return Err(Error::InsufficientRange {
            needed: truncation,
            available: lm.len() - 1,
        });
    }
    let q = z * w.conj();
    let qn = q.norm();
    if qn == 0.0 {
        // Only n = 0 survives.
        return Ok(KernelValue {
            value: Complex64::new((-lm[0]).exp(), 0.0),
            truncation,
            tail_bound: 0.0,
        });
    }
    let ln_qn = qn.ln();
    let theta = q.arg();
    let mut value = Complex64::new(0.0, 0.0);
    for n in 0..=truncation {
        // alpha_n q^n, assembled in the exponent: exponential-family alpha_n
        // can dwarf f64 while the product stays tame.
        let magnitude = (-lm[n] + n as f64 * ln_qn).exp();
        let phase = n as f64 * theta;
        value += Complex64::new(magnitude * phase.cos(), magnitude * phase.sin());
    }

    // rho = max alpha_{n+1}/alpha_n over the remainder of the table. The
    // ratio is non-increasing (log-convexity of mu), so this dominates every
    // tail ratio past the truncation point.
    let window_start = truncation.min(lm.len() - 2);
    let mut ln_rho = f64::NEG_INFINITY;
    for n in window_start..lm.len() - 1 {
        ln_rho = ln_rho.max(lm[n] - lm[n + 1]);
    }
    let rho_q = (ln_rho + ln_qn).exp();
    let tail_bound = if rho_q < 1.0 {
        (-lm[truncation] + truncation as f64 * ln_qn).exp() * rho_q / (1.0 - rho_q)
    } else {
        f64::INFINITY
    };

    Ok(KernelValue {
        value,
        truncation,
        tail_bound,
    })
}
