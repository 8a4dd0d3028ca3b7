//! Tanh-sinh quadrature on (0, 1), carried out entirely in the log domain.
//!
//! The substitution u = (1 + tanh((pi/2) sinh tau)) / 2 maps the real line to
//! (0, 1) and makes the trapezoid rule double-exponentially accurate, endpoint
//! singularities included. Nodes are stored as the triple
//! (ln u, ln(1-u), ln w): both endpoint distances are kept in log form, so an
//! integrand can be evaluated without cancellation even when 1-u is far below
//! machine epsilon relative to u. Sums are accumulated with a streaming
//! log-sum-exp, which keeps integrals representable when every sample of the
//! integrand underflows e^-745.
//!
//! Levels: level L uses step h = 2^-L on tau in [-TAU_MAX, TAU_MAX]. Each
//! level re-evaluates its full grid (node tables are cached process-wide), and
//! refinement stops when consecutive levels agree in log to the requested
//! tolerance — which is exactly relative agreement of the integrals.

use std::sync::OnceLock;

const LN_QUARTER_PI: f64 = -0.241_564_475_270_490_5;

/// tau truncation. pi*sinh(10)/2 ~ 1.7e4, so the discarded tail of the
/// transformed integrand is far below every tolerance this crate uses, even
/// for endpoint singularities as strong as (1-u)^(-0.99).
const TAU_MAX: f64 = 10.0;

/// Coarsest level the refinement ladder starts from (h = 1/8).
pub(crate) const MIN_LEVEL: u32 = 3;

/// Hard cap on refinement depth; level 16 holds ~1.3M nodes.
pub(crate) const LEVEL_CAP: u32 = 16;

/// Once an integrand sample drops this many nats below the running maximum on
/// the way out from the peak, the rest of that side of the grid is abandoned.
/// exp(-120) ~ 8e-53, vastly below any tolerance in play; the integrands here
/// are log-concave-ish and unimodal in tau, so nothing lies beyond the drop.
pub(crate) const OUTWARD_BREAK_NATS: f64 = 120.0;

/// Tanh-sinh nodes for one level, center at tau = 0, index i <-> tau = (i - center) h.
pub(crate) struct LevelNodes {
    pub ln_u: Vec<f64>,
    pub ln_c: Vec<f64>,
    pub ln_w: Vec<f64>,
    pub center: usize,
    pub h: f64,
}

/// Why an adaptive integration gave up. Callers attach context (which moment).
#[derive(Debug, Clone, Copy)]
pub(crate) enum QuadFailure {
    /// Consecutive levels never agreed to tolerance.
    NonConvergence { levels: u32 },
    /// The integrand vanished (or was -inf) on two consecutive levels.
    Degenerate,
}

fn ln1p_exp_neg(x: f64) -> f64 {
    // ln(1 + e^-x) for x >= 0.
    (-x).exp().ln_1p()
}

fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax - std::f64::consts::LN_2 + ln1p_exp_neg(2.0 * ax)
}

fn build_level(level: u32) -> LevelNodes {
    let h = 0.5_f64.powi(level as i32);
    let count = (TAU_MAX / h).floor() as i64;
    let center = count as usize;
    let n = 2 * center + 1;
    let mut ln_u = vec![0.0; n];
    let mut ln_c = vec![0.0; n];
    let mut ln_w = vec![0.0; n];
    for j in -count..=count {
        let tau = j as f64 * h;
        let a = std::f64::consts::FRAC_PI_2 * tau.sinh();
        // u = 1/(1 + e^{-2a}), c = 1 - u = e^{-2a}/(1 + e^{-2a})
        let (lu, lc) = if a >= 0.0 {
            let t2 = 2.0 * a;
            (-ln1p_exp_neg(t2), -(t2 + ln1p_exp_neg(t2)))
        } else {
            let t2 = -2.0 * a;
            (-(t2 + ln1p_exp_neg(t2)), -ln1p_exp_neg(t2))
        };
        // w = du/dtau = (pi/4) cosh(tau) / cosh^2(a)
        let lw = LN_QUARTER_PI + ln_cosh(tau) - 2.0 * ln_cosh(a);
        let i = (j + count) as usize;
        ln_u[i] = lu;
        ln_c[i] = lc;
        ln_w[i] = lw;
    }
    LevelNodes {
        ln_u,
        ln_c,
        ln_w,
        center,
        h,
    }
}

pub(crate) fn level_nodes(level: u32) -> &'static LevelNodes {
    assert!(
        (1..=LEVEL_CAP).contains(&level),
        "quadrature level out of range"
    );
    static CACHE: [OnceLock<LevelNodes>; LEVEL_CAP as usize + 1] =
        [const { OnceLock::new() }; LEVEL_CAP as usize + 1];
    CACHE[level as usize].get_or_init(|| build_level(level))
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }

    /// Largest term seen so far (-inf before the first finite term).
    pub(crate) fn max(&self) -> f64 {
        self.max
    }
}

/// One full-grid pass at the given level: ln of h * sum_j w_j g(u_j), where
/// ln_g(u, c, ln_u, ln_c) returns ln g. No early exit; this is the plain
/// reference path used by tests and one-off integrals.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn eval_level<F>(ln_g: &F, level: u32) -> f64
where
    F: Fn(f64, f64, f64, f64) -> f64,
{
    let nodes = level_nodes(level);
    let mut acc = LogSum::new();
    for i in 0..nodes.ln_u.len() {
        let (lu, lc) = (nodes.ln_u[i], nodes.ln_c[i]);
        acc.add(nodes.ln_w[i] + ln_g(lu.exp(), lc.exp(), lu, lc));
    }
    nodes.h.ln() + acc.value()
}

/// Adaptive integration of ln g over (0, 1), returning ln of the integral.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn integrate_log<F>(
    ln_g: &F,
    rel_tol: f64,
    abs_tol_log: f64,
    max_levels: u32,
) -> Result<f64, QuadFailure>
where
    F: Fn(f64, f64, f64, f64) -> f64,
{
    let top = max_levels.min(LEVEL_CAP);
    let mut prev: Option<f64> = None;
    for level in MIN_LEVEL..=top {
        let cur = eval_level(ln_g, level);
        if let Some(p) = prev {
            if p == f64::NEG_INFINITY && cur == f64::NEG_INFINITY {
                return Err(QuadFailure::Degenerate);
            }
            if (cur - p).abs() <= rel_tol || (cur <= abs_tol_log && p <= abs_tol_log) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(QuadFailure::NonConvergence { levels: top })
}
