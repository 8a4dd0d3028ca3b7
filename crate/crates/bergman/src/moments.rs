//! Moment tables: the odd moments mu_{2n+1} of a radial weight and the
//! coefficient sequence alpha_n = 1/mu_{2n+1} they induce.
//!
//! mu_{2n+1} = 2 pi int_0^1 r^{2n+1} lambda(r) dr = pi int_0^1 u^n lambda(sqrt u) du
//!
//! after u = r^2. Everything is stored as log mu: exponential weights push
//! moments through the double-precision floor long before interesting n, and
//! alpha_n = exp(-log mu_n) stays exactly reciprocal in the log representation.
//!
//! Power weights have the closed Beta form
//! mu_{2n+1} = pi B(n+1, t+1) = pi Gamma(n+1) Gamma(t+1) / Gamma(n+t+2);
//! everything else goes through tanh-sinh quadrature. The quadrature path
//! caches ln w + ln lambda per node, so a full table costs one weight
//! evaluation per node regardless of how many moments are requested, and each
//! moment reuses the refinement depth its predecessor converged at.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{self, LevelNodes, LogSum, QuadFailure, LEVEL_CAP, MIN_LEVEL};
use crate::special::ln_gamma;
use crate::weights::RadialWeight;

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Slack allowed when checking log-convexity of a computed table; covers
/// quadrature noise, never a real violation.
pub const LOG_CONVEXITY_SLACK: f64 = 1e-9;

/// Tolerances for the adaptive tanh-sinh refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Stop once consecutive levels agree to this in log (= relative) scale.
    pub rel_tol: f64,
    /// Treat log-integrals at or below this as converged-to-zero.
    pub abs_tol_log: f64,
    /// Deepest refinement level; each level doubles the node count.
    pub max_levels: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol_log: -745.0,
            max_levels: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if !self.abs_tol_log.is_finite() || self.abs_tol_log > 0.0 {
            return Err(Error::InvalidConfig(format!(
                "abs_tol_log must be finite and <= 0, got {}",
                self.abs_tol_log
            )));
        }
        if !(4..=LEVEL_CAP).contains(&self.max_levels) {
            return Err(Error::InvalidConfig(format!(
                "max_levels must lie in 4..={LEVEL_CAP}, got {}",
                self.max_levels
            )));
        }
        Ok(())
    }
}

/// How a table's entries were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Quadrature,
}

/// Moments mu_{2n+1} for n = 0..=n_max of one weight, in log form.
#[derive(Debug, Clone)]
pub struct MomentTable {
    weight: RadialWeight,
    log_mu: Vec<f64>,
    mu: Vec<f64>,
    method: MomentMethod,
}

impl MomentTable {
    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn method(&self) -> MomentMethod {
        self.method
    }

    /// Largest moment index held.
    pub fn n_max(&self) -> usize {
        self.log_mu.len() - 1
    }

    fn check_range(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            Err(Error::InsufficientRange {
                needed: n,
                available: self.n_max(),
            })
        } else {
            Ok(())
        }
    }

    /// log mu_{2n+1}.
    pub fn log_mu(&self, n: usize) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.log_mu[n])
    }

    /// mu_{2n+1} (may underflow to 0 for deep exponential tables; the log form
    /// is the authoritative one).
    pub fn mu(&self, n: usize) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.mu[n])
    }

    /// log alpha_n = -log mu_{2n+1}, exactly.
    pub fn log_alpha(&self, n: usize) -> Result<f64> {
        Ok(-self.log_mu(n)?)
    }

    pub fn alpha(&self, n: usize) -> Result<f64> {
        Ok((-self.log_mu(n)?).exp())
    }

    pub(crate) fn log_mu_all(&self) -> &[f64] {
        &self.log_mu
    }

    pub(crate) fn mu_all(&self) -> &[f64] {
        &self.mu
    }
}

/// Closed-form log mu_{2n+1} for the power weight (1-r^2)^t.
pub fn power_log_moment(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    LN_PI + ln_gamma(nf + 1.0) + ln_gamma(t + 1.0) - ln_gamma(nf + t + 2.0)
}

/// Closed-form alpha_n for the power weight.
pub fn power_alpha(t: f64, n: usize) -> f64 {
    (-power_log_moment(t, n)).exp()
}

/// Moment table for a weight: closed form where one exists (power family),
/// tanh-sinh quadrature otherwise.
pub fn compute_moments(
    weight: &RadialWeight,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<MomentTable> {
    cfg.validate()?;
    match weight {
        RadialWeight::Power { t } => {
            let log_mu: Vec<f64> = (0..=n_max).map(|n| power_log_moment(*t, n)).collect();
            finish_table(weight.clone(), log_mu, MomentMethod::ClosedForm)
        }
        _ => compute_moments_quadrature(weight, n_max, cfg),
    }
}

/// Forced quadrature path (the closed form above is checked against this).
pub fn compute_moments_quadrature(
    weight: &RadialWeight,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<MomentTable> {
    cfg.validate()?;
    let mut integrator = MomentIntegrator::new(weight, cfg.max_levels.min(LEVEL_CAP));
    let mut log_mu = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ln = integrator.log_moment(n, cfg).map_err(|f| match f {
            QuadFailure::NonConvergence { levels } => Error::QuadratureNonConvergence { n, levels },
            QuadFailure::Degenerate => Error::DegenerateWeight(n),
        })?;
        log_mu.push(LN_PI + ln);
    }
    finish_table(weight.clone(), log_mu, MomentMethod::Quadrature)
}

fn finish_table(
    weight: RadialWeight,
    log_mu: Vec<f64>,
    method: MomentMethod,
) -> Result<MomentTable> {
    if let Some(n) = log_mu
        .iter()
        .position(|v| v.is_nan() || *v == f64::INFINITY)
    {
        return Err(Error::DegenerateWeight(n));
    }
    let mu = log_mu.iter().map(|v| v.exp()).collect();
    Ok(MomentTable {
        weight,
        log_mu,
        mu,
        method,
    })
}

/// The weight-dependent per-node data for the moment integrand, cached per
/// level: a_i = ln w_i + ln lambda(u_i). A moment evaluation then only adds
/// n ln u_i on top.
struct MomentIntegrator<'w> {
    weight: &'w RadialWeight,
    levels: Vec<Option<CachedLevel>>,
    start_level: u32,
    top_level: u32,
}

struct CachedLevel {
    nodes: &'static LevelNodes,
    a: Vec<f64>,
}

impl<'w> MomentIntegrator<'w> {
    fn new(weight: &'w RadialWeight, top_level: u32) -> Self {
        MomentIntegrator {
            weight,
            levels: (0..=top_level).map(|_| None).collect(),
            start_level: MIN_LEVEL,
            top_level,
        }
    }

    fn cached(&mut self, level: u32) -> &CachedLevel {
        let slot = &mut self.levels[level as usize];
        if slot.is_none() {
            let nodes = quad::level_nodes(level);
            let a: Vec<f64> = (0..nodes.ln_u.len())
                .map(|i| {
                    let (lu, lc) = (nodes.ln_u[i], nodes.ln_c[i]);
                    nodes.ln_w[i] + self.weight.log_eval_split(lu.exp(), lc.exp(), lu, lc)
                })
                .collect();
            *slot = Some(CachedLevel { nodes, a });
        }
        slot.as_ref().unwrap()
    }

    /// ln of int_0^1 u^n lambda(sqrt u) du.
    fn log_moment(
        &mut self,
        n: usize,
        cfg: &QuadratureConfig,
    ) -> std::result::Result<f64, QuadFailure> {
        let start = self
            .start_level
            .clamp(MIN_LEVEL, self.top_level.saturating_sub(1).max(MIN_LEVEL));
        let mut prev: Option<f64> = None;
        for level in start..=self.top_level {
            let cur = self.eval_level(level, n);
            if let Some(p) = prev {
                if p == f64::NEG_INFINITY && cur == f64::NEG_INFINITY {
                    return Err(QuadFailure::Degenerate);
                }
                if (cur - p).abs() <= cfg.rel_tol
                    || (cur <= cfg.abs_tol_log && p <= cfg.abs_tol_log)
                {
                    // Moments shrink monotonically with n, so the next moment
                    // will converge at (almost) the same depth.
                    self.start_level = level.saturating_sub(1).max(MIN_LEVEL);
                    return Ok(cur);
                }
            }
            prev = Some(cur);
        }
        Err(QuadFailure::NonConvergence {
            levels: self.top_level,
        })
    }

    /// One level of the moment integrand, walking outward from tau = 0 and
    /// abandoning each direction once it has fallen OUTWARD_BREAK_NATS below
    /// the running maximum for several consecutive nodes. The integrand
    /// u^n lambda(u) w(tau) is unimodal along each direction (weight decay,
    /// the monomial pull toward u = 1, and the double-exponential window are
    /// all one-sided), so nothing lies beyond the drop.
    fn eval_level(&mut self, level: u32, n: usize) -> f64 {
        let nf = n as f64;
        let cached = self.cached(level);
        let (a, ln_u) = (&cached.a, &cached.nodes.ln_u);
        let center = cached.nodes.center;
        let mut acc = LogSum::new();
        for dir in [1i64, -1] {
            let mut below = 0u32;
            let mut i = center as i64 + dir.min(0); // center once, on the + pass
            while (0..a.len() as i64).contains(&i) {
                let v = a[i as usize] + nf * ln_u[i as usize];
                acc.add(v);
                if v < acc.max() - quad::OUTWARD_BREAK_NATS {
                    below += 1;
                    if below >= 3 {
                        break;
                    }
                } else {
                    below = 0;
                }
                i += dir;
            }
        }
        cached.nodes.h.ln() + acc.value()
    }
}

/// Outcome of scanning a table for failures of moment log-convexity
/// 2 log mu_{n+j} <= log mu_n + log mu_{n+2j} (Cauchy-Schwarz in the weighted
/// space; a genuine violation means the table is wrong).
#[derive(Debug, Clone, Serialize)]
pub struct LogConvexityReport {
    pub j_max: usize,
    pub checked: usize,
    pub violations: Vec<ConvexityViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityViolation {
    pub n: usize,
    pub j: usize,
    /// 2 log mu_{n+j} - log mu_n - log mu_{n+2j}, positive past the slack.
    pub excess: f64,
}

pub fn check_log_convexity(table: &MomentTable, j_max: usize) -> Result<LogConvexityReport> {
    if j_max == 0 {
        return Err(Error::InvalidConfig(
            "log-convexity check needs j_max >= 1".into(),
        ));
    }
    if 2 * j_max > table.n_max() {
        return Err(Error::InsufficientRange {
            needed: 2 * j_max,
            available: table.n_max(),
        });
    }
    let lm = table.log_mu_all();
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for j in 1..=j_max {
        for n in 0..=table.n_max() - 2 * j {
            checked += 1;
            let excess = 2.0 * lm[n + j] - lm[n] - lm[n + 2 * j];
            if excess > LOG_CONVEXITY_SLACK {
                violations.push(ConvexityViolation { n, j, excess });
            }
        }
    }
    Ok(LogConvexityReport {
        j_max,
        checked,
        violations,
    })
}
