//! The operator machinery behind exact Sobolev regularity of the projection:
//! the coefficient operator dual to j-fold differentiation, its per-mode
//! amplification factors and operator-norm bound, the empirical pairing
//! constant, and the randomized sweeps that check the resulting estimates.
//!
//! The dual operator M acts on holomorphic coefficients by
//!
//!   (M g)_{n+2j} = g_n F(n, j) alpha_{n+j} / alpha_n,
//!   F(n, j) = (n+j)!^2 / ((n+2j)! n!) = prod_{i=1..j} (n+i)/(n+j+i),
//!
//! and satisfies <d^j h, g> = <h, d^j M g> for holomorphic h, g. Its per-mode
//! squared amplification in the weighted norm is
//!
//!   factor(j, n) = F(n, j)^2 alpha_{n+j}^2 / (alpha_n alpha_{n+2j}),
//!
//! so sqrt(sup_n factor) bounds ||M|| on spans of the scanned modes. The
//! product form of F keeps its log exactly nonpositive in floating point.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{compute_moments, MomentTable, QuadratureConfig};
use crate::projection::project;
use crate::series::{inner_product, norm0, HoloSeries, MonomialSeries};
use crate::sobolev::{sobolev_norm, MAX_SOBOLEV_ORDER};
use crate::weights::RadialWeight;

/// Degree cap for the pairing-constant sample series.
pub const PAIRING_DEGREE_CAP: u32 = 30;

/// Samples whose normalizer falls below this are skipped, not divided by.
const NORM_FLOOR: f64 = 1e-14;

/// ln F(n, j) via the product form; every factor is < 1, so the sum is
/// exactly nonpositive however it rounds.
pub fn log_factorial_factor(n: usize, j: u32) -> f64 {
    let (n, j) = (n as f64, j as f64);
    let mut acc = 0.0;
    let mut i = 1.0;
    while i <= j {
        acc += ((n + i) / (n + j + i)).ln();
        i += 1.0;
    }
    acc
}

fn check_j(j: u32) -> Result<()> {
    if j == 0 {
        return Err(Error::Domain("the dual operator needs j >= 1".into()));
    }
    if j > MAX_SOBOLEV_ORDER {
        return Err(Error::UnsupportedOrder {
            order: j,
            max: MAX_SOBOLEV_ORDER,
        });
    }
    Ok(())
}

/// Apply the dual operator: output degree is deg g + 2j.
pub fn derivative_dual(g: &HoloSeries, j: u32, table: &MomentTable) -> Result<HoloSeries> {
    check_j(j)?;
    let Some(deg) = g.degree() else {
        return Ok(HoloSeries::new());
    };
    let j = j as usize;
    let needed = deg as usize + 2 * j;
    if needed > table.n_max() {
        return Err(Error::InsufficientRange {
            needed,
            available: table.n_max(),
        });
    }
    let lm = table.log_mu_all();
    let mut out = vec![Complex64::new(0.0, 0.0); needed + 1];
    for (n, &c) in g.coeffs().iter().enumerate() {
        // F(n,j) alpha_{n+j}/alpha_n = exp(ln F + log mu_n - log mu_{n+j})
        let scale = (log_factorial_factor(n, j as u32) + lm[n] - lm[n + j]).exp();
        out[n + 2 * j] = c * scale;
    }
    Ok(HoloSeries::from_coeffs(out))
}

/// | <d^j h, g> - <h, d^j (M g)> | for holomorphic h, g: the defect of the
/// duality the operator exists to provide. Zero in exact arithmetic.
pub fn duality_residual(
    h: &HoloSeries,
    g: &HoloSeries,
    j: u32,
    table: &MomentTable,
) -> Result<f64> {
    check_j(j)?;
    let lhs = inner_product(&h.derivative(j).to_monomials(), &g.to_monomials(), table)?;
    let dual = derivative_dual(g, j, table)?;
    let rhs = inner_product(&h.to_monomials(), &dual.derivative(j).to_monomials(), table)?;
    Ok((lhs - rhs).norm())
}

/// Squared per-mode amplification of the dual operator at coefficient n >= 1.
pub fn dual_mode_factor(j: u32, n: usize, table: &MomentTable) -> Result<f64> {
    check_j(j)?;
    if n == 0 {
        return Err(Error::Domain("mode factors are defined for n >= 1".into()));
    }
    let j = j as usize;
    let needed = n + 2 * j;
    if needed > table.n_max() {
        return Err(Error::InsufficientRange {
            needed,
            available: table.n_max(),
        });
    }
    let lm = table.log_mu_all();
    // 2 ln F + 2 log alpha_{n+j} - log alpha_n - log alpha_{n+2j}
    let log_alpha_part = -2.0 * lm[n + j] + lm[n] + lm[n + 2 * j];
    Ok((2.0 * log_factorial_factor(n, j as u32) + log_alpha_part).exp())
}

/// The scanned supremum of mode factors and the operator-norm bound it yields.
#[derive(Debug, Clone, Serialize)]
pub struct DualOperatorBound {
    pub j: u32,
    /// Modes 1..=n_cap were scanned.
    pub n_cap: usize,
    /// sup of dual_mode_factor over the scan; ties keep the lowest index.
    pub factor_sup: f64,
    pub argmax: usize,
    /// sqrt(factor_sup): bounds ||M g|| / ||g|| for g supported on the scan.
    pub operator_bound: f64,
    /// The factor at n = n_cap, for eyeballing how settled the sweep is.
    pub factor_at_cap: f64,
}

pub fn dual_operator_bound(j: u32, n_cap: usize, table: &MomentTable) -> Result<DualOperatorBound> {
    check_j(j)?;
    if n_cap < 1 {
        return Err(Error::Domain("the mode scan needs n_cap >= 1".into()));
    }
    let mut factor_sup = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    for n in 1..=n_cap {
        let factor = dual_mode_factor(j, n, table)?;
        if factor > factor_sup {
            factor_sup = factor;
            argmax = n;
        }
    }
    Ok(DualOperatorBound {
        j,
        n_cap,
        factor_sup,
        argmax,
        operator_bound: factor_sup.sqrt(),
        factor_at_cap: dual_mode_factor(j, n_cap, table)?,
    })
}

/// Empirical estimate of the pairing constant D in
/// |<d^j p, f>| <= D ||p||_0 ||f||_{j}.
#[derive(Debug, Clone, Serialize)]
pub struct PairingEstimate {
    pub j: u32,
    pub d_j: f64,
    /// Random samples drawn (one deterministic pair is always included).
    pub samples: u32,
    pub seed: u64,
    pub skipped: u32,
}

pub fn estimate_pairing_constant(
    j: u32,
    samples: u32,
    seed: u64,
    table: &MomentTable,
) -> Result<PairingEstimate> {
    check_j(j)?;
    if samples < 1 {
        return Err(Error::Domain(
            "the pairing estimate needs samples >= 1".into(),
        ));
    }
    if table.n_max() < PAIRING_DEGREE_CAP as usize {
        return Err(Error::InsufficientRange {
            needed: PAIRING_DEGREE_CAP as usize,
            available: table.n_max(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut skipped = 0u32;
    // Sample 0 is pinned: p = z^j, f = 1. Then the seeded stream; a prefix of
    // a longer run is bit-identical, so growing `samples` never lowers d_j.
    for index in 0..=samples {
        let (p, f) = if index == 0 {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); j as usize + 1];
            coeffs[j as usize] = Complex64::new(1.0, 0.0);
            (
                HoloSeries::from_coeffs(coeffs),
                MonomialSeries::from_terms([((0, 0), Complex64::new(1.0, 0.0))]),
            )
        } else {
            (
                HoloSeries::random_dense(PAIRING_DEGREE_CAP - j, &mut rng),
                MonomialSeries::random_dense(PAIRING_DEGREE_CAP, &mut rng),
            )
        };
        let denom = norm0(&p.to_monomials(), table)? * sobolev_norm(&f, j, table)?.total;
        if denom < NORM_FLOOR {
            skipped += 1;
            continue;
        }
        let pairing = inner_product(&p.derivative(j).to_monomials(), &f, table)?.norm();
        let ratio = pairing / denom;
        if ratio > best {
            best = ratio;
        }
    }
    if !best.is_finite() {
        return Err(Error::DegenerateSamples);
    }
    Ok(PairingEstimate {
        j,
        d_j: best,
        samples,
        seed,
        skipped,
    })
}

/// Randomized scan of ||B f||_k / ||f||_k.
#[derive(Debug, Clone, Serialize)]
pub struct SobolevRatioSweep {
    pub k: u32,
    pub degree_cap: u32,
    pub samples: u32,
    pub seed: u64,
    pub max_ratio: f64,
    pub used: u32,
    pub skipped: u32,
}

pub fn sobolev_ratio_sweep(
    k: u32,
    degree_cap: u32,
    samples: u32,
    seed: u64,
    table: &MomentTable,
) -> Result<SobolevRatioSweep> {
    if k > MAX_SOBOLEV_ORDER {
        return Err(Error::UnsupportedOrder {
            order: k,
            max: MAX_SOBOLEV_ORDER,
        });
    }
    if samples < 1 {
        return Err(Error::Domain("the ratio sweep needs samples >= 1".into()));
    }
    if (degree_cap as usize) > table.n_max() {
        return Err(Error::InsufficientRange {
            needed: degree_cap as usize,
            available: table.n_max(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = f64::NEG_INFINITY;
    let (mut used, mut skipped) = (0u32, 0u32);
    for _ in 0..samples {
        let f = MonomialSeries::random_dense(degree_cap, &mut rng);
        let denom = sobolev_norm(&f, k, table)?.total;
        if denom < NORM_FLOOR {
            skipped += 1;
            continue;
        }
        let pf = project(&f, table)?;
        let num = sobolev_norm(&pf.to_monomials(), k, table)?.total;
        let ratio = num / denom;
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateSamples);
    }
    Ok(SobolevRatioSweep {
        k,
        degree_cap,
        samples,
        seed,
        max_ratio,
        used,
        skipped,
    })
}

/// One check of the truncated-derivative estimate
/// || trunc_N d^j B f ||_0 <= d_j * bound(j, N) * ||f||_j.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn truncated_bound_check(
    f: &MonomialSeries,
    j: u32,
    n_cap: usize,
    d_j: f64,
    table: &MomentTable,
) -> Result<TruncatedBoundCheck> {
    check_j(j)?;
    if !(d_j.is_finite() && d_j > 0.0) {
        return Err(Error::Domain(format!(
            "d_j must be positive and finite, got {d_j}"
        )));
    }
    let projected = project(f, table)?;
    let truncated = projected.derivative(j).truncate(n_cap as u32);
    let lhs = norm0(&truncated.to_monomials(), table)?;
    let bound = dual_operator_bound(j, n_cap, table)?;
    let rhs = d_j * bound.operator_bound * sobolev_norm(f, j, table)?.total;
    Ok(TruncatedBoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Moment gap of a cutoff against its base at one (t, n).
#[derive(Debug, Clone, Serialize)]
pub struct CutoffGapRow {
    pub t: f64,
    pub n: usize,
    pub log_alpha_cutoff: f64,
    pub log_alpha_base: f64,
    /// |alpha_n(cutoff)/alpha_n(base) - 1|
    pub rel_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneFlag {
    pub n: usize,
    /// Gaps never grew as t shrank (up to 1e-12 slack).
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffConvergence {
    pub base: String,
    pub t_list: Vec<f64>,
    pub rows: Vec<CutoffGapRow>,
    pub monotone: Vec<MonotoneFlag>,
}

/// How fast cutoff moments converge to the base weight's as t -> 0.
/// t_list must be strictly decreasing inside (0, 1).
pub fn cutoff_moment_convergence(
    base: &RadialWeight,
    n_list: &[usize],
    t_list: &[f64],
    cfg: &QuadratureConfig,
) -> Result<CutoffConvergence> {
    if base.is_cutoff() {
        return Err(Error::NestedCutoff);
    }
    if n_list.is_empty() || t_list.is_empty() {
        return Err(Error::Domain(
            "convergence scan needs nonempty n_list and t_list".into(),
        ));
    }
    for pair in t_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::Domain(format!(
                "t_list must be strictly decreasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if t_list.iter().any(|&t| !(0.0..1.0).contains(&t) || t == 0.0) {
        return Err(Error::Domain("every t must lie in (0, 1)".into()));
    }
    let n_max = *n_list.iter().max().expect("nonempty");
    let base_table = compute_moments(base, n_max, cfg)?;
    let mut rows = Vec::with_capacity(t_list.len() * n_list.len());
    let mut gaps_by_n: Vec<Vec<f64>> = vec![Vec::new(); n_list.len()];
    for &t in t_list {
        let cut = RadialWeight::cutoff(base.clone(), t)?;
        let cut_table = compute_moments(&cut, n_max, cfg)?;
        for (slot, &n) in n_list.iter().enumerate() {
            let la_cut = cut_table.log_alpha(n)?;
            let la_base = base_table.log_alpha(n)?;
            let rel_gap = ((la_cut - la_base).exp() - 1.0).abs();
            rows.push(CutoffGapRow {
                t,
                n,
                log_alpha_cutoff: la_cut,
                log_alpha_base: la_base,
                rel_gap,
            });
            gaps_by_n[slot].push(rel_gap);
        }
    }
    let monotone = n_list
        .iter()
        .zip(&gaps_by_n)
        .map(|(&n, gaps)| MonotoneFlag {
            n,
            ok: gaps.windows(2).all(|p| p[1] <= p[0] + 1e-12),
        })
        .collect();
    Ok(CutoffConvergence {
        base: base.to_string(),
        t_list: t_list.to_vec(),
        rows,
        monotone,
    })
}
