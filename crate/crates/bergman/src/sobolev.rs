//! Weighted Sobolev norms on disc series.
//!
//! ||f||_{k,lambda}^2 = sum_{b1 + b2 <= k} || d_z^{b1} d_zbar^{b2} f ||_{0,lambda}^2
//!
//! computed exactly on the monomial representation: each mixed derivative is
//! again a finite series, and its squared weighted L^2 norm comes from the
//! moment table.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::series::{inner_product, MonomialSeries};

/// Largest Sobolev order served; the derivative grid grows quadratically and
/// nothing downstream needs more.
pub const MAX_SOBOLEV_ORDER: u32 = 6;

/// One mixed-derivative contribution: sq = || d_z^{b1} d_zbar^{b2} f ||^2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SobolevTerm {
    pub b1: u32,
    pub b2: u32,
    pub sq: f64,
}

/// The full norm: total = sqrt(sum of sq over all b1 + b2 <= k).
#[derive(Debug, Clone, Serialize)]
pub struct SobolevNorm {
    pub k: u32,
    pub total: f64,
    pub terms: Vec<SobolevTerm>,
}

pub fn sobolev_norm(f: &MonomialSeries, k: u32, table: &MomentTable) -> Result<SobolevNorm> {
    if k > MAX_SOBOLEV_ORDER {
        return Err(Error::UnsupportedOrder {
            order: k,
            max: MAX_SOBOLEV_ORDER,
        });
    }
    // Column b2 of the derivative grid, advanced in place: row b1 within it.
    let mut terms = Vec::with_capacity(((k + 1) * (k + 2) / 2) as usize);
    let mut by_zbar = f.clone();
    for b2 in 0..=k {
        let mut mixed = by_zbar.clone();
        for b1 in 0..=k - b2 {
            let p = inner_product(&mixed, &mixed, table)?;
            terms.push(SobolevTerm {
                b1,
                b2,
                sq: p.re.max(0.0),
            });
            if b1 < k - b2 {
                mixed = mixed.d_z();
            }
        }
        if b2 < k {
            by_zbar = by_zbar.d_zbar();
        }
    }
    // Wire order: by total derivative order, then b1.
    terms.sort_by_key(|t| (t.b1 + t.b2, t.b1));
    let total = terms.iter().map(|t| t.sq).sum::<f64>().sqrt();
    Ok(SobolevNorm { k, total, terms })
}
