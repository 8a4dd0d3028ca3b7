//! Finite series of disc monomials z^a zbar^b, and their holomorphic
//! specialization.
//!
//! For a radial weight, monomials are orthogonal in L^2(disc, lambda dA)
//! unless they share the holomorphy defect a - b, and on that diagonal the
//! pairing collapses to a single moment:
//!
//!   <z^a zbar^b, z^c zbar^d> = mu_{2s+1} delta_{a-b, c-d},  s = (a+b+c+d)/2.
//!
//! Inner products therefore group terms by a - b and pair only within a
//! diagonal, which is what keeps the randomized operator sweeps cheap.
//!
//! The JSON wire format is {"terms": [{"a": .., "b": .., "re": .., "im": ..}]}
//! with terms sorted by (a, b); duplicate (a, b) entries accumulate on read.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentTable;

#[derive(Serialize, Deserialize)]
struct TermJson {
    a: u32,
    b: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    terms: Vec<TermJson>,
}

/// A finite linear combination of z^a zbar^b.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonomialSeries {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl MonomialSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Complex64)>>(iter: I) -> Self {
        let mut s = Self::new();
        for ((a, b), c) in iter {
            s.add_term(a, b, c);
        }
        s
    }

    /// Add c * z^a zbar^b, accumulating onto an existing term; exact zeros are
    /// pruned so the empty series has a unique representation.
    pub fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        let slot = self.terms.entry((a, b)).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if slot.re == 0.0 && slot.im == 0.0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.terms
            .get(&(a, b))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest a + b present, or None for the zero series.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// d/dz: z^a zbar^b -> a z^{a-1} zbar^b.
    pub fn d_z(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), &c)| ((a - 1, b), c * a as f64)),
        )
    }

    /// d/dzbar: z^a zbar^b -> b z^a zbar^{b-1}.
    pub fn d_zbar(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), &c)| ((a, b - 1), c * b as f64)),
        )
    }

    /// Keep only terms of total degree a + b <= n.
    pub fn truncate(&self, n: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, b), _)| a + b <= n)
                .map(|(&k, &c)| (k, c)),
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * z.powu(a) * zb.powu(b))
            .sum()
    }

    /// Dense series with independent standard complex Gaussian coefficients on
    /// every monomial of total degree <= deg.
    pub fn random_dense<R: Rng + ?Sized>(deg: u32, rng: &mut R) -> Self {
        let mut s = Self::new();
        for a in 0..=deg {
            for b in 0..=deg - a {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                s.add_term(a, b, Complex64::new(re, im));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let terms = self
            .terms
            .iter()
            .map(|(&(a, b), c)| TermJson {
                a,
                b,
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_string(&SeriesJson { terms }).expect("series serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: SeriesJson = serde_json::from_str(text)?;
        let mut s = Self::new();
        for t in parsed.terms {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite coefficient on term a={}, b={}",
                    t.a, t.b
                )));
            }
            s.add_term(t.a, t.b, Complex64::new(t.re, t.im));
        }
        Ok(s)
    }
}

/// A holomorphic polynomial sum_n c_n z^n, stored densely by power.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HoloSeries {
    coeffs: Vec<Complex64>,
}

impl HoloSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from dense coefficients (index = power); trailing zeros trimmed.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        HoloSeries { coeffs }
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some((self.coeffs.len() - 1) as u32)
        }
    }

    /// j-th derivative: c_n z^n -> c_n n!/(n-j)! z^{n-j}.
    pub fn derivative(&self, j: u32) -> Self {
        if j as usize >= self.coeffs.len() {
            return Self::new();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - j as usize);
        for n in j as usize..self.coeffs.len() {
            let mut factor = 1.0;
            for i in 0..j as usize {
                factor *= (n - i) as f64;
            }
            out.push(self.coeffs[n] * factor);
        }
        Self::from_coeffs(out)
    }

    /// Drop all powers above n.
    pub fn truncate(&self, n: u32) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(n as usize + 1).copied().collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn random_dense<R: Rng + ?Sized>(deg: u32, rng: &mut R) -> Self {
        let coeffs = (0..=deg)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn to_monomials(&self) -> MonomialSeries {
        MonomialSeries::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| ((n as u32, 0), c)),
        )
    }

    pub fn to_json(&self) -> String {
        self.to_monomials().to_json()
    }

    /// Parse the common wire format, rejecting any term with b != 0.
    pub fn from_json(text: &str) -> Result<Self> {
        let mono = MonomialSeries::from_json(text)?;
        Self::try_from(&mono)
    }
}

impl TryFrom<&MonomialSeries> for HoloSeries {
    type Error = Error;

    fn try_from(m: &MonomialSeries) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m.degree().map_or(0, |d| d as usize + 1)];
        for (&(a, b), &c) in m.terms() {
            if b != 0 {
                return Err(Error::Domain(format!(
                    "series has an anti-holomorphic term z^{a} zbar^{b}"
                )));
            }
            coeffs[a as usize] = c;
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

impl From<&HoloSeries> for MonomialSeries {
    fn from(h: &HoloSeries) -> Self {
        h.to_monomials()
    }
}

/// <f, g> in L^2(disc, lambda dA), via the diagonal selection rule.
pub fn inner_product(
    f: &MonomialSeries,
    g: &MonomialSeries,
    table: &MomentTable,
) -> Result<Complex64> {
    // Group g by holomorphy defect once; f streams against the groups.
    let mut g_diag: BTreeMap<i64, Vec<(u32, Complex64)>> = BTreeMap::new();
    for (&(c, d), &coeff) in g.terms() {
        g_diag
            .entry(c as i64 - d as i64)
            .or_default()
            .push((c + d, coeff.conj()));
    }
    let mu = table.mu_all();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(a, b), &cf) in f.terms() {
        let Some(partners) = g_diag.get(&(a as i64 - b as i64)) else {
            continue;
        };
        let ab = a + b;
        for &(cd, cg_conj) in partners {
            let s = ((ab + cd) / 2) as usize;
            if s >= mu.len() {
                return Err(Error::InsufficientRange {
                    needed: s,
                    available: mu.len() - 1,
                });
            }
            acc += cf * cg_conj * mu[s];
        }
    }
    Ok(acc)
}

/// The L^2(lambda) norm of f. The self-pairing is real up to rounding; the
/// imaginary residue is discarded after a consistency bound.
pub fn norm0(f: &MonomialSeries, table: &MomentTable) -> Result<f64> {
    let p = inner_product(f, f, table)?;
    debug_assert!(
        p.im.abs() <= 1e-12 * p.norm().max(1e-300),
        "self inner product came out non-real: {p}"
    );
    Ok(p.re.max(0.0).sqrt())
}
