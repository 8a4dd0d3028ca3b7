//! Radial weights on the unit disc.
//!
//! Three families: power weights (1-r^2)^t, exponential weights
//! exp(A - B/(1-r^2)^alpha), and cutoff variants that multiply a base weight
//! by a smooth junction factor chi_t that is identically 1 on [0, 1-t] and
//! decays once r passes 1-t. All evaluation is done through s = r^2, the
//! natural variable for radial calculus on the disc: z zbar = s, so Wirtinger
//! derivatives of a radial function reduce to s-derivatives times monomials.
//!
//! The weight spec grammar (no whitespace anywhere):
//!
//! ```text
//! spec := "power:t=" FLOAT
//!       | "exp:A=" FLOAT ",B=" FLOAT ",alpha=" FLOAT
//!       | "cutoff:t=" FLOAT ";base=" spec
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest s-derivative order provided analytically.
pub const MAX_S_DERIVATIVE: u32 = 4;
/// Highest Wirtinger derivative order.
pub const MAX_WIRTINGER: u32 = 2;

/// Which Wirtinger derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// d/dz (holomorphic).
    Z,
    /// d/dzbar (anti-holomorphic).
    ZBar,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialWeight {
    /// (1 - r^2)^t with t > -1.
    Power { t: f64 },
    /// exp(a - b (1 - r^2)^{-alpha}) with b > 0, alpha > 0.
    Exponential { a: f64, b: f64, alpha: f64 },
    /// base(r) * chi_t(r); chi_t == 1 on [0, 1-t], then decays smoothly.
    Cutoff { t: f64, base: Box<RadialWeight> },
}

impl RadialWeight {
    pub fn power(t: f64) -> Result<Self> {
        if !t.is_finite() || t <= -1.0 {
            return Err(Error::Domain(format!(
                "power weight needs finite t > -1, got t={t}"
            )));
        }
        Ok(RadialWeight::Power { t })
    }

    pub fn exponential(a: f64, b: f64, alpha: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !alpha.is_finite() {
            return Err(Error::Domain(
                "exponential weight parameters must be finite".into(),
            ));
        }
        if b <= 0.0 || alpha <= 0.0 {
            return Err(Error::Domain(format!(
                "exponential weight needs B > 0 and alpha > 0, got B={b}, alpha={alpha}"
            )));
        }
        Ok(RadialWeight::Exponential { a, b, alpha })
    }

    pub fn cutoff(base: RadialWeight, t: f64) -> Result<Self> {
        if base.is_cutoff() {
            return Err(Error::NestedCutoff);
        }
        if !t.is_finite() || t <= 0.0 || t >= 1.0 {
            return Err(Error::Domain(format!(
                "cutoff weight needs t in (0,1), got t={t}"
            )));
        }
        Ok(RadialWeight::Cutoff {
            t,
            base: Box::new(base),
        })
    }

    pub fn is_cutoff(&self) -> bool {
        matches!(self, RadialWeight::Cutoff { .. })
    }

    /// The weight at radius r in [0, 1).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!(
                "radius must lie in [0,1), got r={r}"
            )));
        }
        let u = r * r;
        let c = 1.0 - u;
        Ok(self
            .log_eval_split(
                u,
                c,
                if u > 0.0 { u.ln() } else { f64::NEG_INFINITY },
                c.ln(),
            )
            .exp())
    }

    /// log lambda at s = u, parameterized by both u and c = 1 - u (and their
    /// logs) so that neither endpoint suffers cancellation. The quadrature
    /// path supplies c directly from the node formulas, keeping this accurate
    /// even when c is far below machine epsilon relative to u.
    pub(crate) fn log_eval_split(&self, u: f64, c: f64, _ln_u: f64, ln_c: f64) -> f64 {
        match self {
            RadialWeight::Power { t } => t * ln_c,
            RadialWeight::Exponential { a, b, alpha } => {
                // a - b * c^{-alpha}; exp overflow to +inf gives -inf, as it should.
                a - (b.ln() - alpha * ln_c).exp()
            }
            RadialWeight::Cutoff { t, base } => {
                let base_part = base.log_eval_split(u, c, _ln_u, ln_c);
                base_part + log_chi(*t, u, ln_c)
            }
        }
    }

    /// m-th derivative of s -> lambda(sqrt(s)) at s in [0, 1). For cutoff
    /// weights only the region s <= (1-t)^2 is supported (chi == 1 there, and
    /// it is flat at the junction, so piece selection is exact).
    pub fn s_derivative(&self, m: u32, s: f64) -> Result<f64> {
        if m > MAX_S_DERIVATIVE {
            return Err(Error::UnsupportedOrder {
                order: m,
                max: MAX_S_DERIVATIVE,
            });
        }
        if !(0.0..1.0).contains(&s) {
            return Err(Error::Domain(format!("s must lie in [0,1), got s={s}")));
        }
        let x = 1.0 - s;
        match self {
            RadialWeight::Power { t } => {
                // d^m/ds^m (1-s)^t = (-1)^m t(t-1)...(t-m+1) (1-s)^{t-m}
                let mut coeff = 1.0;
                for i in 0..m {
                    coeff *= -(t - i as f64);
                }
                Ok(coeff * ((t - m as f64) * x.ln()).exp())
            }
            RadialWeight::Exponential { a, b, alpha } => {
                let ln_x = x.ln();
                let g = a - (b.ln() - alpha * ln_x).exp();
                let mut total = 0.0;
                for (coeff, pow) in exponential_derivative_terms(m, *b, *alpha) {
                    // coeff * x^pow * e^g, assembled in the exponent so that the
                    // blow-up of x^pow and the collapse of e^g never meet as inf*0.
                    total += coeff.signum() * (coeff.abs().ln() + pow * ln_x + g).exp();
                }
                Ok(total)
            }
            RadialWeight::Cutoff { t, base } => {
                if m == 0 {
                    return self.eval(s.sqrt());
                }
                let junction = (1.0 - t) * (1.0 - t);
                if s <= junction {
                    base.s_derivative(m, s)
                } else {
                    Err(Error::Domain(format!(
                        "cutoff s-derivatives are analytic only for s <= (1-t)^2 = {junction}, got s={s}"
                    )))
                }
            }
        }
    }

    /// Wirtinger derivative of order l of z -> lambda(|z|) at z, |z| < 1.
    ///
    /// For a radial function, d^l/dz^l lambda = lambda^{(l)}(s) zbar^l and
    /// d^l/dzbar^l lambda = lambda^{(l)}(s) z^l with s = |z|^2. Cutoff weights
    /// past the junction have no analytic s-derivative here, so those fall
    /// back to central finite differences in s (chi is smooth, the junction
    /// included, so the stencil may straddle it).
    pub fn wirtinger(&self, l: u32, z: Complex64, side: Side) -> Result<Complex64> {
        if l > MAX_WIRTINGER {
            return Err(Error::UnsupportedOrder {
                order: l,
                max: MAX_WIRTINGER,
            });
        }
        let s = z.norm_sqr();
        if s >= 1.0 {
            return Err(Error::Domain(format!(
                "point must lie in the open disc, got |z|^2={s}"
            )));
        }
        let radial = self.s_derivative_or_fd(l, s)?;
        let factor = match side {
            Side::Z => z.conj().powu(l),
            Side::ZBar => z.powu(l),
        };
        Ok(factor * radial)
    }

    /// Relative residual of the radial identity
    /// d^l/dzbar^l lambda = (d^l/dz^l lambda) * (z / zbar)^l at z != 0.
    pub fn radial_identity_residual(&self, l: u32, z: Complex64) -> Result<f64> {
        if z.norm_sqr() == 0.0 {
            return Err(Error::Domain("radial identity check needs z != 0".into()));
        }
        let lhs = self.wirtinger(l, z, Side::ZBar)?;
        let rhs = self.wirtinger(l, z, Side::Z)? * (z / z.conj()).powu(l);
        Ok((lhs - rhs).norm() / (1.0 + lhs.norm()))
    }

    fn s_derivative_or_fd(&self, m: u32, s: f64) -> Result<f64> {
        match self.s_derivative(m, s) {
            Ok(v) => Ok(v),
            Err(Error::Domain(_)) if self.is_cutoff() => self.fd_s_derivative(m, s),
            Err(e) => Err(e),
        }
    }

    /// Central finite differences in s, used only for cutoff weights past the
    /// junction where no closed derivative is kept.
    fn fd_s_derivative(&self, m: u32, s: f64) -> Result<f64> {
        let eval_s = |s: f64| -> Result<f64> { self.eval(s.sqrt()) };
        let h = 1e-5 * (1.0 - s).min(0.5);
        match m {
            1 => Ok((eval_s(s + h)? - eval_s(s - h)?) / (2.0 * h)),
            2 => Ok((eval_s(s + h)? - 2.0 * eval_s(s)? + eval_s(s - h)?) / (h * h)),
            _ => Err(Error::UnsupportedOrder { order: m, max: 2 }),
        }
    }
}

/// log chi_t at u = r^2, with ln_c = ln(1 - r^2).
///
/// chi_t(r) = exp(-psi(r - (1-t)) / (1 - r^2)) for r > 1-t and 1 otherwise,
/// where psi(d) = exp(-1/d). psi vanishes to infinite order at d = 0+, so chi
/// glues to 1 smoothly at the junction, and the 1/(1-r^2) factor drives the
/// weight to zero to infinite order at the boundary.
fn log_chi(t: f64, u: f64, ln_c: f64) -> f64 {
    let r = u.sqrt();
    let d = r - (1.0 - t);
    if d <= 0.0 {
        return 0.0;
    }
    // -psi(d)/c = -exp(-1/d - ln c); +inf in the exponent is fine (chi underflows).
    -(-d.recip() - ln_c).exp()
}

/// Term list (coefficient, power-of-x) for the m-th s-derivative of the
/// exponential family: lambda^{(m)}(s) = [sum_i c_i x^{p_i}] * lambda(s) with
/// x = 1 - s. Differentiating one term gives two:
///   d/ds [c x^p e^g] = -c p x^{p-1} e^g - c b alpha x^{p-alpha-1} e^g.
fn exponential_derivative_terms(m: u32, b: f64, alpha: f64) -> Vec<(f64, f64)> {
    let mut terms = vec![(1.0, 0.0)];
    for _ in 0..m {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for &(c, p) in &terms {
            if p != 0.0 {
                next.push((-c * p, p - 1.0));
            }
            next.push((-c * b * alpha, p - alpha - 1.0));
        }
        terms = next;
    }
    terms
}

impl fmt::Display for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialWeight::Power { t } => write!(f, "power:t={t}"),
            RadialWeight::Exponential { a, b, alpha } => {
                write!(f, "exp:A={a},B={b},alpha={alpha}")
            }
            RadialWeight::Cutoff { t, base } => write!(f, "cutoff:t={t};base={base}"),
        }
    }
}

impl FromStr for RadialWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(char::is_whitespace) {
            return Err(Error::Syntax(format!(
                "whitespace is not allowed in weight specs: {s:?}"
            )));
        }
        parse_spec(s)
    }
}

fn parse_spec(s: &str) -> Result<RadialWeight> {
    if let Some(rest) = s.strip_prefix("power:t=") {
        return RadialWeight::power(parse_float(rest, s)?);
    }
    if let Some(rest) = s.strip_prefix("exp:A=") {
        let (a_str, rest) = rest
            .split_once(",B=")
            .ok_or_else(|| Error::Syntax(format!("expected \",B=\" in {s:?}")))?;
        let (b_str, alpha_str) = rest
            .split_once(",alpha=")
            .ok_or_else(|| Error::Syntax(format!("expected \",alpha=\" in {s:?}")))?;
        return RadialWeight::exponential(
            parse_float(a_str, s)?,
            parse_float(b_str, s)?,
            parse_float(alpha_str, s)?,
        );
    }
    if let Some(rest) = s.strip_prefix("cutoff:t=") {
        let (t_str, base_str) = rest
            .split_once(";base=")
            .ok_or_else(|| Error::Syntax(format!("expected \";base=\" in {s:?}")))?;
        let base = parse_spec(base_str)?;
        return RadialWeight::cutoff(base, parse_float(t_str, s)?);
    }
    Err(Error::Syntax(format!(
        "unrecognized weight spec {s:?} (expected power:..., exp:..., or cutoff:...)"
    )))
}

fn parse_float(text: &str, whole: &str) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| Error::Syntax(format!("bad float {text:?} in weight spec {whole:?}")))
}
