//! Exact scalar fields on the punctured unit disk.
//!
//! Two field types cover everything the model catalog needs:
//!
//! * [`HarmonicExpansion`] — single-valued harmonic functions of the form
//!   `b·log r + Σ_j Re(c_j z^j)` with finitely many Laurent terms,
//! * [`ScalarExpression`] — real linear combinations over the basis
//!   `{1, log r, log(-log r), Re(z^j), Im(z^j)}`.
//!
//! Both carry exact first derivatives and exact Laplacians, so PDE residuals
//! downstream are closed-form evaluations rather than finite differences.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldsError {
    #[error("point outside the punctured unit disk: r = {0}")]
    OutsideDomain(f64),
    #[error("Laurent coefficient at j = 0 must be real (got imaginary part {0})")]
    ComplexConstant(f64),
    #[error("expansion is zero (or constant); order undefined")]
    ZeroExpansion,
    #[error("unknown basis id {0:?} in expression")]
    UnknownBasisId(String),
}

/// A point of the punctured open unit disk `0 < |z| < 1`,
/// stored in polar form with the angle reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPolar {
    r: f64,
    theta: f64,
}

impl PointPolar {
    pub fn new(r: f64, theta: f64) -> Result<Self, FieldsError> {
        if !(r > 0.0 && r < 1.0) || !r.is_finite() {
            return Err(FieldsError::OutsideDomain(r));
        }
        let theta = theta.rem_euclid(TAU);
        // rem_euclid can return TAU when theta is a tiny negative number.
        let theta = if theta >= TAU { 0.0 } else { theta };
        Ok(Self { r, theta })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self, FieldsError> {
        let r = x.hypot(y);
        if !(r > 0.0 && r < 1.0) {
            return Err(FieldsError::OutsideDomain(r));
        }
        Self::new(r, y.atan2(x))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Angle reduced to `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `ρ = log r`, always negative on the domain.
    pub fn rho(&self) -> f64 {
        self.r.ln()
    }

    pub fn x(&self) -> f64 {
        self.r * self.theta.cos()
    }

    pub fn y(&self) -> f64 {
        self.r * self.theta.sin()
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

fn zpow(z: Complex64, j: i32) -> Complex64 {
    z.powi(j)
}

/// `b·log r + Σ_j Re(c_j z^j)` with finitely many nonzero `c_j`.
///
/// The `j = 0` coefficient is required to be real, which makes every value
/// of the expansion a single-valued real harmonic function on the punctured
/// disk. Exactly-zero coefficients are dropped on construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicExpansion {
    log_coeff: f64,
    laurent: BTreeMap<i32, Complex64>,
}

impl HarmonicExpansion {
    pub fn new(
        log_coeff: f64,
        terms: impl IntoIterator<Item = (i32, Complex64)>,
    ) -> Result<Self, FieldsError> {
        let mut laurent = BTreeMap::new();
        for (j, c) in terms {
            if j == 0 && c.im != 0.0 {
                return Err(FieldsError::ComplexConstant(c.im));
            }
            let entry = laurent.entry(j).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
        }
        laurent.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(Self { log_coeff, laurent })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Single monomial `Re(c z^j)`.
    pub fn monomial(j: i32, c: Complex64) -> Result<Self, FieldsError> {
        Self::new(0.0, [(j, c)])
    }

    /// `b · log r`.
    pub fn log_term(b: f64) -> Self {
        Self {
            log_coeff: b,
            laurent: BTreeMap::new(),
        }
    }

    pub fn log_coeff(&self) -> f64 {
        self.log_coeff
    }

    pub fn laurent(&self) -> &BTreeMap<i32, Complex64> {
        &self.laurent
    }

    pub fn is_zero(&self) -> bool {
        self.log_coeff == 0.0 && self.laurent.is_empty()
    }

    pub fn coefficient(&self, j: i32) -> Complex64 {
        self.laurent
            .get(&j)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Map every Laurent coefficient, dropping terms mapped to zero.
    pub fn map_coefficients(
        &self,
        mut f: impl FnMut(i32, Complex64) -> Complex64,
    ) -> Result<Self, FieldsError> {
        Self::new(
            self.log_coeff,
            self.laurent.iter().map(|(&j, &c)| (j, f(j, c))),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            log_coeff: s * self.log_coeff,
            laurent: self
                .laurent
                .iter()
                .filter(|(_, c)| s * c.re != 0.0 || s * c.im != 0.0)
                .map(|(&j, &c)| (j, s * c))
                .collect(),
        }
    }

    pub fn with_log_coeff(&self, b: f64) -> Self {
        Self {
            log_coeff: b,
            laurent: self.laurent.clone(),
        }
    }

    pub fn eval(&self, p: &PointPolar) -> f64 {
        let z = p.z();
        let mut v = self.log_coeff * p.rho();
        for (&j, &c) in &self.laurent {
            v += (c * zpow(z, j)).re;
        }
        v
    }

    /// Exact Cartesian gradient `(∂x, ∂y)`.
    pub fn gradient(&self, p: &PointPolar) -> (f64, f64) {
        let z = p.z();
        let r2 = p.r() * p.r();
        let mut gx = self.log_coeff * p.x() / r2;
        let mut gy = self.log_coeff * p.y() / r2;
        for (&j, &c) in &self.laurent {
            if j == 0 {
                continue;
            }
            let w = c * f64::from(j) * zpow(z, j - 1);
            gx += w.re;
            gy -= w.im;
        }
        (gx, gy)
    }

    /// Identically zero: every basis term is harmonic.
    pub fn laplacian(&self, _p: &PointPolar) -> f64 {
        0.0
    }

    /// Wirtinger derivative `∂h/∂z = Σ_j (j/2) c_j z^{j-1} + b/(2z)`.
    pub fn wirtinger(&self, p: &PointPolar) -> Complex64 {
        let z = p.z();
        let mut w = Complex64::new(self.log_coeff, 0.0) / (2.0 * z);
        for (&j, &c) in &self.laurent {
            if j == 0 {
                continue;
            }
            w += c * (f64::from(j) / 2.0) * zpow(z, j - 1);
        }
        w
    }

    /// The same function as a [`ScalarExpression`]
    /// (`Re(c z^j) = Re(c)·Re(z^j) − Im(c)·Im(z^j)`).
    pub fn to_expression(&self) -> ScalarExpression {
        let mut expr = ScalarExpression::zero();
        if self.log_coeff != 0.0 {
            expr = expr.plus_term(Term::LogR, self.log_coeff);
        }
        for (&j, &c) in &self.laurent {
            if j == 0 {
                expr = expr.plus_term(Term::Const, c.re);
            } else {
                expr = expr
                    .plus_term(Term::RePow(j), c.re)
                    .plus_term(Term::ImPow(j), -c.im);
            }
        }
        expr
    }
}

/// Basis element of a [`ScalarExpression`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Const,
    LogR,
    /// `log(-log r)`, i.e. `log |log r|` on the unit disk.
    LogNegLogR,
    RePow(i32),
    ImPow(i32),
}

impl Term {
    fn eval(&self, p: &PointPolar) -> f64 {
        match *self {
            Term::Const => 1.0,
            Term::LogR => p.rho(),
            Term::LogNegLogR => (-p.rho()).ln(),
            Term::RePow(j) => zpow(p.z(), j).re,
            Term::ImPow(j) => zpow(p.z(), j).im,
        }
    }

    fn gradient(&self, p: &PointPolar) -> (f64, f64) {
        let r2 = p.r() * p.r();
        match *self {
            Term::Const => (0.0, 0.0),
            Term::LogR => (p.x() / r2, p.y() / r2),
            Term::LogNegLogR => {
                // d/dx log(-log r) = (x / r^2) / log r, same for y.
                let l = p.rho();
                (p.x() / (r2 * l), p.y() / (r2 * l))
            }
            Term::RePow(j) => {
                let w = f64::from(j) * zpow(p.z(), j - 1);
                (w.re, -w.im)
            }
            Term::ImPow(j) => {
                let w = f64::from(j) * zpow(p.z(), j - 1);
                (w.im, w.re)
            }
        }
    }

    fn laplacian(&self, p: &PointPolar) -> f64 {
        match *self {
            // Δ log(-log r) = -1 / (r^2 (log r)^2); everything else is harmonic.
            Term::LogNegLogR => {
                let l = p.rho();
                -1.0 / (p.r() * p.r() * l * l)
            }
            _ => 0.0,
        }
    }

    fn basis_id(&self) -> &'static str {
        match self {
            Term::Const => "const",
            Term::LogR => "log_r",
            Term::LogNegLogR => "log_neg_log_r",
            Term::RePow(_) => "re_pow",
            Term::ImPow(_) => "im_pow",
        }
    }
}

/// Finite real linear combination over
/// `{1, log r, log(-log r), Re(z^j), Im(z^j) (j ≠ 0)}`.
///
/// `Re(z^0)` folds into the constant term and `Im(z^0)` vanishes, so the
/// stored map never contains a power-zero monomial. Zero coefficients are
/// dropped; the representation is canonical and ordered.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarExpression {
    terms: BTreeMap<Term, f64>,
}

impl ScalarExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::zero().plus_term(Term::Const, c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Term, f64)>) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |e, (t, c)| e.plus_term(t, c))
    }

    /// Add `coeff`·`term`, folding degenerate powers and dropping zeros.
    pub fn plus_term(mut self, term: Term, coeff: f64) -> Self {
        let term = match term {
            Term::RePow(0) => Term::Const,
            Term::ImPow(0) => return self,
            t => t,
        };
        let c = self.terms.entry(term).or_insert(0.0);
        *c += coeff;
        if *c == 0.0 {
            self.terms.remove(&term);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        other
            .terms
            .iter()
            .fold(self.clone(), |e, (&t, &c)| e.plus_term(t, c))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.terms
            .iter()
            .fold(Self::zero(), |e, (&t, &c)| e.plus_term(t, s * c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Term, f64)> + '_ {
        self.terms.iter().map(|(&t, &c)| (t, c))
    }

    pub fn coefficient(&self, term: Term) -> f64 {
        self.terms.get(&term).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, p: &PointPolar) -> f64 {
        self.terms.iter().map(|(t, c)| c * t.eval(p)).sum()
    }

    pub fn gradient(&self, p: &PointPolar) -> (f64, f64) {
        let mut g = (0.0, 0.0);
        for (t, c) in &self.terms {
            let (gx, gy) = t.gradient(p);
            g.0 += c * gx;
            g.1 += c * gy;
        }
        g
    }

    pub fn laplacian(&self, p: &PointPolar) -> f64 {
        self.terms.iter().map(|(t, c)| c * t.laplacian(p)).sum()
    }
}

// --- serialization -------------------------------------------------------
//
// HarmonicExpansion: {"log_coeff": b, "laurent": [[j, re, im], ...]}
// ScalarExpression:  {"terms": [["log_r", c], ["re_pow", j, c], ...]}

#[derive(Serialize, Deserialize)]
struct HarmonicExpansionRepr {
    log_coeff: f64,
    laurent: Vec<(i32, f64, f64)>,
}

impl Serialize for HarmonicExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HarmonicExpansionRepr {
            log_coeff: self.log_coeff,
            laurent: self
                .laurent
                .iter()
                .map(|(&j, &c)| (j, c.re, c.im))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HarmonicExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = HarmonicExpansionRepr::deserialize(deserializer)?;
        HarmonicExpansion::new(
            repr.log_coeff,
            repr.laurent
                .into_iter()
                .map(|(j, re, im)| (j, Complex64::new(re, im))),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarExpressionRepr {
    terms: Vec<Vec<serde_json::Value>>,
}

impl Serialize for ScalarExpression {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde_json::{json, Value};
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| -> Vec<Value> {
                match t {
                    Term::RePow(j) | Term::ImPow(j) => vec![json!(t.basis_id()), json!(j), json!(c)],
                    _ => vec![json!(t.basis_id()), json!(c)],
                }
            })
            .collect();
        ScalarExpressionRepr { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScalarExpression {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarExpressionRepr::deserialize(deserializer)?;
        let mut expr = ScalarExpression::zero();
        for entry in repr.terms {
            let id = entry
                .first()
                .and_then(|v| v.as_str())
                .ok_or_else(|| D::Error::custom("expression term must start with a basis id"))?;
            let num = |i: usize| -> Result<f64, D::Error> {
                entry
                    .get(i)
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| D::Error::custom(format!("term {id:?}: missing number at {i}")))
            };
            let arity = |n: usize| -> Result<(), D::Error> {
                if entry.len() == n {
                    Ok(())
                } else {
                    Err(D::Error::custom(format!(
                        "term {id:?}: expected {n} entries, got {}",
                        entry.len()
                    )))
                }
            };
            expr = match id {
                "const" => {
                    arity(2)?;
                    expr.plus_term(Term::Const, num(1)?)
                }
                "log_r" => {
                    arity(2)?;
                    expr.plus_term(Term::LogR, num(1)?)
                }
                "log_neg_log_r" => {
                    arity(2)?;
                    expr.plus_term(Term::LogNegLogR, num(1)?)
                }
                "re_pow" | "im_pow" => {
                    arity(3)?;
                    let j = entry
                        .get(1)
                        .and_then(|v| v.as_i64())
                        .ok_or_else(|| D::Error::custom(format!("term {id:?}: bad exponent")))?;
                    let j = i32::try_from(j)
                        .map_err(|_| D::Error::custom(format!("term {id:?}: exponent overflow")))?;
                    let t = if id == "re_pow" {
                        Term::RePow(j)
                    } else {
                        Term::ImPow(j)
                    };
                    expr.plus_term(t, num(2)?)
                }
                other => return Err(D::Error::custom(FieldsError::UnknownBasisId(other.into()))),
            };
        }
        Ok(expr)
    }
}
