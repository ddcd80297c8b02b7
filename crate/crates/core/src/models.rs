//! Catalog of model structures and the constructions relating them.
//!
//! The catalog consists of the flat cones `g = C r^β |dz|²` (with the
//! Levi-Civita connection) and the logarithmic family
//! `g = -C r^k log r |dz|²` indexed by `k ∈ ℤ`, `C > 0` and a unit complex
//! amplitude `b`. Both come from explicit triples `(h, u, a)` that satisfy
//! the defining PDE system exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{FieldsError, HarmonicExpansion, PointPolar, ScalarExpression, Term};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("C must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("b must have unit modulus (within 1e-12), got |b| = {0}")]
    NonUnitAmplitude(f64),
    #[error("lambda must have unit modulus (within 1e-12), got |lambda| = {0}")]
    NonUnitLambda(f64),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("k = -2 is excluded from the pullback comparison")]
    PullbackExcludesKMinusTwo,
    #[error("coordinate rescaling of a log(-log r) term leaves the expression basis")]
    NotRepresentable,
    #[error(transparent)]
    Fields(#[from] FieldsError),
}

/// The triple `(h, u, a)` plus a human-readable provenance label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialKahlerData {
    pub h: HarmonicExpansion,
    pub u: ScalarExpression,
    pub a: f64,
    pub label: String,
}

impl SpecialKahlerData {
    pub fn new(h: HarmonicExpansion, u: ScalarExpression, a: f64, label: impl Into<String>) -> Self {
        Self {
            h,
            u,
            a,
            label: label.into(),
        }
    }

    /// Metric coefficient `w = e^{-u}`, positive on the whole domain.
    pub fn metric_coefficient(&self, p: &PointPolar) -> f64 {
        (-self.u.eval(p)).exp()
    }
}

/// Serializable description of a catalog member (or inline custom data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    FlatCone {
        beta: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    LogModel {
        k: i32,
        #[serde(rename = "C")]
        c: f64,
        /// Unit-modulus amplitude as `[re, im]`.
        b: (f64, f64),
    },
    Fundamental,
    Custom {
        data: SpecialKahlerData,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpecialKahlerData, ModelError> {
        match self {
            ModelSpec::FlatCone { beta, c } => flat_cone(*beta, *c),
            ModelSpec::LogModel { k, c, b } => log_model(*k, *c, Complex64::new(b.0, b.1)),
            ModelSpec::Fundamental => Ok(fundamental_example()),
            ModelSpec::Custom { data } => Ok(data.clone()),
        }
    }
}

fn check_scale(c: f64) -> Result<(), ModelError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonPositiveScale(c))
    }
}

fn check_unit(b: Complex64) -> Result<(), ModelError> {
    if (b.norm() - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(ModelError::NonUnitAmplitude(b.norm()))
    }
}

/// Flat cone `g = C r^β |dz|²`: the triple is `(0, -β log r - log C, 0)`
/// and the connection coincides with the Levi-Civita one.
pub fn flat_cone(beta: f64, c: f64) -> Result<SpecialKahlerData, ModelError> {
    check_scale(c)?;
    let u = ScalarExpression::zero()
        .plus_term(Term::LogR, -beta)
        .plus_term(Term::Const, -c.ln());
    Ok(SpecialKahlerData::new(
        HarmonicExpansion::zero(),
        u,
        0.0,
        format!("flat_cone(beta={beta}, C={c})"),
    ))
}

/// Logarithmic model `g = -C r^k log r |dz|²`.
///
/// For `k ≠ 0` the triple is `(C·Re(b z^k/k), -k log r - log(-log r) - log C, 0)`;
/// for `k = 0` it is `(C·Re(b)·log r, -log(-log r) - log C, C·Im(b))`.
pub fn log_model(k: i32, c: f64, b: Complex64) -> Result<SpecialKahlerData, ModelError> {
    check_scale(c)?;
    check_unit(b)?;
    let (h, a) = if k == 0 {
        (HarmonicExpansion::log_term(c * b.re), c * b.im)
    } else {
        (
            HarmonicExpansion::monomial(k, c * b / f64::from(k))?,
            0.0,
        )
    };
    let u = ScalarExpression::zero()
        .plus_term(Term::LogR, -f64::from(k))
        .plus_term(Term::LogNegLogR, -1.0)
        .plus_term(Term::Const, -c.ln());
    Ok(SpecialKahlerData::new(
        h,
        u,
        a,
        format!("log_model(k={k}, C={c}, b={b})"),
    ))
}

/// The `k = -1` member of the logarithmic family:
/// `u = log r - log(-log r)`, `h = -Re(1/z)`, cubic form `-(i/4) z^{-2} dz³`.
pub fn fundamental_example() -> SpecialKahlerData {
    let mut d = log_model(-1, 1.0, Complex64::new(1.0, 0.0))
        .expect("parameters are in range");
    d.label = "fundamental".into();
    d
}

/// Express the same structure in the rotated coordinate with substitution
/// `z ↦ λ·z̃`, `|λ| = 1`.
///
/// Writing `h = Re f + b log r`, the new triple is
/// `h̃ = Re(λ² f(λ z̃)) + Re(λ²(b + ai)) log r̃`, `ã = Im(λ²(b + ai))` and
/// `ũ = u` composed with the same substitution, so Laurent coefficients of
/// `h` transform as `c_j ↦ λ^{j+2} c_j` and the monomial pairs of `u`
/// rotate as `κ_j ↦ λ^j κ_j`.
pub fn change_coordinate(
    d: &SpecialKahlerData,
    lambda: Complex64,
) -> Result<SpecialKahlerData, ModelError> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(ModelError::NonUnitLambda(lambda.norm()));
    }
    let l2 = lambda * lambda;
    let w = l2 * Complex64::new(d.h.log_coeff(), d.a);
    let h = d
        .h
        .map_coefficients(|j, c| c * l2 * lambda.powi(j))?
        .with_log_coeff(w.re);

    let mut u = ScalarExpression::zero();
    let mut pending: std::collections::BTreeMap<i32, Complex64> = Default::default();
    for (t, coeff) in d.u.terms() {
        match t {
            Term::RePow(j) => {
                *pending.entry(j).or_insert(Complex64::new(0.0, 0.0)) +=
                    Complex64::new(coeff, 0.0);
            }
            Term::ImPow(j) => {
                *pending.entry(j).or_insert(Complex64::new(0.0, 0.0)) +=
                    Complex64::new(0.0, -coeff);
            }
            other => u = u.plus_term(other, coeff),
        }
    }
    for (j, kappa) in pending {
        // Re(κ (λ z̃)^j) = Re((κ λ^j) z̃^j)
        let rotated = kappa * lambda.powi(j);
        u = u
            .plus_term(Term::RePow(j), rotated.re)
            .plus_term(Term::ImPow(j), -rotated.im);
    }

    Ok(SpecialKahlerData::new(
        h,
        u,
        w.im,
        format!("{} ∘ rotate(lambda={lambda})", d.label),
    ))
}

/// Rescale the metric by `C`: the triple becomes `(C h, u - log C, C a)`.
/// The connection 1-form is unchanged and the cubic form scales by `C`.
pub fn rescale_structure(d: &SpecialKahlerData, c: f64) -> Result<SpecialKahlerData, ModelError> {
    check_scale(c)?;
    Ok(SpecialKahlerData::new(
        d.h.scale(c),
        d.u.clone().plus_term(Term::Const, -c.ln()),
        c * d.a,
        format!("{} ∘ rescale_structure(C={c})", d.label),
    ))
}

/// Express the structure in the rescaled coordinate `z̃ = λ·z`, `λ > 0`
/// (substitution `z ↦ z̃/λ`): `u` gains `+2 log λ` on top of the
/// substitution, `h` picks up the compensating factor `λ^{-2}`, i.e.
/// `h̃ = λ^{-2} h(z̃/λ)` and `ã = λ^{-2} a`.
///
/// A `log(-log r)` term in `u` turns into `log(-log r̃ + log λ)`, which the
/// expression basis cannot represent; such inputs are rejected for `λ ≠ 1`.
pub fn rescale_coordinate(d: &SpecialKahlerData, lambda: f64) -> Result<SpecialKahlerData, ModelError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ModelError::NonPositiveLambda(lambda));
    }
    if lambda == 1.0 {
        return Ok(d.clone());
    }
    if d.u.coefficient(Term::LogNegLogR) != 0.0 {
        return Err(ModelError::NotRepresentable);
    }
    let inv = 1.0 / lambda;
    let scale = inv * inv;
    let log_l = lambda.ln();

    // h̃ = λ^{-2} h(z̃/λ): monomials c_j ↦ λ^{-(j+2)} c_j, the log part keeps
    // coefficient λ^{-2} b and sheds the constant -λ^{-2} b log λ.
    let b = d.h.log_coeff();
    let h = d
        .h
        .map_coefficients(|j, c| c * scale * inv.powi(j))?
        .with_log_coeff(scale * b);
    let h = HarmonicExpansion::new(
        h.log_coeff(),
        h.laurent()
            .iter()
            .map(|(&j, &c)| (j, c))
            .chain([(0, Complex64::new(-scale * b * log_l, 0.0))]),
    )?;

    let mut u = ScalarExpression::zero().plus_term(Term::Const, 2.0 * log_l);
    for (t, coeff) in d.u.terms() {
        match t {
            Term::LogR => {
                u = u
                    .plus_term(Term::LogR, coeff)
                    .plus_term(Term::Const, -coeff * log_l);
            }
            Term::RePow(j) | Term::ImPow(j) => {
                u = u.plus_term(t, coeff * inv.powi(j));
            }
            other => u = u.plus_term(other, coeff),
        }
    }

    Ok(SpecialKahlerData::new(
        h,
        u,
        scale * d.a,
        format!("{} ∘ rescale_coordinate(lambda={lambda})", d.label),
    ))
}

/// Grid comparison of the pullback of the fundamental structure through
/// `f(z) = z^{k+2}` against `(k+2)³ ·` the `k`-th logarithmic model.
#[derive(Debug, Clone, Serialize)]
pub struct PullbackReport {
    pub k: i32,
    /// `(k+2)³`
    pub expected_ratio: f64,
    pub max_metric_rel_dev: f64,
    pub max_cubic_rel_dev: f64,
    pub grid_points: usize,
}

/// Pull the fundamental metric and cubic form back through `f(z) = z^{k+2}`
/// and compare with the closed forms `-(k+2)³ r^k log r` and
/// `-((k+2)³ i/4) z^{k-1}` on a sample grid. Both deviations are relative.
pub fn pullback_log_check(k: i32) -> Result<PullbackReport, ModelError> {
    if k == -2 {
        return Err(ModelError::PullbackExcludesKMinusTwo);
    }
    let fundamental = fundamental_example();
    let model = log_model(k, 1.0, Complex64::new(1.0, 0.0))?;
    let m = k + 2;
    let ratio = f64::from(m).powi(3);

    let mut max_metric = 0.0f64;
    let mut max_cubic = 0.0f64;
    let mut count = 0usize;
    // Radii such that |z|^{k+2} stays in the punctured disk for every k here.
    let n_r = 24;
    let n_t = 16;
    for i in 0..n_r {
        let r = 0.05 + 0.85 * (i as f64) / (n_r as f64 - 1.0);
        for jt in 0..n_t {
            let theta = std::f64::consts::TAU * (jt as f64 + 0.5) / n_t as f64;
            let p = PointPolar::new(r, theta).expect("grid point in range");
            let z = p.z();
            let w = z.powi(m);
            if !(w.norm() > 0.0 && w.norm() < 1.0) {
                continue;
            }
            let pw = PointPolar::new(w.norm(), w.arg()).expect("image in range");
            count += 1;

            // (f*g)-coefficient = w_fund(f(z)) |f'(z)|^2
            let fprime = f64::from(m) * z.powi(m - 1);
            let pulled = fundamental.metric_coefficient(&pw) * fprime.norm_sqr();
            let reference = ratio * model.metric_coefficient(&p);
            let dev = (pulled - reference).abs() / reference.abs().max(1e-300);
            max_metric = max_metric.max(dev);

            // (f*Ξ)₀ = Ξ₀(f(z)) f'(z)³ with Ξ₀(w) = -(i/4) w^{-2}
            let xi_fund = Complex64::new(0.0, -0.25) * w.powi(-2);
            let pulled_cubic = xi_fund * fprime.powi(3);
            let ref_cubic = Complex64::new(0.0, -0.25 * ratio) * z.powi(k - 1);
            let dev = (pulled_cubic - ref_cubic).norm() / ref_cubic.norm().max(1e-300);
            max_cubic = max_cubic.max(dev);
        }
    }

    Ok(PullbackReport {
        k,
        expected_ratio: ratio,
        max_metric_rel_dev: max_metric,
        max_cubic_rel_dev: max_cubic,
        grid_points: count,
    })
}
