//! Holonomy classification, cubic forms, asymptotic fits, special
//! coordinates, and the singular-fiber compatibility table.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::connection::{connection_form, j_matrix};
use crate::fields::{FieldsError, HarmonicExpansion, PointPolar};
use crate::models::{ModelError, ModelSpec, SpecialKahlerData};
use crate::transport::{parallel_transport, Frame, Path, Segment, TransportError};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("matrix is not unimodular: det = {0}")]
    NotUnimodular(f64),
    #[error("trace {0} is hyperbolic (|trace| > 2); not produced by an isolated singularity")]
    Hyperbolic(f64),
}

#[derive(Debug, Error)]
pub enum CoordError {
    #[error("no closed-form special coordinates for custom data")]
    CustomModel,
    #[error("closed-form coordinates require {0}")]
    UnsupportedParameters(&'static str),
    #[error("point lies on the branch cut θ = 0")]
    OnCut,
    #[error("path touches the branch cut θ ≡ 0 (mod 2π)")]
    PathCrossesCut,
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples must span at least two decades of r (got ratio {0:.3})")]
    InsufficientSpan(f64),
    #[error("sample radius {0} outside (0, 0.5)")]
    RadiusOutOfRange(f64),
    #[error("design matrix is ill-conditioned")]
    IllConditioned,
}

// --- holonomy conjugacy classes ------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HolonomyTag {
    Elliptic,
    Identity,
    MinusIdentity,
    ParabolicPlus,
    ParabolicMinus,
}

/// SL(2,ℝ) conjugacy class of a holonomy matrix.
///
/// For elliptic classes the trace determines `cos πβ` only, so `β mod 2` is
/// reported as the unordered pair `{β₀, 2-β₀}`. For the `trace = ±2` classes
/// the measured distance `‖m ∓ 𝟙‖` is kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyClass {
    pub tag: HolonomyTag,
    pub trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_mod: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub central_deviation: Option<f64>,
}

impl HolonomyClass {
    fn central(tag: HolonomyTag, trace: f64, deviation: Option<f64>) -> Self {
        Self {
            tag,
            trace,
            beta_mod: None,
            central_deviation: deviation,
        }
    }

    fn elliptic(trace: f64) -> Self {
        let b0 = (trace / 2.0).clamp(-1.0, 1.0).acos() / PI;
        Self {
            tag: HolonomyTag::Elliptic,
            trace,
            beta_mod: Some((b0, 2.0 - b0)),
            central_deviation: None,
        }
    }
}

/// Classify a matrix in SL(2,ℝ) (determinant checked to `tol`) by trace:
/// elliptic for `|trace| < 2`; at `trace = ±2` the central elements `±𝟙`
/// are split from the parabolic classes by `‖m ∓ 𝟙‖ ≤ tol`.
pub fn classify_holonomy(m: &Matrix2<f64>, tol: f64) -> Result<HolonomyClass, ClassifyError> {
    let det = m.determinant();
    if (det - 1.0).abs() > tol {
        return Err(ClassifyError::NotUnimodular(det));
    }
    let t = m.trace();
    if (t - 2.0).abs() <= tol {
        let dev = (m - Matrix2::identity()).norm();
        let tag = if dev <= tol {
            HolonomyTag::Identity
        } else {
            HolonomyTag::ParabolicPlus
        };
        Ok(HolonomyClass::central(tag, t, Some(dev)))
    } else if (t + 2.0).abs() <= tol {
        let dev = (m + Matrix2::identity()).norm();
        let tag = if dev <= tol {
            HolonomyTag::MinusIdentity
        } else {
            HolonomyTag::ParabolicMinus
        };
        Ok(HolonomyClass::central(tag, t, Some(dev)))
    } else if t.abs() < 2.0 {
        Ok(HolonomyClass::elliptic(t))
    } else {
        Err(ClassifyError::Hyperbolic(t))
    }
}

/// Admissible holonomy classes of a singularity of order `β/2`:
/// `β ∉ ℤ` is elliptic; integer `β` admits `±𝟙` and the matching parabolic
/// class, and for a *conical* integer order the parabolic option drops.
pub fn classify_from_beta(beta: f64, conical: bool, tol: f64) -> Vec<HolonomyClass> {
    let nearest = beta.round();
    if (beta - nearest).abs() > tol {
        let m = beta.rem_euclid(2.0);
        let b0 = m.min(2.0 - m);
        return vec![HolonomyClass {
            tag: HolonomyTag::Elliptic,
            trace: 2.0 * (PI * beta).cos(),
            beta_mod: Some((b0, 2.0 - b0)),
            central_deviation: None,
        }];
    }
    let even = (nearest.rem_euclid(2.0)) == 0.0;
    let (central, parabolic, trace) = if even {
        (HolonomyTag::Identity, HolonomyTag::ParabolicPlus, 2.0)
    } else {
        (HolonomyTag::MinusIdentity, HolonomyTag::ParabolicMinus, -2.0)
    };
    let mut out = vec![HolonomyClass::central(central, trace, None)];
    if !conical {
        out.push(HolonomyClass::central(parabolic, trace, None));
    }
    out
}

/// Integral-holonomy test on the order: `β ∈ ½ℤ ∪ ⅓ℤ` within `tol`.
pub fn is_integral_beta(beta: f64, tol: f64) -> bool {
    let near = |x: f64| (x - x.round()).abs() <= tol;
    near(2.0 * beta) || near(3.0 * beta)
}

/// Integral-holonomy test on the trace: `trace ∈ {0, ±1, ±2}` within `tol`.
pub fn is_integral_trace(trace: f64, tol: f64) -> bool {
    let nearest = trace.round();
    (trace - nearest).abs() <= tol && nearest.abs() <= 2.0
}

// --- holomorphic cubic form ----------------------------------------------

/// `Ξ = Ξ₀ dz³` with `Ξ₀ = Σ_j ξ_j z^j` a Laurent polynomial.
///
/// `order` is `ord₀ Ξ` computed from the order of `h` and `a`
/// (`n = N` when `a = 0`, `n = min{-1, N}` otherwise); `None` means `Ξ ≡ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentCubic {
    coeffs: BTreeMap<i32, (f64, f64)>,
    pub order: Option<i32>,
}

impl LaurentCubic {
    pub fn coefficient(&self, j: i32) -> Complex64 {
        self.coeffs
            .get(&j)
            .map(|&(re, im)| Complex64::new(re, im))
            .unwrap_or_default()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs
            .iter()
            .map(|(&j, &(re, im))| (j, Complex64::new(re, im)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent carrying a nonzero coefficient — the brute-force
    /// route to the order, kept separate from the rule-based `order` field.
    pub fn smallest_nonzero_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients().map(|(j, c)| c * z.powi(j)).sum()
    }
}

/// Order of a harmonic expansion at the origin, following the pole /
/// logarithm / power trichotomy: the most negative Laurent exponent when
/// poles are present, `0` when the log term leads, else the smallest
/// positive exponent. Constants carry no order.
pub fn order_of_h(h: &HarmonicExpansion) -> Result<i32, FieldsError> {
    let j_min = h.laurent().keys().copied().find(|&j| j != 0);
    match j_min {
        Some(j) if j < 0 => Ok(j),
        _ if h.log_coeff() != 0.0 => Ok(0),
        Some(j) => Ok(j),
        None => Err(FieldsError::ZeroExpansion),
    }
}

/// `Ξ = ½ (a/(2z) - i ∂h/∂z) dz³` as exact Laurent data:
/// `ξ_{j-1} = -(i/4) j c_j` for each Laurent term of `h`, plus
/// `ξ_{-1} += (a - i b)/4` from the constant `a` and the log coefficient `b`.
pub fn cubic_form(d: &SpecialKahlerData) -> LaurentCubic {
    let mut coeffs: BTreeMap<i32, Complex64> = BTreeMap::new();
    for (&j, &c) in d.h.laurent() {
        if j == 0 {
            continue;
        }
        let xi = Complex64::new(0.0, -0.25) * f64::from(j) * c;
        *coeffs.entry(j - 1).or_default() += xi;
    }
    let pole = Complex64::new(d.a / 4.0, -d.h.log_coeff() / 4.0);
    if pole != Complex64::default() {
        *coeffs.entry(-1).or_default() += pole;
    }
    coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);

    let order = match order_of_h(&d.h) {
        Ok(n_hat) => {
            let n = n_hat - 1;
            if d.a == 0.0 {
                Some(n)
            } else {
                Some(n.min(-1))
            }
        }
        // h is zero or constant: only the a-pole can contribute
        Err(_) => (d.a != 0.0).then_some(-1),
    };

    LaurentCubic {
        coeffs: coeffs.into_iter().map(|(j, c)| (j, (c.re, c.im))).collect(),
        order,
    }
}

// --- asymptotic fitting ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityKind {
    Conical,
    Logarithmic,
}

/// Result of fitting `u`-samples against the conical form
/// `-β log r + const` or the logarithmic form
/// `-(n+1) log r - log(-log r) + const` (log-log coefficient pinned to -1).
///
/// Radial samples do not determine the amplitude `b`, so it is never
/// reported here.
#[derive(Debug, Clone, Serialize)]
pub struct SingularityFit {
    pub kind: SingularityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    #[serde(rename = "C")]
    pub c: f64,
    pub residual: f64,
    pub residual_conical: f64,
    pub residual_logarithmic: f64,
}

struct LineFit {
    intercept: f64,
    slope: f64,
    rms: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit, FitError> {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() <= 1e-12 * (n * sxx).abs().max(1.0) {
        return Err(FitError::IllConditioned);
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LineFit {
        intercept,
        slope,
        rms,
    })
}

/// Least-squares discrimination between a conical and a logarithmic leading
/// term of `u(r)`. Requires at least 8 samples with `r < 0.5` spanning two
/// decades. The logarithmic hypothesis is accepted only when the fitted
/// `n+1` is within 1e-2 of an integer; a supplied order bound `n` forces the
/// logarithmic branch when the conical exponent reaches `β = n+1`.
pub fn asymptotic_fit(
    samples: &[(f64, f64)],
    n_hint: Option<i32>,
) -> Result<SingularityFit, FitError> {
    if samples.len() < 8 {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    for &(r, _) in samples {
        if !(r > 0.0 && r < 0.5) {
            return Err(FitError::RadiusOutOfRange(r));
        }
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    if r_max / r_min < 100.0 {
        return Err(FitError::InsufficientSpan(r_max / r_min));
    }

    let xs: Vec<f64> = samples.iter().map(|&(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, u)| u).collect();
    let conical = fit_line(&xs, &ys)?;

    // constrain the log(-log r) coefficient to -1 and fit the remainder
    let ys_log: Vec<f64> = samples
        .iter()
        .map(|&(r, u)| u + (-r.ln()).ln())
        .collect();
    let logarithmic = fit_line(&xs, &ys_log)?;

    let beta = -conical.slope;
    let order_log = -logarithmic.slope; // n + 1
    let log_admissible = (order_log - order_log.round()).abs() <= 1e-2;

    let mut pick_log = log_admissible && logarithmic.rms < conical.rms;
    if let Some(n) = n_hint {
        // a conical exponent at or above n+1 contradicts the order bound
        if !pick_log && log_admissible && beta >= f64::from(n) + 1.0 - 1e-6 {
            pick_log = true;
        }
    }

    Ok(if pick_log {
        SingularityFit {
            kind: SingularityKind::Logarithmic,
            beta: None,
            n: Some(order_log.round() as i32 - 1),
            c: (-logarithmic.intercept).exp(),
            residual: logarithmic.rms,
            residual_conical: conical.rms,
            residual_logarithmic: logarithmic.rms,
        }
    } else {
        SingularityFit {
            kind: SingularityKind::Conical,
            beta: Some(beta),
            n: None,
            c: (-conical.intercept).exp(),
            residual: conical.rms,
            residual_conical: conical.rms,
            residual_logarithmic: logarithmic.rms,
        }
    })
}

// --- special coordinates ---------------------------------------------------

fn principal_log(p: &PointPolar) -> Result<Complex64, CoordError> {
    if p.theta() == 0.0 {
        return Err(CoordError::OnCut);
    }
    Ok(Complex64::new(p.rho(), p.theta()))
}

fn unit_scale(c: f64) -> bool {
    (c - 1.0).abs() <= 1e-12
}

/// Closed-form conjugate special coordinates `(Z, W)` of a catalog model on
/// the cut plane `θ ∈ (0, 2π)`:
///
/// * cone, `β ≠ -2`:  `(2/(β+2)) (z^{β/2+1}, i z^{β/2+1})`
/// * cone, `β = -2`:  `(log z, i log z)`
/// * log model, `k ≠ -2`: `((2/(k+2)) z^{(k+2)/2},
///   -(2i/(k+2)) z^{(k+2)/2} (log z - 2/(k+2)))`
/// * log model, `k = -2`: `(log z, (log z)² / (2i))`
///
/// Only the normalized members (`C = 1`, `b = 1`) have these closed forms.
pub fn special_coordinates(
    model: &ModelSpec,
    p: &PointPolar,
) -> Result<(Complex64, Complex64), CoordError> {
    let log_z = principal_log(p)?;
    let zpow = |s: f64| (log_z * s).exp();
    match model {
        ModelSpec::FlatCone { beta, c } => {
            if !unit_scale(*c) {
                return Err(CoordError::UnsupportedParameters("C = 1"));
            }
            if (*beta + 2.0).abs() <= 1e-12 {
                Ok((log_z, Complex64::i() * log_z))
            } else {
                let zz = zpow(beta / 2.0 + 1.0);
                let s = 2.0 / (beta + 2.0);
                Ok((s * zz, Complex64::i() * s * zz))
            }
        }
        ModelSpec::LogModel { k, c, b } => {
            if !unit_scale(*c) || !(unit_scale(b.0) && b.1.abs() <= 1e-12) {
                return Err(CoordError::UnsupportedParameters("C = 1 and b = 1"));
            }
            log_coordinates(*k, log_z, &zpow)
        }
        ModelSpec::Fundamental => log_coordinates(-1, log_z, &zpow),
        ModelSpec::Custom { .. } => Err(CoordError::CustomModel),
    }
}

fn log_coordinates(
    k: i32,
    log_z: Complex64,
    zpow: &impl Fn(f64) -> Complex64,
) -> Result<(Complex64, Complex64), CoordError> {
    if k == -2 {
        let w = log_z * log_z / Complex64::new(0.0, 2.0);
        Ok((log_z, w))
    } else {
        let m = f64::from(k) + 2.0;
        let zz = zpow(m / 2.0);
        let z_coord = (2.0 / m) * zz;
        let w = Complex64::new(0.0, -2.0 / m) * zz * (log_z - 2.0 / m);
        Ok((z_coord, w))
    }
}

/// Deviation of `2 dp∧dq` from the Kähler form evaluated on `(∂x, ∂y)`:
/// `|2 (∂x p ∂y q - ∂y p ∂x q) - 2 e^{-u}|`, with `p = Re Z`, `q = -Re W`
/// differentiated centrally at step `fd_step · r`.
pub fn darboux_residual(
    model: &ModelSpec,
    p: &PointPolar,
    fd_step: f64,
) -> Result<f64, CoordError> {
    let h = fd_step * p.r();
    // keep the finite-difference stencil clear of the branch cut
    let angular_margin = 4.0 * fd_step;
    if p.theta() < angular_margin || p.theta() > TAU - angular_margin {
        return Err(CoordError::OnCut);
    }
    let eval = |x: f64, y: f64| -> Result<(f64, f64), CoordError> {
        let q = PointPolar::from_cartesian(x, y)
            .map_err(|_| CoordError::OnCut)?;
        let (zc, wc) = special_coordinates(model, &q)?;
        Ok((zc.re, -wc.re))
    };
    let (x, y) = (p.x(), p.y());
    let (p_xp, q_xp) = eval(x + h, y)?;
    let (p_xm, q_xm) = eval(x - h, y)?;
    let (p_yp, q_yp) = eval(x, y + h)?;
    let (p_ym, q_ym) = eval(x, y - h)?;
    let px = (p_xp - p_xm) / (2.0 * h);
    let py = (p_yp - p_ym) / (2.0 * h);
    let qx = (q_xp - q_xm) / (2.0 * h);
    let qy = (q_yp - q_ym) / (2.0 * h);

    let data = model.build()?;
    let w = data.metric_coefficient(p);
    Ok((2.0 * (px * qy - py * qx) - 2.0 * w).abs())
}

fn on_cut(x: f64, y: f64) -> bool {
    y.abs() <= 1e-12 && x > 0.0
}

fn segment_touches_cut(seg: &Segment) -> bool {
    match *seg {
        Segment::Radial { theta, .. } => theta.rem_euclid(TAU).min(TAU - theta.rem_euclid(TAU)) <= 1e-12,
        Segment::Arc {
            theta_from,
            theta_to,
            ..
        } => {
            let (a, b) = if theta_from <= theta_to {
                (theta_from, theta_to)
            } else {
                (theta_to, theta_from)
            };
            // does [a, b] contain a multiple of 2π?
            let m = (a / TAU).ceil();
            m * TAU <= b + 1e-12 && m * TAU >= a - 1e-12
        }
        Segment::Line { from, to } => {
            if on_cut(from.0, from.1) || on_cut(to.0, to.1) {
                return true;
            }
            let (y0, y1) = (from.1, to.1);
            if (y0 > 0.0) == (y1 > 0.0) || y0 == y1 {
                return false;
            }
            let t = y0 / (y0 - y1);
            let x = from.0 + t * (to.0 - from.0);
            x > 0.0
        }
    }
}

/// Specialness probe: transport the covector `dp` (finite differences of
/// `p = Re Z` at the path start) along the path and return the Euclidean
/// deviation from `dp` at the path end. Flat `dp` means zero up to
/// finite-difference and integrator error.
pub fn flatness_residual_dp(
    model: &ModelSpec,
    path: &Path,
    tol: f64,
) -> Result<f64, CoordError> {
    if path.segments.is_empty() {
        return Ok(0.0);
    }
    for seg in &path.segments {
        if segment_touches_cut(seg) {
            return Err(CoordError::PathCrossesCut);
        }
    }
    let dp_at = |xy: (f64, f64)| -> Result<nalgebra::Vector2<f64>, CoordError> {
        let r = xy.0.hypot(xy.1);
        let h = 1e-6 * r;
        let pval = |x: f64, y: f64| -> Result<f64, CoordError> {
            let q = PointPolar::from_cartesian(x, y).map_err(|_| CoordError::OnCut)?;
            Ok(special_coordinates(model, &q)?.0.re)
        };
        Ok(nalgebra::Vector2::new(
            (pval(xy.0 + h, xy.1)? - pval(xy.0 - h, xy.1)?) / (2.0 * h),
            (pval(xy.0, xy.1 + h)? - pval(xy.0, xy.1 - h)?) / (2.0 * h),
        ))
    };
    let start = path.start().expect("nonempty path");
    let end = path.end().expect("nonempty path");
    let dp_start = dp_at(start)?;
    let dp_end = dp_at(end)?;

    let data = model.build()?;
    let form = connection_form(&data);
    let m = parallel_transport(&form, path, tol, Frame::Covector)?.matrix;
    Ok((m * dp_start - dp_end).norm())
}

/// Closed-form holonomy of a catalog model at basepoint `(r, 0)` in the
/// `(dx, dy)` frame, with a note on its validity.
///
/// Cones: the rotation `exp(-πβ J)`. Logarithmic models:
/// `(-1)^k [[1, 2π/log r], [0, 1]]`, derived for `b = 1` (for other `b` the
/// holonomy is conjugate to this but not equal to it entrywise).
pub fn closed_form_holonomy(model: &ModelSpec, r: f64) -> Option<(Matrix2<f64>, &'static str)> {
    match model {
        ModelSpec::FlatCone { beta, .. } => {
            let t = PI * beta;
            Some((
                Matrix2::identity() * t.cos() - j_matrix() * t.sin(),
                "rotation by πβ (any C)",
            ))
        }
        ModelSpec::LogModel { k, b, .. } => {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let m = sign * Matrix2::new(1.0, TAU / r.ln(), 0.0, 1.0);
            let note = if (b.0 - 1.0).abs() <= 1e-12 && b.1.abs() <= 1e-12 {
                "unipotent formula (valid for b = 1, any C)"
            } else {
                "unipotent formula derived for b = 1; for this b only the conjugacy class applies"
            };
            Some((m, note))
        }
        ModelSpec::Fundamental => {
            let m = -Matrix2::new(1.0, TAU / r.ln(), 0.0, 1.0);
            Some((m, "unipotent formula (valid for b = 1, any C)"))
        }
        ModelSpec::Custom { .. } => None,
    }
}

// --- Kodaira compatibility table ------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KodairaType {
    #[serde(rename = "I0")]
    I0,
    #[serde(rename = "I0*")]
    I0Star,
    #[serde(rename = "Ib")]
    Ib,
    #[serde(rename = "Ib*")]
    IbStar,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "II*")]
    IIStar,
    #[serde(rename = "III")]
    III,
    #[serde(rename = "III*")]
    IIIStar,
    #[serde(rename = "IV")]
    IV,
    #[serde(rename = "IV*")]
    IVStar,
}

impl std::fmt::Display for KodairaType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            KodairaType::I0 => "I0",
            KodairaType::I0Star => "I0*",
            KodairaType::Ib => "Ib",
            KodairaType::IbStar => "Ib*",
            KodairaType::II => "II",
            KodairaType::IIStar => "II*",
            KodairaType::III => "III",
            KodairaType::IIIStar => "III*",
            KodairaType::IV => "IV",
            KodairaType::IVStar => "IV*",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Conical,
    Logarithmic,
    Either,
}

/// One row of the singular-fiber table: which singularity kind the fiber
/// type admits and the rule on twice the order (`β` conical, `n+1`
/// logarithmic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KodairaRow {
    pub kodaira_type: KodairaType,
    pub singularity_kind: RowKind,
    pub condition: &'static str,
}

pub const KODAIRA_TABLE: [KodairaRow; 10] = [
    KodairaRow {
        kodaira_type: KodairaType::I0,
        singularity_kind: RowKind::Either,
        condition: "beta even integer / n odd",
    },
    KodairaRow {
        kodaira_type: KodairaType::I0Star,
        singularity_kind: RowKind::Either,
        condition: "beta odd integer / n even",
    },
    KodairaRow {
        kodaira_type: KodairaType::Ib,
        singularity_kind: RowKind::Logarithmic,
        condition: "n odd",
    },
    KodairaRow {
        kodaira_type: KodairaType::IbStar,
        singularity_kind: RowKind::Logarithmic,
        condition: "n even",
    },
    KodairaRow {
        kodaira_type: KodairaType::II,
        singularity_kind: RowKind::Conical,
        condition: "beta = (6k+-1)/3",
    },
    KodairaRow {
        kodaira_type: KodairaType::IIStar,
        singularity_kind: RowKind::Conical,
        condition: "beta = (6k+-1)/3",
    },
    KodairaRow {
        kodaira_type: KodairaType::III,
        singularity_kind: RowKind::Conical,
        condition: "beta = 1/2 + k",
    },
    KodairaRow {
        kodaira_type: KodairaType::IIIStar,
        singularity_kind: RowKind::Conical,
        condition: "beta = 1/2 + k",
    },
    KodairaRow {
        kodaira_type: KodairaType::IV,
        singularity_kind: RowKind::Conical,
        condition: "beta = (6k+-2)/3",
    },
    KodairaRow {
        kodaira_type: KodairaType::IVStar,
        singularity_kind: RowKind::Conical,
        condition: "beta = (6k+-2)/3",
    },
];

const KODAIRA_TOL: f64 = 1e-9;

fn row_matches(row: &KodairaRow, kind: SingularityKind, order2: f64) -> bool {
    let kind_ok = match row.singularity_kind {
        RowKind::Either => true,
        RowKind::Conical => kind == SingularityKind::Conical,
        RowKind::Logarithmic => kind == SingularityKind::Logarithmic,
    };
    if !kind_ok {
        return false;
    }
    let near = |x: f64| (x - x.round()).abs() <= KODAIRA_TOL;
    let int_class = |x: f64, modulus: i64, residues: &[i64]| -> bool {
        if !near(x) {
            return false;
        }
        let m = (x.round() as i64).rem_euclid(modulus);
        residues.contains(&m)
    };
    match row.kodaira_type {
        // conical: β even; logarithmic: n odd means n+1 even
        KodairaType::I0 | KodairaType::Ib => int_class(order2, 2, &[0]),
        KodairaType::I0Star | KodairaType::IbStar => int_class(order2, 2, &[1]),
        KodairaType::II | KodairaType::IIStar => int_class(3.0 * order2, 6, &[1, 5]),
        KodairaType::III | KodairaType::IIIStar => int_class(2.0 * order2, 2, &[1]),
        KodairaType::IV | KodairaType::IVStar => int_class(3.0 * order2, 6, &[2, 4]),
    }
}

/// All table rows compatible with a singularity of the given kind and twice
/// the order (`β` for conical, `n+1` for logarithmic). A supplied cubic
/// order `n` additionally enforces `β < n+1` for conical singularities.
pub fn kodaira_compatible(
    kind: SingularityKind,
    order2: f64,
    n_bound: Option<i32>,
) -> Vec<KodairaRow> {
    if kind == SingularityKind::Conical {
        if let Some(n) = n_bound {
            if order2 >= f64::from(n) + 1.0 - KODAIRA_TOL {
                return Vec::new();
            }
        }
    }
    KODAIRA_TABLE
        .iter()
        .filter(|row| row_matches(row, kind, order2))
        .copied()
        .collect()
}
