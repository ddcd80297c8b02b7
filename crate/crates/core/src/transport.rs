//! Parallel transport along paths in the punctured disk.
//!
//! The transport equation is integrated with the classical fourth-order
//! Runge-Kutta scheme under step doubling: each segment is integrated with
//! `n` and `2n` uniform steps and the Richardson estimate
//! `‖Y_{2n} - Y_n‖ / 15` must drop below the segment's error budget before
//! the `2n`-step result is accepted. The step schedule is deterministic, so
//! identical inputs produce bit-identical results.
//!
//! Radial segments are integrated in the variable `ρ = log r`, which removes
//! the `1/r` growth of the connection coefficients near the puncture.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connection::ConnectionForm;
use crate::fields::PointPolar;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("segment {index} leaves the punctured unit disk")]
    SegmentOutsideDomain { index: usize },
    #[error("segments {0} and {1} are not continuous (gap {2:.3e})")]
    Discontinuous(usize, usize, f64),
    #[error(
        "integrator did not reach tolerance {tol:.3e} after {refinements} refinements \
         (best estimate {best_estimate:.3e})"
    )]
    NoConvergence {
        tol: f64,
        refinements: u32,
        best_estimate: f64,
        best: Box<TransportResult>,
    },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Which bundle the fundamental matrix acts on. Columns are the transported
/// images of the basis vectors `(∂x, ∂y)` resp. basis covectors `(dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Vector,
    #[default]
    Covector,
}

/// A path segment. Arc angles are *unreduced* so winding is explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Segment {
    Radial {
        theta: f64,
        r_from: f64,
        r_to: f64,
    },
    Arc {
        r: f64,
        theta_from: f64,
        theta_to: f64,
    },
    Line {
        from: (f64, f64),
        to: (f64, f64),
    },
}

impl Segment {
    pub fn start(&self) -> (f64, f64) {
        match *self {
            Segment::Radial { theta, r_from, .. } => (r_from * theta.cos(), r_from * theta.sin()),
            Segment::Arc { r, theta_from, .. } => (r * theta_from.cos(), r * theta_from.sin()),
            Segment::Line { from, .. } => from,
        }
    }

    pub fn end(&self) -> (f64, f64) {
        match *self {
            Segment::Radial { theta, r_to, .. } => (r_to * theta.cos(), r_to * theta.sin()),
            Segment::Arc { r, theta_to, .. } => (r * theta_to.cos(), r * theta_to.sin()),
            Segment::Line { to, .. } => to,
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Radial { theta, r_from, r_to } => Segment::Radial {
                theta,
                r_from: r_to,
                r_to: r_from,
            },
            Segment::Arc {
                r,
                theta_from,
                theta_to,
            } => Segment::Arc {
                r,
                theta_from: theta_to,
                theta_to: theta_from,
            },
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
        }
    }

    fn in_domain(&self) -> bool {
        let ok_r = |r: f64| r > 0.0 && r < 1.0 && r.is_finite();
        match *self {
            Segment::Radial { r_from, r_to, .. } => ok_r(r_from) && ok_r(r_to),
            Segment::Arc { r, theta_from, theta_to } => {
                ok_r(r) && theta_from.is_finite() && theta_to.is_finite()
            }
            Segment::Line { from, to } => {
                let n0 = from.0.hypot(from.1);
                let n1 = to.0.hypot(to.1);
                ok_r(n0) && ok_r(n1) && line_min_distance_to_origin(from, to) > 0.0
            }
        }
    }
}

fn line_min_distance_to_origin(from: (f64, f64), to: (f64, f64)) -> f64 {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return from.0.hypot(from.1);
    }
    let t = (-(from.0 * dx + from.1 * dy) / len2).clamp(0.0, 1.0);
    (from.0 + t * dx).hypot(from.1 + t * dy)
}

/// A continuous chain of segments inside the punctured disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    /// Validates domain membership and continuity (endpoints must match to
    /// 1e-12). Line segments closer than 1e-6 to the puncture are accepted
    /// with a warning; the connection coefficients blow up there.
    pub fn new(segments: Vec<Segment>) -> Result<Self, TransportError> {
        for (i, seg) in segments.iter().enumerate() {
            if !seg.in_domain() {
                return Err(TransportError::SegmentOutsideDomain { index: i });
            }
            if let Segment::Line { from, to } = seg {
                let d = line_min_distance_to_origin(*from, *to);
                if d < 1e-6 {
                    log::warn!(
                        "line segment {i} passes within {d:.3e} of the puncture; \
                         transport may lose accuracy"
                    );
                }
            }
        }
        for i in 1..segments.len() {
            let (x0, y0) = segments[i - 1].end();
            let (x1, y1) = segments[i].start();
            let gap = (x0 - x1).hypot(y0 - y1);
            if gap > 1e-12 {
                return Err(TransportError::Discontinuous(i - 1, i, gap));
            }
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn start(&self) -> Option<(f64, f64)> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<(f64, f64)> {
        self.segments.last().map(Segment::end)
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }
}

/// Result of a transport integration.
#[derive(Debug, Clone, Serialize)]
pub struct TransportResult {
    /// Fundamental matrix; columns are images of the frame basis.
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: Matrix2<f64>,
    /// Step-doubling estimate of the accumulated global error.
    pub error_estimate: f64,
    /// RK4 steps in the accepted passes, summed over segments.
    pub steps_used: usize,
}

fn serialize_matrix<S: serde::Serializer>(
    m: &Matrix2<f64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]].serialize(s)
}

/// Integrator controls. The defaults give bit-reproducible results at a
/// global tolerance of 1e-10 with at most 24 step-doubling refinements.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub max_refine: u32,
    pub initial_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            max_refine: 24,
            initial_steps: 16,
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Point on a segment at parameter `s`, together with the velocity.
fn segment_state(seg: &Segment, s: f64) -> (PointPolar, (f64, f64)) {
    match *seg {
        Segment::Radial { theta, .. } => {
            // parametrized by ρ: γ(ρ) = e^ρ (cos θ, sin θ), γ' = γ
            let r = s.exp();
            let p = PointPolar::new(r, theta).expect("validated radial point");
            ((p), (p.x(), p.y()))
        }
        Segment::Arc { r, .. } => {
            let p = PointPolar::new(r, s).expect("validated arc point");
            (p, (-r * s.sin(), r * s.cos()))
        }
        Segment::Line { from, to } => {
            let x = from.0 + s * (to.0 - from.0);
            let y = from.1 + s * (to.1 - from.1);
            let p = PointPolar::from_cartesian(x, y).expect("validated line point");
            (p, (to.0 - from.0, to.1 - from.1))
        }
    }
}

fn segment_span(seg: &Segment) -> (f64, f64) {
    match *seg {
        Segment::Radial { r_from, r_to, .. } => (r_from.ln(), r_to.ln()),
        Segment::Arc {
            theta_from,
            theta_to,
            ..
        } => (theta_from, theta_to),
        Segment::Line { .. } => (0.0, 1.0),
    }
}

/// Right-hand side `Y' = C(s) Y`: `C = -ω(γ')` in the vector frame,
/// `C = ω(γ')ᵀ` in the covector frame.
fn system_matrix(c: &ConnectionForm, frame: Frame, seg: &Segment, s: f64) -> Matrix2<f64> {
    let (p, v) = segment_state(seg, s);
    let om = c.apply(&p, v);
    match frame {
        Frame::Vector => -om,
        Frame::Covector => om.transpose(),
    }
}

fn rk4_segment(c: &ConnectionForm, frame: Frame, seg: &Segment, steps: usize) -> Matrix2<f64> {
    let (s0, s1) = segment_span(seg);
    let h = (s1 - s0) / steps as f64;
    let mut y = Matrix2::identity();
    for i in 0..steps {
        let s = s0 + h * i as f64;
        let k1 = system_matrix(c, frame, seg, s) * y;
        let k2 = system_matrix(c, frame, seg, s + 0.5 * h) * (y + 0.5 * h * k1);
        let k3 = system_matrix(c, frame, seg, s + 0.5 * h) * (y + 0.5 * h * k2);
        let k4 = system_matrix(c, frame, seg, s + h) * (y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y
}

fn integrate_segment(
    c: &ConnectionForm,
    frame: Frame,
    seg: &Segment,
    tol: f64,
    opts: &IntegratorOptions,
) -> Result<(Matrix2<f64>, f64, usize), (Matrix2<f64>, f64, usize)> {
    let mut steps = opts.initial_steps.max(2);
    let mut coarse = rk4_segment(c, frame, seg, steps);
    let mut last_est = f64::INFINITY;
    for _ in 0..opts.max_refine {
        let fine = rk4_segment(c, frame, seg, steps * 2);
        // classical RK4 is 4th order: Richardson factor 2^4 - 1
        let est = (fine - coarse).norm() / 15.0;
        if est <= tol {
            return Ok((fine, est, steps * 2));
        }
        coarse = fine;
        steps *= 2;
        last_est = est;
    }
    Err((coarse, last_est, steps))
}

/// Transport the frame along `path`, refining until the estimated global
/// error is at most `tol`. The empty path yields the identity.
pub fn parallel_transport(
    c: &ConnectionForm,
    path: &Path,
    tol: f64,
    frame: Frame,
) -> Result<TransportResult, TransportError> {
    parallel_transport_with(c, path, tol, frame, &IntegratorOptions::default())
}

pub fn parallel_transport_with(
    c: &ConnectionForm,
    path: &Path,
    tol: f64,
    frame: Frame,
    opts: &IntegratorOptions,
) -> Result<TransportResult, TransportError> {
    if !(tol > 0.0) {
        return Err(TransportError::BadTolerance(tol));
    }
    let mut matrix = Matrix2::identity();
    let mut error = 0.0;
    let mut steps_total = 0usize;
    let nseg = path.segments.len().max(1);
    let seg_tol = tol / nseg as f64;

    for seg in &path.segments {
        match integrate_segment(c, frame, seg, seg_tol, opts) {
            Ok((m, est, steps)) => {
                matrix = m * matrix;
                error += est;
                steps_total += steps;
            }
            Err((m, est, steps)) => {
                let best = TransportResult {
                    matrix: m * matrix,
                    error_estimate: error + est,
                    steps_used: steps_total + steps,
                };
                return Err(TransportError::NoConvergence {
                    tol,
                    refinements: opts.max_refine,
                    best_estimate: error + est,
                    best: Box::new(best),
                });
            }
        }
    }

    Ok(TransportResult {
        matrix,
        error_estimate: error,
        steps_used: steps_total,
    })
}

/// Holonomy along the counterclockwise circle of radius `r`, based at the
/// point `(r, 0)`: one full positive winding.
pub fn holonomy_circle(
    c: &ConnectionForm,
    r: f64,
    tol: f64,
    frame: Frame,
) -> Result<TransportResult, TransportError> {
    holonomy_circle_with(c, r, tol, frame, &IntegratorOptions::default())
}

pub fn holonomy_circle_with(
    c: &ConnectionForm,
    r: f64,
    tol: f64,
    frame: Frame,
    opts: &IntegratorOptions,
) -> Result<TransportResult, TransportError> {
    let path = Path::new(vec![Segment::Arc {
        r,
        theta_from: 0.0,
        theta_to: TAU,
    }])?;
    parallel_transport_with(c, &path, tol, frame, opts)
}

/// Maximum pairwise difference of holonomy traces over the given radii.
pub fn trace_invariance(
    c: &ConnectionForm,
    radii: &[f64],
    tol: f64,
) -> Result<f64, TransportError> {
    let mut traces = Vec::with_capacity(radii.len());
    for &r in radii {
        traces.push(holonomy_circle(c, r, tol, Frame::Covector)?.matrix.trace());
    }
    let mut max_dev = 0.0f64;
    for i in 0..traces.len() {
        for j in (i + 1)..traces.len() {
            max_dev = max_dev.max((traces[i] - traces[j]).abs());
        }
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{connection_form, j_matrix, levi_civita_form};
    use crate::models::{flat_cone, log_model};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn cov(m: &ConnectionForm, path: &Path, tol: f64) -> Matrix2<f64> {
        parallel_transport(m, path, tol, Frame::Covector).unwrap().matrix
    }

    fn radial(theta: f64, r_from: f64, r_to: f64) -> Path {
        Path::new(vec![Segment::Radial { theta, r_from, r_to }]).unwrap()
    }

    #[test]
    fn empty_path_gives_identity() {
        let c = connection_form(&flat_cone(1.0, 1.0).unwrap());
        let res = parallel_transport(&c, &Path::empty(), 1e-10, Frame::Covector).unwrap();
        assert_eq!(res.matrix, Matrix2::identity());
        assert_eq!(res.steps_used, 0);
    }

    #[test]
    fn cone_radial_transport_closed_form() {
        // from r to (near) 1 the covector transport is diag(r^{-β/2})
        for beta in [-2.0, 0.5, 1.0, 2.7] {
            let c = connection_form(&flat_cone(beta, 1.0).unwrap());
            let (r0, r1) = (0.25, 0.5);
            let m = cov(&c, &radial(0.3, r0, r1), 1e-11);
            let expected = (r0 / r1).powf(-beta / 2.0);
            assert_relative_eq!(m[(0, 0)], expected, epsilon = 1e-9);
            assert_relative_eq!(m[(1, 1)], expected, epsilon = 1e-9);
            assert!(m[(0, 1)].abs() < 1e-10 && m[(1, 0)].abs() < 1e-10);
        }
    }

    #[test]
    fn log_radial_transport_closed_form() {
        // diag((r1/r0)^{k/2}, (r1/r0)^{k/2} log r1 / log r0); k=2 gives diag(2,1)
        let c = connection_form(&log_model(2, 1.0, Complex64::new(1.0, 0.0)).unwrap());
        let m = cov(&c, &radial(0.0, 0.25, 0.5), 1e-11);
        assert_relative_eq!(m[(0, 0)], 2.0, epsilon = 1e-9);
        assert_relative_eq!(m[(1, 1)], 1.0, epsilon = 1e-9);
        assert!(m[(0, 1)].abs() < 1e-10 && m[(1, 0)].abs() < 1e-10);
    }

    #[test]
    fn cone_holonomy_is_rotation() {
        for beta in [-0.5, 1.0 / 3.0, 1.5, 2.7] {
            let c = connection_form(&flat_cone(beta, 1.0).unwrap());
            let h = holonomy_circle(&c, 0.5, 1e-11, Frame::Covector)
                .unwrap()
                .matrix;
            let t = std::f64::consts::PI * beta;
            let expected =
                Matrix2::identity() * t.cos() - j_matrix() * t.sin();
            assert!((h - expected).norm() <= 1e-9, "beta={beta}: {h:?}");
            assert_relative_eq!(h.trace(), 2.0 * t.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn log_holonomy_matches_displayed_formula() {
        // k=1, r=0.5: (-1)·[[1, 2π/log(1/2)], [0, 1]]
        let c = connection_form(&log_model(1, 1.0, Complex64::new(1.0, 0.0)).unwrap());
        let h = holonomy_circle(&c, 0.5, 1e-11, Frame::Covector)
            .unwrap()
            .matrix;
        let off = TAU / 0.5f64.ln();
        let expected = -Matrix2::new(1.0, off, 0.0, 1.0);
        assert!((h - expected).norm() <= 1e-9, "{h:?}");
        assert_relative_eq!(h[(0, 1)], 9.064720283654388, epsilon = 1e-9);
    }

    #[test]
    fn trace_invariance_examples() {
        let c = connection_form(&flat_cone(0.7, 1.0).unwrap());
        let dev = trace_invariance(&c, &[0.1, 0.3, 0.6], 1e-10).unwrap();
        assert!(dev <= 2e-10, "{dev}");

        let c = connection_form(&log_model(2, 1.0, Complex64::new(1.0, 0.0)).unwrap());
        let dev = trace_invariance(&c, &[0.1, 0.5], 1e-10).unwrap();
        assert!(dev <= 2e-10, "{dev}");

        let zero = levi_civita_form(&crate::fields::ScalarExpression::zero());
        let dev = trace_invariance(&zero, &[0.2, 0.4], 1e-10).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn path_validation_errors() {
        assert!(Path::new(vec![Segment::Radial {
            theta: 0.0,
            r_from: 0.5,
            r_to: 1.0
        }])
        .is_err());
        assert!(Path::new(vec![Segment::Line {
            from: (-0.5, 0.0),
            to: (0.5, 0.0)
        }])
        .is_err());
        // discontinuous chain
        assert!(matches!(
            Path::new(vec![
                Segment::Radial {
                    theta: 0.0,
                    r_from: 0.3,
                    r_to: 0.5
                },
                Segment::Arc {
                    r: 0.4,
                    theta_from: 0.0,
                    theta_to: 1.0
                },
            ]),
            Err(TransportError::Discontinuous(0, 1, _))
        ));
    }

    #[test]
    fn path_json_round_trip() {
        let p = Path::new(vec![
            Segment::Radial {
                theta: 0.0,
                r_from: 0.25,
                r_to: 0.5,
            },
            Segment::Arc {
                r: 0.5,
                theta_from: 0.0,
                theta_to: TAU,
            },
        ])
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"type\":\"radial\""));
        assert!(s.contains("\"theta_to\":6.283185307179586"));
        let back: Path = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }

    // ---- randomized structural properties --------------------------------

    fn arb_model() -> impl Strategy<Value = ConnectionForm> {
        prop_oneof![
            (-2.5f64..2.5).prop_map(|beta| connection_form(&flat_cone(beta, 1.0).unwrap())),
            ((-3i32..=3), (0.5f64..2.0), (0.0f64..TAU)).prop_map(|(k, c, phase)| {
                connection_form(&log_model(k, c, Complex64::from_polar(1.0, phase)).unwrap())
            }),
        ]
    }

    /// Piecewise path: start at (r0, θ0), then radial / arc / chord moves.
    fn arb_path() -> impl Strategy<Value = Path> {
        let start = (0.15f64..0.8, 0.0f64..TAU);
        let moves = prop::collection::vec(
            prop_oneof![
                (0.15f64..0.8).prop_map(MoveSpec::Radial),
                (-2.0f64..2.0).prop_map(MoveSpec::Arc),
                ((-0.4f64..0.4), (-0.08f64..0.08)).prop_map(|(dt, dr)| MoveSpec::Chord(dt, dr)),
            ],
            1..5,
        );
        (start, moves).prop_map(|((r0, th0), moves)| {
            let mut segments = Vec::new();
            let (mut r, mut th) = (r0, th0);
            for mv in moves {
                match mv {
                    MoveSpec::Radial(r_new) => {
                        if (r_new - r).abs() > 1e-6 {
                            segments.push(Segment::Radial {
                                theta: th,
                                r_from: r,
                                r_to: r_new,
                            });
                            r = r_new;
                        }
                    }
                    MoveSpec::Arc(dth) => {
                        if dth.abs() > 1e-6 {
                            segments.push(Segment::Arc {
                                r,
                                theta_from: th,
                                theta_to: th + dth,
                            });
                            th += dth;
                        }
                    }
                    MoveSpec::Chord(dth, dr) => {
                        let r_new = (r + dr).clamp(0.15, 0.85);
                        let th_new = th + dth;
                        let from = (r * th.cos(), r * th.sin());
                        let to = (r_new * th_new.cos(), r_new * th_new.sin());
                        segments.push(Segment::Line { from, to });
                        r = r_new;
                        th = th_new;
                    }
                }
            }
            Path::new(segments).expect("constructed path is valid")
        })
    }

    #[derive(Debug, Clone, Copy)]
    enum MoveSpec {
        Radial(f64),
        Arc(f64),
        Chord(f64, f64),
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn frame_duality(c in arb_model(), path in arb_path()) {
            let tol = 1e-9;
            let v = parallel_transport(&c, &path, tol, Frame::Vector).unwrap().matrix;
            let m = parallel_transport(&c, &path, tol, Frame::Covector).unwrap().matrix;
            prop_assert!((v.transpose() * m - Matrix2::identity()).norm() <= 10.0 * 1e-8);
        }

        #[test]
        fn reversal_inverts(c in arb_model(), path in arb_path()) {
            let tol = 1e-9;
            let m = parallel_transport(&c, &path, tol, Frame::Covector).unwrap().matrix;
            let back = parallel_transport(&c, &path.reversed(), tol, Frame::Covector).unwrap().matrix;
            prop_assert!((back * m - Matrix2::identity()).norm() <= 1e-7);
        }

        #[test]
        fn holonomy_trace_frame_independent(c in arb_model(), r in 0.15f64..0.8) {
            let tol = 1e-9;
            let hv = holonomy_circle(&c, r, tol, Frame::Vector).unwrap().matrix;
            let hc = holonomy_circle(&c, r, tol, Frame::Covector).unwrap().matrix;
            prop_assert!((hv.trace() - hc.trace()).abs() <= 1e-8);
        }
    }

    #[test]
    fn composition_concatenates() {
        let c = connection_form(&log_model(1, 1.0, Complex64::new(1.0, 0.0)).unwrap());
        let a = radial(0.4, 0.3, 0.6);
        let b = Path::new(vec![Segment::Arc {
            r: 0.6,
            theta_from: 0.4,
            theta_to: 2.0,
        }])
        .unwrap();
        let mut joined = a.segments.clone();
        joined.extend(b.segments.clone());
        let joined = Path::new(joined).unwrap();
        let tol = 1e-10;
        let ma = cov(&c, &a, tol);
        let mb = cov(&c, &b, tol);
        let mj = cov(&c, &joined, tol);
        assert!((mb * ma - mj).norm() <= 10.0 * tol * 1e2, "{:?}", mb * ma - mj);
    }

    #[test]
    fn covector_determinant_law() {
        // det(transport from p to q) = w(p)/w(q) inverted through the frame:
        // in the covector frame det M = w(end)/w(start), w = e^{-u}.
        let d = log_model(2, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        let c = connection_form(&d);
        let path = radial(0.0, 0.25, 0.5);
        let m = cov(&c, &path, 1e-10);
        let w0 = d.metric_coefficient(&PointPolar::new(0.25, 0.0).unwrap());
        let w1 = d.metric_coefficient(&PointPolar::new(0.5, 0.0).unwrap());
        assert_relative_eq!(m.determinant(), w1 / w0, max_relative = 1e-8);
    }

    #[test]
    fn levi_civita_preserves_metric_norm() {
        let d = log_model(1, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        let lc = levi_civita_form(&d.u);
        let path = radial(1.0, 0.3, 0.7);
        let v = parallel_transport(&lc, &path, 1e-10, Frame::Vector).unwrap().matrix;
        let w0 = d.metric_coefficient(&PointPolar::new(0.3, 1.0).unwrap());
        let w1 = d.metric_coefficient(&PointPolar::new(0.7, 1.0).unwrap());
        for e in [nalgebra::Vector2::new(1.0, 0.0), nalgebra::Vector2::new(0.3, -0.4)] {
            let te = v * e;
            assert_relative_eq!(
                w1 * te.norm_squared(),
                w0 * e.norm_squared(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn nonconvergence_reports_best_estimate() {
        let c = connection_form(&log_model(3, 1.0, Complex64::new(1.0, 0.0)).unwrap());
        let opts = IntegratorOptions {
            max_refine: 1,
            initial_steps: 2,
        };
        let path = Path::new(vec![Segment::Arc {
            r: 0.5,
            theta_from: 0.0,
            theta_to: TAU,
        }])
        .unwrap();
        let err = parallel_transport_with(&c, &path, 1e-14, Frame::Covector, &opts);
        match err {
            Err(TransportError::NoConvergence { best, .. }) => {
                assert!(best.matrix.determinant().is_finite());
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
