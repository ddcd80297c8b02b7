//! Connection 1-forms and flatness verification.
//!
//! With respect to the trivialization `(∂x, ∂y)` the flat symplectic
//! connection of a structure `(h, u, a)` has the shape
//!
//! ```text
//!        ( ω₁₁   -*ω₁₁ )        2ω₁₁ =  e^u (dh + aφ) - du
//! ω_∇ =  (              ) ,                                    φ = -dθ,
//!        ( *ω₂₂   ω₂₂  )        2ω₂₂ = -e^u (dh + aφ) - du
//! ```
//!
//! where `*` is the Hodge star of the flat metric (`*dx = dy`, `*dy = -dx`).
//! The Levi-Civita form of a conformal metric `e^{-u}|dz|²` is
//! `ω_LC = -½ (du·𝟙 + *du·J)` in the same trivialization.

use nalgebra::Matrix2;

use crate::fields::{HarmonicExpansion, PointPolar, ScalarExpression};
use crate::models::SpecialKahlerData;
use crate::transport::{self, Frame, IntegratorOptions, Path, Segment, TransportError};

/// `J = [[0, -1], [1, 0]]`, the standard complex structure on `ℝ²`.
pub fn j_matrix() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionKind {
    SpecialKahler,
    LeviCivita,
}

/// Evaluator for a matrix-valued 1-form: at a point it yields the pair
/// `(A_x, A_y)` with `ω(v) = A_x v_x + A_y v_y` in Cartesian components.
#[derive(Debug, Clone)]
pub struct ConnectionForm {
    kind: ConnectionKind,
    h: HarmonicExpansion,
    u: ScalarExpression,
    a: f64,
}

/// One-form as a pair of Cartesian components.
#[derive(Debug, Clone, Copy)]
struct OneForm {
    x: f64,
    y: f64,
}

impl ConnectionForm {
    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    /// Components `(ω₁₁, ω₂₂)` as `(dx, dy)`-coefficient pairs.
    fn omega_components(&self, p: &PointPolar) -> (OneForm, OneForm) {
        let (ux, uy) = self.u.gradient(p);
        match self.kind {
            ConnectionKind::LeviCivita => {
                let w = OneForm {
                    x: -0.5 * ux,
                    y: -0.5 * uy,
                };
                (w, w)
            }
            ConnectionKind::SpecialKahler => {
                let eu = self.u.eval(p).exp();
                let (hx, hy) = self.h.gradient(p);
                let r2 = p.r() * p.r();
                // φ = -dθ = (y dx - x dy) / r²
                let ax = eu * (hx + self.a * p.y() / r2);
                let ay = eu * (hy - self.a * p.x() / r2);
                (
                    OneForm {
                        x: 0.5 * (ax - ux),
                        y: 0.5 * (ay - uy),
                    },
                    OneForm {
                        x: 0.5 * (-ax - ux),
                        y: 0.5 * (-ay - uy),
                    },
                )
            }
        }
    }

    /// Evaluate to the coefficient matrices `(A_x, A_y)`.
    ///
    /// With `(*η)_x = -η_y` and `(*η)_y = η_x`, the shape above gives
    /// `A_x = [[ω₁₁_x, ω₁₁_y], [-ω₂₂_y, ω₂₂_x]]` and
    /// `A_y = [[ω₁₁_y, -ω₁₁_x], [ω₂₂_x, ω₂₂_y]]`.
    pub fn eval(&self, p: &PointPolar) -> (Matrix2<f64>, Matrix2<f64>) {
        let (w11, w22) = self.omega_components(p);
        let ax = Matrix2::new(w11.x, w11.y, -w22.y, w22.x);
        let ay = Matrix2::new(w11.y, -w11.x, w22.x, w22.y);
        (ax, ay)
    }

    /// `ω(v)` for a tangent vector `v` in Cartesian components.
    pub fn apply(&self, p: &PointPolar, v: (f64, f64)) -> Matrix2<f64> {
        let (ax, ay) = self.eval(p);
        ax * v.0 + ay * v.1
    }

    /// `(ω₁₁(v), ω₂₂(v))` — used by tests to pin the component equations.
    pub fn component_values(&self, p: &PointPolar, v: (f64, f64)) -> (f64, f64) {
        let (w11, w22) = self.omega_components(p);
        (w11.x * v.0 + w11.y * v.1, w22.x * v.0 + w22.y * v.1)
    }
}

/// The special Kähler connection form of a triple.
pub fn connection_form(d: &SpecialKahlerData) -> ConnectionForm {
    ConnectionForm {
        kind: ConnectionKind::SpecialKahler,
        h: d.h.clone(),
        u: d.u.clone(),
        a: d.a,
    }
}

/// Levi-Civita form of the conformal metric `e^{-u} |dz|²`.
pub fn levi_civita_form(u: &ScalarExpression) -> ConnectionForm {
    ConnectionForm {
        kind: ConnectionKind::LeviCivita,
        h: HarmonicExpansion::zero(),
        u: u.clone(),
        a: 0.0,
    }
}

/// Residuals of the defining PDE system at a point:
/// `(Δh, Δu - |dh + aφ|² e^{2u})` with the flat norm `|dθ|² = 1/r²`.
pub fn pde_residual(d: &SpecialKahlerData, p: &PointPolar) -> (f64, f64) {
    let lap_h = d.h.laplacian(p);
    let lap_u = d.u.laplacian(p);
    let (hx, hy) = d.h.gradient(p);
    let r2 = p.r() * p.r();
    let cx = hx + d.a * p.y() / r2;
    let cy = hy - d.a * p.x() / r2;
    let e2u = (2.0 * d.u.eval(p)).exp();
    (lap_h, lap_u - (cx * cx + cy * cy) * e2u)
}

/// Flatness probe: Frobenius deviation from the identity of the parallel
/// transport around the axis-aligned square loop of side `side` centered at
/// `p`. For a flat connection this is integrator error only.
pub fn curvature_residual(
    c: &ConnectionForm,
    p: &PointPolar,
    side: f64,
) -> Result<f64, TransportError> {
    let opts = IntegratorOptions::default();
    curvature_residual_with(c, p, side, &opts)
}

pub fn curvature_residual_with(
    c: &ConnectionForm,
    p: &PointPolar,
    side: f64,
    opts: &IntegratorOptions,
) -> Result<f64, TransportError> {
    let (x, y) = (p.x(), p.y());
    let s = side / 2.0;
    let corners = [
        (x - s, y - s),
        (x + s, y - s),
        (x + s, y + s),
        (x - s, y + s),
    ];
    let mut segments = Vec::with_capacity(4);
    for i in 0..4 {
        segments.push(Segment::Line {
            from: corners[i],
            to: corners[(i + 1) % 4],
        });
    }
    let path = Path::new(segments)?;
    let result = transport::parallel_transport_with(c, &path, 1e-12, Frame::Vector, opts)?;
    Ok((result.matrix - Matrix2::identity()).norm())
}

/// `r · ‖ω_∇ - ω_LC‖` at `p`, where the norm is the larger Frobenius norm
/// of the `dx`- and `dy`-coefficient matrices.
pub fn lc_deviation(d: &SpecialKahlerData, p: &PointPolar) -> f64 {
    let nabla = connection_form(d);
    let lc = levi_civita_form(&d.u);
    let (ax, ay) = nabla.eval(p);
    let (bx, by) = lc.eval(p);
    p.r() * (ax - bx).norm().max((ay - by).norm())
}
