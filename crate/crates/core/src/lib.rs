//! Two-dimensional special Kähler structures with isolated singularities.
//!
//! A structure on the punctured unit disk is encoded by a triple `(h, u, a)`:
//! a harmonic function `h`, the metric potential `u` (the metric is
//! `g = e^{-u} |dz|²`), and a real constant `a`. The flat symplectic
//! connection of the structure is reconstructed from the triple, and the
//! defining conditions reduce to `Δh = 0` and `Δu = |dh + aφ|² e^{2u}` with
//! `φ = -dθ`.
//!
//! The crate provides:
//!
//! * [`fields`] — exact evaluation and differentiation of the scalar fields;
//! * [`models`] — the catalog of flat cones and logarithmic models, plus
//!   rescaling / coordinate-change constructions;
//! * [`connection`] — connection 1-forms, Levi-Civita comparison, and
//!   flatness residuals;
//! * [`transport`] — parallel transport along paths by controlled-error
//!   Runge-Kutta integration, and holonomy around the puncture;
//! * [`analysis`] — holonomy conjugacy classification, holomorphic cubic
//!   forms, asymptotic fits of metric samples, special-coordinate checks,
//!   and the singular-fiber compatibility table.

pub mod analysis;
pub mod connection;
pub mod fields;
pub mod models;
pub mod transport;

pub use fields::{HarmonicExpansion, PointPolar, ScalarExpression, Term};
pub use models::{ModelSpec, SpecialKahlerData};
