//! Szegő coordinates and quadrature domains.
//!
//! Given a smooth finitely connected planar domain, this crate computes
//! boundary values of the Szegő and Garabedian kernels by a Kerzman–Stein
//! Nyström solve, fits elements of the Szegő span, and assembles conformal
//! maps `f` close to the identity with `f' = σ²` for a span element `σ`.
//! The image `f(Ω)` is then a quadrature domain for boundary arc length
//! (and, for the double construction, for area as well); the [`verify`]
//! module certifies that claim by independent boundary-integral moments.
//!
//! Module map:
//!
//! * [`geometry`]: spectral curves, domains, cut systems, contour integrals.
//! * [`kernels`]: Szegő/Garabedian kernels, Cauchy interior evaluation,
//!   Hardy projection, Ahlfors maps.
//! * [`spanfit`]: least-squares fits in the Szegő span.
//! * [`builder`]: simply connected, multiply connected arc-length, and double
//!   builds.
//! * [`verify`]: quadrature extraction, fitting, holdout verification, and
//!   moment-defect diagnostics.
//! * [`cli`]: the file-driven `qd` pipeline.
//!
//! The low-level numerics in [`numerics`] are generic over the scalar type;
//! everything above them works in `f64` through the [`Real`] and [`Complex`]
//! aliases.

pub mod builder;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod numerics;
pub mod spanfit;
pub mod verify;

/// Real scalar used by the solvers.
pub type Real = f64;

/// Complex scalar used by the solvers.
pub type Complex = num_complex::Complex<Real>;

pub use builder::ConformalMap;
pub use error::{QdError, Result};
pub use geometry::{BoundaryFunction, Curve, CutSystem, Domain};
pub use kernels::{KernelField, SzegoSolver};
pub use spanfit::{SpanBasis, SpanElement};
pub use verify::{Measure, QuadratureData};

/// The imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);

/// Shorthand for `Complex::new(re, im)`.
#[inline]
pub fn c64(re: Real, im: Real) -> Complex {
    Complex::new(re, im)
}
