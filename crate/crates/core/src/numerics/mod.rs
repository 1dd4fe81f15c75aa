//! Scalar-generic numerical building blocks.
//!
//! Everything here is independent of the geometry: quadrature rules, Bell
//! polynomials and jet calculus, polynomial interpolation, FFT-based spectral
//! operations, truncated-SVD least squares, and a damped Newton solver.

pub mod bell;
pub mod interp;
pub mod lsq;
pub mod newton;
pub mod quadrature;
pub mod spectral;

pub use bell::{bell_table, binomial, compose_jets, product_jets};
pub use interp::NewtonInterpolant;
pub use lsq::{LeastSquaresSolution, TruncatedSvd};
pub use newton::{newton_holomorphic, newton_real, NewtonOptions, NewtonReport};
pub use quadrature::{gauss_legendre, GaussLegendre};
