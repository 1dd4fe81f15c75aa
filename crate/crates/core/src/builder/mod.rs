//! Szegő coordinates: conformal maps `f` with `f' = σ²` for `σ` in the Szegő
//! span, built close to the identity.
//!
//! Three constructions are provided. The simply connected build fits
//! `σ ≈ 1`. The multiply connected arc-length build corrects `σ` by span
//! approximations of the rational functions `R_j` until `σ² dz` has no hole
//! periods. The double build works with half-order differentials on the
//! double of the domain and kills the hole and handle periods together, so
//! that `f` extends meromorphically to the double.

mod build;
mod frames;
mod map;
mod rational;

pub use build::{auxiliary_points, build, build_double, build_mc_arclength, build_sc, BuildOptions};
pub use frames::{
    element_periods, gram, linear_anchors, pairing, periods, reference_frames, FrameTag, HalfOrderFrame, PeriodSystem,
    ResidueLoops,
};
pub use map::{BuildMode, ConformalMap, DoubleDiagnostics, SolveSummary, UnivalenceCertificate};
pub use rational::{hole_period, rational_basis, rational_tables, RationalBasis};
