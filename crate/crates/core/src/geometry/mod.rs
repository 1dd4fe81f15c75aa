//! Spectral curves and domains, boundary grids, cut systems, and contour
//! integration.

pub mod boundary;
pub mod curve;
pub mod cuts;
pub mod domain;
pub mod polygon;
pub mod spec_file;

pub use boundary::{BoundaryFunction, Grid};
pub use curve::Curve;
pub use cuts::{make_cuts, Anchor, Cut, CutOptions, CutPath, CutSystem};
pub use domain::{Against, Domain, Path};
pub use spec_file::{load_domain, save_domain, CurveSpec, DomainSpec};
