//! Certification of quadrature identities by boundary-integral moments,
//! and moment-defect tests for meromorphic extension.

mod defect;
mod functions;
mod quadrature;
mod report;

pub use defect::moment_defect;
pub use functions::{check_holdouts, default_holdouts, TestFunction, HOLDOUT_COUNT, MIN_POLE_DISTANCE};
pub use quadrature::{
    area_moment, default_training, extract_from_jets, extract_quadrature_sc, fit_quadrature, map_quadrature, moment,
    Measure, QuadratureData, FIT_CUTOFF,
};
pub use report::{verify_quadrature, HoldoutRow, VerificationReport};
