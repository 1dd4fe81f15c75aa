//! Szegő and Garabedian kernels from the Kerzman–Stein equation, interior
//! Cauchy evaluation, the Hardy projection, and Ahlfors maps.

pub mod ahlfors;
pub mod cauchy;
pub mod hardy;
pub mod szego;

pub use ahlfors::{ahlfors_from_solver, ahlfors_map, AhlforsMap};
pub use cauchy::{
    circle_jets, evaluate_hardy_derivative, evaluate_hardy_interior, evaluate_hardy_near, CauchyEvaluator,
};
pub use hardy::{hardy_inner, hardy_norm, szego_projection, HardyProjector};
pub use szego::{kerzman_stein, solve_szego, KernelField, SzegoSolver, DEFAULT_CLEARANCE, DEFAULT_ORDER_CAP};
