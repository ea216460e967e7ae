//! Foundational numerics: complex 2x2 linear algebra, explicit
//! Runge-Kutta integration and composite quadrature.
//!
//! All operations here are pure functions of their inputs and are safe to
//! share across threads.

pub mod mat2;
pub mod ode;
pub mod quad;

pub use mat2::{
    is_density_matrix, spin_minus, spin_plus, spin_x, spin_y, spin_z, ComplexMat2, DensityMatrix,
};
pub use ode::{integrate_ode, integrate_sampled, OdeMethod, OdeStepperConfig, OdeTrajectory};
pub use quad::{
    cumulative_uniform, integrate_complex, integrate_real, nested_integral, QuadRule,
    QuadratureConfig,
};
