//! Two-species kinetic plasma solver in one position and one momentum
//! dimension.
//!
//! Each species' distribution `f(x, p)` obeys a relativistic collisionless
//! Boltzmann equation. The electromagnetic field is carried by the scalar
//! potential `phi` and the x-component of the vector potential `A`, both
//! advanced by Lorenz-gauge wave equations sourced by the charge and current
//! moments of `f`. Two force laws are available:
//!
//! * [`ForceMode::Modified`]: `F = -(q/c) (dA/dt + v dA/dx)`, the convective
//!   derivative of `A`, with no `grad phi` term.
//! * [`ForceMode::Standard`]: `F = q (-dphi/dx - (1/c) dA/dt)`, the usual
//!   potential-form Lorentz force (the magnetic term vanishes in this
//!   geometry).
//!
//! The system carries two redundant equations, the Lorenz gauge condition and
//! electron continuity. They are never enforced and serve as runtime
//! consistency residuals (see [`diagnostics`]).
//!
//! The crate is `no_std` (it needs `alloc`). Enabling the `parallel` feature
//! pulls in `std` and rayon and parallelizes the advection sweeps.

#![cfg_attr(not(feature = "std"), no_std)]
#![cfg_attr(
    test,
    allow(clippy::field_reassign_with_default, clippy::needless_range_loop)
)]

extern crate alloc;

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod kinematics;
pub mod moments;
mod par;
pub mod spline;
pub mod state;
pub mod vlasov;

pub use config::{Config, ForceMode, InitConfig, Preset, SpeciesConfig, SpeciesLabel};
pub use error::{ConfigViolation, Error};
pub use grid::PhaseSpaceGrid;
pub use kinematics::{ForceField, ForceLaw};
pub use state::{FieldState, SimulationState, SpeciesState};
pub use vlasov::{StepOutput, TimePlan};

/// `4 pi`, the Gaussian-unit source coupling.
pub const FOUR_PI: f64 = 4.0 * core::f64::consts::PI;
