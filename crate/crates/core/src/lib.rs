//! Composite viscous double-shock waves for the one-dimensional compressible
//! Navier-Stokes system with a Maxwell constitutive law, in Lagrangian
//! coordinates:
//!
//! ```text
//! v_t - u_x = 0
//! u_t + p(v)_x = Π_x
//! τ Π_t + v Π = μ u_x
//! ```
//!
//! with the γ-law `p(v) = v^(-γ)`. Setting `τ = 0` gives the classical
//! system `u_t + p(v)_x = (μ u_x / v)_x`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composite;
pub mod constitutive;
pub mod error;
pub mod harness;
pub mod profile;
pub mod riemann;
pub mod shiftdiag;
pub mod solver;

pub use composite::{CompositeField, CompositePoint, CompositeWave};
pub use constitutive::GasModel;
pub use error::{Error, Result};
pub use harness::ExperimentConfig;
pub use profile::{DecayReport, ProfileOptions, WaveProfile};
pub use riemann::{EndState, Family, Midstate, ShockLink};
pub use shiftdiag::{DiagnosticsRow, ShiftDiagnostics, ShiftState, ShiftTracker};
pub use solver::{
    BoundaryFlux, FieldState, Grid1D, Observer, PerturbTarget, Perturbation, Reconstruction,
    Solver, SolverConfig,
};
