//! Steady-state spin squeezing of a double-Λ atomic ensemble in an optical cavity.
//!
//! The crate follows one pipeline. Physical constants ([`SystemParams`]) reduce to
//! the effective ground-state model ([`EffectiveParams`]). Its steady state is
//! linearized into a drift/diffusion pair ([`NoiseModel`]). The stationary
//! covariance solves the Lyapunov equation, and the minimal spin variance
//! orthogonal to the mean spin gives the Wineland squeezing figure ΔS_min.
//!
//! All rates are expressed in units of the ground-state decay γ₀ unless a
//! caller supplies absolute units throughout.

pub mod effective;
pub mod error;
pub mod fullmodel;
pub mod linalg;
pub mod noise;
pub mod optimize;
pub mod params;
pub mod quad;
pub mod simplex;
pub mod validate;

pub use effective::{
    diffusion_matrix, diffusion_matrix_with, drift_matrix, steady_state_with_field,
    steady_state_zero_field, DiffusionForm, NoiseModel, SteadyState,
};
pub use error::{Error, Result};
pub use fullmodel::{compare_effective, full_steady_state, CavityDrive, FullModelState};
pub use noise::{
    solve_lyapunov, spectrum_analytic, spectrum_matrix, spin_variance_report, variance_analytic,
    Covariance, SpectrumPoint, VarianceReport,
};
pub use optimize::{
    asymptotic_pumps, field_limit, field_scan, optimize_pumps, scaling_study, OptimumResult,
};
pub use params::{derive_effective, realize_raw, EffectiveParams, OperatingPoint, SystemParams};

pub use num_complex::Complex64 as C64;
