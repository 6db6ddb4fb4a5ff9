//! Deterministic simulator for resonant four-wave mixing, inversionless
//! amplification and optical switching in a Doppler-broadened four-level
//! double-Lambda medium (levels l - g - n - m closed into a loop by four
//! optical transitions).
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! scheme  ->  densmat  ->  suscept  ->  doppler  ->  propagate
//! (medium)    (steady      (local       (velocity    (coupled-wave
//!              state)       response)    average)     integration)
//! ```
//!
//! with `harness` providing config files, presets, scan drivers and CSV
//! output on top.
//!
//! All rates, Rabi amplitudes and detunings are carried internally in
//! angular units of 10^6 s^-1; spectral widths reported to the user are
//! ordinary frequencies (angular / 2 pi). Absorption coefficients and the
//! propagation coordinate are dimensionless: Z = alpha4_0 * z, where
//! alpha4_0 is the zero-field resonant absorption coefficient of the
//! probe transition.
//!
//! Core numerics are generic over the scalar type through [`Real`];
//! concrete `f64` aliases are exported at the crate root.

pub mod densmat;
pub mod doppler;
pub mod error;
pub mod harness;
pub mod propagate;
pub mod real;
pub mod scheme;
pub mod suscept;
pub mod units;

pub(crate) mod linsolve;

pub use error::{Error, Result, Warning};
pub use real::Real;

/// Concrete aliases for the default double-precision instantiation.
pub type SchemeParams64 = scheme::SchemeParams<f64>;
pub type FieldState64 = scheme::FieldState<f64>;
pub type DmSolution64 = densmat::DmSolution<f64>;
pub type SusceptibilitySet64 = suscept::SusceptibilitySet<f64>;
pub type VelocityGrid64 = doppler::VelocityGrid<f64>;
pub type PropagationTrace64 = propagate::PropagationTrace<f64>;
