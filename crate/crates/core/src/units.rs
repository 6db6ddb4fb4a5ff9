//! Physical constants (CODATA 2022 / exact SI) and unit conversions.
//!
//! Internal convention: rates, Rabi amplitudes and detunings are angular
//! frequencies in units of 1e6 s^-1. A value quoted by spectroscopy
//! captions as "1 GHz" enters as 1000 internal units; a width reported in
//! ordinary MHz is (internal angular width) / (2 pi).

use crate::real::Real;

/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_068_92e-27;
/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Most probable (Maxwell) speed u = sqrt(2 kB T / m), m/s.
pub fn thermal_speed_si(temperature_k: f64, molar_mass_amu: f64) -> f64 {
    (2.0 * BOLTZMANN * temperature_k / (molar_mass_amu * AMU)).sqrt()
}

/// Wavevector expressed as internal angular units per (m/s) of velocity:
/// k v in 1e6 rad/s for v in m/s.
pub fn k_per_mps<F: Real>(lambda_nm: F) -> F {
    F::of(2.0 * std::f64::consts::PI * 1.0e3) / lambda_nm
}

/// Angular internal width -> ordinary frequency in MHz.
pub fn angular_to_mhz<F: Real>(w: F) -> F {
    w / F::of(2.0 * std::f64::consts::PI)
}

/// Angular internal width -> ordinary frequency in GHz.
pub fn angular_to_ghz<F: Real>(w: F) -> F {
    angular_to_mhz(w) / F::of(1.0e3)
}

/// Photon energy spacing of two stacked transitions, as a temperature:
/// hc (1/lambda_a - 1/lambda_b) / kB, in kelvin, for wavelengths in nm.
pub fn level_gap_kelvin(lambda_a_nm: f64, lambda_b_nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT * (1.0 / (lambda_a_nm * 1e-9) - 1.0 / (lambda_b_nm * 1e-9)) / BOLTZMANN
}
