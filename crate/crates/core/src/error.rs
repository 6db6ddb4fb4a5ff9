//! Error and warning types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent medium/field configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Level ordering violated (e.g. negative Boltzmann gap).
    #[error("level ordering error: {0}")]
    Ordering(String),

    /// A saturation denominator vanished; physically unreachable for
    /// positive rates, so this flags corrupted inputs or a solver bug.
    #[error("singular saturation denominator ({0})")]
    SingularSaturation(String),

    /// The dense oracle matrix is numerically singular.
    #[error("oracle system numerically singular (pivot ratio {pivot_ratio:.3e})")]
    SingularSystem { pivot_ratio: f64 },

    /// An operation was called outside its stated domain.
    #[error("misuse: {0}")]
    Misuse(String),

    /// Doppler/ac-Stark compensation is undefined at zero drive detuning.
    #[error("compensation undefined: Omega1 = 0")]
    UndefinedCompensation,

    /// Relative change per integration step exceeded the stability bound.
    #[error("integration unstable at Z = {z}: relative step change {change:.3e} > 0.1; reduce the step below {suggested_step:.3e}")]
    Stability { z: f64, change: f64, suggested_step: f64 },

    /// Non-finite field amplitudes during propagation.
    #[error("integration diverged at Z = {z}")]
    Divergence { z: f64 },

    /// Config file parse failure with location context.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code per the external interface contract:
    /// 2 config invalid, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Ordering(_) | Error::Misuse(_) | Error::Parse { .. } => 2,
            Error::Io { .. } => 2,
            _ => 3,
        }
    }
}

/// Non-fatal diagnostics attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Velocity-grid spacing exceeds the narrowest coherence width in
    /// Doppler-shift units; narrow structures may be unresolved.
    GridResolution { spacing_internal: f64, narrowest_width: f64 },
    /// Quadrature span too small; estimated relative truncation attached.
    IntegrationSpan { estimated_truncation: f64 },
    /// |gamma^2/beta^2| outside the validity domain of the small-coupling
    /// conversion formula.
    FwmEfficiencyValidity { ratio: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::GridResolution { spacing_internal, narrowest_width } => write!(
                f,
                "velocity grid spacing {spacing_internal:.3e} (internal units) exceeds narrowest coherence width {narrowest_width:.3e}"
            ),
            Warning::IntegrationSpan { estimated_truncation } => write!(
                f,
                "integration span too small; estimated relative truncation {estimated_truncation:.3e}"
            ),
            Warning::FwmEfficiencyValidity { ratio } => write!(
                f,
                "|gamma^2/beta^2| = {ratio:.3e} >= 0.3; small-coupling formula outside validity"
            ),
        }
    }
}
