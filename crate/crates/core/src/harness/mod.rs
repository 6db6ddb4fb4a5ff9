//! Configuration ingestion, named presets, scan drivers and CSV output.

pub mod config;
pub mod csv;
pub mod presets;
pub mod validate;

pub use config::{Config, PropagationSettings, ScanSettings, ScanVariable};
pub use validate::{validate_config_file, validate_config_str, ValidationReport};

use crate::doppler::{DopplerContext, ProfileQuantity, VelocityGrid};
use crate::error::Result;
use crate::propagate::{self, MrRow, PropagationTrace, SweepVar};
use crate::real::Real;
use crate::scheme::FieldState;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct SpectrumRow {
    pub omega4: f64,
    pub alpha4: f64,
    pub g2: f64,
    pub delta_k4: f64,
    pub delta_k2: f64,
}

/// Build the Doppler context declared by a config.
pub fn context(cfg: &Config) -> Result<DopplerContext<f64>> {
    let u = cfg.scheme.thermal_speed()?;
    let grid = VelocityGrid::from_scheme(u, cfg.grid_scheme);
    DopplerContext::new(cfg.scheme.clone(), grid)
}

/// Probe-detuning spectrum of the Doppler-averaged coefficients.
/// Omega2 tracks Omega1 + Omega3 - Omega4 across the scan.
pub fn run_spectrum(cfg: &Config) -> Result<Vec<SpectrumRow>> {
    let scan = cfg.require_scan(ScanVariable::Omega4)?;
    let ctx = context(cfg)?;
    scan.values()
        .par_iter()
        .map(|&om4| {
            let set = ctx.average(&cfg.fields.with_omega4(om4))?;
            Ok(SpectrumRow {
                omega4: om4,
                alpha4: set.alpha(4),
                g2: set.stokes_gain(),
                delta_k4: set.delta_k(4),
                delta_k2: set.delta_k(2),
            })
        })
        .collect()
}

/// Self-consistent propagation run with the config's field inputs.
pub fn run_propagation(cfg: &Config) -> Result<PropagationTrace<f64>> {
    let ctx = context(cfg)?;
    propagate::integrate(&ctx, &cfg.fields, &cfg.propagation.opts())
}

/// Propagation with absorption and refraction switched off; returns the
/// trace and the photon-conservation report.
pub fn run_manley_rowe(cfg: &Config) -> Result<(PropagationTrace<f64>, Vec<MrRow<f64>>)> {
    let ctx = context(cfg)?;
    let opts = cfg.propagation.opts().with_zero_sigma(true);
    let trace = propagate::integrate(&ctx, &cfg.fields, &opts)?;
    let report = propagate::manley_rowe_report(&trace);
    Ok((trace, report))
}

/// Probe transmission at Z = propagation.zmax over the scan variable
/// (omega4 or g1).
pub fn run_switching(cfg: &Config) -> Result<Vec<(f64, f64)>> {
    let scan = cfg.scan.as_ref().ok_or_else(|| {
        crate::Error::Misuse("switching requires a [scan] section".into())
    })?;
    let sweep = match scan.variable {
        ScanVariable::Omega4 => SweepVar::Omega4,
        ScanVariable::G1 => SweepVar::G1,
        other => {
            return Err(crate::Error::Misuse(format!(
                "switching sweeps omega4 or g1, not {other:?}"
            )))
        }
    };
    let ctx = context(cfg)?;
    propagate::switching_curve(
        &ctx,
        &cfg.fields,
        cfg.propagation.zmax,
        sweep,
        &scan.values(),
        &cfg.propagation.opts(),
    )
}

/// Per-velocity-class profile of the requested quantity at the config's
/// field settings.
pub fn run_velocity(
    cfg: &Config,
    quantity: ProfileQuantity,
) -> Result<Vec<crate::doppler::ProfileRow<f64>>> {
    let ctx = context(cfg)?;
    crate::doppler::velocity_profile(&ctx, &cfg.fields, quantity)
}

/// Scan a spectrum over an explicit detuning list with a shared context
/// (two-stage zoom scans reuse this).
pub fn spectrum_over<F: Real>(
    ctx: &DopplerContext<F>,
    fields: &FieldState<F>,
    omega4: &[F],
) -> Result<Vec<(F, F)>> {
    omega4
        .par_iter()
        .map(|&om| {
            let set = ctx.average(&fields.with_omega4(om))?;
            Ok((om, set.alpha(4)))
        })
        .collect()
}
