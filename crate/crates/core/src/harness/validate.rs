//! Configuration validation with a full invariant report.

use super::config::{load_config, parse_config, Config};
use crate::error::Result;
use crate::scheme::MATCHING_TOLERANCE;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct CheckEntry {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.entries.push(CheckEntry { name: name.to_string(), ok, detail });
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let tag = if e.ok { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "[{tag}] {:<24} {}", e.name, e.detail);
        }
        let _ = writeln!(
            s,
            "{}",
            if self.passed() { "all checks passed" } else { "validation FAILED" }
        );
        s
    }
}

fn report_for(cfg: Result<Config>) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let cfg = match cfg {
        Ok(c) => {
            rep.push("parse", true, "config parsed".into());
            c
        }
        Err(e) => {
            rep.push("parse", false, e.to_string());
            return rep;
        }
    };
    let p = &cfg.scheme;
    match p.validate() {
        Ok(()) => rep.push("scheme.invariants", true, "rates, pump and signs valid".into()),
        Err(e) => rep.push("scheme.invariants", false, e.to_string()),
    }
    let r = p.matching_residual();
    rep.push(
        "frequency_matching",
        r <= MATCHING_TOLERANCE,
        format!("|1/l4+1/l2-1/l1-1/l3|*l4 = {r:.3e} (tolerance {MATCHING_TOLERANCE:.1e})"),
    );
    match p.thermal_speed() {
        Ok(u) => {
            rep.push("thermal_speed", true, format!("u = {u:.2} m/s"));
            match p.doppler_fwhm(4) {
                Ok(f) => rep.push("doppler_width_probe", true, format!("{f:.3} GHz FWHM")),
                Err(e) => rep.push("doppler_width_probe", false, e.to_string()),
            }
            match p.raman_doppler_fwhm() {
                Ok(f) => {
                    rep.push("doppler_width_raman", true, format!("{:.1} MHz FWHM", f * 1e3))
                }
                Err(e) => rep.push("doppler_width_raman", false, e.to_string()),
            }
        }
        Err(e) => rep.push("thermal_speed", false, e.to_string()),
    }
    match p.boltzmann_n_over_l() {
        Ok(f) => rep.push(
            "boltzmann_fraction",
            true,
            format!("n(n)/n(l) = {:.3}%", f * 100.0),
        ),
        Err(e) => rep.push("boltzmann_fraction", false, e.to_string()),
    }
    let n = crate::densmat::zero_field_populations(p);
    let total: f64 = n.iter().sum();
    rep.push(
        "occupancy",
        total <= 1.0 + 1e-9,
        format!("zero-field populations sum to {total:.6}"),
    );
    rep.push(
        "alpha0_anchor",
        (p.alpha0[3] - 1.0).abs() < 1e-9,
        format!("alpha0 = {:?} (probe anchor must be 1)", p.alpha0),
    );
    rep.push(
        "units_echo",
        true,
        format!(
            "internal angular 1e6 s^-1; homogeneous Raman FWHM = {:.2} MHz",
            p.raman_homogeneous_fwhm_mhz()
        ),
    );
    rep
}

/// Validate a config file on disk.
pub fn validate_config_file(path: &std::path::Path) -> ValidationReport {
    report_for(load_config(path))
}

/// Validate config text (used for presets and tests).
pub fn validate_config_str(text: &str, origin: &str) -> ValidationReport {
    report_for(parse_config(text, origin))
}
