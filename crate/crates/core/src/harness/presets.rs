//! Built-in presets: the sodium-dimer base parameter set and one file per
//! simulated figure regime.

use super::config::{parse_config, Config};
use crate::error::{Error, Result};

macro_rules! preset_table {
    ($(($name:literal, $file:literal)),+ $(,)?) => {
        /// (name, TOML source) of every built-in preset.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../presets/", $file)))),+
        ];
    };
}

preset_table![
    ("na2_hinze", "na2_hinze.toml"),
    ("fig2a", "fig2a.toml"),
    ("fig2b", "fig2b.toml"),
    ("fig3", "fig3.toml"),
    ("fig4a", "fig4a.toml"),
    ("fig4b", "fig4b.toml"),
    ("fig5", "fig5.toml"),
    ("fig6a", "fig6a.toml"),
    ("fig6b", "fig6b.toml"),
    ("fig7_g0", "fig7_g0.toml"),
    ("fig7_g500", "fig7_g500.toml"),
    ("fig7_g1000", "fig7_g1000.toml"),
    ("fig7_g1500", "fig7_g1500.toml"),
    ("fig8", "fig8.toml"),
    ("fig9a", "fig9a.toml"),
    ("fig9a_resonant", "fig9a_resonant.toml"),
    ("fig9b", "fig9b.toml"),
    ("fig10a", "fig10a.toml"),
    ("fig10b", "fig10b.toml"),
    ("fig11ab", "fig11ab.toml"),
    ("fig11cd", "fig11cd.toml"),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Resolve a named preset into a full configuration.
pub fn preset(name: &str) -> Result<Config> {
    let text = preset_text(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset '{name}'; available: {}",
            preset_names().join(", ")
        ))
    })?;
    parse_config(text, name)
}

/// The sodium-dimer base configuration.
pub fn na2_hinze() -> Config {
    preset("na2_hinze").expect("built-in preset parses")
}
