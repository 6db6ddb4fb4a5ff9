//! Config file schema (TOML, key = value with one section per module),
//! preset extension and resolution into validated runtime types.

use crate::doppler::GridScheme;
use crate::error::{Error, Result};
use crate::propagate::IntegrateOpts;
use crate::scheme::{
    CoherenceWidths, FieldState, LevelWidths, PartialDecays, Pump, SchemeParams, Topology,
};
use serde::Deserialize;

/// Top-level sections; the `extends` key is stripped while preset chains
/// are resolved, before this schema applies.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: Option<toml::Value>,
    fields: Option<toml::Value>,
    doppler: Option<toml::Value>,
    propagation: Option<toml::Value>,
    scan: Option<toml::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    topology: Topology,
    lambda_nm: [f64; 4],
    temperature_k: f64,
    molar_mass_amu: f64,
    rates: RawRates,
    pump: Option<RawPump>,
    alpha0: Option<[f64; 4]>,
    propagation_sign: Option<[i8; 4]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    gamma_gl: f64,
    gamma_gn: f64,
    gamma_mn: f64,
    gamma_ml: f64,
    #[serde(rename = "Gamma_l")]
    big_l: f64,
    #[serde(rename = "Gamma_g")]
    big_g: f64,
    #[serde(rename = "Gamma_n")]
    big_n: f64,
    #[serde(rename = "Gamma_m")]
    big_m: f64,
    #[serde(rename = "Gamma_lg")]
    coh_lg: f64,
    #[serde(rename = "Gamma_ng")]
    coh_ng: f64,
    #[serde(rename = "Gamma_nm")]
    coh_nm: f64,
    #[serde(rename = "Gamma_lm")]
    coh_lm: f64,
    #[serde(rename = "Gamma_ln")]
    coh_ln: f64,
    #[serde(rename = "Gamma_gm")]
    coh_gm: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    q_l: Option<f64>,
    q_g: Option<f64>,
    q_n: Option<f64>,
    q_m: Option<f64>,
    w_g: Option<f64>,
    w_n: Option<f64>,
    w_m: Option<f64>,
}

/// Fields section; Omega2 is intentionally not a key (it is always
/// derived from the matching constraint).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFields {
    g1: f64,
    g2: f64,
    g3: f64,
    g4: f64,
    omega1: f64,
    omega3: f64,
    omega4: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoppler {
    grid: Option<String>,
    nodes: Option<usize>,
    span: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropagation {
    zmax: Option<f64>,
    step: Option<f64>,
    sample_stride: Option<usize>,
    dk_offset: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    variable: ScanVariable,
    start: f64,
    stop: f64,
    count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVariable {
    Omega4,
    Z,
    G1,
    G3,
    V,
}

#[derive(Debug, Clone, Copy)]
pub struct PropagationSettings {
    pub zmax: f64,
    pub step: f64,
    pub sample_stride: usize,
    pub dk_offset: f64,
}

impl PropagationSettings {
    pub fn opts(&self) -> IntegrateOpts<f64> {
        IntegrateOpts {
            zmax: self.zmax,
            step: self.step,
            sample_stride: self.sample_stride,
            zero_sigma: false,
            dk_offset: self.dk_offset,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanSettings {
    pub variable: ScanVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ScanSettings {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count.max(2);
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub scheme: SchemeParams<f64>,
    pub fields: FieldState<f64>,
    pub grid_scheme: GridScheme,
    pub propagation: PropagationSettings,
    pub scan: Option<ScanSettings>,
}

impl Config {
    pub fn require_scan(&self, var: ScanVariable) -> Result<&ScanSettings> {
        match &self.scan {
            Some(s) if s.variable == var => Ok(s),
            Some(s) => Err(Error::Misuse(format!(
                "scan variable {:?} required, config has {:?}",
                var, s.variable
            ))),
            None => Err(Error::Misuse("config has no [scan] section".into())),
        }
    }
}

fn parse_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse { path: path.to_string(), message: e.to_string() }
}

/// Deep merge: values from `over` replace values in `base`; tables merge
/// key-by-key.
fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parse a config document, resolving `extends` against the built-in
/// presets. `origin` labels parse errors.
pub fn parse_config(text: &str, origin: &str) -> Result<Config> {
    let mut value: toml::Value =
        text.parse().map_err(|e: toml::de::Error| parse_err(origin, e))?;
    // resolve extends chains (depth-limited)
    let mut depth = 0;
    while let Some(parent_name) = value
        .get("extends")
        .and_then(|v| v.as_str())
        .map(str::to_string)
    {
        depth += 1;
        if depth > 8 {
            return Err(parse_err(origin, "extends chain too deep"));
        }
        let parent_text = super::presets::preset_text(&parent_name).ok_or_else(|| {
            parse_err(origin, format!("unknown preset '{parent_name}' in extends"))
        })?;
        let mut parent: toml::Value = parent_text
            .parse()
            .map_err(|e: toml::de::Error| parse_err(&parent_name, e))?;
        if let Some(t) = value.as_table_mut() {
            t.remove("extends");
        }
        merge(&mut parent, value);
        value = parent;
    }
    let raw: RawConfig =
        value.try_into().map_err(|e: toml::de::Error| parse_err(origin, e))?;
    resolve(raw, origin)
}

/// Load and resolve a config file.
pub fn load_config(path: &std::path::Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        context: format!("reading config {}", path.display()),
        source: e,
    })?;
    parse_config(&text, &path.display().to_string())
}

fn resolve(raw: RawConfig, origin: &str) -> Result<Config> {
    let scheme_raw: RawScheme = raw
        .scheme
        .ok_or_else(|| parse_err(origin, "missing [scheme] section"))?
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(origin, e))?;
    let fields_raw: RawFields = raw
        .fields
        .ok_or_else(|| parse_err(origin, "missing [fields] section"))?
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(origin, e))?;
    let doppler_raw: Option<RawDoppler> = raw
        .doppler
        .map(|v| v.try_into().map_err(|e: toml::de::Error| parse_err(origin, e)))
        .transpose()?;
    let prop_raw: Option<RawPropagation> = raw
        .propagation
        .map(|v| v.try_into().map_err(|e: toml::de::Error| parse_err(origin, e)))
        .transpose()?;
    let scan_raw: Option<RawScan> = raw
        .scan
        .map(|v| v.try_into().map_err(|e: toml::de::Error| parse_err(origin, e)))
        .transpose()?;

    let r = &scheme_raw.rates;
    let decays =
        PartialDecays { gl: r.gamma_gl, gn: r.gamma_gn, mn: r.gamma_mn, ml: r.gamma_ml };
    let level_widths = LevelWidths { l: r.big_l, g: r.big_g, n: r.big_n, m: r.big_m };
    let coherence_widths = CoherenceWidths {
        lg: r.coh_lg,
        ng: r.coh_ng,
        nm: r.coh_nm,
        lm: r.coh_lm,
        ln: r.coh_ln,
        gm: r.coh_gm,
    };

    let mut params = SchemeParams {
        topology: scheme_raw.topology,
        lambda_nm: scheme_raw.lambda_nm,
        decays,
        level_widths,
        coherence_widths,
        pump: Pump::Closed { w_g: 0.0, w_n: 0.0, w_m: 0.0 },
        temperature_k: scheme_raw.temperature_k,
        molar_mass_amu: scheme_raw.molar_mass_amu,
        alpha0: [1.0; 4],
        propagation_sign: scheme_raw.propagation_sign.unwrap_or([1; 4]),
    };

    params.pump = resolve_pump(&params, scheme_raw.pump, origin)?;
    params.alpha0 = match scheme_raw.alpha0 {
        Some(a) => a,
        None => {
            let n = crate::densmat::zero_field_populations(&params);
            let dn = [n[0] - n[1], n[2] - n[1], n[2] - n[3], n[0] - n[3]];
            SchemeParams::alpha0_equal_dipoles(params.lambda_nm, &params.coherence_widths, dn)
        }
    };
    params.validate()?;

    let fields = FieldState::from_real(
        [fields_raw.g1, fields_raw.g2, fields_raw.g3, fields_raw.g4],
        fields_raw.omega1,
        fields_raw.omega3,
        fields_raw.omega4,
    );

    let grid_scheme = match doppler_raw {
        None => GridScheme::Uniform { n: 4001, span: 4.5 },
        Some(d) => {
            let nodes = d.nodes.unwrap_or(4001);
            match d.grid.as_deref().unwrap_or("uniform") {
                "uniform" => GridScheme::Uniform { n: nodes, span: d.span.unwrap_or(4.5) },
                "gauss_hermite" => GridScheme::GaussHermite { n: nodes },
                other => {
                    return Err(parse_err(
                        origin,
                        format!("unknown grid scheme '{other}' (uniform | gauss_hermite)"),
                    ))
                }
            }
        }
    };

    let p = prop_raw.unwrap_or(RawPropagation {
        zmax: None,
        step: None,
        sample_stride: None,
        dk_offset: None,
    });
    let propagation = PropagationSettings {
        zmax: p.zmax.unwrap_or(10.0),
        step: p.step.unwrap_or(0.01),
        sample_stride: p.sample_stride.unwrap_or(10),
        dk_offset: p.dk_offset.unwrap_or(0.0),
    };
    if propagation.step <= 0.0 || propagation.zmax < 0.0 {
        return Err(Error::Config("propagation requires step > 0 and zmax >= 0".into()));
    }

    let scan = match scan_raw {
        None => None,
        Some(s) => {
            if s.count < 2 {
                return Err(Error::Config("scan sample count must be >= 2".into()));
            }
            if !(s.start.is_finite() && s.stop.is_finite()) {
                return Err(Error::Config("scan range must be finite".into()));
            }
            Some(ScanSettings {
                variable: s.variable,
                start: s.start,
                stop: s.stop,
                count: s.count,
            })
        }
    };

    Ok(Config { scheme: params, fields, grid_scheme, propagation, scan })
}

fn resolve_pump(
    params: &SchemeParams<f64>,
    raw: Option<RawPump>,
    origin: &str,
) -> Result<Pump<f64>> {
    let raw = raw.unwrap_or_default();
    let has_q = [raw.q_l, raw.q_g, raw.q_n, raw.q_m].iter().any(Option::is_some);
    let has_w = [raw.w_g, raw.w_n, raw.w_m].iter().any(Option::is_some);
    if has_q && has_w {
        return Err(parse_err(origin, "pump section mixes q_* and w_* rates"));
    }
    match params.topology {
        Topology::Open => {
            if has_w {
                return Err(parse_err(origin, "open topology requires q_* pump rates"));
            }
            if !has_q {
                return Err(parse_err(
                    origin,
                    "open topology needs an explicit [scheme.pump] with q_* rates",
                ));
            }
            Ok(Pump::Open {
                q_l: raw.q_l.unwrap_or(0.0),
                q_g: raw.q_g.unwrap_or(0.0),
                q_n: raw.q_n.unwrap_or(0.0),
                q_m: raw.q_m.unwrap_or(0.0),
            })
        }
        Topology::Closed => {
            if has_q {
                return Err(parse_err(origin, "closed topology requires w_* pump rates"));
            }
            if has_w {
                Ok(Pump::Closed {
                    w_g: raw.w_g.unwrap_or(0.0),
                    w_n: raw.w_n.unwrap_or(0.0),
                    w_m: raw.w_m.unwrap_or(0.0),
                })
            } else {
                // default: thermal seeding of level n only, matching the
                // Boltzmann population set by the lambda1/lambda2 gap
                let f = params.boltzmann_fraction(params.lambda_nm[0], params.lambda_nm[1])?;
                Ok(Pump::Closed { w_g: 0.0, w_n: params.level_widths.n * f, w_m: 0.0 })
            }
        }
    }
}
