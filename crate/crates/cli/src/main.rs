//! `dlam` -- scan drivers for the double-Lambda four-wave-mixing medium.
//!
//! Exit codes: 0 ok, 2 invalid configuration, 3 numerical failure.

use clap::{Args, Parser, Subcommand};
use dlam::doppler::{GridScheme, ProfileQuantity};
use dlam::harness::{self, config, csv, presets, validate_config_file, ScanSettings, ScanVariable};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dlam", version, about = "Resonant four-wave mixing in a Doppler-broadened double-Lambda medium")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Config file (TOML; may extend a preset via `extends = "name"`).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `--preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the velocity-grid node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the integration step in Z.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Doppler-averaged absorption/gain/dispersion vs probe detuning.
    Spectrum {
        #[command(flatten)]
        src: Source,
        /// Scan range override: start,stop,count
        #[arg(long, value_delimiter = ',', num_args = 3)]
        range: Option<Vec<f64>>,
    },
    /// Self-consistent coupled-wave propagation trace.
    Propagate {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        zmax: Option<f64>,
    },
    /// Probe transmission at fixed depth vs a swept input (omega4 | g1).
    Switching {
        #[command(flatten)]
        src: Source,
        /// Fixed optical depth Z.
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, value_parser = ["omega4", "g1"])]
        sweep: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 3)]
        range: Option<Vec<f64>>,
    },
    /// Per-velocity-class profile of a quantity (Maxwell envelope removed).
    Velocity {
        #[command(flatten)]
        src: Source,
        /// dr1 | dr2 | dr3 | dr4 | alpha4 | g2
        #[arg(long, default_value = "alpha4")]
        quantity: String,
        /// Probe detuning override for the profile.
        #[arg(long)]
        omega4: Option<f64>,
    },
    /// Photon-number evolution with absorption/refraction disabled.
    ManleyRowe {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        zmax: Option<f64>,
    },
    /// Parse a config and print the invariant report.
    Validate {
        #[command(flatten)]
        src: Source,
    },
    /// List built-in presets.
    Presets,
}

fn load(src: &Source) -> dlam::Result<config::Config> {
    let mut cfg = match (&src.config, &src.preset) {
        (Some(path), None) => config::load_config(path)?,
        (None, Some(name)) => presets::preset(name)?,
        _ => {
            return Err(dlam::Error::Config(
                "provide exactly one of --config or --preset".into(),
            ))
        }
    };
    if let Some(n) = src.nodes {
        cfg.grid_scheme = match cfg.grid_scheme {
            GridScheme::Uniform { span, .. } => GridScheme::Uniform { n, span },
            GridScheme::GaussHermite { .. } => GridScheme::GaussHermite { n },
        };
    }
    if let Some(step) = src.step {
        cfg.propagation.step = step;
    }
    Ok(cfg)
}

fn sink(src: &Source) -> dlam::Result<Box<dyn Write>> {
    match &src.out {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| dlam::Error::Io {
                context: format!("creating {}", path.display()),
                source: e,
            })?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
    }
}

fn override_scan(
    cfg: &mut config::Config,
    range: &Option<Vec<f64>>,
    variable: ScanVariable,
) -> dlam::Result<()> {
    if let Some(r) = range {
        cfg.scan = Some(ScanSettings {
            variable,
            start: r[0],
            stop: r[1],
            count: r[2] as usize,
        });
    } else if let Some(s) = cfg.scan.as_mut() {
        s.variable = variable;
    }
    Ok(())
}

fn run(cli: Cli) -> dlam::Result<()> {
    match cli.command {
        Command::Spectrum { src, range } => {
            let mut cfg = load(&src)?;
            override_scan(&mut cfg, &range, ScanVariable::Omega4)?;
            let rows = harness::run_spectrum(&cfg)?;
            csv::write_spectrum(&mut sink(&src)?, &cfg, &rows)
        }
        Command::Propagate { src, zmax } => {
            let mut cfg = load(&src)?;
            if let Some(z) = zmax {
                cfg.propagation.zmax = z;
            }
            let trace = harness::run_propagation(&cfg)?;
            csv::write_trace(&mut sink(&src)?, &cfg, &trace)
        }
        Command::Switching { src, z, sweep, range } => {
            let mut cfg = load(&src)?;
            if let Some(z) = z {
                cfg.propagation.zmax = z;
            }
            let var = match sweep.as_deref() {
                Some("g1") => ScanVariable::G1,
                _ => ScanVariable::Omega4,
            };
            override_scan(&mut cfg, &range, var)?;
            let rows = harness::run_switching(&cfg)?;
            let name = match var {
                ScanVariable::G1 => "G1",
                _ => "Omega4",
            };
            csv::write_switching(&mut sink(&src)?, &cfg, name, &rows)
        }
        Command::Velocity { src, quantity, omega4 } => {
            let mut cfg = load(&src)?;
            if let Some(om) = omega4 {
                cfg.fields = cfg.fields.with_omega4(om);
            }
            let q = match quantity.as_str() {
                "dr1" => ProfileQuantity::DeltaR(1),
                "dr2" => ProfileQuantity::DeltaR(2),
                "dr3" => ProfileQuantity::DeltaR(3),
                "dr4" => ProfileQuantity::DeltaR(4),
                "alpha4" => ProfileQuantity::Alpha4Contribution,
                "g2" => ProfileQuantity::StokesGainContribution,
                other => {
                    return Err(dlam::Error::Misuse(format!(
                        "unknown quantity '{other}' (dr1..dr4 | alpha4 | g2)"
                    )))
                }
            };
            let rows = harness::run_velocity(&cfg, q)?;
            csv::write_velocity(&mut sink(&src)?, &cfg, &rows)
        }
        Command::ManleyRowe { src, zmax } => {
            let mut cfg = load(&src)?;
            if let Some(z) = zmax {
                cfg.propagation.zmax = z;
            }
            let (_, report) = harness::run_manley_rowe(&cfg)?;
            csv::write_manley_rowe(&mut sink(&src)?, &cfg, &report)
        }
        Command::Validate { src } => {
            let rep = match (&src.config, &src.preset) {
                (Some(path), None) => validate_config_file(path),
                (None, Some(name)) => {
                    let text = presets::preset_text(name).ok_or_else(|| {
                        dlam::Error::Config(format!("unknown preset '{name}'"))
                    })?;
                    harness::validate_config_str(text, name)
                }
                _ => {
                    return Err(dlam::Error::Config(
                        "provide exactly one of --config or --preset".into(),
                    ))
                }
            };
            let mut out = sink(&src)?;
            out.write_all(rep.render().as_bytes()).map_err(|e| dlam::Error::Io {
                context: "writing report".into(),
                source: e,
            })?;
            if !rep.passed() {
                return Err(dlam::Error::Config("validation failed".into()));
            }
            Ok(())
        }
        Command::Presets => {
            for name in presets::preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
