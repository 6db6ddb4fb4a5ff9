//! CSV emission with a comment-prefixed header block of the resolved
//! configuration, so every artifact is self-describing.

use super::config::Config;
use super::SpectrumRow;
use crate::doppler::{GridScheme, ProfileRow};
use crate::error::{Error, Result};
use crate::propagate::{MrRow, PropagationTrace};
use crate::scheme::{Pump, Topology};
use std::io::Write;

fn io_err(context: &str, e: std::io::Error) -> Error {
    Error::Io { context: context.to_string(), source: e }
}

/// Comment block describing the fully resolved configuration.
pub fn config_header(cfg: &Config) -> String {
    let mut s = String::new();
    let p = &cfg.scheme;
    let push = |s: &mut String, k: &str, v: String| {
        s.push_str(&format!("# {k} = {v}\n"));
    };
    push(
        &mut s,
        "scheme.topology",
        match p.topology {
            Topology::Open => "open".into(),
            Topology::Closed => "closed".into(),
        },
    );
    push(&mut s, "scheme.lambda_nm", format!("{:?}", p.lambda_nm));
    push(&mut s, "scheme.temperature_k", format!("{}", p.temperature_k));
    push(&mut s, "scheme.molar_mass_amu", format!("{}", p.molar_mass_amu));
    push(
        &mut s,
        "scheme.rates",
        format!(
            "gamma_gl={} gamma_gn={} gamma_mn={} gamma_ml={} Gamma_l={} Gamma_g={} Gamma_n={} Gamma_m={} Gamma_lg={} Gamma_ng={} Gamma_nm={} Gamma_lm={} Gamma_ln={} Gamma_gm={}",
            p.decays.gl,
            p.decays.gn,
            p.decays.mn,
            p.decays.ml,
            p.level_widths.l,
            p.level_widths.g,
            p.level_widths.n,
            p.level_widths.m,
            p.coherence_widths.lg,
            p.coherence_widths.ng,
            p.coherence_widths.nm,
            p.coherence_widths.lm,
            p.coherence_widths.ln,
            p.coherence_widths.gm
        ),
    );
    match p.pump {
        Pump::Open { q_l, q_g, q_n, q_m } => {
            push(&mut s, "scheme.pump", format!("q_l={q_l} q_g={q_g} q_n={q_n} q_m={q_m}"))
        }
        Pump::Closed { w_g, w_n, w_m } => {
            push(&mut s, "scheme.pump", format!("w_g={w_g} w_n={w_n} w_m={w_m}"))
        }
    }
    push(&mut s, "scheme.alpha0", format!("{:?}", p.alpha0));
    push(&mut s, "scheme.propagation_sign", format!("{:?}", p.propagation_sign));
    let f = &cfg.fields;
    push(
        &mut s,
        "fields.g",
        format!(
            "[{}, {}, {}, {}]",
            f.g(1).re,
            f.g(2).re,
            f.g(3).re,
            f.g(4).re
        ),
    );
    push(
        &mut s,
        "fields.omega",
        format!(
            "omega1={} omega2={} omega3={} omega4={}",
            f.omega1(),
            f.omega2(),
            f.omega3(),
            f.omega4()
        ),
    );
    match cfg.grid_scheme {
        GridScheme::Uniform { n, span } => {
            push(&mut s, "doppler.grid", format!("uniform nodes={n} span={span}"))
        }
        GridScheme::GaussHermite { n } => {
            push(&mut s, "doppler.grid", format!("gauss_hermite nodes={n}"))
        }
    }
    push(
        &mut s,
        "propagation",
        format!(
            "zmax={} step={} sample_stride={} dk_offset={}",
            cfg.propagation.zmax,
            cfg.propagation.step,
            cfg.propagation.sample_stride,
            cfg.propagation.dk_offset
        ),
    );
    if let Some(scan) = &cfg.scan {
        push(
            &mut s,
            "scan",
            format!(
                "variable={:?} start={} stop={} count={}",
                scan.variable, scan.start, scan.stop, scan.count
            ),
        );
    }
    s
}

pub fn write_spectrum(
    w: &mut impl Write,
    cfg: &Config,
    rows: &[SpectrumRow],
) -> Result<()> {
    let ctx = "writing spectrum csv";
    w.write_all(config_header(cfg).as_bytes()).map_err(|e| io_err(ctx, e))?;
    writeln!(w, "Omega4,alpha4,g2,delta_k4,delta_k2").map_err(|e| io_err(ctx, e))?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.omega4, r.alpha4, r.g2, r.delta_k4, r.delta_k2)
            .map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}

pub fn write_trace(
    w: &mut impl Write,
    cfg: &Config,
    trace: &PropagationTrace<f64>,
) -> Result<()> {
    let ctx = "writing propagation csv";
    w.write_all(config_header(cfg).as_bytes()).map_err(|e| io_err(ctx, e))?;
    writeln!(
        w,
        "Z,re_G1,im_G1,re_G2,im_G2,re_G3,im_G3,re_G4,im_G4,T4,T1,N1,N2,N3,N4,theta,psi"
    )
    .map_err(|e| io_err(ctx, e))?;
    let t4 = trace.transmission(4);
    let t1 = trace.transmission(1);
    for (i, &z) in trace.z.iter().enumerate() {
        let g = trace.g[i];
        let f = trace.flux[i];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            z,
            g[0].re,
            g[0].im,
            g[1].re,
            g[1].im,
            g[2].re,
            g[2].im,
            g[3].re,
            g[3].im,
            t4[i],
            t1[i],
            f[0],
            f[1],
            f[2],
            f[3],
            trace.theta[i],
            trace.psi[i]
        )
        .map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}

pub fn write_switching(
    w: &mut impl Write,
    cfg: &Config,
    sweep_name: &str,
    rows: &[(f64, f64)],
) -> Result<()> {
    let ctx = "writing switching csv";
    w.write_all(config_header(cfg).as_bytes()).map_err(|e| io_err(ctx, e))?;
    writeln!(w, "{sweep_name},T4").map_err(|e| io_err(ctx, e))?;
    for (x, t) in rows {
        writeln!(w, "{x},{t}").map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}

pub fn write_velocity(
    w: &mut impl Write,
    cfg: &Config,
    rows: &[ProfileRow<f64>],
) -> Result<()> {
    let ctx = "writing velocity csv";
    w.write_all(config_header(cfg).as_bytes()).map_err(|e| io_err(ctx, e))?;
    writeln!(w, "v_over_u,weight,quantity_re,quantity_im").map_err(|e| io_err(ctx, e))?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.v_over_u, r.weight, r.value.re, r.value.im)
            .map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}

pub fn write_manley_rowe(
    w: &mut impl Write,
    cfg: &Config,
    rows: &[MrRow<f64>],
) -> Result<()> {
    let ctx = "writing manley-rowe csv";
    w.write_all(config_header(cfg).as_bytes()).map_err(|e| io_err(ctx, e))?;
    writeln!(w, "Z,dN1,dN2,dN3,dN4,defect").map_err(|e| io_err(ctx, e))?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.z, r.dn[0], r.dn[1], r.dn[2], r.dn[3], r.defect
        )
        .map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}
