//! Medium and field parameters for the four-level double-Lambda scheme.
//!
//! Level layout (energies E_l < E_n < E_g < E_m):
//!
//! ```text
//!      m ────────
//!                 \
//!   g ────────     \
//!   |  \        \   |
//!   |   \  2     3  |  4
//!   | 1  \        \ |
//!   |     n ────────
//!   l ────────
//! ```
//!
//! Transition 1: l-g (drive), 2: g-n (Stokes idler), 3: n-m (drive),
//! 4: m-l (probe). Frequency matching w4 + w2 = w1 + w3 closes the loop.

use crate::error::{Error, Result};
use crate::real::{Cplx, Real};
use crate::units;
use serde::{Deserialize, Serialize};

pub const MATCHING_TOLERANCE: f64 = 5.0e-4;

/// Population closure of the lowest level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Lowest level is itself excited; every level is fed by external
    /// pump rates q_j independent of the driven dynamics.
    Open,
    /// Lowest level is the ground state; levels are fed from it at rates
    /// w_j and total population is conserved.
    Closed,
}

/// Partial decay rates gamma_jk (level j into level k), 1e6 s^-1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PartialDecays<F> {
    pub gl: F,
    pub gn: F,
    pub mn: F,
    pub ml: F,
}

/// Total level widths Gamma_j (inverse lifetimes), 1e6 s^-1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelWidths<F> {
    pub l: F,
    pub g: F,
    pub n: F,
    pub m: F,
}

/// Coherence half-widths Gamma_jk, 1e6 s^-1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoherenceWidths<F> {
    pub lg: F,
    pub ng: F,
    pub nm: F,
    pub lm: F,
    pub ln: F,
    pub gm: F,
}

impl<F: Real> CoherenceWidths<F> {
    /// Width of the optical transition j = 1..4.
    pub fn transition(&self, j: usize) -> F {
        match j {
            1 => self.lg,
            2 => self.ng,
            3 => self.nm,
            4 => self.lm,
            _ => panic!("transition index {j} out of 1..=4"),
        }
    }
}

/// Incoherent excitation, matching the topology.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pump<F> {
    /// Open configuration: absolute feed rates per level.
    Open { q_l: F, q_g: F, q_n: F, q_m: F },
    /// Closed configuration: excitation rates out of the ground level l.
    Closed { w_g: F, w_n: F, w_m: F },
}

/// Full parameter set of the medium.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeParams<F> {
    pub topology: Topology,
    /// Transition wavelengths [lambda1, lambda2, lambda3, lambda4], nm.
    pub lambda_nm: [F; 4],
    pub decays: PartialDecays<F>,
    pub level_widths: LevelWidths<F>,
    pub coherence_widths: CoherenceWidths<F>,
    pub pump: Pump<F>,
    pub temperature_k: F,
    pub molar_mass_amu: F,
    /// Zero-field resonant intensity absorption coefficients per unit Z;
    /// alpha0[3] anchors the length scale and is 1 by convention.
    pub alpha0: [F; 4],
    /// Projection sign of each wavevector on the propagation axis.
    pub propagation_sign: [i8; 4],
}

impl<F: Real> SchemeParams<F> {
    /// Validate invariants; call after construction or deserialization.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: F| -> Result<()> {
            if v > F::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be strictly positive, got {v}")))
            }
        };
        for (i, &l) in self.lambda_nm.iter().enumerate() {
            pos(&format!("lambda_nm[{}]", i + 1), l)?;
        }
        pos("temperature_k", self.temperature_k)?;
        pos("molar_mass_amu", self.molar_mass_amu)?;
        let d = &self.decays;
        let lw = &self.level_widths;
        let cw = &self.coherence_widths;
        for (n, v) in [
            ("gamma_gl", d.gl),
            ("gamma_gn", d.gn),
            ("gamma_mn", d.mn),
            ("gamma_ml", d.ml),
        ] {
            if v < F::zero() || !v.is_finite() {
                return Err(Error::Config(format!("{n} must be non-negative, got {v}")));
            }
        }
        for (n, v) in [("Gamma_l", lw.l), ("Gamma_g", lw.g), ("Gamma_n", lw.n), ("Gamma_m", lw.m)]
        {
            pos(n, v)?;
        }
        for (n, v) in [
            ("Gamma_lg", cw.lg),
            ("Gamma_ng", cw.ng),
            ("Gamma_nm", cw.nm),
            ("Gamma_lm", cw.lm),
            ("Gamma_ln", cw.ln),
            ("Gamma_gm", cw.gm),
        ] {
            pos(n, v)?;
        }
        if d.gl + d.gn > lw.g {
            return Err(Error::Config(format!(
                "partial decays of level g exceed its width: {} + {} > {}",
                d.gl, d.gn, lw.g
            )));
        }
        if d.mn + d.ml > lw.m {
            return Err(Error::Config(format!(
                "partial decays of level m exceed its width: {} + {} > {}",
                d.mn, d.ml, lw.m
            )));
        }
        match (&self.topology, &self.pump) {
            (Topology::Open, Pump::Open { q_l, q_g, q_n, q_m }) => {
                for (n, v) in [("q_l", q_l), ("q_g", q_g), ("q_n", q_n), ("q_m", q_m)] {
                    if *v < F::zero() {
                        return Err(Error::Config(format!("{n} must be non-negative")));
                    }
                }
            }
            (Topology::Closed, Pump::Closed { w_g, w_n, w_m }) => {
                for (n, v) in [("w_g", w_g), ("w_n", w_n), ("w_m", w_m)] {
                    if *v < F::zero() {
                        return Err(Error::Config(format!("{n} must be non-negative")));
                    }
                }
            }
            (Topology::Open, _) => {
                return Err(Error::Config(
                    "open topology requires pump rates q_j per level".into(),
                ))
            }
            (Topology::Closed, _) => {
                return Err(Error::Config(
                    "closed topology requires pump rates w_j out of the ground level".into(),
                ))
            }
        }
        for (i, &a) in self.alpha0.iter().enumerate() {
            if a < F::zero() || !a.is_finite() {
                return Err(Error::Config(format!("alpha0[{}] must be >= 0", i + 1)));
            }
        }
        for &s in &self.propagation_sign {
            if s != 1 && s != -1 {
                return Err(Error::Config("propagation_sign entries must be +1 or -1".into()));
            }
        }
        let r = self.matching_residual();
        if r > F::of(MATCHING_TOLERANCE) {
            return Err(Error::Config(format!(
                "frequency matching violated: |1/l4 + 1/l2 - 1/l1 - 1/l3| * l4 = {r:.3e} > {MATCHING_TOLERANCE:.1e}"
            )));
        }
        Ok(())
    }

    /// Dimensionless frequency-matching residual |1/l4 + 1/l2 - 1/l1 - 1/l3| * l4.
    pub fn matching_residual(&self) -> F {
        let [l1, l2, l3, l4] = self.lambda_nm;
        ((F::one() / l4 + F::one() / l2 - F::one() / l1 - F::one() / l3) * l4).abs()
    }

    /// Maxwell distribution scale u = sqrt(2 kB T / m), m/s.
    pub fn thermal_speed(&self) -> Result<F> {
        if self.temperature_k <= F::zero() || self.molar_mass_amu <= F::zero() {
            return Err(Error::Config(
                "thermal speed requires positive temperature and mass".into(),
            ));
        }
        Ok(F::of(units::thermal_speed_si(
            self.temperature_k.to_f64().unwrap(),
            self.molar_mass_amu.to_f64().unwrap(),
        )))
    }

    /// Wavevector of transition j (1..4) in internal angular units per m/s,
    /// including the propagation sign.
    pub fn k_signed(&self, j: usize) -> F {
        let k = units::k_per_mps(self.lambda_nm[j - 1]);
        if self.propagation_sign[j - 1] >= 0 {
            k
        } else {
            -k
        }
    }

    /// Doppler FWHM of transition j in GHz (ordinary frequency):
    /// 2 (k_j u / 2 pi) sqrt(ln 2).
    pub fn doppler_fwhm(&self, j: usize) -> Result<F> {
        if !(1..=4).contains(&j) {
            return Err(Error::Misuse(format!("transition index {j} out of 1..=4")));
        }
        let u = self.thermal_speed()?;
        let kv = units::k_per_mps(self.lambda_nm[j - 1]) * u;
        Ok(units::angular_to_ghz(F::of(2.0) * kv * F::of(2.0_f64.ln().sqrt())))
    }

    /// Doppler FWHM of the two-photon (Raman) l-n transition, GHz,
    /// built on the effective wavevector k1 - k2 for co-propagating beams.
    pub fn raman_doppler_fwhm(&self) -> Result<F> {
        let u = self.thermal_speed()?;
        let keff = (self.k_signed(1) - self.k_signed(2)).abs();
        Ok(units::angular_to_ghz(F::of(2.0) * keff * u * F::of(2.0_f64.ln().sqrt())))
    }

    /// Homogeneous FWHM of the Raman transition, MHz ordinary: 2 Gamma_ln / 2 pi.
    pub fn raman_homogeneous_fwhm_mhz(&self) -> F {
        units::angular_to_mhz(F::of(2.0) * self.coherence_widths.ln)
    }

    /// Boltzmann factor exp(-dE/kB T) between two levels whose gap is fixed
    /// by the wavelength pair: E_upper - E_lower = hc (1/la - 1/lb).
    pub fn boltzmann_fraction(&self, lambda_a_nm: F, lambda_b_nm: F) -> Result<F> {
        let gap_k = units::level_gap_kelvin(
            lambda_a_nm.to_f64().unwrap(),
            lambda_b_nm.to_f64().unwrap(),
        );
        if gap_k < 0.0 {
            return Err(Error::Ordering(format!(
                "negative level gap for pair ({lambda_a_nm}, {lambda_b_nm}) nm"
            )));
        }
        Ok(F::of((-gap_k / self.temperature_k.to_f64().unwrap()).exp()))
    }

    /// Boltzmann population of level n relative to level l
    /// (gap from the lambda1/lambda2 ladder).
    pub fn boltzmann_n_over_l(&self) -> Result<F> {
        self.boltzmann_fraction(self.lambda_nm[0], self.lambda_nm[1])
    }

    /// Zero-field absorption coefficients assuming equal reduced dipole
    /// moments: alpha_j0 proportional to k_j dn_j / Gamma_j, normalized to
    /// alpha4_0 = 1. `dn` are the zero-field population differences.
    pub fn alpha0_equal_dipoles(lambda_nm: [F; 4], cw: &CoherenceWidths<F>, dn: [F; 4]) -> [F; 4] {
        let raw = |j: usize| dn[j - 1] / (lambda_nm[j - 1] * cw.transition(j));
        let a4 = raw(4);
        [raw(1) / a4, raw(2) / a4, raw(3) / a4, F::one()]
    }
}

/// The four complex Rabi amplitudes and the three free detunings.
///
/// Omega2 is never stored: the frequency-matching constraint fixes
/// Omega2 = Omega1 + Omega3 - Omega4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState<F> {
    g: [Cplx<F>; 4],
    omega1: F,
    omega3: F,
    omega4: F,
}

impl<F: Real> FieldState<F> {
    pub fn new(g: [Cplx<F>; 4], omega1: F, omega3: F, omega4: F) -> Self {
        Self { g, omega1, omega3, omega4 }
    }

    pub fn from_real(g: [F; 4], omega1: F, omega3: F, omega4: F) -> Self {
        Self::new(g.map(|x| Cplx::new(x, F::zero())), omega1, omega3, omega4)
    }

    pub fn g(&self, j: usize) -> Cplx<F> {
        self.g[j - 1]
    }

    pub fn set_g(&mut self, j: usize, v: Cplx<F>) {
        self.g[j - 1] = v;
    }

    pub fn omega1(&self) -> F {
        self.omega1
    }

    pub fn omega2(&self) -> F {
        self.omega1 + self.omega3 - self.omega4
    }

    pub fn omega3(&self) -> F {
        self.omega3
    }

    pub fn omega4(&self) -> F {
        self.omega4
    }

    /// Detunings [Omega1, Omega2, Omega3, Omega4] with Omega2 derived.
    pub fn omegas(&self) -> [F; 4] {
        [self.omega1, self.omega2(), self.omega3, self.omega4]
    }

    pub fn with_omega1(mut self, v: F) -> Self {
        self.omega1 = v;
        self
    }

    pub fn with_omega3(mut self, v: F) -> Self {
        self.omega3 = v;
        self
    }

    pub fn with_omega4(mut self, v: F) -> Self {
        self.omega4 = v;
        self
    }
}
