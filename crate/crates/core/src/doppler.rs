//! Velocity averaging over the Maxwell distribution with per-beam Doppler
//! shifts, plus the ac-Stark/Doppler compensation diagnostic and peak-width
//! extraction for scanned spectra.
//!
//! The Maxwell weight exp(-(v/u)^2) is the Gauss-Hermite kernel, so a GH
//! grid is exact for smooth integrands. The velocity kernels of the probe
//! and Stokes responses are however Lorentzians of width Gamma/k -- two to
//! three orders narrower than u -- which GH nodes cannot resolve at
//! practical orders; the default is therefore a dense uniform grid (the
//! trapezoid rule converges exponentially for these analytic kernels), and
//! Gauss-Hermite remains available for smooth power-broadened regimes.

use crate::densmat;
use crate::error::{Error, Result, Warning};
use crate::real::{Cplx, Real};
use crate::scheme::{FieldState, SchemeParams};
use crate::suscept::{self, SusceptibilitySet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Velocity-grid construction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    GaussHermite { n: usize },
    Uniform { n: usize, span: f64 },
}

/// Quadrature nodes (velocities, m/s) and normalized Maxwell weights.
#[derive(Debug, Clone)]
pub struct VelocityGrid<F> {
    pub nodes: Vec<F>,
    pub weights: Vec<F>,
    pub u: F,
    pub scheme: GridScheme,
}

impl<F: Real> VelocityGrid<F> {
    /// Single zero-velocity class: averaging degenerates to the
    /// homogeneous result.
    pub fn single_class(u: F) -> Self {
        Self {
            nodes: vec![F::zero()],
            weights: vec![F::one()],
            u,
            scheme: GridScheme::Uniform { n: 1, span: 0.0 },
        }
    }

    /// Gauss-Hermite nodes scaled by the thermal speed.
    pub fn gauss_hermite(u: F, n: usize) -> Self {
        let (x, w) = hermite_nodes::<F>(n);
        let total: F = w.iter().copied().sum();
        Self {
            nodes: x.iter().map(|&xi| xi * u).collect(),
            weights: w.iter().map(|&wi| wi / total).collect(),
            u,
            scheme: GridScheme::GaussHermite { n },
        }
    }

    /// Uniform grid on [-span u, span u] with normalized Maxwell weights.
    pub fn uniform(u: F, n: usize, span: F) -> Self {
        assert!(n >= 2, "uniform grid needs at least two nodes");
        let nodes: Vec<F> = (0..n)
            .map(|i| {
                let t = F::of(i as f64) / F::of((n - 1) as f64);
                (F::of(2.0) * t - F::one()) * span * u
            })
            .collect();
        let mut weights: Vec<F> =
            nodes.iter().map(|&v| (-(v / u) * (v / u)).exp()).collect();
        let total: F = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Self { nodes, weights, u, scheme: GridScheme::Uniform { n, span: span.to_f64().unwrap() } }
    }

    pub fn from_scheme(u: F, scheme: GridScheme) -> Self {
        match scheme {
            GridScheme::GaussHermite { n } => Self::gauss_hermite(u, n),
            GridScheme::Uniform { n: 1, .. } => Self::single_class(u),
            GridScheme::Uniform { n, span } => Self::uniform(u, n, F::of(span)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_spacing(&self) -> F {
        self.nodes
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(F::zero(), |a, b| a.max(b))
    }
}

/// Physicists' Hermite nodes and weights (weights normalized to sum
/// sqrt(pi)); Newton iteration on the orthonormal recurrence.
fn hermite_nodes<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1);
    // roots[i]: positive roots in descending order
    let mut roots = vec![0.0f64; (n + 1) / 2];
    let mut weights_half = vec![0.0f64; (n + 1) / 2];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..(n + 1) / 2 {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut pp = 1.0f64;
        for _ in 0..200 {
            // orthonormal recurrence: p0 = pi^-1/4
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2
                    - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        roots[i] = z;
        weights_half[i] = 2.0 / (pp * pp);
    }
    let mut x = vec![F::zero(); n];
    let mut w = vec![F::zero(); n];
    for i in 0..(n + 1) / 2 {
        let zi = if n % 2 == 1 && i == n / 2 { 0.0 } else { roots[i] };
        x[i] = F::of(-zi);
        x[n - 1 - i] = F::of(zi);
        w[i] = F::of(weights_half[i]);
        w[n - 1 - i] = F::of(weights_half[i]);
    }
    (x, w)
}

/// Precomputed averaging state: grid, signed wavevectors and the
/// zero-field resonant Voigt factors that re-anchor alpha_j0.
#[derive(Debug, Clone)]
pub struct DopplerContext<F> {
    pub params: SchemeParams<F>,
    pub grid: VelocityGrid<F>,
    kv: [F; 4],
    /// Grid average of Re(Gamma_j / P_j') at zero drive and resonance.
    pub voigt0: [F; 4],
    pub warnings: Vec<Warning>,
}

impl<F: Real> DopplerContext<F> {
    pub fn new(params: SchemeParams<F>, grid: VelocityGrid<F>) -> Result<Self> {
        params.validate()?;
        let kv = [
            params.k_signed(1),
            params.k_signed(2),
            params.k_signed(3),
            params.k_signed(4),
        ];
        let cw = &params.coherence_widths;
        let gammas = [cw.lg, cw.ng, cw.nm, cw.lm];
        let mut voigt0 = [F::zero(); 4];
        for j in 0..4 {
            let g = gammas[j];
            let mut acc = F::zero();
            for (&v, &w) in grid.nodes.iter().zip(&grid.weights) {
                let s = kv[j] * v;
                acc = acc + w * g * g / (g * g + s * s);
            }
            voigt0[j] = acc;
        }
        let mut warnings = Vec::new();
        let narrowest = cw.lg.min(cw.ng).min(cw.nm).min(cw.lm).min(cw.ln).min(cw.gm);
        let kmax = kv.iter().fold(F::zero(), |a, &b| a.max(b.abs()));
        let spacing = grid.max_spacing() * kmax;
        if grid.len() > 1 && spacing > narrowest {
            warnings.push(Warning::GridResolution {
                spacing_internal: spacing.to_f64().unwrap(),
                narrowest_width: narrowest.to_f64().unwrap(),
            });
        }
        Ok(Self { params, grid, kv, voigt0, warnings })
    }

    pub fn with_fields_checked(&self, fields: &FieldState<F>) -> Result<()> {
        if !fields.omegas().iter().all(|o| o.is_finite()) {
            return Err(Error::Config("non-finite detuning".into()));
        }
        Ok(())
    }

    /// Effective anchors alpha_j0 / voigt0_j, so that the averaged
    /// zero-drive resonant probe absorption equals alpha4_0 exactly.
    pub fn alpha_eff(&self) -> [F; 4] {
        let mut a = [F::zero(); 4];
        for j in 0..4 {
            a[j] = self.params.alpha0[j] / self.voigt0[j];
        }
        a
    }

    /// Velocity-averaged susceptibility set at the given fields.
    ///
    /// Node responses are evaluated in parallel and reduced in grid order,
    /// so results are bitwise reproducible.
    /// Shifted detunings for one node, from the cached wavevectors.
    fn shifted(&self, fields: &FieldState<F>, v: F) -> [F; 4] {
        let om = fields.omegas();
        [
            om[0] - self.kv[0] * v,
            om[1] - self.kv[1] * v,
            om[2] - self.kv[2] * v,
            om[3] - self.kv[3] * v,
        ]
    }

    pub fn average(&self, fields: &FieldState<F>) -> Result<SusceptibilitySet<F>> {
        self.with_fields_checked(fields)?;
        let alpha_eff = self.alpha_eff();
        let sets: Vec<SusceptibilitySet<F>> = self
            .grid
            .nodes
            .par_iter()
            .map(|&v| {
                let resp = densmat::response_at(&self.params, fields, self.shifted(fields, v))?;
                Ok(suscept::chi_from_response(&self.params, &resp, alpha_eff))
            })
            .collect::<Result<_>>()?;
        let mut acc = SusceptibilitySet::zero();
        for (set, &w) in sets.iter().zip(&self.grid.weights) {
            acc.accumulate(set, w);
        }
        Ok(acc)
    }
}

/// Normalized residual of the Doppler/ac-Stark compensation condition:
/// rho = [(|G1|/Omega1)^2 k1 - (k1 - k2)] / (k1 - k2); rho = 0 at exact
/// compensation.
pub fn compensation_residual<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
) -> Result<F> {
    let om1 = fields.omega1();
    if om1 == F::zero() {
        return Err(Error::UndefinedCompensation);
    }
    let k1 = params.k_signed(1);
    let k2 = params.k_signed(2);
    let dk = k1 - k2;
    if dk == F::zero() {
        return Err(Error::Config("compensation undefined for k1 = k2".into()));
    }
    let ratio = fields.g(1).norm_sqr().sqrt() / om1;
    Ok((ratio * ratio * k1 - dk) / dk)
}

/// Drive amplitude that zeroes the compensation residual at the given
/// detuning: |G1| = |Omega1| sqrt(1 - k2/k1).
pub fn compensation_drive<F: Real>(params: &SchemeParams<F>, omega1: F) -> F {
    let k1 = params.k_signed(1);
    let k2 = params.k_signed(2);
    omega1.abs() * ((F::one() - k2 / k1).max(F::zero())).sqrt()
}

/// Quantity tabulated per velocity class by [`velocity_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileQuantity {
    /// Population difference dr_i, i in 1..=4.
    DeltaR(usize),
    /// Per-class probe absorption contribution, 1/Z.
    Alpha4Contribution,
    /// Per-class Stokes gain contribution (-alpha2), 1/Z.
    StokesGainContribution,
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileRow<F> {
    pub v_over_u: F,
    pub weight: F,
    pub value: Cplx<F>,
}

/// Per-node values of the chosen quantity, with the Maxwell envelope
/// removed (multiply by `weight` to recover contributions).
pub fn velocity_profile<F: Real>(
    ctx: &DopplerContext<F>,
    fields: &FieldState<F>,
    quantity: ProfileQuantity,
) -> Result<Vec<ProfileRow<F>>> {
    let alpha_eff = ctx.alpha_eff();
    ctx.grid
        .nodes
        .par_iter()
        .zip(&ctx.grid.weights)
        .map(|(&v, &w)| {
            let resp = densmat::response_at(&ctx.params, fields, ctx.shifted(fields, v))?;
            let value = match quantity {
                ProfileQuantity::DeltaR(i) => {
                    if !(1..=4).contains(&i) {
                        return Err(Error::Misuse(format!("delta index {i} out of 1..=4")));
                    }
                    Cplx::new(resp.pops.deltas()[i - 1], F::zero())
                }
                ProfileQuantity::Alpha4Contribution => {
                    let set = suscept::chi_from_response(&ctx.params, &resp, alpha_eff);
                    Cplx::new(set.alpha(4), F::zero())
                }
                ProfileQuantity::StokesGainContribution => {
                    let set = suscept::chi_from_response(&ctx.params, &resp, alpha_eff);
                    Cplx::new(set.stokes_gain(), F::zero())
                }
            };
            Ok(ProfileRow { v_over_u: v / ctx.grid.u, weight: w, value })
        })
        .collect()
}

/// Operational FWHM of a local peak in sampled data: the peak is the
/// largest sample inside `window`, the baseline the mean of the side
/// minima, and the crossings are linearly interpolated outward from the
/// peak. Returns (fwhm, x_peak, y_peak).
pub fn fwhm_of_peak<F: Real>(x: &[F], y: &[F], window: (F, F)) -> Option<(F, F, F)> {
    let idx: Vec<usize> =
        (0..x.len()).filter(|&i| x[i] >= window.0 && x[i] <= window.1).collect();
    if idx.len() < 5 {
        return None;
    }
    let &peak = idx
        .iter()
        .max_by(|&&a, &&b| y[a].partial_cmp(&y[b]).unwrap())?;
    let left_min = idx
        .iter()
        .filter(|&&i| i <= peak)
        .map(|&i| y[i])
        .fold(F::infinity(), |a, b| a.min(b));
    let right_min = idx
        .iter()
        .filter(|&&i| i >= peak)
        .map(|&i| y[i])
        .fold(F::infinity(), |a, b| a.min(b));
    let baseline = (left_min + right_min) / F::of(2.0);
    let half = baseline + (y[peak] - baseline) / F::of(2.0);
    let first = *idx.first()?;
    let last = *idx.last()?;
    let cross_left = {
        let mut i = peak;
        loop {
            if i == first {
                break None;
            }
            if y[i - 1] < half && y[i] >= half {
                let t = (half - y[i - 1]) / (y[i] - y[i - 1]);
                break Some(x[i - 1] + t * (x[i] - x[i - 1]));
            }
            i -= 1;
        }
    }?;
    let cross_right = {
        let mut i = peak;
        loop {
            if i == last {
                break None;
            }
            if y[i + 1] < half && y[i] >= half {
                let t = (half - y[i + 1]) / (y[i] - y[i + 1]);
                break Some(x[i + 1] - t * (x[i + 1] - x[i]));
            }
            i += 1;
        }
    }?;
    Some((cross_right - cross_left, x[peak], y[peak]))
}
