//! Coupled-wave propagation of the four Rabi amplitudes along the medium.
//!
//! The working system, in the optical-depth coordinate Z = alpha4_0 z,
//!
//! ```text
//! dG1/dZ = i (sigma1 G1 + kappa1 G2 G4)
//! dG2/dZ = i (sigma2 G2 + gamma2 G4*)
//! dG3/dZ = i (sigma3 G3 + kappa3 G2 G4)
//! dG4/dZ = i (sigma4 G4 + gamma4 G2*)
//! ```
//!
//! is integrated with a classical fixed-step fourth-order scheme; all
//! coefficients are velocity-averaged susceptibilities recomputed at every
//! stage from the local field values, so depletion and dressing of the
//! drives feed back on the medium. Phase mismatch enters through the
//! dispersion parts of the computed sigma_j (plus an optional geometric
//! offset). A frozen-coefficient mode reduces the system to the standard
//! constant-coefficient parametric pair for comparison with the analytic
//! solution.

use crate::doppler::DopplerContext;
use crate::error::{Error, Result, Warning};
use crate::real::{Cplx, Real};
use crate::scheme::FieldState;
use crate::suscept::SusceptibilitySet;
use rayon::prelude::*;

/// Amplitudes, phases and photon-flux proxies sampled along Z.
#[derive(Debug, Clone)]
pub struct PropagationTrace<F> {
    pub z: Vec<F>,
    pub g: Vec<[Cplx<F>; 4]>,
    /// Relative phase Theta = phi4 - phi3 + phi2 - phi1, unwrapped.
    pub theta: Vec<F>,
    /// Psi = Theta + dk_offset * Z.
    pub psi: Vec<F>,
    /// Photon-number proxies N_j(Z) / N_4(0).
    pub flux: Vec<[F; 4]>,
}

impl<F: Real> PropagationTrace<F> {
    /// Probe transmission |G4(Z)/G4(0)|^2.
    pub fn transmission(&self, j: usize) -> Vec<F> {
        let g0 = self.g[0][j - 1].norm_sqr();
        self.g.iter().map(|g| g[j - 1].norm_sqr() / g0).collect()
    }

    pub fn last(&self) -> (F, [Cplx<F>; 4]) {
        (*self.z.last().unwrap(), *self.g.last().unwrap())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOpts<F> {
    pub zmax: F,
    pub step: F,
    /// Record every n-th step (the endpoint is always recorded).
    pub sample_stride: usize,
    /// Zero all sigma_j (absorption and refraction) but keep the FWM
    /// couplings; the photon-conservation diagnostic mode.
    pub zero_sigma: bool,
    /// Geometric wavevector mismatch added to Psi, 1/Z.
    pub dk_offset: F,
}

impl<F: Real> IntegrateOpts<F> {
    pub fn new(zmax: F, step: F) -> Self {
        Self { zmax, step, sample_stride: 10, zero_sigma: false, dk_offset: F::zero() }
    }

    pub fn with_zero_sigma(mut self, on: bool) -> Self {
        self.zero_sigma = on;
        self
    }
}

/// Propagation-relevant coefficient subset.
#[derive(Debug, Clone, Copy)]
pub struct CoeffSet<F> {
    pub sigma: [Cplx<F>; 4],
    pub gamma_2: Cplx<F>,
    pub gamma_4: Cplx<F>,
    pub kappa_1: Cplx<F>,
    pub kappa_3: Cplx<F>,
}

impl<F: Real> From<&SusceptibilitySet<F>> for CoeffSet<F> {
    fn from(s: &SusceptibilitySet<F>) -> Self {
        Self {
            sigma: s.sigma,
            gamma_2: s.gamma_2,
            gamma_4: s.gamma_4,
            kappa_1: s.kappa_1,
            kappa_3: s.kappa_3,
        }
    }
}

fn rhs_from_coeffs<F: Real>(c: &CoeffSet<F>, g: &[Cplx<F>; 4], zero_sigma: bool) -> [Cplx<F>; 4] {
    let i = Cplx::new(F::zero(), F::one());
    let z = Cplx::new(F::zero(), F::zero());
    let s = |j: usize| if zero_sigma { z } else { c.sigma[j] };
    [
        i * (s(0) * g[0] + c.kappa_1 * g[1] * g[3]),
        i * (s(1) * g[1] + c.gamma_2 * g[3].conj()),
        i * (s(2) * g[2] + c.kappa_3 * g[1] * g[3]),
        i * (s(3) * g[3] + c.gamma_4 * g[1].conj()),
    ]
}

/// Photon-flux proxy weights V_j0 dn_j / (alpha_j0 Gamma_j); exact up to a
/// global constant, so flux differences obey the same conservation rules
/// as true photon numbers. Beams with alpha_j0 = 0 are reported as zero.
fn flux_weights<F: Real>(ctx: &DopplerContext<F>) -> [F; 4] {
    let dn = crate::densmat::zero_field_populations(&ctx.params);
    let deltas = [dn[0] - dn[1], dn[2] - dn[1], dn[2] - dn[3], dn[0] - dn[3]];
    let cw = &ctx.params.coherence_widths;
    let mut w = [F::zero(); 4];
    for j in 0..4 {
        let a = ctx.params.alpha0[j];
        if a > F::zero() {
            w[j] = ctx.voigt0[j] * deltas[j] / (a * cw.transition(j + 1));
        }
    }
    w
}

enum Coeffs<'a, F: Real> {
    SelfConsistent(&'a DopplerContext<F>),
    Frozen {
        set: CoeffSet<F>,
        /// gamma / (G1(0) G3(0)); zero when the drive product vanishes.
        k2_reduced: Cplx<F>,
        k4_reduced: Cplx<F>,
    },
}

impl<F: Real> Coeffs<'_, F> {
    fn rhs(&self, template: &FieldState<F>, g: &[Cplx<F>; 4], zero_sigma: bool) -> Result<[Cplx<F>; 4]> {
        match self {
            Coeffs::SelfConsistent(ctx) => {
                let mut f = *template;
                for j in 1..=4 {
                    f.set_g(j, g[j - 1]);
                }
                let set = ctx.average(&f)?;
                Ok(rhs_from_coeffs(&CoeffSet::from(&set), g, zero_sigma))
            }
            Coeffs::Frozen { set, k2_reduced, k4_reduced } => {
                let i = Cplx::new(F::zero(), F::one());
                let z = Cplx::new(F::zero(), F::zero());
                let s = |j: usize| if zero_sigma { z } else { set.sigma[j] };
                let dk1 = Cplx::new(set.sigma[0].re, F::zero());
                let dk3 = Cplx::new(set.sigma[2].re, F::zero());
                // drives rotate with their dispersion only; the coupling
                // phase follows the instantaneous product G1 G3
                Ok([
                    if zero_sigma { z } else { i * dk1 * g[0] },
                    i * (s(1) * g[1] + *k2_reduced * g[0] * g[2] * g[3].conj()),
                    if zero_sigma { z } else { i * dk3 * g[2] },
                    i * (s(3) * g[3] + *k4_reduced * g[0] * g[2] * g[1].conj()),
                ])
            }
        }
    }
}

fn integrate_with<F: Real>(
    coeffs: &Coeffs<'_, F>,
    ctx_for_flux: Option<&DopplerContext<F>>,
    fields0: &FieldState<F>,
    opts: &IntegrateOpts<F>,
) -> Result<PropagationTrace<F>> {
    if opts.zmax < F::zero() || opts.step <= F::zero() {
        return Err(Error::Misuse("integrate requires zmax >= 0 and step > 0".into()));
    }
    let mut g = [fields0.g(1), fields0.g(2), fields0.g(3), fields0.g(4)];
    let fw = ctx_for_flux.map(flux_weights).unwrap_or([F::one(); 4]);
    let n4_0 = g[3].norm_sqr() * fw[3];
    let flux_of = |g: &[Cplx<F>; 4]| -> [F; 4] {
        let mut f = [F::zero(); 4];
        for j in 0..4 {
            f[j] = g[j].norm_sqr() * fw[j] / n4_0.max(F::of(1e-300));
        }
        f
    };
    let theta_of = |g: &[Cplx<F>; 4]| -> F {
        let arg = |z: Cplx<F>| z.im.atan2(z.re);
        arg(g[3]) - arg(g[2]) + arg(g[1]) - arg(g[0])
    };

    let scale0 = g.iter().map(|x| x.norm_sqr().sqrt()).fold(F::zero(), F::max);
    let floor = scale0 * F::of(1e-9) + F::of(1e-300);

    let mut trace = PropagationTrace {
        z: vec![F::zero()],
        g: vec![g],
        theta: vec![theta_of(&g)],
        psi: vec![theta_of(&g)],
        flux: vec![flux_of(&g)],
    };
    if opts.zmax == F::zero() {
        return Ok(trace);
    }

    let n_steps = (opts.zmax / opts.step).ceil().to_f64().unwrap() as usize;
    let stride = opts.sample_stride.max(1);
    let mut z = F::zero();
    let mut theta_prev = trace.theta[0];
    let two = F::of(2.0);
    let six = F::of(6.0);
    for step_idx in 0..n_steps {
        let h = opts.step.min(opts.zmax - z);
        let k1 = coeffs.rhs(fields0, &g, opts.zero_sigma)?;
        let g2v = add_scaled(&g, &k1, h / two);
        let k2 = coeffs.rhs(fields0, &g2v, opts.zero_sigma)?;
        let g3v = add_scaled(&g, &k2, h / two);
        let k3 = coeffs.rhs(fields0, &g3v, opts.zero_sigma)?;
        let g4v = add_scaled(&g, &k3, h);
        let k4 = coeffs.rhs(fields0, &g4v, opts.zero_sigma)?;
        let mut gnew = g;
        let mut incr_sq = F::zero();
        let mut state_sq = F::zero();
        for j in 0..4 {
            let incr = (k1[j] + (k2[j] + k3[j]) * Cplx::new(two, F::zero()) + k4[j])
                * Cplx::new(h / six, F::zero());
            gnew[j] = g[j] + incr;
            incr_sq = incr_sq + incr.norm_sqr();
            state_sq = state_sq + g[j].norm_sqr();
        }
        // relative change of the whole state; a weak beam seeded from
        // zero is growth, not stiffness
        let change = incr_sq.sqrt() / state_sq.sqrt().max(floor);
        z = z + h;
        if gnew.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Divergence { z: z.to_f64().unwrap() });
        }
        if change > F::of(0.1) {
            return Err(Error::Stability {
                z: z.to_f64().unwrap(),
                change: change.to_f64().unwrap(),
                suggested_step: (opts.step * F::of(0.05) / change).to_f64().unwrap(),
            });
        }
        g = gnew;
        if (step_idx + 1) % stride == 0 || step_idx + 1 == n_steps {
            let raw = theta_of(&g);
            // unwrap against the previous sample
            let mut d = raw - theta_prev;
            let pi = F::PI();
            while d > pi {
                d = d - two * pi;
            }
            while d < -pi {
                d = d + two * pi;
            }
            let theta = theta_prev + d;
            theta_prev = theta;
            trace.z.push(z);
            trace.g.push(g);
            trace.theta.push(theta);
            trace.psi.push(theta + opts.dk_offset * z);
            trace.flux.push(flux_of(&g));
        }
    }
    Ok(trace)
}

fn add_scaled<F: Real>(g: &[Cplx<F>; 4], k: &[Cplx<F>; 4], h: F) -> [Cplx<F>; 4] {
    let hc = Cplx::new(h, F::zero());
    [g[0] + k[0] * hc, g[1] + k[1] * hc, g[2] + k[2] * hc, g[3] + k[3] * hc]
}

/// Self-consistent propagation: coefficients recomputed from the local
/// fields (Doppler-averaged) at every integration stage.
pub fn integrate<F: Real>(
    ctx: &DopplerContext<F>,
    fields0: &FieldState<F>,
    opts: &IntegrateOpts<F>,
) -> Result<PropagationTrace<F>> {
    integrate_with(&Coeffs::SelfConsistent(ctx), Some(ctx), fields0, opts)
}

/// Constant-coefficient propagation with the drives held at their input
/// magnitude (dispersion phase rotation only); reproduces the analytic
/// parametric solution.
pub fn integrate_frozen<F: Real>(
    set: &CoeffSet<F>,
    ctx_for_flux: Option<&DopplerContext<F>>,
    fields0: &FieldState<F>,
    opts: &IntegrateOpts<F>,
) -> Result<PropagationTrace<F>> {
    let prod = fields0.g(1) * fields0.g(3);
    let zero = Cplx::new(F::zero(), F::zero());
    let (k2, k4) = if prod.norm_sqr() > F::zero() {
        (set.gamma_2 / prod, set.gamma_4 / prod)
    } else {
        (zero, zero)
    };
    let coeffs = Coeffs::Frozen { set: *set, k2_reduced: k2, k4_reduced: k4 };
    integrate_with(&coeffs, ctx_for_flux, fields0, opts)
}

/// Constant coefficients of the two-field parametric solution.
#[derive(Debug, Clone, Copy)]
pub struct OpaCoeffs<F> {
    pub alpha2: F,
    pub alpha4: F,
    /// Dispersion parts delta_k_1..4; the mismatch is
    /// dk1 + dk3 - dk2 - dk4.
    pub delta_k: [F; 4],
    pub gamma2: Cplx<F>,
    pub gamma4: Cplx<F>,
}

impl<F: Real> OpaCoeffs<F> {
    pub fn from_set(set: &SusceptibilitySet<F>) -> Self {
        Self {
            alpha2: set.alpha(2),
            alpha4: set.alpha(4),
            delta_k: [set.delta_k(1), set.delta_k(2), set.delta_k(3), set.delta_k(4)],
            gamma2: set.gamma_2,
            gamma4: set.gamma_4,
        }
    }

    pub fn mismatch(&self) -> F {
        self.delta_k[0] + self.delta_k[2] - self.delta_k[1] - self.delta_k[3]
    }

    fn beta(&self) -> Cplx<F> {
        (Cplx::new((self.alpha4 - self.alpha2) / F::of(2.0), self.mismatch()))
            / Cplx::new(F::of(2.0), F::zero())
    }
}

/// cosh(x) and sinh(x)/x as entire functions of x^2, stable through the
/// degenerate R -> 0 branch.
fn cosh_sinhc<F: Real>(x2: Cplx<F>) -> (Cplx<F>, Cplx<F>) {
    if x2.norm_sqr().sqrt() < F::of(1e-3) {
        let one = Cplx::new(F::one(), F::zero());
        let c2 = |d: f64| Cplx::new(F::of(d), F::zero());
        let ch = one + x2 * (c2(0.5) + x2 * (c2(1.0 / 24.0) + x2 * c2(1.0 / 720.0)));
        let shc =
            one + x2 * (c2(1.0 / 6.0) + x2 * (c2(1.0 / 120.0) + x2 * c2(1.0 / 5040.0)));
        (ch, shc)
    } else {
        let x = x2.sqrt();
        let e = x.exp();
        let einv = (-x).exp();
        let two = Cplx::new(F::of(2.0), F::zero());
        ((e + einv) / two, (e - einv) / (two * x))
    }
}

/// Analytic constant-coefficient parametric solution: returns
/// (E2*(z), E4(z)) for inputs E2*(0), E4(0), in the per-beam co-rotating
/// frames (multiply by exp(-i dk2 z) / exp(i dk4 z) to recover the
/// integrator's variables).
pub fn analytic_opa<F: Real>(
    c: &OpaCoeffs<F>,
    e20_conj: Cplx<F>,
    e40: Cplx<F>,
    z: F,
) -> (Cplx<F>, Cplx<F>) {
    let beta = c.beta();
    let gamma_sq = c.gamma2.conj() * c.gamma4;
    let r2 = beta * beta + gamma_sq;
    let zc = Cplx::new(z, F::zero());
    let (ch, shc_unit) = cosh_sinhc(r2 * zc * zc);
    let shc = shc_unit * zc; // sinh(R z) / R
    let i = Cplx::new(F::zero(), F::one());
    let half = F::of(0.5);
    let e2 = (Cplx::new(-c.alpha2 * half, F::zero()) * zc - beta * zc).exp()
        * (e20_conj * (ch + beta * shc) - i * c.gamma2.conj() * e40 * shc);
    let e4 = (Cplx::new(-c.alpha4 * half, F::zero()) * zc + beta * zc).exp()
        * (e40 * (ch - beta * shc) + i * c.gamma4 * e20_conj * shc);
    (e2, e4)
}

/// Small-coupling conversion efficiency eta4 = I4(L)/I2(0) for probe-free
/// input: (|gamma4|^2/(2 beta)^2) |exp(g2 L/2) - exp(-alpha4 L/2)|^2 with
/// beta = (alpha4 - alpha2)/4.
pub fn fwm_efficiency<F: Real>(c: &OpaCoeffs<F>, l: F) -> Result<(F, Option<Warning>)> {
    let beta = (c.alpha4 - c.alpha2) / F::of(4.0);
    if beta == F::zero() {
        return Err(Error::Misuse("fwm_efficiency undefined at alpha4 = alpha2".into()));
    }
    let gamma_sq = (c.gamma2.conj() * c.gamma4).norm_sqr().sqrt();
    let ratio = gamma_sq / (beta * beta);
    let warning = (ratio >= F::of(0.3)).then(|| Warning::FwmEfficiencyValidity {
        ratio: ratio.to_f64().unwrap(),
    });
    let g2 = -c.alpha2;
    let amp = (g2 * l / F::of(2.0)).exp() - (-c.alpha4 * l / F::of(2.0)).exp();
    let eta = c.gamma4.norm_sqr() / (F::of(4.0) * beta * beta) * amp * amp;
    Ok((eta, warning))
}

#[derive(Debug, Clone, Copy)]
pub struct MrRow<F> {
    pub z: F,
    /// Photon-number changes dN_j(Z) relative to N4(0).
    pub dn: [F; 4],
    /// Conservation defect |dN4 - dN2| + |dN4 + dN1| + |dN4 + dN3|.
    pub defect: F,
}

/// Photon-number changes and the Manley-Rowe defect along a trace
/// (meaningful for traces integrated with `zero_sigma`).
pub fn manley_rowe_report<F: Real>(trace: &PropagationTrace<F>) -> Vec<MrRow<F>> {
    let f0 = trace.flux[0];
    trace
        .z
        .iter()
        .zip(&trace.flux)
        .map(|(&z, f)| {
            let dn = [f[0] - f0[0], f[1] - f0[1], f[2] - f0[2], f[3] - f0[3]];
            let defect =
                (dn[3] - dn[1]).abs() + (dn[3] + dn[0]).abs() + (dn[3] + dn[2]).abs();
            MrRow { z, dn, defect }
        })
        .collect()
}

/// Swept input variable of a switching curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Omega4,
    G1,
}

/// Probe transmission at fixed depth versus a swept input parameter.
pub fn switching_curve<F: Real>(
    ctx: &DopplerContext<F>,
    fields0: &FieldState<F>,
    z_fixed: F,
    sweep: SweepVar,
    values: &[F],
    opts: &IntegrateOpts<F>,
) -> Result<Vec<(F, F)>> {
    if z_fixed <= F::zero() {
        return Err(Error::Misuse("switching_curve requires Z > 0".into()));
    }
    let mut o = *opts;
    o.zmax = z_fixed;
    o.sample_stride = usize::MAX / 2;
    values
        .par_iter()
        .map(|&val| {
            let f = match sweep {
                SweepVar::Omega4 => fields0.with_omega4(val),
                SweepVar::G1 => {
                    let mut f = *fields0;
                    f.set_g(1, Cplx::new(val, F::zero()));
                    f
                }
            };
            let trace = integrate(ctx, &f, &o)?;
            let (_, g_end) = trace.last();
            let t = g_end[3].norm_sqr() / f.g(4).norm_sqr();
            Ok((val, t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doppler::VelocityGrid;
    use crate::harness::presets;
    use crate::real::c;
    use crate::scheme::SchemeParams;
    use approx::assert_relative_eq;

    fn na2() -> SchemeParams<f64> {
        presets::na2_hinze().scheme
    }

    fn ctx(nodes: usize) -> DopplerContext<f64> {
        let p = na2();
        let u = p.thermal_speed().unwrap();
        DopplerContext::new(p, VelocityGrid::uniform(u, nodes, 4.5)).unwrap()
    }

    fn synthetic_coeffs() -> OpaCoeffs<f64> {
        OpaCoeffs {
            alpha2: -0.8, // Stokes gain
            alpha4: 1.0,
            delta_k: [0.05, -0.02, 0.03, 0.01],
            gamma2: c(0.11, -0.07),
            gamma4: c(0.09, 0.13),
        }
    }

    fn frozen_set(oc: &OpaCoeffs<f64>) -> CoeffSet<f64> {
        CoeffSet {
            sigma: [
                c(oc.delta_k[0], 0.0),
                c(oc.delta_k[1], oc.alpha2 / 2.0),
                c(oc.delta_k[2], 0.0),
                c(oc.delta_k[3], oc.alpha4 / 2.0),
            ],
            gamma_2: oc.gamma2,
            gamma_4: oc.gamma4,
            kappa_1: c(0.0, 0.0),
            kappa_3: c(0.0, 0.0),
        }
    }

    fn compare_frozen_to_analytic(oc: &OpaCoeffs<f64>, zmax: f64, step: f64) -> f64 {
        let set = frozen_set(oc);
        let fields0 = FieldState::new(
            [c(3.0, 1.0), c(0.4, -0.2), c(2.0, -0.5), c(1.0, 0.3)],
            0.0,
            0.0,
            0.0,
        );
        let opts = IntegrateOpts { sample_stride: 50, ..IntegrateOpts::new(zmax, step) };
        let trace = integrate_frozen(&set, None, &fields0, &opts).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &z) in trace.z.iter().enumerate() {
            let (e2c, e4) = analytic_opa(oc, fields0.g(2).conj(), fields0.g(4), z);
            // map analytic frame back to integrator variables:
            // G2* = E2* exp(-i dk2 Z), G4 = E4 exp(i dk4 Z)
            let g2 = (e2c * c(0.0, -oc.delta_k[1] * z).exp()).conj();
            let g4 = e4 * c(0.0, oc.delta_k[3] * z).exp();
            let scale = g4.norm().max(g2.norm()).max(1e-12);
            worst = worst
                .max((trace.g[i][1] - g2).norm() / scale)
                .max((trace.g[i][3] - g4).norm() / scale);
        }
        worst
    }

    #[test]
    fn zmax_zero_is_identity() {
        let oc = synthetic_coeffs();
        let set = frozen_set(&oc);
        let f0 = FieldState::from_real([3.0, 0.4, 2.0, 1.0], 0.0, 0.0, 0.0);
        let trace =
            integrate_frozen(&set, None, &f0, &IntegrateOpts::new(0.0, 0.01)).unwrap();
        assert_eq!(trace.z.len(), 1);
        assert_eq!(trace.g[0][3], c(1.0, 0.0));
        let (e2c, e4) = analytic_opa(&oc, c(0.4, 0.0), c(1.0, 0.0), 0.0);
        assert_eq!(e2c, c(0.4, 0.0));
        assert_eq!(e4, c(1.0, 0.0));
    }

    #[test]
    fn frozen_integration_matches_analytic_solution() {
        let worst = compare_frozen_to_analytic(&synthetic_coeffs(), 30.0, 0.005);
        assert!(worst < 1e-8, "worst relative deviation {worst:.3e}");
    }

    #[test]
    fn frozen_integration_matches_analytic_degenerate_branch() {
        // R = 0 exactly: gamma^2 = -beta^2
        let beta = 0.5; // alpha4 - alpha2 = 4 beta... choose mismatch 0
        let oc: OpaCoeffs<f64> = OpaCoeffs {
            alpha2: 0.0,
            alpha4: 4.0 * beta,
            delta_k: [0.0; 4],
            gamma2: c(0.5, 0.0),
            gamma4: c(-0.5, 0.0),
        };
        let r2 = {
            let b = (oc.alpha4 - oc.alpha2) / 4.0;
            c(b, 0.0) * c(b, 0.0) + oc.gamma2.conj() * oc.gamma4
        };
        assert!(r2.norm() < 1e-15, "degenerate case constructed, R^2 = {r2}");
        let worst = compare_frozen_to_analytic(&oc, 12.0, 0.005);
        assert!(worst < 1e-8, "worst relative deviation {worst:.3e}");
    }

    #[test]
    fn analytic_opa_gamma_zero_is_pure_beer_lambert() {
        let oc: OpaCoeffs<f64> = OpaCoeffs {
            alpha2: 0.6,
            alpha4: 1.4,
            delta_k: [0.0; 4],
            gamma2: c(0.0, 0.0),
            gamma4: c(0.0, 0.0),
        };
        let (e2c, e4) = analytic_opa(&oc, c(1.0, 0.0), c(1.0, 0.0), 2.5);
        assert_relative_eq!(e2c.re, (-0.6 * 2.5 / 2.0_f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(e4.re, (-1.4 * 2.5 / 2.0_f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn analytic_opa_asymptotic_gain_formula() {
        // Delta k = 0, E20 = 0, large g2 L: I4/I40 -> |gamma^2/(2beta)^2|^2 e^{g2 L}
        let oc: OpaCoeffs<f64> = OpaCoeffs {
            alpha2: -1.2,
            alpha4: 0.9,
            delta_k: [0.0; 4],
            gamma2: c(2e-3, 1e-3),
            gamma4: c(3e-3, -1e-3),
        };
        let l = 40.0;
        let (_, e4) = analytic_opa(&oc, c(0.0, 0.0), c(1.0, 0.0), l);
        let i4 = e4.norm_sqr();
        let beta = (oc.alpha4 - oc.alpha2) / 4.0;
        let gsq = (oc.gamma2.conj() * oc.gamma4).norm();
        let predict = (gsq / (4.0 * beta * beta)).powi(2) * (1.2 * l).exp();
        assert!((i4 - predict).abs() / predict < 0.01, "I4 {i4:.6e} vs {predict:.6e}");
    }

    #[test]
    fn fwm_efficiency_consistent_with_analytic() {
        let oc: OpaCoeffs<f64> = OpaCoeffs {
            alpha2: -0.9,
            alpha4: 1.1,
            delta_k: [0.0; 4],
            gamma2: c(1e-4, 2e-4),
            gamma4: c(2e-4, -1e-4),
        };
        let (eta0, warn) = fwm_efficiency(&oc, 0.0).unwrap();
        assert_eq!(eta0, 0.0);
        assert!(warn.is_none());
        for l in [1.0, 5.0, 12.0] {
            let (eta, _) = fwm_efficiency(&oc, l).unwrap();
            let (_, e4) = analytic_opa(&oc, c(1.0, 0.0), c(0.0, 0.0), l);
            assert_relative_eq!(eta, e4.norm_sqr(), max_relative = 1e-6);
        }
        // warning domain
        let strong = OpaCoeffs { gamma2: c(0.4, 0.0), gamma4: c(0.4, 0.0), ..oc };
        let (_, warn) = fwm_efficiency(&strong, 1.0).unwrap();
        assert!(matches!(warn, Some(Warning::FwmEfficiencyValidity { .. })));
    }

    #[test]
    fn step_halving_converges() {
        let coarse = compare_frozen_to_analytic(&synthetic_coeffs(), 10.0, 0.01);
        let fine = compare_frozen_to_analytic(&synthetic_coeffs(), 10.0, 0.005);
        assert!(fine < coarse, "halving must reduce error: {fine} !< {coarse}");
        assert!(fine / coarse < 0.12, "fourth-order scaling expected");
    }

    #[test]
    fn self_consistent_step_halving_under_1e6() {
        let ctx = ctx(601);
        let f0 = FieldState::from_real([60.0, 0.0, 20.0, 1.0], 0.0, 0.0, 35.0);
        let run = |step: f64| {
            let opts = IntegrateOpts { sample_stride: 1_000_000, ..IntegrateOpts::new(2.0, step) };
            integrate(&ctx, &f0, &opts).unwrap().last().1
        };
        let a = run(0.01);
        let b = run(0.005);
        for j in 0..4 {
            let rel = (a[j] - b[j]).norm() / b[j].norm().max(1e-12);
            assert!(rel < 1e-6, "beam {} step-halving drift {rel:.3e}", j + 1);
        }
    }

    #[test]
    fn gauge_invariance_under_common_phase() {
        let p = na2();
        let u = p.thermal_speed().unwrap();
        let ctx = DopplerContext::new(p, VelocityGrid::single_class(u)).unwrap();
        let base = FieldState::new(
            [c(55.0, 24.0), c(0.0, 0.0), c(16.0, -12.0), c(0.8, 0.6)],
            0.0,
            0.0,
            35.0,
        );
        let phase = c(0.0, 0.83).exp();
        let mut shifted = base;
        for j in 1..=4 {
            shifted.set_g(j, base.g(j) * phase);
        }
        let opts = IntegrateOpts { sample_stride: 40, ..IntegrateOpts::new(4.0, 0.01) };
        let ta = integrate(&ctx, &base, &opts).unwrap();
        let tb = integrate(&ctx, &shifted, &opts).unwrap();
        for i in 0..ta.z.len() {
            for j in 0..4 {
                assert_relative_eq!(
                    ta.g[i][j].norm(),
                    tb.g[i][j].norm(),
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
        // individual phase combinations shift theta consistently: the
        // common phase cancels in phi4 - phi3 + phi2 - phi1
        for i in 1..ta.z.len() {
            assert_relative_eq!(ta.theta[i], tb.theta[i], max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn divergence_and_stability_guards() {
        let set: CoeffSet<f64> = CoeffSet {
            sigma: [c(0.0, -40.0); 4], // huge gain everywhere
            gamma_2: c(0.0, 0.0),
            gamma_4: c(0.0, 0.0),
            kappa_1: c(0.0, 0.0),
            kappa_3: c(0.0, 0.0),
        };
        let f0 = FieldState::from_real([1.0, 1.0, 1.0, 1.0], 0.0, 0.0, 0.0);
        let err =
            integrate_frozen(&set, None, &f0, &IntegrateOpts::new(5.0, 0.1)).unwrap_err();
        assert!(matches!(err, Error::Stability { .. }), "{err}");
    }

    #[test]
    fn manley_rowe_defect_zero_without_coupling() {
        let set: CoeffSet<f64> = CoeffSet {
            sigma: [c(0.01, 0.3); 4],
            gamma_2: c(0.0, 0.0),
            gamma_4: c(0.0, 0.0),
            kappa_1: c(0.0, 0.0),
            kappa_3: c(0.0, 0.0),
        };
        let f0 = FieldState::from_real([3.0, 0.5, 2.0, 1.0], 0.0, 0.0, 0.0);
        let opts = IntegrateOpts::new(5.0, 0.01).with_zero_sigma(true);
        let trace = integrate_frozen(&set, None, &f0, &opts).unwrap();
        for row in manley_rowe_report(&trace) {
            assert!(row.defect.abs() < 1e-14);
            assert!(row.dn.iter().all(|&d| d.abs() < 1e-14));
        }
    }
}

#[cfg(test)]
mod diag {
    use super::*;
    use crate::doppler::VelocityGrid;
    use crate::harness::presets;

    #[test]
    #[ignore]
    fn dump_entrance_coefficients() {
        let cfg = presets::preset("fig8").unwrap();
        let u = cfg.scheme.thermal_speed().unwrap();
        let ctx =
            DopplerContext::new(cfg.scheme.clone(), VelocityGrid::uniform(u, 2001, 4.5))
                .unwrap();
        println!("alpha0      = {:?}", cfg.scheme.alpha0);
        println!("voigt0      = {:?}", ctx.voigt0);
        println!("alpha_eff   = {:?}", ctx.alpha_eff());
        let set = ctx.average(&cfg.fields).unwrap();
        for j in 1..=4 {
            println!(
                "sigma{j} = {:+.6e} {:+.6e}i   alpha{j} = {:+.6e}",
                set.sigma[j - 1].re,
                set.sigma[j - 1].im,
                set.alpha(j)
            );
        }
        println!("gamma_2 = {:+.6e} {:+.6e}i  |g2|={:.4e}", set.gamma_2.re, set.gamma_2.im, set.gamma_2.norm());
        println!("gamma_4 = {:+.6e} {:+.6e}i  |g4|={:.4e}", set.gamma_4.re, set.gamma_4.im, set.gamma_4.norm());
        println!("kappa_1 = {:+.6e} {:+.6e}i", set.kappa_1.re, set.kappa_1.im);
        println!("kappa_3 = {:+.6e} {:+.6e}i", set.kappa_3.re, set.kappa_3.im);
        let gsq = (set.gamma_2.conj() * set.gamma_4).norm();
        let beta = (set.alpha(4) - set.alpha(2)) / 4.0;
        println!("|gamma^2| = {gsq:.4e}, beta = {beta:.4e}, |gamma^2|/(2beta)^2 = {:.4e}", gsq / (4.0 * beta * beta));
        // trace a short run and print flux evolution
        let opts = IntegrateOpts { sample_stride: 100, ..IntegrateOpts::new(8.0, 0.01) };
        let trace = integrate(&ctx, &cfg.fields, &opts).unwrap();
        for (i, &z) in trace.z.iter().enumerate() {
            println!(
                "Z={z:5.2}  |G1|={:8.3} |G2|={:9.5} |G3|={:8.3} |G4|={:9.5}  T4={:9.5}  N2={:9.5}",
                trace.g[i][0].norm(),
                trace.g[i][1].norm(),
                trace.g[i][2].norm(),
                trace.g[i][3].norm(),
                trace.g[i][3].norm_sqr() / 1.0,
                trace.flux[i][1]
            );
        }
    }
}

#[cfg(test)]
mod calib {
    use super::*;
    use crate::doppler::VelocityGrid;
    use crate::harness::presets;

    #[test]
    #[ignore]
    fn alpha0_study() {
        for (a1, a2) in [
            (0.20, 0.060),
            (0.25, 0.070),
            (0.30, 0.080),
            (0.35, 0.090),
            (0.30, 0.060),
            (0.40, 0.100),
        ] {
            let mut cfg = presets::preset("fig8").unwrap();
            cfg.scheme.alpha0 = [a1, a2, 0.0123, 1.0];
            let u = cfg.scheme.thermal_speed().unwrap();
            let ctx = DopplerContext::new(
                cfg.scheme.clone(),
                VelocityGrid::uniform(u, 1201, 4.5),
            )
            .unwrap();
            let opts = IntegrateOpts { sample_stride: 25, ..IntegrateOpts::new(30.0, 0.01) };
            let trace = integrate(&ctx, &cfg.fields, &opts).unwrap();
            let t4 = trace.transmission(4);
            // first crossing back above 1 after the initial dip
            let mut crossing = None;
            let mut dipped = false;
            for (i, &t) in t4.iter().enumerate() {
                if t < 0.8 {
                    dipped = true;
                }
                if dipped && t >= 1.0 {
                    crossing = Some(trace.z[i]);
                    break;
                }
            }
            let tmax = t4.iter().cloned().fold(f64::MIN, f64::max);
            let n2max = trace.flux.iter().map(|f| f[1]).fold(f64::MIN, f64::max);
            let n2_end = trace.flux.last().unwrap()[1];
            let t4_end = *t4.last().unwrap();
            let g1_end = trace.g.last().unwrap()[0].norm();
            println!(
                "a1={a1:5.3} a2={a2:5.3}: cross={crossing:?} maxT4={tmax:10.3} T4(30)={t4_end:10.3} maxN2={n2max:10.1} N2(30)={n2_end:10.1} G1(30)={g1_end:6.2}"
            );
        }
    }
}

#[cfg(test)]
mod calib2 {
    use super::*;
    use crate::doppler::VelocityGrid;
    use crate::harness::presets;

    fn ctx_for(cfg: &crate::harness::Config, nodes: usize) -> DopplerContext<f64> {
        let u = cfg.scheme.thermal_speed().unwrap();
        DopplerContext::new(cfg.scheme.clone(), VelocityGrid::uniform(u, nodes, 4.5)).unwrap()
    }

    #[test]
    #[ignore]
    fn companion_checks() {
        let a0 = [0.35, 0.09, 0.0123, 1.0];

        // resonant variant: no gain up to Z = 30
        let mut cfg = presets::preset("fig9a_resonant").unwrap();
        cfg.scheme.alpha0 = a0;
        let ctx = ctx_for(&cfg, 1201);
        let opts = IntegrateOpts { sample_stride: 25, ..IntegrateOpts::new(30.0, 0.01) };
        let trace = integrate(&ctx, &cfg.fields, &opts).unwrap();
        let t4 = trace.transmission(4);
        let tmax_after = t4.iter().skip(1).cloned().fold(f64::MIN, f64::max);
        println!("resonant: max T4 after Z=0 is {tmax_after:.6}");

        // switching depth at Z = 2
        let mut cfg = presets::preset("fig9b").unwrap();
        cfg.scheme.alpha0 = a0;
        let ctx = ctx_for(&cfg, 1201);
        let vals: Vec<f64> = (0..61).map(|i| -600.0 + 20.0 * i as f64).collect();
        let curve = switching_curve(
            &ctx,
            &cfg.fields,
            2.0,
            SweepVar::Omega4,
            &vals,
            &IntegrateOpts::new(2.0, 0.01),
        )
        .unwrap();
        let (om_min, tmin) =
            curve.iter().cloned().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        let (om_max, tmax) =
            curve.iter().cloned().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        println!("switching: min T={tmin:.3e} at Omega4={om_min}, max T={tmax:.3} at {om_max}");

        // fig11 comparison with the same anchors
        for (name, oms) in [
            ("fig11ab", vec![0.0, 100.0, 300.0]),
            ("fig11cd", vec![2500.0, 2650.0, 2800.0]),
        ] {
            let mut cfg = presets::preset(name).unwrap();
            cfg.scheme.alpha0 = a0;
            let ctx = ctx_for(&cfg, 801);
            for om in oms {
                let opts =
                    IntegrateOpts { sample_stride: 50, ..IntegrateOpts::new(25.0, 0.02) };
                let trace = integrate(&ctx, &cfg.fields.with_omega4(om), &opts).unwrap();
                let tmax = trace.transmission(4).into_iter().fold(f64::MIN, f64::max);
                println!("{name} Omega4={om:7.1}: max T4 = {tmax:.4}");
            }
        }
    }
}
