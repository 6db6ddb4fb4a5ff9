//! Normalized susceptibilities, absorption/dispersion coefficients and
//! four-wave-mixing cross couplings built from the density-matrix response.
//!
//! Conventions. `chi_norm[j]` is chi_j / chi_j^0 where chi_j^0 is the
//! zero-field resonant value, so absorption is its real part:
//! alpha_j = alpha_j0_eff * Re(chi_norm[j]), and sigma_j = delta_k_j +
//! i alpha_j/2 = (i alpha_j0_eff / 2) chi_norm[j], all per unit Z.
//! Gain means alpha < 0. `alpha_j0_eff` re-anchors the user coefficient to
//! the velocity grid in use so that the zero-drive resonant absorption of
//! the probe equals alpha4_0 exactly after averaging.
//!
//! The propagation couplings are reported the same way:
//! dG4/dZ = i sigma4 G4 + i gamma_4 G2*, dG2/dZ = i sigma2 G2 + i gamma_2 G4*,
//! dG1/dZ = i sigma1 G1 + i kappa_1 G2 G4, dG3/dZ = i sigma3 G3 + i kappa_3 G2 G4,
//! with gamma_j = (i alpha_j0_eff/2) chi_fwm_j (the G1 G3 product folded in)
//! and kappa_j likewise per unit Rabi^2.

use crate::densmat::{self, DmResponse};
use crate::error::{Error, Result, Warning};
use crate::real::{imag, Cplx, Real};
use crate::scheme::{FieldState, SchemeParams};

/// Normalized local (or velocity-averaged) optical response.
#[derive(Debug, Clone, Copy)]
pub struct SusceptibilitySet<F> {
    /// chi_j / chi_j^0 for the four transitions.
    pub chi_norm: [Cplx<F>; 4],
    /// Normalized FWM cross couplings driving the Stokes and probe waves.
    pub chi_fwm_2: Cplx<F>,
    pub chi_fwm_4: Cplx<F>,
    /// Drive-beam couplings (per unit G2 G4).
    pub chi_fwm_1: Cplx<F>,
    pub chi_fwm_3: Cplx<F>,
    /// sigma_j = delta_k_j + i alpha_j / 2, units 1/Z.
    pub sigma: [Cplx<F>; 4],
    /// FWM drive terms, units 1/Z (G1 G3 included).
    pub gamma_2: Cplx<F>,
    pub gamma_4: Cplx<F>,
    /// Drive-beam FWM couplings, units 1/(Z Rabi^2).
    pub kappa_1: Cplx<F>,
    pub kappa_3: Cplx<F>,
}

impl<F: Real> SusceptibilitySet<F> {
    pub fn zero() -> Self {
        let z = Cplx::new(F::zero(), F::zero());
        Self {
            chi_norm: [z; 4],
            chi_fwm_2: z,
            chi_fwm_4: z,
            chi_fwm_1: z,
            chi_fwm_3: z,
            sigma: [z; 4],
            gamma_2: z,
            gamma_4: z,
            kappa_1: z,
            kappa_3: z,
        }
    }

    /// Intensity absorption coefficient of transition j, 1/Z.
    pub fn alpha(&self, j: usize) -> F {
        F::of(2.0) * self.sigma[j - 1].im
    }

    /// Dispersion part of the wavenumber of transition j, 1/Z.
    pub fn delta_k(&self, j: usize) -> F {
        self.sigma[j - 1].re
    }

    /// Stokes gain g2 = -alpha2.
    pub fn stokes_gain(&self) -> F {
        -self.alpha(2)
    }

    pub(crate) fn accumulate(&mut self, other: &Self, w: F) {
        let wc = Cplx::new(w, F::zero());
        for j in 0..4 {
            self.chi_norm[j] = self.chi_norm[j] + other.chi_norm[j] * wc;
            self.sigma[j] = self.sigma[j] + other.sigma[j] * wc;
        }
        self.chi_fwm_1 = self.chi_fwm_1 + other.chi_fwm_1 * wc;
        self.chi_fwm_2 = self.chi_fwm_2 + other.chi_fwm_2 * wc;
        self.chi_fwm_3 = self.chi_fwm_3 + other.chi_fwm_3 * wc;
        self.chi_fwm_4 = self.chi_fwm_4 + other.chi_fwm_4 * wc;
        self.gamma_2 = self.gamma_2 + other.gamma_2 * wc;
        self.gamma_4 = self.gamma_4 + other.gamma_4 * wc;
        self.kappa_1 = self.kappa_1 + other.kappa_1 * wc;
        self.kappa_3 = self.kappa_3 + other.kappa_3 * wc;
    }
}

fn norm_or_one<F: Real>(dn: F) -> F {
    if dn == F::zero() {
        F::one()
    } else {
        dn
    }
}

/// Build the normalized set from a density-matrix response, anchored by
/// effective absorption coefficients `alpha_eff[j]` (grid-re-anchored
/// alpha_j0; pass the raw alpha0 for a single velocity class).
pub fn chi_from_response<F: Real>(
    params: &SchemeParams<F>,
    resp: &DmResponse<F>,
    alpha_eff: [F; 4],
) -> SusceptibilitySet<F> {
    let cw = &params.coherence_widths;
    let dr = resp.pops.deltas();
    let dn = resp.pops.zero_field_deltas().map(norm_or_one);
    let w = &resp.weak;
    let den = &resp.den;
    let g1 = cw.transition(1);
    let g2 = cw.transition(2);
    let g3 = cw.transition(3);
    let g4 = cw.transition(4);
    let re = |x: F| Cplx::new(x, F::zero());
    let mi = imag(-F::one()); // -i

    let chi1 = re(g1 * dr[0] / dn[0]) / den.p1;
    let chi3 = re(g3 * dr[2] / dn[2]) / den.p3;
    let chi4 = mi * w.r4_per_g4 * re(g4 / dn[3]);
    let chi2 = mi * w.r2c_per_g2c.conj() * re(g2 / dn[1]);
    let chi_fwm_4 = mi * w.rt4_per_g2c * re(g4 / dn[3]);
    let chi_fwm_2 = mi * w.rt2c_per_g4.conj() * re(g2 / dn[1]);
    let chi_fwm_1 = (w.r43_per_g4 - w.r32_per_g2c.conj()) * re(g1 / dn[0]) / den.p1;
    let chi_fwm_3 = (w.r12_per_g2c.conj() - w.r41_per_g4) * re(g3 / dn[2]) / den.p3;

    let chi_norm = [chi1, chi2, chi3, chi4];
    let half_i = |j: usize| imag(alpha_eff[j - 1] / F::of(2.0));
    SusceptibilitySet {
        chi_norm,
        chi_fwm_2,
        chi_fwm_4,
        chi_fwm_1,
        chi_fwm_3,
        sigma: [
            half_i(1) * chi1,
            half_i(2) * chi2,
            half_i(3) * chi3,
            half_i(4) * chi4,
        ],
        gamma_2: half_i(2) * chi_fwm_2,
        gamma_4: half_i(4) * chi_fwm_4,
        kappa_1: half_i(1) * chi_fwm_1,
        kappa_3: half_i(3) * chi_fwm_3,
    }
}

/// Full susceptibility set of a single velocity class.
pub fn chi_all<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<SusceptibilitySet<F>> {
    let resp = densmat::response(params, fields, v)?;
    Ok(chi_from_response(params, &resp, params.alpha0))
}

/// Both printed algebraic routes of the V-scheme probe susceptibility
/// (saturation-factor form and rational form); they agree identically.
pub fn chi_v_scheme_forms<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<(Cplx<F>, Cplx<F>)> {
    if fields.g(3).norm_sqr() != F::zero() {
        return Err(Error::Misuse("V-scheme susceptibility requires G3 = 0".into()));
    }
    let resp = densmat::response(params, fields, v)?;
    let d = &resp.den;
    let s = &resp.sat;
    let dr = resp.pops.deltas();
    let dn = norm_or_one(resp.pops.zero_field_deltas()[3]);
    let g4 = params.coherence_widths.lm;
    let re = |x: F| Cplx::new(x, F::zero());
    let one = re(F::one());
    let a = re(g4) / d.p4 * (re(dr[3]) - s.g_(1) * re(dr[0]))
        / (re(dn) * (one + s.g_(4)));
    let a1sq = fields.g(1).norm_sqr();
    let b = re(g4 / dn) * (re(dr[3]) * d.p41 - re(dr[0] * a1sq) / d.p1.conj())
        / (d.p41 * d.p4 + re(a1sq));
    Ok((a, b))
}

/// V-scheme (G3 = 0) normalized probe susceptibility chi4/chi4^0.
pub fn chi_v_scheme<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<Cplx<F>> {
    chi_v_scheme_forms(params, fields, v).map(|(a, _)| a)
}

/// Both printed routes of the Lambda-scheme Stokes susceptibility.
pub fn chi_lambda_scheme_forms<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<(Cplx<F>, Cplx<F>)> {
    if fields.g(3).norm_sqr() != F::zero() {
        return Err(Error::Misuse("Lambda-scheme susceptibility requires G3 = 0".into()));
    }
    let resp = densmat::response(params, fields, v)?;
    let d = &resp.den;
    let s = &resp.sat;
    let dr = resp.pops.deltas();
    let dn = norm_or_one(resp.pops.zero_field_deltas()[1]);
    let g2 = params.coherence_widths.ng;
    let re = |x: F| Cplx::new(x, F::zero());
    let one = re(F::one());
    let a = re(g2) / d.p2 * (re(dr[1]) - s.g_(3) * re(dr[0]))
        / (re(dn) * (one + s.g_(2)));
    let a1sq = fields.g(1).norm_sqr();
    let b = re(g2 / dn)
        * (re(dr[1]) * d.p12.conj() - re(dr[0] * a1sq) / d.p1.conj())
        / (d.p12.conj() * d.p2 + re(a1sq));
    Ok((a, b))
}

/// Lambda-scheme (G3 = 0) normalized Stokes susceptibility chi2/chi2^0.
/// Negative real part means Stokes gain.
pub fn chi_lambda_scheme<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<Cplx<F>> {
    chi_lambda_scheme_forms(params, fields, v).map(|(a, _)| a)
}

/// Far-detuned two-term Raman approximation of the normalized probe
/// absorption alpha(Omega4)/alpha^0(0); valid for
/// |Omega1| ~ |Omega4| >> widths and |g1|, |g4| << 1.
pub fn raman_limit<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<F> {
    let resp = densmat::response(params, fields, v)?;
    let cw = &params.coherence_widths;
    let om = resp.om;
    let ten = F::of(10.0);
    if om[3].abs() < ten * cw.lm || om[0].abs() < ten * cw.lg {
        return Err(Error::Misuse(
            "Raman limit requires detunings far above the transition widths".into(),
        ));
    }
    let g1n = resp.sat.g_(1).norm_sqr().sqrt();
    let g4n = resp.sat.g_(4).norm_sqr().sqrt();
    if g1n > F::of(0.1) || g4n > F::of(0.1) {
        return Err(Error::Misuse(
            "Raman limit requires |g1|, |g4| << 1".into(),
        ));
    }
    let r = resp.pops.r;
    let n = resp.pops.n;
    let dn4 = norm_or_one(n[0] - n[3]);
    let a1sq = fields.g(1).norm_sqr();
    let raman_den = cw.gm * cw.gm + (om[3] - om[0]) * (om[3] - om[0]);
    let term1 = cw.lm * cw.lm * (r[0] - r[3]) / (dn4 * om[3] * om[3]);
    let term2 = cw.gm * cw.lm / raman_den * a1sq * (r[3] - r[1]) / (om[3] * om[3] * dn4);
    Ok(term1 - term2)
}

/// Closed-form value of the frequency-integrated normalized probe
/// susceptibility: pi Gamma4 dr4 / dn4.
pub fn integrated_absorption_expected<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<F> {
    let resp = densmat::response(params, fields, v)?;
    let dr4 = resp.pops.deltas()[3];
    let dn4 = norm_or_one(resp.pops.zero_field_deltas()[3]);
    Ok(F::PI() * params.coherence_widths.lm * dr4 / dn4)
}

/// Numerical quadrature of Re(chi4/chi4^0) over the probe detuning for a
/// single velocity class, with an asymptotic tail correction.
///
/// Returns the integral and any span warning. The spectrum has structures
/// near 0, Omega1, Omega3 and Omega1+Omega3; panel edges are seeded there
/// and each panel is integrated by adaptive Simpson.
pub fn integrated_absorption<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
    span: Option<F>,
) -> Result<(F, Vec<Warning>)> {
    let cw = &params.coherence_widths;
    let gmax = cw
        .lg
        .max(cw.ng)
        .max(cw.nm)
        .max(cw.lm)
        .max(cw.ln)
        .max(cw.gm)
        .max(fields.g(1).norm_sqr().sqrt())
        .max(fields.g(3).norm_sqr().sqrt());
    let om = fields.omegas();
    let reach = om[0].abs() + om[2].abs();
    let min_span = F::of(200.0) * gmax + F::of(4.0) * reach;
    let s = span.unwrap_or_else(|| F::of(1.0e3) * cw.lm.max(gmax) + F::of(4.0) * reach);
    let mut warnings = Vec::new();
    if s < min_span {
        warnings.push(Warning::IntegrationSpan {
            estimated_truncation: (F::of(2.0) * cw.lm / (F::PI() * s)).to_f64().unwrap(),
        });
    }

    let integrand = |om4: F| -> F {
        let f = fields.with_omega4(om4);
        let resp = densmat::response(params, &f, v).expect("bounded denominators");
        let dn4 = norm_or_one(resp.pops.zero_field_deltas()[3]);
        let chi4 = imag(-F::one()) * resp.weak.r4_per_g4 * Cplx::new(cw.lm / dn4, F::zero());
        chi4.re
    };

    // panel edges seeded at the known structure locations
    let mut edges: Vec<F> = vec![-s, s];
    for center in [F::zero(), om[0], om[2], om[0] + om[2]] {
        for k in [-30.0, -6.0, -1.0, 0.0, 1.0, 6.0, 30.0] {
            let e = center + F::of(k) * gmax;
            if e > -s && e < s {
                edges.push(e);
            }
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < F::of(1e-9));

    let tol = F::of(1e-7) * F::PI() * cw.lm;
    let mut total = F::zero();
    for pair in edges.windows(2) {
        total = total + adaptive_simpson(&integrand, pair[0], pair[1], tol, 48);
    }
    // asymptotic tail: Re chi4 -> Gamma4^2 dr4 / (Omega4^2 dn4)
    let resp = densmat::response(params, fields, v)?;
    let dr4 = resp.pops.deltas()[3];
    let dn4 = norm_or_one(resp.pops.zero_field_deltas()[3]);
    total = total + F::of(2.0) * cw.lm * cw.lm * dr4 / (dn4 * s);
    Ok((total, warnings))
}

fn adaptive_simpson<F: Real>(
    f: &impl Fn(F) -> F,
    a: F,
    b: F,
    tol: F,
    depth: usize,
) -> F {
    let two = F::of(2.0);
    let six = F::of(6.0);
    let m = (a + b) / two;
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / six * (fa + F::of(4.0) * fm + fb);
    simpson_step(f, a, m, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Real>(
    f: &impl Fn(F) -> F,
    a: F,
    m: F,
    b: F,
    fa: F,
    fm: F,
    fb: F,
    whole: F,
    tol: F,
    depth: usize,
) -> F {
    let two = F::of(2.0);
    let six = F::of(6.0);
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / six * (fa + F::of(4.0) * flm + fm);
    let right = (b - m) / six * (fm + F::of(4.0) * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() < F::of(15.0) * tol {
        left + right + delta / F::of(15.0)
    } else {
        let half = tol / two;
        simpson_step(f, a, lm, m, fa, flm, fm, left, half, depth - 1)
            + simpson_step(f, m, rm, b, fm, frm, fb, right, half, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::presets;
    use crate::scheme::{
        CoherenceWidths, LevelWidths, PartialDecays, Pump, SchemeParams, Topology,
    };
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn na2() -> SchemeParams<f64> {
        presets::na2_hinze().scheme
    }

    /// Open scheme crafted so the AWI threshold is reachable: small
    /// zero-field difference on the probe transition, large on the drive.
    fn awi_params() -> SchemeParams<f64> {
        SchemeParams {
            topology: Topology::Open,
            lambda_nm: [655.0, 756.0, 532.0, 480.0],
            decays: PartialDecays { gl: 0.0, gn: 0.0, mn: 0.0, ml: 0.0 },
            level_widths: LevelWidths { l: 20.0, g: 20.0, n: 20.0, m: 20.0 },
            coherence_widths: CoherenceWidths {
                lg: 20.0,
                ng: 20.0,
                nm: 20.0,
                lm: 20.0,
                ln: 20.0,
                gm: 5.0,
            },
            pump: Pump::Open { q_l: 10.0, q_g: 2.0, q_n: 1.0, q_m: 4.0 },
            temperature_k: 683.15,
            molar_mass_amu: 45.98,
            alpha0: [1.0, 1.0, 1.0, 1.0],
            propagation_sign: [1, 1, 1, 1],
        }
    }

    #[test]
    fn chi4_is_unity_at_bare_resonance() {
        let p = na2();
        let f = FieldState::from_real([0.0, 0.0, 0.0, 1e-3], 0.0, 0.0, 0.0);
        let set = chi_all(&p, &f, 0.0).unwrap();
        assert_relative_eq!(set.chi_norm[3].re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(set.chi_norm[3].im, 0.0, epsilon = 1e-14);
        assert_relative_eq!(set.alpha(4), p.alpha0[3], max_relative = 1e-12);
    }

    #[test]
    fn chi_all_reduces_to_v_scheme_without_g3() {
        let p = na2();
        let f = FieldState::from_real([300.0, 0.0, 0.0, 0.0], 50.0, 0.0, -75.0);
        let set = chi_all(&p, &f, 0.0).unwrap();
        let v = chi_v_scheme(&p, &f, 0.0).unwrap();
        assert!((set.chi_norm[3] - v).norm() < 1e-12);
    }

    #[test]
    fn v_scheme_forms_agree_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let p = na2();
            let f = FieldState::from_real(
                [rng.gen_range(0.0..1500.0), 0.0, 0.0, 0.0],
                rng.gen_range(-4000.0..4000.0),
                0.0,
                rng.gen_range(-4000.0..4000.0),
            );
            let (a, b) = chi_v_scheme_forms(&p, &f, 0.0).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn v_scheme_bare_limit() {
        let p = na2();
        let f = FieldState::from_real([0.0; 4], 0.0, 0.0, 120.0);
        let v = chi_v_scheme(&p, &f, 0.0).unwrap();
        let resp = densmat::response(&p, &f, 0.0).unwrap();
        let expect = Cplx::new(p.coherence_widths.lm, 0.0) / resp.den.p4
            * resp.pops.deltas()[3]
            / resp.pops.zero_field_deltas()[3];
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn v_scheme_rejects_g3() {
        let p = na2();
        let f = FieldState::from_real([10.0, 0.0, 5.0, 0.0], 0.0, 0.0, 0.0);
        assert!(matches!(chi_v_scheme(&p, &f, 0.0), Err(Error::Misuse(_))));
    }

    #[test]
    fn lambda_scheme_forms_agree_and_bare_limit() {
        let p = na2();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let f = FieldState::from_real(
                [rng.gen_range(0.0..1500.0), 0.0, 0.0, 0.0],
                rng.gen_range(-4000.0..4000.0),
                0.0,
                rng.gen_range(-4000.0..4000.0),
            );
            let (a, b) = chi_lambda_scheme_forms(&p, &f, 0.0).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
        let f = FieldState::from_real([0.0; 4], 0.0, 0.0, -60.0);
        let lam = chi_lambda_scheme(&p, &f, 0.0).unwrap();
        let resp = densmat::response(&p, &f, 0.0).unwrap();
        let expect = Cplx::new(p.coherence_widths.ng, 0.0) / resp.den.p2
            * resp.pops.deltas()[1]
            / resp.pops.zero_field_deltas()[1];
        assert!((lam - expect).norm() < 1e-14);
    }

    #[test]
    fn awi_threshold_matches_bisection_root() {
        // At Omega1 = Omega4 = 0 the probe absorption crosses zero exactly
        // where dr1 |G1|^2 / (Gamma_gm Gamma_lg) = dr4.
        let p = awi_params();
        let absorption = |g1: f64| {
            let f = FieldState::from_real([g1, 0.0, 0.0, 0.0], 0.0, 0.0, 0.0);
            chi_v_scheme(&p, &f, 0.0).unwrap().re
        };
        let (mut lo, mut hi) = (1.0, 1.0e4);
        assert!(absorption(lo) > 0.0, "absorbing at weak drive");
        assert!(absorption(hi) < 0.0, "amplifying at strong drive");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if absorption(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g1 = 0.5 * (lo + hi);
        let f = FieldState::from_real([g1, 0.0, 0.0, 0.0], 0.0, 0.0, 0.0);
        let resp = densmat::response(&p, &f, 0.0).unwrap();
        let dr = resp.pops.deltas();
        let lhs = dr[0] * g1 * g1 / (p.coherence_widths.gm * p.coherence_widths.lg);
        assert!(dr[3] > 0.0, "no population inversion at the root");
        assert_relative_eq!(lhs, dr[3], max_relative = 1e-6);
    }

    #[test]
    fn raman_limit_approaches_exact_far_detuned() {
        let p = awi_params();
        let om = 50.0 * p.coherence_widths.lm;
        let f = FieldState::from_real([10.0, 0.0, 0.0, 0.0], om, 0.0, om);
        let approx_val = raman_limit(&p, &f, 0.0).unwrap();
        let exact = chi_v_scheme(&p, &f, 0.0).unwrap().re;
        assert!(
            (approx_val - exact).abs() <= 0.05 * exact.abs(),
            "raman {approx_val} vs exact {exact}"
        );
    }

    #[test]
    fn raman_limit_first_term_only_without_drive() {
        let p = awi_params();
        let om = 60.0 * p.coherence_widths.lm;
        let f = FieldState::from_real([0.0; 4], om, 0.0, om);
        let v = raman_limit(&p, &f, 0.0).unwrap();
        let resp = densmat::response(&p, &f, 0.0).unwrap();
        let dr = resp.pops.deltas();
        let dn = resp.pops.zero_field_deltas();
        let expect = p.coherence_widths.lm.powi(2) * dr[3] / (dn[3] * om * om);
        assert_relative_eq!(v, expect, max_relative = 1e-12);
    }

    #[test]
    fn raman_limit_gain_with_inverted_pair() {
        // r_m > r_g makes the Raman term a gain contribution
        let mut p = awi_params();
        p.pump = Pump::Open { q_l: 10.0, q_g: 0.5, q_n: 1.0, q_m: 8.0 };
        let om = 80.0 * p.coherence_widths.lm;
        let f = FieldState::from_real([10.0, 0.0, 0.0, 0.0], om, 0.0, om);
        let with_drive = raman_limit(&p, &f, 0.0).unwrap();
        // second term must be gain-like: the drive reduces absorption
        let f0 = FieldState::from_real([0.0; 4], om, 0.0, om);
        let bare = raman_limit(&p, &f0, 0.0).unwrap();
        assert!(with_drive < bare, "{with_drive} !< {bare}");
    }

    #[test]
    fn raman_limit_rejects_near_resonance() {
        let p = awi_params();
        let f = FieldState::from_real([30.0, 0.0, 0.0, 0.0], 0.0, 0.0, 5.0);
        assert!(matches!(raman_limit(&p, &f, 0.0), Err(Error::Misuse(_))));
    }

    #[test]
    fn sum_rule_bare_transition() {
        let p = na2();
        let f = FieldState::from_real([0.0; 4], 0.0, 0.0, 0.0);
        let (val, warn) = integrated_absorption(&p, &f, 0.0, None).unwrap();
        assert!(warn.is_empty());
        let expect = std::f64::consts::PI * p.coherence_widths.lm;
        assert_relative_eq!(val, expect, max_relative = 1e-3);
    }

    #[test]
    fn sum_rule_depends_only_on_population_change() {
        let p = na2();
        let bare = std::f64::consts::PI * p.coherence_widths.lm;
        let f = FieldState::from_real([500.0, 0.0, 0.0, 0.0], 0.0, 0.0, 0.0);
        let (val, _) = integrated_absorption(&p, &f, 0.0, None).unwrap();
        let resp = densmat::response(&p, &f, 0.0).unwrap();
        let scale = resp.pops.deltas()[3] / resp.pops.zero_field_deltas()[3];
        assert_relative_eq!(val, bare * scale, max_relative = 1e-3);
        assert!(scale < 1.0, "drive must deplete the probe difference");
    }

    #[test]
    fn sum_rule_randomized_drives() {
        let p = na2();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let f = FieldState::from_real(
                [rng.gen_range(0.0..800.0), 0.0, rng.gen_range(0.0..800.0), 0.0],
                rng.gen_range(-1500.0..1500.0),
                rng.gen_range(-1500.0..1500.0),
                0.0,
            );
            let (val, _) = integrated_absorption(&p, &f, 0.0, None).unwrap();
            let expect = integrated_absorption_expected(&p, &f, 0.0).unwrap();
            assert_relative_eq!(val, expect, max_relative = 1e-3);
        }
    }

    #[test]
    fn span_warning_when_too_small() {
        let p = na2();
        let f = FieldState::from_real([100.0, 0.0, 0.0, 0.0], 0.0, 0.0, 0.0);
        let (_, warn) = integrated_absorption(&p, &f, 0.0, Some(500.0)).unwrap();
        assert!(matches!(warn.as_slice(), [Warning::IntegrationSpan { .. }]));
    }

    #[test]
    fn reality_and_conjugation_symmetry() {
        // with drives off and fixed populations: chi(-Omega) = conj(chi(Omega))
        let p = na2();
        let probe = |om: f64| {
            let f = FieldState::from_real([0.0; 4], 0.0, 0.0, om);
            chi_all(&p, &f, 0.0).unwrap().chi_norm[3]
        };
        for om in [13.0, 170.0, 2500.0] {
            let a = probe(om);
            let b = probe(-om);
            assert!((a - b.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn fig2a_fields_show_stokes_gain_at_line_center() {
        // strong drives on resonance invert the Stokes response sign
        let p = na2();
        let f = FieldState::from_real([60.0, 0.0, 20.0, 0.0], 0.0, 0.0, 0.0);
        let set = chi_all(&p, &f, 0.0).unwrap();
        assert!(set.stokes_gain() > 0.0, "alpha2 = {}", set.alpha(2));
    }
}
