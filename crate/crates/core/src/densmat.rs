//! Steady-state density-matrix amplitudes for one velocity class.
//!
//! The strong fields G1 (l-g) and G3 (n-m) are kept to all orders through
//! saturation factors; the probe G4 and Stokes G2 enter to first order
//! only, so every weak coherence is linear in (G4, G2*) and the solver
//! works with response coefficients rather than iterating on amplitudes.
//!
//! Two independent routes are provided: the analytic closed forms
//! ([`solve`]) and a dense-elimination oracle ([`solve_oracle`]) that
//! assembles the full steady-state system verbatim and knows nothing about
//! the closed forms.

use crate::error::{Error, Result};
use crate::linsolve;
use crate::real::{c, imag, Cplx, Real};
use crate::scheme::{FieldState, Pump, SchemeParams, Topology};

/// Detunings of all four fields for one velocity class:
/// om_j = Omega_j - sign_j k_j v.
pub fn shifted_detunings<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> [F; 4] {
    let om = fields.omegas();
    [
        om[0] - params.k_signed(1) * v,
        om[1] - params.k_signed(2) * v,
        om[2] - params.k_signed(3) * v,
        om[3] - params.k_signed(4) * v,
    ]
}

/// Complex resonance denominators evaluated at (shifted) detunings.
///
/// Real part of each equals its coherence half-width; imaginary part the
/// detuning combination of the coherence it damps. `d2`/`d4` belong to the
/// four-wave-mixing components and carry the combination detunings, which
/// coincide with `p2`/`p4` for co-propagating beams but differ once
/// propagation signs mix.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceDenominators<F> {
    pub p1: Cplx<F>,
    pub p2: Cplx<F>,
    pub p3: Cplx<F>,
    pub p4: Cplx<F>,
    pub p41: Cplx<F>,
    pub p43: Cplx<F>,
    pub p32: Cplx<F>,
    pub p12: Cplx<F>,
    pub d2: Cplx<F>,
    pub d4: Cplx<F>,
}

impl<F: Real> ResonanceDenominators<F> {
    pub fn new(params: &SchemeParams<F>, om: [F; 4]) -> Self {
        let w = &params.coherence_widths;
        let [o1, o2, o3, o4] = om;
        Self {
            p1: c(w.lg, o1),
            p2: c(w.ng, o2),
            p3: c(w.nm, o3),
            p4: c(w.lm, o4),
            p41: c(w.gm, o4 - o1),
            p43: c(w.ln, o4 - o3),
            p32: c(w.gm, o3 - o2),
            p12: c(w.ln, o1 - o2),
            d2: c(w.ng, o1 + o3 - o4),
            d4: c(w.lm, o1 - o2 + o3),
        }
    }
}

/// Field-independent branching coefficients of the open configuration.
#[derive(Debug, Clone, Copy)]
pub struct OpenBranching<F> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub b1: F,
    pub b2: F,
    pub b3: F,
}

impl<F: Real> OpenBranching<F> {
    pub fn new(params: &SchemeParams<F>) -> Self {
        let lw = &params.level_widths;
        let d = &params.decays;
        let s1 = lw.l + lw.g - d.gl;
        let s3 = lw.m + lw.n - d.mn;
        Self {
            a1: d.gn * lw.l / (lw.n * s1),
            a2: lw.l * (lw.n - d.gn) / (lw.n * s1),
            a3: (lw.g - d.gl) / s1,
            b1: d.ml * lw.n / (lw.l * s3),
            b2: (lw.m - d.mn) / s3,
            b3: lw.n * (lw.l - d.ml) / (lw.l * s3),
        }
    }
}

/// Saturation parameters of the two driven transitions.
#[derive(Debug, Clone, Copy)]
pub struct SaturationFactors<F> {
    /// g1..g8 built on |G1|^2 (index shifted by one).
    pub g: [Cplx<F>; 8],
    /// v1..v8 built on |G3|^2.
    pub v: [Cplx<F>; 8],
    pub ae1: F,
    pub ae3: F,
    /// Resonance values: ae = ae0 * Gamma^2 / |P|^2.
    pub ae1_0: F,
    pub ae3_0: F,
}

impl<F: Real> SaturationFactors<F> {
    pub fn new(
        params: &SchemeParams<F>,
        den: &ResonanceDenominators<F>,
        g1: Cplx<F>,
        g3: Cplx<F>,
    ) -> Self {
        let a1 = g1.norm_sqr();
        let a3 = g3.norm_sqr();
        let a1c = Cplx::new(a1, F::zero());
        let a3c = Cplx::new(a3, F::zero());
        let d = den;
        let g = [
            a1c / (d.p41 * d.p1.conj()),
            a1c / (d.p12.conj() * d.p2),
            a1c / (d.p12.conj() * d.p1.conj()),
            a1c / (d.p41 * d.p4),
            a1c / (d.p43 * d.d2.conj()),
            a1c / (d.p41 * d.d2.conj()),
            a1c / (d.p32.conj() * d.d4.conj()),
            a1c / (d.p12.conj() * d.d4.conj()),
        ];
        let v = [
            a3c / (d.p43 * d.p3.conj()),
            a3c / (d.p32.conj() * d.p2),
            a3c / (d.p32.conj() * d.p3.conj()),
            a3c / (d.p43 * d.p4),
            a3c / (d.p41 * d.d2.conj()),
            a3c / (d.p43 * d.d2.conj()),
            a3c / (d.p12.conj() * d.d4.conj()),
            a3c / (d.p32.conj() * d.d4.conj()),
        ];
        let lw = &params.level_widths;
        let dec = &params.decays;
        let cw = &params.coherence_widths;
        let two = F::of(2.0);
        let s3 = lw.m + lw.n - dec.mn;
        let ae3_0 = two * s3 * a3 / (lw.m * lw.n * cw.nm);
        let ae3 = ae3_0 * cw.nm * cw.nm / d.p3.norm_sqr();
        let (ae1_0, ae1) = match params.topology {
            Topology::Open => {
                let s1 = lw.l + lw.g - dec.gl;
                let ae1_0 = two * s1 * a1 / (lw.l * lw.g * cw.lg);
                (ae1_0, ae1_0 * cw.lg * cw.lg / d.p1.norm_sqr())
            }
            Topology::Closed => {
                let ae1_0 = two * a1 / (cw.lg * lw.g);
                (ae1_0, ae1_0 * cw.lg * cw.lg / d.p1.norm_sqr())
            }
        };
        Self { g, v, ae1, ae3, ae1_0, ae3_0 }
    }

    /// 1-based accessors matching the derivation's numbering.
    pub fn g_(&self, i: usize) -> Cplx<F> {
        self.g[i - 1]
    }
    pub fn v_(&self, i: usize) -> Cplx<F> {
        self.v[i - 1]
    }
}

/// Level populations for one velocity class, with their zero-field values.
#[derive(Debug, Clone, Copy)]
pub struct PopulationSolution<F> {
    /// [r_l, r_g, r_n, r_m].
    pub r: [F; 4],
    /// Zero-field values [n_l, n_g, n_n, n_m].
    pub n: [F; 4],
    pub ae1: F,
    pub ae3: F,
    /// Closure denominator: beta for closed, the 2x2 determinant for open.
    pub denominator: F,
}

impl<F: Real> PopulationSolution<F> {
    /// Population differences [dr1, dr2, dr3, dr4] =
    /// [r_l - r_g, r_n - r_g, r_n - r_m, r_l - r_m].
    pub fn deltas(&self) -> [F; 4] {
        deltas_of(self.r)
    }
    pub fn zero_field_deltas(&self) -> [F; 4] {
        deltas_of(self.n)
    }
}

fn deltas_of<F: Real>(r: [F; 4]) -> [F; 4] {
    [r[0] - r[1], r[2] - r[1], r[2] - r[3], r[0] - r[3]]
}

/// Zero-field populations [n_l, n_g, n_n, n_m] from the pump rates and
/// decay branching.
pub fn zero_field_populations<F: Real>(params: &SchemeParams<F>) -> [F; 4] {
    let lw = &params.level_widths;
    let d = &params.decays;
    match params.pump {
        Pump::Open { q_l, q_g, q_n, q_m } => {
            let nm = q_m / lw.m;
            let ng = q_g / lw.g;
            let nn = (q_n + d.gn * ng + d.mn * nm) / lw.n;
            let nl = (q_l + d.gl * ng + d.ml * nm) / lw.l;
            [nl, ng, nn, nm]
        }
        Pump::Closed { w_g, w_n, w_m } => {
            let w_n_eff = w_n + w_g * d.gn / lw.g + w_m * d.mn / lw.m;
            let nl = F::one()
                / (F::one() + w_m / lw.m + w_g / lw.g + w_n_eff / lw.n);
            [nl, nl * w_g / lw.g, nl * w_n_eff / lw.n, nl * w_m / lw.m]
        }
    }
}

const SINGULAR_FLOOR: f64 = 1.0e-30;

/// Saturated populations, open configuration.
pub fn populations_open<F: Real>(
    params: &SchemeParams<F>,
    sat: &SaturationFactors<F>,
) -> Result<PopulationSolution<F>> {
    debug_assert!(params.topology == Topology::Open);
    let n = zero_field_populations(params);
    let [dn1, _, dn3, _] = deltas_of(n);
    let br = OpenBranching::new(params);
    let (ae1, ae3) = (sat.ae1, sat.ae3);
    let det = (F::one() + ae1) * (F::one() + ae3) - br.a1 * ae1 * br.b1 * ae3;
    if !det.is_finite() || det.abs() < F::of(SINGULAR_FLOOR) {
        return Err(Error::SingularSaturation(format!("open determinant {det}")));
    }
    let dr1 = ((F::one() + ae3) * dn1 + br.b1 * ae3 * dn3) / det;
    let dr3 = ((F::one() + ae1) * dn3 + br.a1 * ae1 * dn1) / det;
    let rm = n[3] + (F::one() - br.b2) * ae3 * dr3;
    let rg = n[1] + (F::one() - br.a3) * ae1 * dr1;
    let rn = n[2] - br.b2 * ae3 * dr3 + br.a1 * ae1 * dr1;
    let rl = n[0] + br.b1 * ae3 * dr3 - br.a3 * ae1 * dr1;
    Ok(PopulationSolution { r: [rl, rg, rn, rm], n, ae1, ae3, denominator: det })
}

/// Saturated populations, closed configuration.
pub fn populations_closed<F: Real>(
    params: &SchemeParams<F>,
    sat: &SaturationFactors<F>,
) -> Result<PopulationSolution<F>> {
    debug_assert!(params.topology == Topology::Closed);
    let lw = &params.level_widths;
    let d = &params.decays;
    let n = zero_field_populations(params);
    let [dn1, _, dn3, _] = deltas_of(n);
    let (ae1, ae3) = (sat.ae1, sat.ae3);
    let one = F::one();
    let two = F::of(2.0);
    let b = lw.n / (lw.m + lw.n - d.mn);
    let num3 = dn3 * (one + ae1) + dn1 * d.gn * ae1 / lw.n;
    let beta = (one + ae3) * (one - dn3 + two * (n[0] + n[3]) * ae1)
        + (one + two * b * ae3) * num3;
    if !beta.is_finite() || beta.abs() < F::of(SINGULAR_FLOOR) {
        return Err(Error::SingularSaturation(format!("closed beta {beta}")));
    }
    let rl = n[0] * (one + ae3) * (one + ae1) / beta;
    let rg = (one + ae3) * (n[0] * (one + ae1) - dn1) / beta;
    let common = n[3] * (one + ae3) * (one + ae1);
    let rn = (common + num3 * (one + b * ae3)) / beta;
    let rm = (common + num3 * b * ae3) / beta;
    Ok(PopulationSolution { r: [rl, rg, rn, rm], n, ae1, ae3, denominator: beta })
}

/// Linear response of the weak-field coherences.
///
/// Route P responds to the probe (per unit G4); route S to the Stokes
/// conjugate (per unit G2*). `big_r2`/`big_r4` are the generalized
/// population factors entering chi2/chi4.
#[derive(Debug, Clone, Copy)]
pub struct WeakResponse<F> {
    pub r4_per_g4: Cplx<F>,
    pub r41_per_g4: Cplx<F>,
    pub r43_per_g4: Cplx<F>,
    /// conj(rt2) per unit G4.
    pub rt2c_per_g4: Cplx<F>,
    /// conj(r2) per unit G2*.
    pub r2c_per_g2c: Cplx<F>,
    pub r32_per_g2c: Cplx<F>,
    pub r12_per_g2c: Cplx<F>,
    pub rt4_per_g2c: Cplx<F>,
    pub big_r2: Cplx<F>,
    pub big_r4: Cplx<F>,
}

/// Weak-field linear response given the saturated populations.
pub fn weak_response<F: Real>(
    fields: &FieldState<F>,
    den: &ResonanceDenominators<F>,
    sat: &SaturationFactors<F>,
    pops: &PopulationSolution<F>,
) -> WeakResponse<F> {
    let one = Cplx::new(F::one(), F::zero());
    let i = Cplx::new(F::zero(), F::one());
    let [dr1, dr2, dr3, dr4] = pops.deltas().map(|x| Cplx::new(x, F::zero()));
    let g1 = fields.g(1);
    let g3 = fields.g(3);
    let s = sat;
    let d = den;

    // probe route: r4 with compound saturation, then the two-photon pair
    let big_r4 = (dr4 * (one + s.v_(5) + s.g_(5))
        - s.g_(1) * (one + s.g_(5) - s.v_(6)) * dr1
        - s.v_(1) * (one + s.v_(5) - s.g_(6)) * dr3)
        / ((one + s.g_(4) + s.v_(4))
            + (s.v_(5) + s.v_(4) * (s.v_(5) - s.g_(6))
                + s.g_(5)
                + s.g_(4) * (s.g_(5) - s.v_(6))));
    let r4_per_g4 = i * big_r4 / d.p4;
    let su = g1.conj() * (-i * r4_per_g4 + dr1 / d.p1.conj());
    let sw = g3.conj() * (i * r4_per_g4 - dr3 / d.p3.conj());
    let den_p = d.p41 * d.p43 * (one + s.v_(5) + s.g_(5));
    let r41_per_g4 =
        (su * d.p43 * (one + s.g_(5)) + (g1.conj() * g3 / d.d2.conj()) * sw) / den_p;
    let r43_per_g4 =
        (sw * d.p41 * (one + s.v_(5)) + (g1 * g3.conj() / d.d2.conj()) * su) / den_p;
    let rt2c_per_g4 = i * (g3.conj() * r41_per_g4 - g1.conj() * r43_per_g4) / d.d2.conj();

    // Stokes route, conjugated unknowns
    let big_r2 = (dr2 * (one + s.g_(7) + s.v_(7))
        - s.v_(3) * (one + s.v_(7) - s.g_(8)) * dr3
        - s.g_(3) * (one + s.g_(7) - s.v_(8)) * dr1)
        / ((one + s.g_(2) + s.v_(2))
            + (s.g_(7) + s.g_(2) * (s.g_(7) - s.v_(8))
                + s.v_(7)
                + s.v_(2) * (s.v_(7) - s.g_(8))));
    let r2c_per_g2c = -i * big_r2.conj() / d.p2.conj();
    let sup = g3 * (i * r2c_per_g2c + dr3 / d.p3);
    let swp = -g1 * (i * r2c_per_g2c + dr1 / d.p1);
    let den_s = d.p32 * d.p12 * (one + s.g_(7).conj() + s.v_(7).conj());
    let r32_per_g2c =
        (sup * d.p12 * (one + s.v_(7).conj()) + (g1.conj() * g3 / d.d4) * swp) / den_s;
    let r12_per_g2c =
        (swp * d.p32 * (one + s.g_(7).conj()) + (g1 * g3.conj() / d.d4) * sup) / den_s;
    let rt4_per_g2c = i * (g3 * r12_per_g2c - g1 * r32_per_g2c) / d.d4;

    WeakResponse {
        r4_per_g4,
        r41_per_g4,
        r43_per_g4,
        rt2c_per_g4,
        r2c_per_g2c,
        r32_per_g2c,
        r12_per_g2c,
        rt4_per_g2c,
        big_r2,
        big_r4,
    }
}

/// Steady-state density-matrix amplitudes of one velocity class.
#[derive(Debug, Clone, Copy)]
pub struct DmSolution<F> {
    /// [r_l, r_g, r_n, r_m].
    pub r_pop: [F; 4],
    /// Zero-field populations.
    pub n_pop: [F; 4],
    /// Population differences [dr1..dr4].
    pub deltas: [F; 4],
    pub delta_n: [F; 4],
    /// Strong-field optical coherences.
    pub r1: Cplx<F>,
    pub r3: Cplx<F>,
    /// Weak-field coherences at the actual G2, G4.
    pub r2: Cplx<F>,
    pub r4: Cplx<F>,
    pub rt2: Cplx<F>,
    pub rt4: Cplx<F>,
    pub r41: Cplx<F>,
    pub r43: Cplx<F>,
    pub r32: Cplx<F>,
    pub r12: Cplx<F>,
}

impl<F: Real> DmSolution<F> {
    pub fn max_abs(&self) -> F {
        let mut m = F::zero();
        for x in self.r_pop {
            m = m.max(x.abs());
        }
        for z in [
            self.r1, self.r3, self.r2, self.r4, self.rt2, self.rt4, self.r41, self.r43,
            self.r32, self.r12,
        ] {
            m = m.max(z.norm_sqr().sqrt());
        }
        m
    }
}

/// Everything the downstream response builders need for one velocity class.
#[derive(Debug, Clone, Copy)]
pub struct DmResponse<F> {
    pub om: [F; 4],
    pub den: ResonanceDenominators<F>,
    pub sat: SaturationFactors<F>,
    pub pops: PopulationSolution<F>,
    pub weak: WeakResponse<F>,
}

impl<F: Real> DmResponse<F> {
    /// Assemble the spec-level solution with coherence values at the
    /// actual weak amplitudes.
    pub fn solution(&self, fields: &FieldState<F>) -> DmSolution<F> {
        let g2c = fields.g(2).conj();
        let g4 = fields.g(4);
        let [dr1, _, dr3, _] = self.pops.deltas();
        let r1 = imag(F::one()) * fields.g(1) * Cplx::new(dr1, F::zero()) / self.den.p1;
        let r3 = imag(F::one()) * fields.g(3) * Cplx::new(dr3, F::zero()) / self.den.p3;
        let w = &self.weak;
        DmSolution {
            r_pop: self.pops.r,
            n_pop: self.pops.n,
            deltas: self.pops.deltas(),
            delta_n: self.pops.zero_field_deltas(),
            r1,
            r3,
            r2: (w.r2c_per_g2c * g2c).conj(),
            r4: w.r4_per_g4 * g4,
            rt2: (w.rt2c_per_g4 * g4).conj(),
            rt4: w.rt4_per_g2c * g2c,
            r41: w.r41_per_g4 * g4,
            r43: w.r43_per_g4 * g4,
            r32: w.r32_per_g2c * g2c,
            r12: w.r12_per_g2c * g2c,
        }
    }
}

/// Closed-form solve for one velocity class.
pub fn response<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<DmResponse<F>> {
    let om = shifted_detunings(params, fields, v);
    response_at(params, fields, om)
}

/// Closed-form solve at explicitly shifted detunings.
pub fn response_at<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    om: [F; 4],
) -> Result<DmResponse<F>> {
    let den = ResonanceDenominators::new(params, om);
    let sat = SaturationFactors::new(params, &den, fields.g(1), fields.g(3));
    let pops = match params.topology {
        Topology::Open => populations_open(params, &sat)?,
        Topology::Closed => populations_closed(params, &sat)?,
    };
    let weak = weak_response(fields, &den, &sat, &pops);
    Ok(DmResponse { om, den, sat, pops, weak })
}

/// Closed-form solution (populations and all coherences).
pub fn solve<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<DmSolution<F>> {
    Ok(response(params, fields, v)?.solution(fields))
}

/// Brute-force verification oracle: the steady-state equations are
/// assembled as dense linear systems and eliminated numerically, with no
/// use of the closed forms.
///
/// The population block couples [r_l, r_g, r_n, r_m, Re r1, Im r1,
/// Re r3, Im r3]; the weak block couples the eight first-order coherences
/// (probe route, Stokes-conjugate route and both four-wave-mixing
/// components) as one complex 8x8 system.
pub fn solve_oracle<F: Real>(
    params: &SchemeParams<F>,
    fields: &FieldState<F>,
    v: F,
) -> Result<DmSolution<F>> {
    let om = shifted_detunings(params, fields, v);
    let den = ResonanceDenominators::new(params, om);
    let lw = &params.level_widths;
    let dec = &params.decays;
    let g1 = fields.g(1);
    let g3 = fields.g(3);
    let zero = F::zero();

    // population block
    let mut a = vec![vec![zero; 8]; 8];
    let mut b = vec![zero; 8];
    // -2 Re{i G* r} = -2 [Im(G) x - Re(G) y] for r = x + i y
    let w1 = (-F::of(2.0) * g1.im, F::of(2.0) * g1.re);
    let w3 = (-F::of(2.0) * g3.im, F::of(2.0) * g3.re);
    match params.pump {
        Pump::Open { q_l, q_g, q_n, q_m } => {
            // Gm rm - W3 = qm        (level m gains the stimulated flux)
            a[0][3] = lw.m;
            a[0][6] = -w3.0;
            a[0][7] = -w3.1;
            b[0] = q_m;
            // Gn rn + W3 - gam_gn rg - gam_mn rm = qn
            a[1][2] = lw.n;
            a[1][6] = w3.0;
            a[1][7] = w3.1;
            a[1][1] = -dec.gn;
            a[1][3] = -dec.mn;
            b[1] = q_n;
            // Gg rg - W1 = qg
            a[2][1] = lw.g;
            a[2][4] = -w1.0;
            a[2][5] = -w1.1;
            b[2] = q_g;
            // Gl rl + W1 - gam_gl rg - gam_ml rm = ql
            a[3][0] = lw.l;
            a[3][4] = w1.0;
            a[3][5] = w1.1;
            a[3][1] = -dec.gl;
            a[3][3] = -dec.ml;
            b[3] = q_l;
        }
        Pump::Closed { w_g, w_n, w_m } => {
            a[0][3] = lw.m;
            a[0][0] = -w_m;
            a[0][6] = -w3.0;
            a[0][7] = -w3.1;
            a[1][2] = lw.n;
            a[1][0] = -w_n;
            a[1][6] = w3.0;
            a[1][7] = w3.1;
            a[1][1] = -dec.gn;
            a[1][3] = -dec.mn;
            a[2][1] = lw.g;
            a[2][0] = -w_g;
            a[2][4] = -w1.0;
            a[2][5] = -w1.1;
            // closure r_l + r_g + r_n + r_m = 1
            a[3][0] = F::one();
            a[3][1] = F::one();
            a[3][2] = F::one();
            a[3][3] = F::one();
            b[3] = F::one();
        }
    }
    // P1 r1 = i G1 (rl - rg), split into real and imaginary rows
    a[4][4] = params.coherence_widths.lg;
    a[4][5] = -om[0];
    a[4][0] = g1.im;
    a[4][1] = -g1.im;
    a[5][4] = om[0];
    a[5][5] = params.coherence_widths.lg;
    a[5][0] = -g1.re;
    a[5][1] = g1.re;
    // P3 r3 = i G3 (rn - rm)
    a[6][6] = params.coherence_widths.nm;
    a[6][7] = -om[2];
    a[6][2] = g3.im;
    a[6][3] = -g3.im;
    a[7][6] = om[2];
    a[7][7] = params.coherence_widths.nm;
    a[7][2] = -g3.re;
    a[7][3] = g3.re;
    linsolve::solve_real(&mut a, &mut b)?;
    let r_pop = [b[0], b[1], b[2], b[3]];
    let r1 = c(b[4], b[5]);
    let r3 = c(b[6], b[7]);
    let [dr1, dr2, dr3, dr4] = deltas_of(r_pop);

    // weak block: unknowns [r4, r41, r43, rt2*, r2*, r32, r12, rt4]
    let i = Cplx::new(F::zero(), F::one());
    let cz = Cplx::new(F::zero(), F::zero());
    let g2 = fields.g(2);
    let g4 = fields.g(4);
    let mut m = vec![vec![cz; 8]; 8];
    let mut rhs = vec![cz; 8];
    let re = |x: F| Cplx::new(x, F::zero());
    // P4 r4 = i[G4 dr4 - G1 r41 + G3 r43]
    m[0][0] = den.p4;
    m[0][1] = i * g1;
    m[0][2] = -i * g3;
    rhs[0] = i * g4 * re(dr4);
    // P41 r41 = -i G1* r4 + i r1* G4 + i G3 rt2*
    m[1][1] = den.p41;
    m[1][0] = i * g1.conj();
    m[1][3] = -i * g3;
    rhs[1] = i * r1.conj() * g4;
    // P43 r43 = -i G4 r3* + i r4 G3* - i G1 rt2*
    m[2][2] = den.p43;
    m[2][0] = -i * g3.conj();
    m[2][3] = i * g1;
    rhs[2] = -i * g4 * r3.conj();
    // d2* rt2* = i G3* r41 - i G1* r43
    m[3][3] = den.d2.conj();
    m[3][1] = -i * g3.conj();
    m[3][2] = i * g1.conj();
    // P2* r2* = -i G2* dr2 + i G3* r32 - i G1* r12
    m[4][4] = den.p2.conj();
    m[4][5] = -i * g3.conj();
    m[4][6] = i * g1.conj();
    rhs[4] = -i * g2.conj() * re(dr2);
    // P32 r32 = -i G2* r3 + i G3 r2* - i G1* rt4
    m[5][5] = den.p32;
    m[5][4] = -i * g3;
    m[5][7] = i * g1.conj();
    rhs[5] = -i * g2.conj() * r3;
    // P12 r12 = -i G1 r2* + i r1 G2* + i G3* rt4
    m[6][6] = den.p12;
    m[6][4] = i * g1;
    m[6][7] = -i * g3.conj();
    rhs[6] = i * r1 * g2.conj();
    // d4 rt4 = -i G1 r32 + i G3 r12
    m[7][7] = den.d4;
    m[7][5] = i * g1;
    m[7][6] = -i * g3;
    linsolve::solve_complex(&mut m, &mut rhs)?;

    Ok(DmSolution {
        r_pop,
        n_pop: zero_field_populations(params),
        deltas: [dr1, dr2, dr3, dr4],
        delta_n: deltas_of(zero_field_populations(params)),
        r1,
        r3,
        r4: rhs[0],
        r41: rhs[1],
        r43: rhs[2],
        rt2: rhs[3].conj(),
        r2: rhs[4].conj(),
        r32: rhs[5],
        r12: rhs[6],
        rt4: rhs[7],
    })
}
