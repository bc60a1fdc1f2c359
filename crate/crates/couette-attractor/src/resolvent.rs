//! Resolvent and semigroup machinery for the mode operator on the half-line.
//!
//! Everything here lives in scaled variables: the mode field solves
//! `d_t f = d_y^2 f - i k y f` (a `-k^2 f` viscous term, when wanted, is the
//! diagonal factor `e^{-k^2 t}` and is carried explicitly by callers), with
//! `k > 0` and a Dirichlet condition at `y = 0`.
//!
//! Key objects:
//!
//! * the fundamental pair `A(y) = Ai(e^{i pi/6}(lambda + k^{1/3} y))` and
//!   `B(y) = r A(y) - Ai(e^{i 5pi/6}(lambda + k^{1/3} y))`,
//!   `r = Ai(e^{i 5pi/6} lambda)/Ai(e^{i pi/6} lambda)`, with Wronskian
//!   `A'B - AB' = k^{1/3}/(2 pi)`, giving the resolvent kernel;
//! * the oscillatory Airy product identity: for `y > z >= 0`,
//!   `int_R e^{i k^{2/3} lambda t} Ai(e^{i pi/6}(lambda+k^{1/3}y))
//!    Ai(e^{i 5pi/6}(lambda+k^{1/3}z)) d lambda
//!    = k^{-1/3} (4 pi t)^{-1/2}
//!      exp(-(y-z)^2/(4t) - i(kt/2)(y+z) - k^2 t^3/12)`;
//! * the four-term splitting `f = -T1 + T2 - T3 + T4` of the evolved mode
//!   into wall terms (T1 contour integral, T2 Gaussian) carrying the first
//!   moment of the data and remainder terms (T3 contour, T4 Gaussian) that
//!   decay faster;
//! * an upward "chevron" contour deformation (legs at angles `pi - delta`
//!   and `delta`) that turns the conditionally convergent real-axis
//!   integrals into absolutely convergent ones, staying clear of the
//!   resolvent poles on the ray `arg lambda = 5 pi/6`;
//! * a Crank-Nicolson reference solver in the self-scaled variables
//!   `eta = k^{1/3} y`, `tau = k^{2/3} t` on a graded mesh.
//!
//! Because the products of Airy factors on the contour legs cancel their
//! leading `e^{+-c s^{3/2}}` growth exactly, each factor is kept as a sum of
//! `coef * exp(L) * S` terms (log-scale representation) and the exponents are
//! combined before a single final `exp`. This avoids overflow even where an
//! individual factor reaches `e^{1000}`.

use crate::quad::{integrate_adaptive, GlRule};
use crate::specfun::airy::poincare_uv;
use crate::specfun::{airy_ai, airy_ai_pair};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

fn rot(angle: f64) -> C {
    C::from_polar(1.0, angle)
}

fn rot16() -> C {
    rot(PI / 6.0)
}

fn rot56() -> C {
    rot(5.0 * PI / 6.0)
}

// ---------------------------------------------------------------------------
// log-scale Airy representations
// ---------------------------------------------------------------------------

/// A value expressed as `sum_i coef_i * exp(L_i) * S_i`.
#[derive(Clone, Debug)]
pub(crate) struct AiRep {
    terms: Vec<(C, C, C)>,
}

const REP_DIRECT_RADIUS: f64 = 30.0;

fn zeta_of(w: C) -> C {
    (2.0 / 3.0) * w * w.sqrt()
}

/// Truncated Poincare series `sum (-1)^k u_k zeta^{-k}` (and v for Ai').
fn poincare_sum(zeta: C, prime: bool) -> C {
    let (u, v) = poincare_uv();
    let coefs = if prime { v } else { u };
    let minv = -zeta.inv();
    let mut p = C::new(1.0, 0.0);
    let mut acc = C::new(1.0, 0.0);
    let mut prev = f64::MAX;
    for k in 1..coefs.len() {
        p *= minv;
        let mag = coefs[k].abs() * p.norm();
        if mag >= prev || mag < 1e-18 {
            break;
        }
        prev = mag;
        acc += coefs[k] * p;
    }
    acc
}

fn ln_2sqrtpi() -> f64 {
    (2.0 * PI.sqrt()).ln()
}

/// (L, S) with Ai(w) = exp(L) S, valid for |arg w| <= 2pi/3, |w| large.
fn log_ai_direct(w: C) -> (C, C) {
    let zeta = zeta_of(w);
    let l = -zeta - 0.25 * w.ln() - ln_2sqrtpi();
    (l, poincare_sum(zeta, false))
}

/// (L, S) with Ai'(w) = -exp(L) S in the same regime.
fn log_aip_direct(w: C) -> (C, C) {
    let zeta = zeta_of(w);
    let l = -zeta + 0.25 * w.ln() - ln_2sqrtpi();
    (l, poincare_sum(zeta, true))
}

impl AiRep {
    pub(crate) fn ai(w: C) -> AiRep {
        if w.norm() < REP_DIRECT_RADIUS {
            return AiRep { terms: vec![(airy_ai(w), C::new(0.0, 0.0), C::new(1.0, 0.0))] };
        }
        if w.arg().abs() <= 2.0 * PI / 3.0 + 1e-14 {
            let (l, s) = log_ai_direct(w);
            AiRep { terms: vec![(C::new(1.0, 0.0), l, s)] }
        } else {
            let om = rot(2.0 * PI / 3.0);
            let (l1, s1) = log_ai_direct(om * w);
            let (l2, s2) = log_ai_direct(om.conj() * w);
            AiRep { terms: vec![(-om, l1, s1), (-om.conj(), l2, s2)] }
        }
    }

    pub(crate) fn aip(w: C) -> AiRep {
        if w.norm() < REP_DIRECT_RADIUS {
            let (_, ap) = airy_ai_pair(w);
            return AiRep { terms: vec![(ap, C::new(0.0, 0.0), C::new(1.0, 0.0))] };
        }
        if w.arg().abs() <= 2.0 * PI / 3.0 + 1e-14 {
            let (l, s) = log_aip_direct(w);
            AiRep { terms: vec![(C::new(-1.0, 0.0), l, s)] }
        } else {
            // Ai'(w) = -[conj(om) Ai'(om w) + om Ai'(conj(om) w)]
            let om = rot(2.0 * PI / 3.0);
            let (l1, s1) = log_aip_direct(om * w);
            let (l2, s2) = log_aip_direct(om.conj() * w);
            AiRep { terms: vec![(om.conj(), l1, s1), (om, l2, s2)] }
        }
    }

    pub(crate) fn mul(&self, other: &AiRep) -> AiRep {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(c1, l1, s1) in &self.terms {
            for &(c2, l2, s2) in &other.terms {
                terms.push((c1 * c2, l1 + l2, s1 * s2));
            }
        }
        AiRep { terms }
    }

    /// self / other, assuming the dominant term of `other` truly dominates
    /// (true on all contours used here: the subdominant branch is smaller by
    /// `e^{-c |lambda|^{3/2}}`).
    pub(crate) fn div(&self, other: &AiRep) -> AiRep {
        let (di, _) = other
            .terms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.re.partial_cmp(&b.1 .1.re).unwrap())
            .unwrap();
        let (cd, ld, sd) = other.terms[di];
        let mut denom = cd * sd;
        for (i, &(c, l, s)) in other.terms.iter().enumerate() {
            if i != di {
                denom += c * (l - ld).exp() * s;
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|&(c, l, s)| (c / denom, l - ld, s))
            .collect();
        AiRep { terms }
    }

    /// Evaluate `sum coef exp(L + extra) S`.
    pub(crate) fn eval_with(&self, extra: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &(c, l, s) in &self.terms {
            let e = l + extra;
            if e.re < -745.0 {
                continue;
            }
            debug_assert!(e.re < 705.0, "exponent overflow in AiRep::eval_with: {e}");
            acc += c * e.exp() * s;
        }
        acc
    }

    /// Largest real exponent among the terms (scale estimate).
    fn max_re(&self) -> f64 {
        self.terms.iter().map(|t| t.1.re).fold(f64::MIN, f64::max)
    }
}

// ---------------------------------------------------------------------------
// resolvent pair and half-line resolvent
// ---------------------------------------------------------------------------

/// `(A(y), B(y))` for the mode resolvent at spectral parameter `lambda`.
pub fn resolvent_pair(k: f64, lam: C, y: f64) -> (C, C) {
    let arg = lam + k.cbrt() * y;
    let a = airy_ai(rot16() * arg);
    let r = airy_ai(rot56() * lam) / airy_ai(rot16() * lam);
    let b = r * a - airy_ai(rot56() * arg);
    (a, b)
}

/// y-derivatives of the pair.
pub fn resolvent_pair_deriv(k: f64, lam: C, y: f64) -> (C, C) {
    let k13 = k.cbrt();
    let arg = lam + k13 * y;
    let (_, ap1) = airy_ai_pair(rot16() * arg);
    let (_, ap5) = airy_ai_pair(rot56() * arg);
    let r = airy_ai(rot56() * lam) / airy_ai(rot16() * lam);
    let da = rot16() * k13 * ap1;
    let db = r * da - rot56() * k13 * ap5;
    (da, db)
}

/// Wronskian `A'B - AB'`; equals `k^{1/3}/(2 pi)` identically in `y`.
pub fn resolvent_wronskian(k: f64, lam: C, y: f64) -> C {
    let (a, b) = resolvent_pair(k, lam, y);
    let (da, db) = resolvent_pair_deriv(k, lam, y);
    da * b - a * db
}

/// Solve `i(k^{2/3} lambda + k y) f - f'' = g` on `y > 0`, `f(0) = 0`,
/// `f -> 0` at infinity, for data `g` supported in `[0, z_max]`:
/// `f(y) = -2 pi k^{-1/3} [A(y) int_0^y B g + B(y) int_y^{z_max} A g]`.
pub fn solve_resolvent_halfplane<F: Fn(f64) -> C>(
    k: f64,
    lam: C,
    g: &F,
    z_max: f64,
    ys: &[f64],
) -> Vec<C> {
    let pref = -2.0 * PI / k.cbrt();
    ys.iter()
        .map(|&y| {
            let ia = integrate_adaptive(
                &|z: f64| resolvent_pair(k, lam, z).1 * g(z),
                0.0,
                y.min(z_max),
                1e-11,
                1e-300,
            );
            let ib = if y < z_max {
                integrate_adaptive(
                    &|z: f64| resolvent_pair(k, lam, z).0 * g(z),
                    y,
                    z_max,
                    1e-11,
                    1e-300,
                )
            } else {
                C::new(0.0, 0.0)
            };
            let (a, b) = resolvent_pair(k, lam, y);
            pref * (a * ia + b * ib)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// oscillatory Airy product identity
// ---------------------------------------------------------------------------

/// Closed form of the identity (right-hand side).
pub fn airy_identity_rhs(k: f64, t: f64, y: f64, z: f64) -> C {
    let expo = C::new(
        -(y - z) * (y - z) / (4.0 * t) - k * k * t * t * t / 12.0,
        -(k * t / 2.0) * (y + z),
    );
    expo.exp() / (k.cbrt() * (4.0 * PI * t).sqrt())
}

fn identity_integrand(k: f64, t: f64, y: f64, z: f64, lam: C) -> C {
    let k13 = k.cbrt();
    let rep = AiRep::ai(rot16() * (lam + k13 * y)).mul(&AiRep::ai(rot56() * (lam + k13 * z)));
    rep.eval_with(C::new(0.0, 1.0) * k.powf(2.0 / 3.0) * t * lam)
}

/// Left-hand side evaluated on a deformed contour. The value is of size
/// `e^{-(k^{2/3} t)^3/12}` while the integrand on the real axis is O(1), so
/// the contour is lifted through the saddle at `lambda = i (k^{2/3} t)^2/4`
/// (a horizontal segment at that height, where the pointwise magnitude
/// matches the answer) with tails rising at angle `delta` for absolute
/// convergence. The integrand is entire, so any such deformation is exact.
pub fn airy_identity_lhs(k: f64, t: f64, y: f64, z: f64, delta: f64) -> C {
    assert!(y > z && z >= 0.0, "identity requires y > z >= 0");
    let k13 = k.cbrt();
    let k23 = k.powf(2.0 / 3.0);
    let big_t = k23 * t;
    let h = big_t * big_t / 4.0; // saddle height
    // central half-width: Gaussian falloff e^{-x^2/T} plus asymptotic margin
    let x0 = (46.0 * big_t).sqrt() + 40.0 + 2.0 * k13 * y.max(z);
    let smax = 46.0 / (k23 * t * delta.sin()).max(1e-3);

    let f_right = |s: f64| identity_integrand(k, t, y, z, C::new(x0, h) + rot(delta) * s);
    let f_left = |s: f64| identity_integrand(k, t, y, z, C::new(-x0, h) + rot(PI - delta) * s);
    let f_mid = |u: f64| identity_integrand(k, t, y, z, C::new(u, h));

    let mid = integrate_adaptive(&f_mid, -x0, x0, 1e-10, 1e-300);
    let right = rot(delta) * integrate_adaptive(&f_right, 0.0, smax, 1e-10, 1e-300);
    let left = -rot(PI - delta) * integrate_adaptive(&f_left, 0.0, smax, 1e-10, 1e-300);
    mid + right + left
}

// ---------------------------------------------------------------------------
// T-splitting of the evolved mode
// ---------------------------------------------------------------------------

/// The deformed contour for the wall terms: legs at `arg = pi - delta` and
/// `arg = delta` from `|lambda| = 1`, joined by the lifted segment
/// `[-cos d, cos d] + i sin d`. Must keep `sin delta < |xi_1|/2` so the
/// segment stays below the first resolvent pole; any `0 < delta < pi/6`
/// behaves identically by analyticity.
#[derive(Clone, Copy, Debug)]
pub struct TContour {
    pub delta: f64,
}

impl Default for TContour {
    fn default() -> Self {
        TContour { delta: PI / 12.0 }
    }
}

impl TContour {
    /// Integrate `f(lambda) dlambda` over the three legs; `env_rate` is the
    /// decay rate (per unit `s`) of the integrand along the legs, used for
    /// truncation.
    fn integrate<F: Fn(C) -> C>(&self, f: &F, env_rate: f64, tol: f64) -> C {
        let d = self.delta;
        let smax = (42.0 / env_rate).max(2.0);
        // on the left leg lambda = -e^{-i d} s with the contour traversing
        // s from infinity down to 1, so d lambda = +e^{-i d} ds over [1, inf)
        let leftv =
            rot(-d) * integrate_adaptive(&|s: f64| f(-rot(-d) * s), 1.0, smax, tol, 1e-300);
        let midv = integrate_adaptive(
            &|u: f64| f(C::new(u, d.sin())),
            -d.cos(),
            d.cos(),
            tol,
            1e-300,
        );
        let rightv =
            rot(d) * integrate_adaptive(&|s: f64| f(rot(d) * s), 1.0, smax, tol, 1e-300);
        leftv + midv + rightv
    }
}

/// Wall contour term per unit first moment of the data:
/// `T1 = e^{i pi/6} k^{2/3} int e^{i k^{2/3} lambda t} r(lambda)
///  Ai(e^{i pi/6}(lambda + k^{1/3} y)) Ai'(e^{i pi/6} lambda) d lambda`.
pub fn t1_coefficient(k: f64, t: f64, y: f64, contour: TContour) -> C {
    let k13 = k.cbrt();
    let k23 = k.powf(2.0 / 3.0);
    let f = |lam: C| {
        let num = AiRep::ai(rot56() * lam);
        let den = AiRep::ai(rot16() * lam);
        let rep = num
            .div(&den)
            .mul(&AiRep::ai(rot16() * (lam + k13 * y)))
            .mul(&AiRep::aip(rot16() * lam));
        rep.eval_with(C::new(0.0, 1.0) * k23 * t * lam)
    };
    let env = k23 * t * contour.delta.sin() + 0.3 * k13 * y / 42.0_f64.sqrt();
    rot16() * k23 * contour.integrate(&f, env, 1e-10)
}

/// Wall Gaussian term per unit first moment of the data.
pub fn t2_coefficient(k: f64, t: f64, y: f64) -> C {
    let expo = C::new(-y * y / (4.0 * t) - k * k * t * t * t / 12.0, -k * t / 2.0 * y);
    C::new(y / (2.0 * t), -k * t / 2.0) * expo.exp() / (4.0 * PI * t).sqrt()
}

/// Remainder contour term: the cubic Taylor remainder of the z-shifted Airy
/// factor against the wall Green kernel. The third z-derivative of
/// `Ai(e^{i pi/6}(lambda + k^{1/3} z))` is
/// `i k [Ai(w) + e^{i pi/6}(lambda + k^{1/3} z) Ai'(w)]`, so the inner
/// bracket carries both pieces:
/// `T3 = (1/2) e^{i 2pi/3} k^{4/3} int e^{i k^{2/3} lambda t} r(lambda)
///  Ai(e^{i pi/6}(lambda+k^{1/3}y))
///  [int_0^zmax z^3 g(z) int_0^1 (1-s)^2 ((lambda + s k^{1/3} z)
///     Ai'(e^{i pi/6}(lambda + s k^{1/3} z))
///     + e^{-i pi/6} Ai(e^{i pi/6}(lambda + s k^{1/3} z))) ds dz] d lambda`.
pub fn t3_term<F: Fn(f64) -> C>(
    k: f64,
    t: f64,
    y: f64,
    g: &F,
    z_max: f64,
    contour: TContour,
) -> C {
    let k13 = k.cbrt();
    let k23 = k.powf(2.0 / 3.0);
    let gl_z = GlRule::new(40);
    let gl_s = GlRule::new(10);

    let f = |lam: C| {
        // reference exponent for the inner Ai' so its integral stays in range
        let l_ref = {
            let a = AiRep::aip(rot16() * lam).max_re();
            let b = AiRep::aip(rot16() * (lam + k13 * z_max)).max_re();
            a.max(b)
        };
        let inner = gl_z.integrate(0.0, z_max, |z| {
            let zc = C::new(z, 0.0);
            gl_s.integrate(0.0, 1.0, |s| {
                let shift = lam + s * k13 * z;
                let mut acc = C::new(0.0, 0.0);
                for &(c, l, sv) in &AiRep::aip(rot16() * shift).terms {
                    let e = l - l_ref;
                    if e.re > -745.0 {
                        acc += shift * c * e.exp() * sv;
                    }
                }
                for &(c, l, sv) in &AiRep::ai(rot16() * shift).terms {
                    let e = l - l_ref;
                    if e.re > -745.0 {
                        acc += rot(-PI / 6.0) * c * e.exp() * sv;
                    }
                }
                (1.0 - s) * (1.0 - s) * acc
            }) * zc.powi(3)
                * g(z)
        });
        let num = AiRep::ai(rot56() * lam);
        let den = AiRep::ai(rot16() * lam);
        let rep = num.div(&den).mul(&AiRep::ai(rot16() * (lam + k13 * y)));
        let mut acc = C::new(0.0, 0.0);
        for &(c, l, sv) in &rep.terms {
            let e = l + l_ref + C::new(0.0, 1.0) * k23 * t * lam;
            if e.re > -745.0 {
                debug_assert!(e.re < 705.0, "T3 exponent overflow");
                acc += c * e.exp() * sv;
            }
        }
        acc * inner
    };
    let env = k23 * t * contour.delta.sin() + 0.3 * k13 * y / 42.0_f64.sqrt();
    0.5 * rot(2.0 * PI / 3.0) * k * k13 * contour.integrate(&f, env, 1e-9)
}

/// Remainder Gaussian term.
pub fn t4_term<F: Fn(f64) -> C>(k: f64, t: f64, y: f64, g: &F, z_max: f64) -> C {
    let gl_z = GlRule::new(40);
    let gl_s = GlRule::new(16);
    let pref = 1.0 / (4.0 * (PI * t).sqrt());
    let val = gl_z.integrate(0.0, z_max, |z| {
        gl_s.integrate(0.0, 1.0, |s| {
            let w = y - s * z;
            let cube_base = C::new(w / (2.0 * t), -k * t / 2.0);
            let bracket = C::new(-3.0 * w / (4.0 * t * t), 3.0 * k / 4.0)
                + cube_base * cube_base * cube_base;
            let expo = C::new(
                -w * w / (4.0 * t) - k * k * t * t * t / 12.0,
                -(k * t / 2.0) * (y + s * z),
            );
            (1.0 - s) * (1.0 - s) * bracket * expo.exp()
        }) * z.powi(3)
            * g(z)
    });
    pref * val
}

/// First moment `int_0^zmax z g(z) dz` of the mode data.
pub fn first_moment<F: Fn(f64) -> C>(g: &F, z_max: f64) -> C {
    GlRule::new(60).integrate(0.0, z_max, |z| z * g(z))
}

/// Evolved mode by the four-term splitting (no `e^{-k^2 t}` factor).
pub fn evolve_mode_tsplit<F: Fn(f64) -> C>(
    k: f64,
    t: f64,
    ys: &[f64],
    g: &F,
    z_max: f64,
    contour: TContour,
) -> Vec<C> {
    let m1 = first_moment(g, z_max);
    ys.iter()
        .map(|&y| {
            let t1 = t1_coefficient(k, t, y, contour);
            let t2 = t2_coefficient(k, t, y);
            let t3 = t3_term(k, t, y, g, z_max, contour);
            let t4 = t4_term(k, t, y, g, z_max);
            m1 * (t2 - t1) - t3 + t4
        })
        .collect()
}

// ---------------------------------------------------------------------------
// universal profile in Fourier variables (contour route)
// ---------------------------------------------------------------------------

/// Fourier transform in the streamwise variable of the universal attractor
/// profile (normalized to unit first moment), via the wall-term contour
/// representation (`ell > 0`; negative `ell` follows by conjugation since
/// the profile is real). The wall terms are form-invariant under the
/// self-similar scaling, so the profile is exactly their `t = 1` slice:
///
/// `P(ell, Y) = -e^{i pi/6} ell^{2/3} int e^{i ell^{2/3} lambda} r(lambda)
///    Ai(e^{i pi/6}(lambda + ell^{1/3} Y)) Ai'(e^{i pi/6} lambda) d lambda
///    + (4 pi)^{-1/2} (Y/2 - i ell/2)
///      exp(-Y^2/4 - i ell Y / 2 - ell^2 / 12)`.
///
/// Verified against the long-time limit of the raw mode march (relative
/// error ~2e-4 at `t = 400`, consistent with the O(1/t) convergence rate).
pub fn profile_hat_contour(ell: f64, y_ss: f64, contour: TContour) -> C {
    assert!(ell != 0.0);
    if ell < 0.0 {
        return profile_hat_contour(-ell, y_ss, contour).conj();
    }
    t2_coefficient(ell, 1.0, y_ss) - t1_coefficient(ell, 1.0, y_ss, contour)
}

// ---------------------------------------------------------------------------
// Crank-Nicolson reference solver in self-scaled mode variables
// ---------------------------------------------------------------------------

/// Graded mesh on `[0, eta_max]`: spacing `d_inner` near the wall data
/// region, geometric stretch (ratio 1.05) to `d_outer` further out.
pub fn graded_mesh(eta_max: f64, d_inner: f64, inner_extent: f64, d_outer: f64) -> Vec<f64> {
    let mut eta = vec![0.0];
    let mut h = d_inner;
    loop {
        let last = *eta.last().unwrap();
        if last >= eta_max {
            break;
        }
        eta.push(last + h);
        if last + h > inner_extent && h < d_outer {
            h = (h * 1.05).min(d_outer);
        }
    }
    eta
}

/// March `d_tau u = d_eta^2 u - i eta u - visc u` (Dirichlet both ends) by
/// Crank-Nicolson on the given mesh; returns `int |u|^2 d eta` sampled at
/// `tau_samples` (non-decreasing) and the final profile.
pub fn cn_scaled_march(
    u0: &[C],
    eta: &[f64],
    visc: f64,
    dtau: f64,
    tau_samples: &[f64],
) -> (Vec<f64>, Vec<C>) {
    let n = eta.len();
    assert_eq!(u0.len(), n);
    let mut u = u0.to_vec();
    let mut norms = Vec::with_capacity(tau_samples.len());
    let mut tau = 0.0;
    // tridiagonal coefficients of the spatial operator on the graded mesh
    let mut lo = vec![C::new(0.0, 0.0); n];
    let mut di = vec![C::new(0.0, 0.0); n];
    let mut hi = vec![C::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        let hm = eta[i] - eta[i - 1];
        let hp = eta[i + 1] - eta[i];
        let denom = hm * hp * (hm + hp);
        lo[i] = C::new(2.0 * hp / denom, 0.0);
        hi[i] = C::new(2.0 * hm / denom, 0.0);
        di[i] = C::new(-2.0 * (hm + hp) / denom - visc, -eta[i]);
    }
    let mut sample_idx = 0;
    // Thomas scratch
    let mut cp = vec![C::new(0.0, 0.0); n];
    let mut dp = vec![C::new(0.0, 0.0); n];
    while sample_idx < tau_samples.len() {
        if tau + 1e-12 >= tau_samples[sample_idx] {
            norms.push(l2_sq_on_mesh(&u, eta));
            sample_idx += 1;
            continue;
        }
        let dt = dtau.min(tau_samples[sample_idx] - tau);
        // rhs = (I + dt/2 A) u
        let mut rhs = vec![C::new(0.0, 0.0); n];
        for i in 1..n - 1 {
            rhs[i] = u[i]
                + 0.5 * dt * (lo[i] * u[i - 1] + di[i] * u[i] + hi[i] * u[i + 1]);
        }
        // solve (I - dt/2 A) u' = rhs, Dirichlet at both ends
        let a = |i: usize| -0.5 * dt * lo[i];
        let b = |i: usize| C::new(1.0, 0.0) - 0.5 * dt * di[i];
        let c = |i: usize| -0.5 * dt * hi[i];
        cp[1] = c(1) / b(1);
        dp[1] = rhs[1] / b(1);
        for i in 2..n - 1 {
            let m = b(i) - a(i) * cp[i - 1];
            cp[i] = c(i) / m;
            dp[i] = (rhs[i] - a(i) * dp[i - 1]) / m;
        }
        u[n - 2] = dp[n - 2];
        for i in (1..n - 2).rev() {
            u[i] = dp[i] - cp[i] * u[i + 1];
        }
        u[0] = C::new(0.0, 0.0);
        u[n - 1] = C::new(0.0, 0.0);
        tau += dt;
    }
    (norms, u)
}

/// Trapezoid `int |u|^2 d eta` on a graded mesh.
pub fn l2_sq_on_mesh(u: &[C], eta: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..eta.len() - 1 {
        let h = eta[i + 1] - eta[i];
        acc += 0.5 * h * (u[i].norm_sqr() + u[i + 1].norm_sqr());
    }
    acc
}

/// Squared `L^2_y` norms of the evolved mode `k` at the requested times,
/// per unit streamwise data factor: data is `g(z)` in physical wall units,
/// evolution includes the `e^{-k^2 t}` viscous factor.
pub fn mode_l2_history<F: Fn(f64) -> C>(
    k: f64,
    g: &F,
    z_sup: f64,
    ts: &[f64],
) -> Vec<f64> {
    let k13 = k.cbrt();
    let k23 = k13 * k13;
    let visc = k * k13; // k^{4/3}, the -k^2 term in scaled time
    // mode is effectively extinct once (|xi_1|/2 + k^{4/3}) tau > ~21
    let tau_dead = 21.0 / (1.169 + visc);
    let tau_all: Vec<f64> = ts.iter().map(|&t| k23 * t).collect();
    let tau_max = tau_all
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .min(tau_dead);
    let eta_data = k13 * z_sup;
    let eta_max = eta_data + 16.0 + 4.0 * tau_max.sqrt();
    let d_inner = (k13 * 0.05).min(0.02).max(1e-4);
    let d_outer = (0.25 / tau_max.max(1.0)).min(0.03);
    let eta = graded_mesh(eta_max, d_inner, eta_data.max(0.2), d_outer);
    let u0: Vec<C> = eta.iter().map(|&e| g(e / k13)).collect();
    let dtau = (0.3 / eta_max).min(0.005);
    let live: Vec<f64> = tau_all.iter().cloned().filter(|&t| t <= tau_max).collect();
    let (norms_eta, _) = cn_scaled_march(&u0, &eta, visc, dtau, &live);
    // ||f(k,.,t)||^2_{L^2_y} = k^{-1/3} int |u|^2 d eta
    let mut out = Vec::with_capacity(ts.len());
    for (i, &tau) in tau_all.iter().enumerate() {
        if tau <= tau_max {
            out.push(norms_eta[i] / k13);
        } else {
            let _ = i;
            out.push(0.0);
        }
    }
    out
}
