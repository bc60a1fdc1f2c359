//! Steady self-similar profile built from its wall boundary density.
//!
//! In similarity variables, the steady vorticity profile is determined mode
//! by mode through the partial Fourier transform `f(k, eta)` (Fourier in both
//! plane directions on the half-plane extension), which satisfies a transport
//! equation along characteristics,
//!
//! ```text
//! (3/2) k d_k f + (eta/2 - k) d_eta f + (eta^2 - 1/2) f = g(k),
//! ```
//!
//! forced by a one-dimensional wall density `g`. Integrating along
//! characteristics (for `k > 0`; odd symmetry `f(-k,-eta) = -f(k,eta)` covers
//! the rest) gives
//!
//! ```text
//! f(k, eta) = -2i (k+eta) e^{-(k+eta)^2 + k (k+eta) - k^2/3}
//!             + k^{1/3} int_0^tau e^{phi(u)} h(tau - u) du ,   tau = k^{2/3},
//! phi(u)    = -( (u + eta/sqrt(tau))^3 - (eta/sqrt(tau))^3 ) / 3 ,
//! ```
//!
//! where `g(k) = k h(k^{2/3})` for `k >= 0`. The no-penetration condition at
//! the wall (vanishing `eta`-average of `f`) forces `h` to solve the weakly
//! singular first-kind Volterra equation
//!
//! ```text
//! int_0^tau (tau - s)^{-1/2} e^{-(tau-s)^3/12} h(s) ds
//!     = i tau^{1/2} e^{-tau^3/12} .
//! ```
//!
//! Two independent solvers are provided and cross-validated:
//! * Bromwich inversion of the Laplace-transform ratio
//!   `L[h](lam) = i L[H_{1/2}](lam) / L[H_{-1/2}](lam)` on a vertical line,
//!   after removing the exact large-`lam` tail (whose inverse is the Taylor
//!   polynomial of `h` at zero, known in closed form);
//! * product-integration marching of the Volterra equation itself, seeded by
//!   the exact Taylor expansion near `s = 0`.
//!
//! The Taylor data comes from a rational recursion: `h` is smooth at the
//! origin with `h(0) = i/2`, only every third derivative nonzero, and
//! `d^{3M} h(0) = (i/2) a_0^{3M}` for coefficient rows generated by
//! [`taylor_tables`].
//!
//! The profile itself is recovered by inverse Fourier transform. The
//! `eta`-direction inverse is carried out in closed form per boundary slice
//! (a shifted Gaussian integral), which removes the slowly decaying
//! `O(1/eta^2)` tail of `f` before any numerical truncation; only the
//! `k`-inverse is done by quadrature. See [`profile_hat_kernel`] and
//! [`build_kernel`].

use crate::quad::GlRule;
use crate::specfun::{airy_ai, airy_aip, airy_zero, laplace_h, LaplaceMethod};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::PI;
use std::sync::LazyLock;

type C = Complex64;

static GL16: LazyLock<GlRule> = LazyLock::new(|| GlRule::new(16));
static GL12: LazyLock<GlRule> = LazyLock::new(|| GlRule::new(12));

fn br(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// Exact Taylor data at s = 0
// ---------------------------------------------------------------------------

/// Rational coefficient rows for the derivatives of the boundary density at
/// the origin. All rows are pure-imaginary multiples of the stored rationals
/// (`a = i * stored`). Row `a^{3M}` has length `2M + 1` and yields
/// `d^{3M} h(0) = (i/2) a_0^{3M}`; the intermediate rows `a^{3M+1}`,
/// `a^{3M+2}` are the recursion's internal state.
pub struct TaylorTables {
    /// `families[M] = [a^{3M}, a^{3M+1}, a^{3M+2}]`.
    pub families: Vec<[Vec<BigRational>; 3]>,
}

/// One derivative order: same length; `new_j = -(1/4) a_j + (7/2 + 3j) a_{j+1}`.
fn step_shift(prev: &[BigRational]) -> Vec<BigRational> {
    let q = br(-1, 4);
    (0..prev.len())
        .map(|j| {
            let mut v = &q * &prev[j];
            if j + 1 < prev.len() {
                v += br(6 * j as i64 + 7, 2) * &prev[j + 1];
            }
            v
        })
        .collect()
}

/// One derivative order: length grows by one;
/// `new_j = ((6j + c)/2) a_j - (1/4) a_{j-1}` (missing entries are zero).
fn step_raise(prev: &[BigRational], c: i64) -> Vec<BigRational> {
    let q = br(-1, 4);
    (0..=prev.len())
        .map(|j| {
            let mut v = BigRational::zero();
            if j < prev.len() {
                v = br(6 * j as i64 + c, 2) * &prev[j];
            }
            if j >= 1 {
                v += &q * &prev[j - 1];
            }
            v
        })
        .collect()
}

/// Generate the coefficient families for `M = 0..=m_max`.
pub fn taylor_tables(m_max: usize) -> TaylorTables {
    let mut families = Vec::with_capacity(m_max + 1);
    let mut a0 = vec![BigRational::one()];
    for _ in 0..=m_max {
        let a1 = step_shift(&a0);
        let a2 = step_raise(&a1, 5);
        let next = step_raise(&a2, 3);
        families.push([a0, a1, a2]);
        a0 = next;
    }
    TaylorTables { families }
}

/// The nonzero derivative values: `d^{3m} h(0) = i r_m` with the returned
/// rationals `r_m`, `m = 0..=m_max` (`r_0 = 1/2`).
pub fn h_derivatives(m_max: usize) -> Vec<BigRational> {
    taylor_tables(m_max)
        .families
        .iter()
        .map(|f| &f[0][0] * br(1, 2))
        .collect()
}

/// Truncated Taylor evaluation of the boundary density near `s = 0`:
/// `h(s) ~ i * sum_{m<=m_max} r_m s^{3m} / (3m)!`.
#[derive(Clone, Debug)]
pub struct HTaylor {
    /// Coefficients of `s^{3m}` in the imaginary part.
    pub c: Vec<f64>,
}

impl HTaylor {
    pub fn new(m_max: usize) -> HTaylor {
        let mut c = Vec::with_capacity(m_max + 1);
        let mut fact = 1.0f64;
        for (m, r) in h_derivatives(m_max).iter().enumerate() {
            if m > 0 {
                for i in (3 * m - 2)..=(3 * m) {
                    fact *= i as f64;
                }
            }
            c.push(r.to_f64().expect("Taylor coefficient overflows f64") / fact);
        }
        HTaylor { c }
    }

    /// Imaginary part `sum c_m s^{3m}` (the value itself is `i` times this).
    pub fn eval_r(&self, s: f64) -> f64 {
        let u = s * s * s;
        let mut acc = 0.0;
        for &cm in self.c.iter().rev() {
            acc = acc * u + cm;
        }
        acc
    }

    pub fn eval(&self, s: f64) -> C {
        C::new(0.0, self.eval_r(s))
    }
}

// ---------------------------------------------------------------------------
// Laplace-transform route
// ---------------------------------------------------------------------------

/// Laplace transform of the boundary density: the ratio
/// `i L[H_{1/2}](lam) / L[H_{-1/2}](lam)` with `H_kappa(t) = t^kappa
/// e^{-t^3/12}`. Analytic for `Re lam > 0` (the denominator transform has no
/// zeros there); decays like `i/(2 lam)`.
pub fn laplace_ratio(lam: C) -> Result<C> {
    let num = laplace_h(0.5, lam, LaplaceMethod::Quadrature)?;
    let den = laplace_h(-0.5, lam, LaplaceMethod::Quadrature)?;
    Ok(C::i() * num / den)
}

/// Bromwich inversion of `laplace_ratio` on the line `Re lam = 1/2`, with the
/// three-term large-`lam` tail `(1/2)/lam - (15/32)/lam^4 + (1695/512)/lam^7`
/// removed under the integral and its exact inverse (the degree-6 Taylor
/// polynomial) added back. The remainder decays like `lam^{-10}`, so a fixed
/// node table on `omega in [0, 40]` reaches ~1e-12 truncation error.
struct HInverter {
    sigma: f64,
    poly: HTaylor,
    /// (omega, quadrature weight, remainder value at sigma + i omega)
    nodes: Vec<(f64, f64, C)>,
}

impl HInverter {
    /// `fine` halves the frequency panels; needed once `e^{i omega s}` turns
    /// over ~16 radians per unit panel (evaluations beyond s ~ 16).
    fn new(fine: bool) -> Result<HInverter> {
        let sigma = 0.5;
        let poly = HTaylor::new(2);
        let r: Vec<f64> = h_derivatives(2)
            .iter()
            .map(|x| x.to_f64().unwrap())
            .collect();
        let rule = GlRule::new(16);
        let mut bounds: Vec<f64> = if fine {
            let mut b: Vec<f64> = (0..=16).map(|i| 0.25 * i as f64).collect();
            b.extend((9..=80).map(|i| 0.5 * i as f64));
            b
        } else {
            (0..=8).map(|i| 0.5 * i as f64).collect()
        };
        if !fine {
            bounds.extend((5..=40).map(|i| i as f64));
        }
        let mut nodes = Vec::with_capacity(16 * (bounds.len() - 1));
        for win in bounds.windows(2) {
            let c = 0.5 * (win[0] + win[1]);
            let hw = 0.5 * (win[1] - win[0]);
            for (&x, &w) in rule.x.iter().zip(&rule.w) {
                let omega = c + hw * x;
                let lam = C::new(sigma, omega);
                let ratio = laplace_h(0.5, lam, LaplaceMethod::Quadrature)?
                    / laplace_h(-0.5, lam, LaplaceMethod::Quadrature)?;
                let li = lam.inv();
                let l3 = li * li * li;
                let tail = li * (r[0] + l3 * (r[1] + l3 * r[2]));
                nodes.push((omega, hw * w, ratio - tail));
            }
        }
        Ok(HInverter { sigma, poly, nodes })
    }

    /// Imaginary part of h(s) (h is a pure-imaginary-valued function).
    fn eval_r(&self, s: f64) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for &(omega, w, rem) in &self.nodes {
            acc += w * C::from_polar(1.0, omega * s) * rem;
        }
        self.poly.eval_r(s) + (self.sigma * s).exp() / PI * acc.re
    }
}

// ---------------------------------------------------------------------------
// Boundary density
// ---------------------------------------------------------------------------

/// Which solver produced a [`BoundaryDensity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HMethod {
    /// Bromwich inversion of the transform ratio (tail-subtracted line rule).
    LaplaceInversion,
    /// Product-integration march of the Volterra equation, Taylor-seeded.
    VolterraMarch,
}

/// The wall boundary density `h` tabulated on a uniform grid over
/// `[0, s_max]` with a natural cubic spline for evaluation in between.
/// `h` is pure-imaginary valued with `h(0) = i/2`.
#[derive(Clone, Debug)]
pub struct BoundaryDensity {
    pub method: HMethod,
    pub ds: f64,
    pub h: Vec<C>,
    d2: Vec<C>,
}

impl BoundaryDensity {
    pub fn s_max(&self) -> f64 {
        self.ds * (self.h.len() - 1) as f64
    }

    /// Spline evaluation; `s` must lie in `[0, s_max]` (tiny overshoot from
    /// roundoff is clamped).
    pub fn eval(&self, s: f64) -> C {
        let n = self.h.len();
        debug_assert!(
            (-1e-12..=self.s_max() + 1e-9).contains(&s),
            "boundary density queried outside [0, s_max]: s = {s}"
        );
        let t = (s / self.ds).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let b = t - i as f64;
        let a = 1.0 - b;
        let w = self.ds * self.ds / 6.0;
        a * self.h[i]
            + b * self.h[i + 1]
            + w * ((a * a * a - a) * self.d2[i] + (b * b * b - b) * self.d2[i + 1])
    }

    /// Standard resolution. The range covers `|k| <= 62`, which the grid
    /// builder needs: near the wall the profile slices decay only like
    /// `exp(-1.169 |k|^{2/3})` (the leading spectral gap), so the inverse
    /// `k`-integral must reach `|k| ~ 60` before its tail drops below 1e-7.
    pub fn standard() -> Result<BoundaryDensity> {
        solve_h(HMethod::LaplaceInversion, 15.75, 6300)
    }

    /// Longer-range density (s <= 20.25, i.e. wavenumbers up to ~92) for
    /// far-field-sensitive weighted diagnostics.
    pub fn extended() -> Result<BoundaryDensity> {
        solve_h(HMethod::LaplaceInversion, 20.25, 8100)
    }
}

/// Natural cubic spline second derivatives on a uniform grid.
fn natural_spline_d2(y: &[C], ds: f64) -> Vec<C> {
    let n = y.len();
    let mut d2 = vec![C::new(0.0, 0.0); n];
    if n < 3 {
        return d2;
    }
    let m = n - 2;
    let mut diag = vec![4.0f64; m];
    let mut rhs: Vec<C> = (1..=m)
        .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (ds * ds))
        .collect();
    for i in 1..m {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        let prev = rhs[i - 1];
        rhs[i] -= prev * w;
    }
    d2[m] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        d2[i + 1] = (rhs[i] - d2[i + 2]) / diag[i];
    }
    d2
}

/// Solve for the boundary density on `[0, s_max]` with `n` uniform intervals.
///
/// * `LaplaceInversion`: evaluates the Bromwich integral per node
///   (spectrally accurate; ~1e-9 absolute).
/// * `VolterraMarch`: seeds `s <= 1/2` with the degree-9 Taylor expansion and
///   marches the product-integration discretization of the wall equation
///   (each step freezes the cubic convolution factor at the panel midpoint
///   and treats `h` as piecewise linear; `O(ds^2)` accurate).
pub fn solve_h(method: HMethod, s_max: f64, n: usize) -> Result<BoundaryDensity> {
    if !(s_max > 0.0) || n < 8 {
        return Err(Error::InvalidInput(format!(
            "need s_max > 0 and n >= 8 (got s_max={s_max}, n={n})"
        )));
    }
    let ds = s_max / n as f64;
    if ds > 0.02 {
        return Err(Error::InvalidInput(format!(
            "boundary-density grid too coarse: ds = {ds:.4} > 0.02"
        )));
    }
    let h = match method {
        HMethod::LaplaceInversion => {
            let inv = HInverter::new(s_max > 16.0)?;
            (0..=n)
                .map(|i| C::new(0.0, inv.eval_r(i as f64 * ds)))
                .collect::<Vec<_>>()
        }
        HMethod::VolterraMarch => {
            let taylor = HTaylor::new(3);
            let seed_end = ((0.5 / ds).floor() as usize).min(n);
            let mut vals: Vec<C> = (0..=seed_end)
                .map(|i| taylor.eval(i as f64 * ds))
                .collect();
            // per-panel moments of u^{-1/2} and u^{1/2}, and the frozen
            // midpoint cubic factor, indexed by panel distance m = 1..=n
            let mut i0 = vec![0.0; n + 1];
            let mut i1 = vec![0.0; n + 1];
            let mut ef = vec![0.0; n + 1];
            for m in 1..=n {
                let ua = (m - 1) as f64 * ds;
                let ub = m as f64 * ds;
                i0[m] = 2.0 * (ub.sqrt() - ua.sqrt());
                i1[m] = (2.0 / 3.0) * (ub * ub.sqrt() - ua * ua.sqrt());
                let um = 0.5 * (ua + ub);
                ef[m] = (-um * um * um / 12.0).exp();
            }
            let denom = ef[1] * ds.sqrt() * (4.0 / 3.0);
            for nn in (seed_end + 1)..=n {
                let tau = nn as f64 * ds;
                let mut acc = C::new(0.0, 0.0);
                for j in 0..nn - 1 {
                    let m = nn - j; // panel distance: u in [(m-1) ds, m ds]
                    let c1 = (vals[j] - vals[j + 1]) / ds;
                    let c0 = vals[j + 1] - c1 * ((m - 1) as f64 * ds);
                    acc += ef[m] * (c0 * i0[m] + c1 * i1[m]);
                }
                let rhs = C::new(0.0, tau.sqrt() * (-tau * tau * tau / 12.0).exp());
                let h_new =
                    (rhs - acc - ef[1] * ds.sqrt() * (2.0 / 3.0) * vals[nn - 1]) / denom;
                vals.push(h_new);
            }
            vals
        }
    };
    let d2 = natural_spline_d2(&h, ds);
    Ok(BoundaryDensity { method, ds, h, d2 })
}

/// Residual of the wall constraint at `tau`, in the singularity-free form
/// (substituting `tau - s = v^2`):
/// `2 int_0^sqrt(tau) e^{-v^6/12} h(tau - v^2) dv - i tau^{1/2} e^{-tau^3/12}`.
pub fn volterra_residual(h: &BoundaryDensity, tau: f64) -> C {
    let sq = tau.sqrt();
    let gl = &*GL16;
    let mut pts = vec![0.0];
    let mut p = 0.0;
    while p < sq {
        p = (p + 0.2).min(sq);
        pts.push(p);
    }
    let mut acc = C::new(0.0, 0.0);
    for win in pts.windows(2) {
        acc += gl.integrate(win[0], win[1], |v| {
            2.0 * (-v.powi(6) / 12.0).exp() * h.eval(tau - v * v)
        });
    }
    acc - C::new(0.0, sq * (-tau * tau * tau / 12.0).exp())
}

// ---------------------------------------------------------------------------
// Wall forcing, propagation kernel, transform of the profile
// ---------------------------------------------------------------------------

/// Wall forcing `g(k) = k h(k^{2/3})` for `k >= 0`, extended oddly.
pub fn g_of_k(h: &BoundaryDensity, k: f64) -> C {
    if k == 0.0 {
        return C::new(0.0, 0.0);
    }
    let a = k.abs();
    k.signum() * a * h.eval(a.cbrt() * a.cbrt())
}

/// Exponent of the characteristic propagation kernel, `xi = l/k in (0, 1]`:
/// `-(k+eta)^2 (1 - xi^{2/3}) + k (k+eta) (1 - xi^{4/3}) - k^2 (1 - xi^2)/3`.
/// Bounded above by `-(1 - xi^{2/3}) eta^2 / 4`.
pub fn kernel_exponent(k: f64, eta: f64, xi: f64) -> f64 {
    let p = k + eta;
    let u = xi.cbrt() * xi.cbrt();
    -(p * p) * (1.0 - u) + k * p * (1.0 - u * u) - k * k * (1.0 - xi * xi) / 3.0
}

/// The propagation kernel `K(k, eta, xi) = xi^{-1/3} exp(kernel_exponent)`.
pub fn kernel_k(k: f64, eta: f64, xi: f64) -> f64 {
    kernel_exponent(k, eta, xi).exp() / xi.cbrt()
}

/// Partial Fourier transform `f(k, eta)` of the profile. Pure-imaginary
/// valued; odd under `(k, eta) -> (-k, -eta)`. Requires `|k|^{2/3} <=
/// s_max` of the supplied boundary density.
pub fn fhat(h: &BoundaryDensity, k: f64, eta: f64) -> C {
    if k == 0.0 {
        return C::new(0.0, -2.0 * eta * (-eta * eta).exp());
    }
    if k < 0.0 {
        return -fhat(h, -k, -eta);
    }
    let k13 = k.cbrt();
    let tau = k13 * k13;
    assert!(
        tau <= h.s_max() + 1e-9,
        "fhat: k = {k} needs boundary density out to s = {tau}"
    );
    let p = k + eta;
    let base = C::new(0.0, -2.0 * p) * (-p * p + k * p - k * k / 3.0).exp();
    // phi(u) = -((u + eta/k^{1/3})^3 - (eta/k^{1/3})^3)/3, monotone decreasing
    let e0 = eta / k13;
    let phi = |u: f64| ((e0 * e0 * e0) - (u + e0) * (u + e0) * (u + e0)) / 3.0;
    let gl = &*GL16;
    let mut acc = C::new(0.0, 0.0);
    let mut p0 = 0.0;
    let mut w = (tau / 64.0).min(1.0 / (1.0 + eta * eta / tau));
    while p0 < tau {
        let p1 = (p0 + w).min(tau);
        acc += gl.integrate(p0, p1, |u| phi(u).exp() * h.eval(tau - u));
        p0 = p1;
        w = (w * 2.0).min(0.5);
        if phi(p0) < -46.0 {
            break;
        }
    }
    base + k13 * acc
}

/// Integrate `f(k, .)` over `eta in [-l_cut, l_cut]` numerically and add the
/// closed-form boundary-layer tails for `|eta| > l_cut` (shifted-Gaussian
/// integrals expressed through `erfc`). Returns `(moment, sup |f| over the
/// sampled nodes)`. The moment vanishes identically when `h` solves the wall
/// equation exactly, so its size measures the solver residual. Requires
/// `l_cut > k/2 > 0`.
pub fn fhat_eta_moment(h: &BoundaryDensity, k: f64, l_cut: f64) -> (C, f64) {
    assert!(k > 0.0 && l_cut > 0.5 * k);
    let gl = &*GL16;
    let mut sup = 0.0f64;
    let n_panels = (2.0 * l_cut / 0.25).ceil() as usize;
    let dw = 2.0 * l_cut / n_panels as f64;
    let mut moment = C::new(0.0, 0.0);
    for i in 0..n_panels {
        let a = -l_cut + i as f64 * dw;
        moment += gl.integrate(a, a + dw, |eta| {
            let v = fhat(h, k, eta);
            sup = sup.max(v.norm());
            v
        });
    }
    // tails: sum of the two half-line eta-integrals of the boundary part
    let k13 = k.cbrt();
    let tau = k13 * k13;
    let sqt = tau.sqrt();
    let v_star = (sqt / l_cut).min(sqt);
    let mut pts = vec![0.0, 0.5 * v_star];
    let mut p = 0.5 * v_star;
    while p < sqt {
        p = (p * 2.0).min(sqt);
        pts.push(p);
    }
    let mut tail = C::new(0.0, 0.0);
    for win in pts.windows(2) {
        tail += gl.integrate(win[0], win[1], |v| {
            let gp = (v / sqt) * (l_cut + k * v * v / (2.0 * tau));
            let gm = (v / sqt) * (l_cut - k * v * v / (2.0 * tau));
            h.eval(tau - v * v) * (-v.powi(6) / 12.0).exp() * (erfc(gp) + erfc(gm))
        });
    }
    moment += (PI * tau).sqrt() * k13 * tail;
    (moment, sup)
}

/// Complementary error function (double-precision: Taylor series below 1.5,
/// Lentz continued fraction above).
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / PI.sqrt() * sum
    } else if x > 27.0 {
        0.0
    } else {
        let tiny = 1e-300;
        let mut fv = x;
        let mut cv = x;
        let mut dv = 0.0;
        for n in 1..300 {
            let an = n as f64 / 2.0;
            dv = x + an * dv;
            if dv.abs() < tiny {
                dv = tiny;
            }
            dv = 1.0 / dv;
            cv = x + an / cv;
            if cv.abs() < tiny {
                cv = tiny;
            }
            let delta = cv * dv;
            fv *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / PI.sqrt() / fv
    }
}

// ---------------------------------------------------------------------------
// Profile slices and the position-space field
// ---------------------------------------------------------------------------

/// Fourier-in-the-plane slice `P(k, Y)` of the profile: the inverse
/// `eta`-transform of `f(k, .)` at wall-normal height `Y >= 0`, computed with
/// the `eta`-integral in closed form per boundary slice:
///
/// ```text
/// P(k,Y) = (Y - ik)/(2 sqrt(pi)) e^{-Y^2/4 - ikY/2 - k^2/12}
///        + (k^{2/3}/sqrt(pi)) int_0^sqrt(tau)
///              h(tau - v^2) e^{-v^6/12 - Y^2 tau/(4 v^2)} e^{-i k Y v^2/(2 tau)} dv .
/// ```
///
/// Satisfies `P(-k, Y) = conj P(k, Y)` and `P(k, 0) = 0` up to the wall
/// residual of `h`.
pub fn profile_hat_kernel(h: &BoundaryDensity, k: f64, y: f64) -> C {
    let rt_pi = PI.sqrt();
    if k == 0.0 {
        return C::new(y / (2.0 * rt_pi) * (-y * y / 4.0).exp(), 0.0);
    }
    if k < 0.0 {
        return profile_hat_kernel(h, -k, y).conj();
    }
    let k13 = k.cbrt();
    let tau = k13 * k13;
    let sqt = tau.sqrt();
    let base = (C::new(y, -k) / (2.0 * rt_pi))
        * C::new(-y * y / 4.0 - k * k / 12.0, -k * y / 2.0).exp();
    let gl = &*GL16;
    let mut acc = C::new(0.0, 0.0);
    let mut p = 0.0;
    let mut w = sqt / 64.0;
    while p < sqt {
        let cap = 7.0 * tau / (k * y.abs() * p + 1e-12);
        let step = w.min(cap).max(1e-4 * sqt);
        let q = (p + step).min(sqt);
        // the layer factor grows with v, so a panel whose right edge is dead
        // is dead throughout
        if y * y * tau / (4.0 * q * q) < 46.0 {
            acc += gl.integrate(p, q, |v| {
                let re = -v.powi(6) / 12.0 - y * y * tau / (4.0 * v * v);
                let ph = -k * y * v * v / (2.0 * tau);
                h.eval(tau - v * v) * C::from_polar(re.exp(), ph)
            });
        }
        p = q;
        w *= 2.0;
    }
    base + (k13 * k13 / rt_pi) * acc
}

/// Rectangular output grid for [`build_kernel`]. `xs` spans
/// `[-x_max, x_max]` with `nx` points, `ys` spans `[0, y_max]` with `ny`
/// points (both inclusive, uniform); the `k`-inverse uses Gauss panels on
/// `[0, k_max]`.
#[derive(Clone, Copy, Debug)]
pub struct KernelGrid {
    pub x_max: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub k_max: f64,
}

impl Default for KernelGrid {
    fn default() -> Self {
        KernelGrid { x_max: 16.0, y_max: 16.0, nx: 512, ny: 512, k_max: 62.0 }
    }
}

/// The profile sampled on a grid, with its basic integrity diagnostics.
#[derive(Clone, Debug)]
pub struct KernelProfile {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `field[iy][ix]`, real-valued.
    pub field: Vec<Vec<f64>>,
    /// Second moment `int int Y field dX dY` over the upper half-plane
    /// (grid Simpson sum plus the closed-form tail above `y_max`); the exact
    /// value is 1.
    pub m2: f64,
    /// Largest `|field|` on the wall row `Y = 0` (should vanish).
    pub wall_abs_max: f64,
    pub field_abs_max: f64,
    /// Relative residual of the steady similarity operator
    /// `d_Y^2 + (3/2) X d_X + (1/2) Y d_Y + 5/2 - Y d_X` on the grid
    /// (exact `d_X` from the transform table, second-order differences in Y),
    /// normalized by the sum of the term norms.
    pub steady_residual: f64,
}

struct PTable {
    ks: Vec<f64>,
    ws: Vec<f64>,
    /// `p[iy][ik]`
    p: Vec<Vec<C>>,
}

fn p_table(h: &BoundaryDensity, ys: &[f64], k_max: f64) -> PTable {
    let gl = &*GL12;
    let n_panels = (k_max / 0.5).ceil() as usize;
    let dk = k_max / n_panels as f64;
    let mut ks = Vec::with_capacity(n_panels * gl.x.len());
    let mut ws = Vec::with_capacity(ks.capacity());
    for i in 0..n_panels {
        let c = (i as f64 + 0.5) * dk;
        for (&x, &w) in gl.x.iter().zip(&gl.w) {
            ks.push(c + 0.5 * dk * x);
            ws.push(0.5 * dk * w);
        }
    }
    let p = ys
        .iter()
        .map(|&y| ks.iter().map(|&k| profile_hat_kernel(h, k, y)).collect())
        .collect();
    PTable { ks, ws, p }
}

/// `field[iy][ix] = (1/pi) Re int_0^{k_max} P(k, y) e^{i k x} dk` and the
/// matching `X`-derivative (`ik` under the integral).
fn fields_from_table(pt: &PTable, xs: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let nk = pt.ks.len();
    let mut cos_t = vec![vec![0.0f64; xs.len()]; nk];
    let mut sin_t = vec![vec![0.0f64; xs.len()]; nk];
    for ik in 0..nk {
        for (ix, &x) in xs.iter().enumerate() {
            let (s, c) = (pt.ks[ik] * x).sin_cos();
            cos_t[ik][ix] = c;
            sin_t[ik][ix] = s;
        }
    }
    let mut field = vec![vec![0.0f64; xs.len()]; pt.p.len()];
    let mut dxf = vec![vec![0.0f64; xs.len()]; pt.p.len()];
    for (iy, row) in pt.p.iter().enumerate() {
        for ik in 0..nk {
            let pw = row[ik] * pt.ws[ik];
            let (pr, pi) = (pw.re / PI, pw.im / PI);
            let kk = pt.ks[ik];
            let (ct, st) = (&cos_t[ik], &sin_t[ik]);
            let (frow, drow) = (&mut field[iy], &mut dxf[iy]);
            for ix in 0..xs.len() {
                // Re(P e^{ikx}) and Re(ik P e^{ikx})
                frow[ix] += pr * ct[ix] - pi * st[ix];
                drow[ix] -= kk * (pi * ct[ix] + pr * st[ix]);
            }
        }
    }
    (field, dxf)
}

/// Composite Simpson weights for `n` uniformly spaced points (falls back to a
/// 3/8 block when the interval count is odd).
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        return vec![0.5 * h, 0.5 * h];
    }
    let mut start = 0;
    if (n - 1) % 2 == 1 {
        // 3/8 rule on the first three intervals (n >= 4 here)
        if n == 3 {
            return vec![h / 3.0, 4.0 * h / 3.0, h / 3.0];
        }
        let c = 3.0 * h / 8.0;
        w[0] += c;
        w[1] += 3.0 * c;
        w[2] += 3.0 * c;
        w[3] += c;
        start = 3;
    }
    let mut i = start;
    while i + 2 < n {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    w
}

/// Evaluate the profile on an arbitrary rectangular grid (used by the
/// bundled builder and by the simulation module for initial data and
/// distance diagnostics).
pub fn profile_columns(
    h: &BoundaryDensity,
    xs: &[f64],
    ys: &[f64],
    k_max: f64,
) -> Vec<Vec<f64>> {
    fields_from_table(&p_table(h, ys, k_max), xs).0
}

/// Profile rows with the spectral integrand rolled off smoothly (cos^2) over
/// `[k_taper, k_max]` instead of cut sharply. A sharp cutoff leaves an
/// oscillatory far-field floor that decays only like `1/|X|`; heavily
/// weighted norms amplify it. The taper trades it for a floor localized near
/// the wall strip `|X| ~ Y/2`, harmless under polynomial weights.
pub fn profile_columns_tapered(
    h: &BoundaryDensity,
    xs: &[f64],
    ys: &[f64],
    k_max: f64,
    k_taper: f64,
) -> Vec<Vec<f64>> {
    assert!(
        k_taper > 0.0 && k_taper < k_max,
        "taper must start inside (0, k_max)"
    );
    let mut pt = p_table(h, ys, k_max);
    let width = k_max - k_taper;
    for (ik, &k) in pt.ks.iter().enumerate() {
        if k > k_taper {
            let u = (k - k_taper) / width;
            let c = (0.5 * PI * u).cos();
            pt.ws[ik] *= c * c;
        }
    }
    fields_from_table(&pt, xs).0
}

/// Profile periodized over the horizontal period `2 lx`: by Poisson
/// summation, `sum_j field(X + 2 lx j, Y)` equals the same synthesis with the
/// `k`-integral replaced by the trapezoid sum over the box wavenumbers
/// `k_n = pi n / lx` (half weight at `n = 0`), tapered identically.
///
/// This is the exactly consistent reference state for simulations on an
/// `X`-periodic box. Because the profile is horizontally localized, the
/// image terms are negligible and the periodization agrees with the plane
/// field pointwise; its discrete value is nevertheless preferable because
/// its zeroth horizontal Fourier coefficient is exactly
/// `(Y / 2 sqrt(pi)) e^{-Y^2/4} / (2 lx)` -- the stationary horizontal-mean
/// layer of the box dynamics -- rather than a quadrature approximation of
/// it.
pub fn profile_columns_periodized(
    h: &BoundaryDensity,
    lx: f64,
    xs: &[f64],
    ys: &[f64],
    k_max: f64,
    k_taper: f64,
) -> Vec<Vec<f64>> {
    assert!(lx > 0.0 && k_taper > 0.0 && k_taper < k_max);
    let dk = PI / lx;
    let n = (k_max / dk).floor() as usize;
    let ks: Vec<f64> = (0..=n).map(|i| i as f64 * dk).collect();
    let ws: Vec<f64> = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let base = if i == 0 { 0.5 * dk } else { dk };
            if k > k_taper {
                let u = (k - k_taper) / (k_max - k_taper);
                let c = (0.5 * PI * u).cos();
                base * c * c
            } else {
                base
            }
        })
        .collect();
    let p = ys
        .iter()
        .map(|&y| ks.iter().map(|&k| profile_hat_kernel(h, k, y)).collect())
        .collect();
    fields_from_table(&PTable { ks, ws, p }, xs).0
}

/// Build the profile on `grid` with integrity diagnostics.
pub fn build_kernel(h: &BoundaryDensity, grid: &KernelGrid) -> Result<KernelProfile> {
    if grid.nx < 8 || grid.ny < 8 || !(grid.x_max > 0.0) || !(grid.y_max > 0.0) {
        return Err(Error::InvalidInput("kernel grid too small".into()));
    }
    if grid.k_max.cbrt() * grid.k_max.cbrt() > h.s_max() + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "k_max = {} needs boundary density out to s = {:.3} (have {:.3})",
            grid.k_max,
            grid.k_max.cbrt() * grid.k_max.cbrt(),
            h.s_max()
        )));
    }
    let xs: Vec<f64> = (0..grid.nx)
        .map(|i| -grid.x_max + 2.0 * grid.x_max * i as f64 / (grid.nx - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..grid.ny)
        .map(|i| grid.y_max * i as f64 / (grid.ny - 1) as f64)
        .collect();
    let pt = p_table(h, &ys, grid.k_max);
    let (field, dxf) = fields_from_table(&pt, &xs);

    // Row-wise X-integrals are taken in transform space (exact for the
    // reconstructed band: int_{-xm}^{xm} e^{ikX} dX = 2 sin(k xm)/k), which
    // keeps the moment independent of the X-sampling density.
    let wy = simpson_weights(ys.len(), ys[1] - ys[0]);
    let mut m2 = 0.0;
    for (iy, prow) in pt.p.iter().enumerate() {
        let mut rowsum = 0.0;
        for (ik, p) in prow.iter().enumerate() {
            rowsum += pt.ws[ik] * p.re * 2.0 * (pt.ks[ik] * grid.x_max).sin()
                / pt.ks[ik];
        }
        m2 += wy[iy] * ys[iy] * rowsum / PI;
    }
    // closed-form tail above y_max: the X-integral of the profile is exactly
    // (Y/(2 sqrt(pi))) e^{-Y^2/4}, so the missing second-moment mass is
    let a = grid.y_max;
    m2 += a / PI.sqrt() * (-a * a / 4.0).exp() + erfc(0.5 * a);

    let wall_abs_max = field[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let field_abs_max = field
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let steady_residual = residual_from_parts(&xs, &ys, &field, &dxf);

    Ok(KernelProfile {
        xs,
        ys,
        field,
        m2,
        wall_abs_max,
        field_abs_max,
        steady_residual,
    })
}

fn residual_from_parts(
    xs: &[f64],
    ys: &[f64],
    field: &[Vec<f64>],
    dxf: &[Vec<f64>],
) -> f64 {
    let hy = ys[1] - ys[0];
    let mut r2 = 0.0;
    let mut t2 = [0.0f64; 5];
    for iy in 1..ys.len() - 1 {
        for ix in 0..xs.len() {
            let dyy = (field[iy + 1][ix] - 2.0 * field[iy][ix] + field[iy - 1][ix])
                / (hy * hy);
            let dy = (field[iy + 1][ix] - field[iy - 1][ix]) / (2.0 * hy);
            let terms = [
                dyy,
                1.5 * xs[ix] * dxf[iy][ix],
                0.5 * ys[iy] * dy,
                2.5 * field[iy][ix],
                -ys[iy] * dxf[iy][ix],
            ];
            let r: f64 = terms.iter().sum();
            r2 += r * r;
            for (a, t) in t2.iter_mut().zip(terms) {
                *a += t * t;
            }
        }
    }
    let denom: f64 = t2.iter().map(|a| a.sqrt()).sum();
    r2.sqrt() / denom
}

// ---------------------------------------------------------------------------
// Candidate eigenfunction expansion of the profile slices
// ---------------------------------------------------------------------------

/// `n`-th term (1-based) of the candidate mode expansion of `P(k, Y)`:
/// for `k > 0`,
/// `k^{2/3} e^{i pi/6} e^{e^{i pi/3} xi_n k^{2/3}} Ai(e^{i pi/6} k^{1/3} Y + xi_n) / Ai'(xi_n)`,
/// extended to `k < 0` by conjugation. Whether the full series sums to
/// `P(k, Y)` is an open question; the partial sums are reported, not gated.
pub fn conjecture_term(k: f64, y: f64, n: usize) -> C {
    if k == 0.0 {
        return C::new(0.0, 0.0);
    }
    if k < 0.0 {
        return conjecture_term(-k, y, n).conj();
    }
    let xi = airy_zero(n);
    let k13 = k.cbrt();
    let k23 = k13 * k13;
    let rot6 = C::from_polar(1.0, PI / 6.0);
    let rot3 = C::from_polar(1.0, PI / 3.0);
    let aipn = airy_aip(C::new(xi, 0.0));
    let z = rot6 * (k13 * y) + xi;
    k23 * rot6 * (rot3 * (xi * k23)).exp() * airy_ai(z) / aipn
}

/// Partial sums `S_1..S_{n_terms}` of the candidate expansion at `(k, y)`.
pub fn conjecture_partial_sums(k: f64, y: f64, n_terms: usize) -> Vec<C> {
    let mut acc = C::new(0.0, 0.0);
    (1..=n_terms)
        .map(|n| {
            acc += conjecture_term(k, y, n);
            acc
        })
        .collect()
}

/// Cesaro average of the first `n_terms` partial sums.
pub fn conjecture_cesaro(k: f64, y: f64, n_terms: usize) -> C {
    let sums = conjecture_partial_sums(k, y, n_terms);
    sums.iter().sum::<C>() / sums.len() as f64
}

/// Position-space single term
/// `f_n(X, Y) = (1/pi) Re int_0^inf e^{i k X} conjecture_term(k, Y, n) dk`
/// (real-valued by the conjugate symmetry in `k`). Each such term is
/// annihilated by the steady similarity operator.
pub fn conjecture_position_term(n: usize, x: f64, y: f64) -> f64 {
    let xi = airy_zero(n).abs();
    // k-decay e^{xi_n k^{2/3}/2}: truncate at 42 e-folds, integrate in
    // q = k^{1/3} to absorb the k^{2/3} cusp at the origin
    let q_cap = (84.0 / xi).sqrt();
    let gl = &*GL16;
    let mut acc = C::new(0.0, 0.0);
    let mut p = 0.0;
    while p < q_cap {
        // phase rate: d/dq [q^3 x + (sqrt(3)/2) xi q^2] = 3 q^2 x + sqrt(3) xi q
        let rate = 3.0 * p * p * x.abs() + 3.0f64.sqrt() * xi * p;
        let step = (7.0 / (rate + 1.0)).clamp(0.02, 0.25);
        let q = (p + step).min(q_cap);
        acc += gl.integrate(p, q, |qq| {
            let k = qq * qq * qq;
            3.0 * qq * qq * conjecture_term(k, y, n) * C::from_polar(1.0, k * x)
        });
        p = q;
    }
    acc.re / PI
}
