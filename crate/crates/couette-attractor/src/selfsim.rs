//! Half-plane solver for the self-similar vorticity equation
//!
//! ```text
//! d_tau Omega = L_t Omega + N_t Omega,      tau = ln(1 + t),
//! L_t = Delta_t + (3/2) X d_X + (1/2) Y d_Y + 5/2 - Y d_X,
//! Delta_t = (1+t)^{-2} d_X^2 + d_Y^2,
//! N_t = nu^{-3/2} (1+t)^{-5/2} (d_Y Delta_t^{-1}Omega d_X Omega
//!                               - d_X Delta_t^{-1}Omega d_Y Omega),
//! ```
//!
//! with a Dirichlet wall at `Y = 0`. The box is periodic in `X` with a
//! damping sponge over the outer 10% (the drift `-Y d_X` would otherwise
//! wrap information around), capped by a second Dirichlet wall at `Y = ly`.
//!
//! Discretization: Fourier in `X`, Dirichlet sine basis in `Y`, so the
//! diffusion `Delta_t` and the Poisson inverse are diagonal; the drift and
//! the quadratic transport are advanced explicitly (Adams–Bashforth 2 inside
//! a Crank–Nicolson diffusion sandwich, or a Strang-split SSP-RK3 variant).
//! Because the vertical derivative of the drift term is evaluated in the
//! sine basis, the vertical first moment is conserved mode-by-mode by the
//! semi-discrete flow, not just in the continuum limit.
//!
//! The explicit drift carries waves of speed up to `|3X/2 - Y|`, so the time
//! step must resolve `k_x,max * (3 lx/2 + ly) dtau = O(1)`; constructors
//! reject steps far beyond that limit.
//!
//! Making the periodic box faithful to the plane needs three more devices,
//! all inert wherever the solution actually lives (the core, where features
//! drift inward). First, the dilation coefficient `3X/2` is flattened to
//! zero across the periodic seam: the raw sawtooth rings under
//! pseudo-spectral products and the ring rides inflow characteristics into
//! the interior. Second, the top of the horizontal spectrum is rolled off
//! smoothly each step: without horizontal diffusion the compression
//! `3X/2 d_X` ratchets content toward the grid cutoff, and a hard cutoff
//! scatters truncation error over the whole period, where the outer-box
//! weight of the diagnostic norms magnifies it. Third, the horizontal mean
//! is given back the `-3/2` dilation compression it loses to periodization
//! (`<S'> = 0` for any periodic `S`): each row of the explicit right side is
//! shifted by `-(3/2) <(1 - S') f>_X`, which vanishes for core-supported
//! fields but restores both the plane's neutral mean-sector dynamics and
//! exact conservation of the vertical first moment when stray content does
//! reach the seam.

use crate::grid::{dy_fd4, dyy_fd4, Grid2, HalfPlaneField, SineModes, SpectralOps};
use crate::kernel::{profile_columns_periodized, BoundaryDensity};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

static EXT_DENSITY: LazyLock<BoundaryDensity> = LazyLock::new(|| {
    BoundaryDensity::extended().expect("long-range boundary density construction")
});

/// Spectral cutoff / taper used when sampling the steady profile on
/// simulation grids; the taper suppresses cutoff ringing that heavy
/// polynomial weights would otherwise amplify.
const PROFILE_K_MAX: f64 = 92.0;
const PROFILE_K_TAPER: f64 = 62.0;

/// Steady profile sampled on (the points of) a simulation grid, periodized
/// over the grid's `X`-period so the reference shares the box's function
/// space (pointwise the difference from the plane profile is at the image
/// level, far below everything measured here).
pub fn profile_on_grid(grid: Grid2) -> HalfPlaneField {
    let cols = profile_columns_periodized(
        &EXT_DENSITY,
        grid.lx,
        &grid.xs(),
        &grid.ys(),
        PROFILE_K_MAX,
        PROFILE_K_TAPER,
    );
    let mut f = HalfPlaneField::zeros(grid);
    for (iy, row) in cols.iter().enumerate() {
        f.v[iy * grid.nx..(iy + 1) * grid.nx].copy_from_slice(row);
    }
    f
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "imex-cn")]
    ImexCn,
    #[serde(rename = "rk3-explicit-diffusion-implicit")]
    Rk3DiffusionImplicit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// Full equation.
    #[default]
    #[serde(rename = "nonlinear")]
    Nonlinear,
    /// Drop the quadratic transport, keep the time-dependent diffusion.
    #[serde(rename = "linear-lt")]
    LinearLt,
    /// Autonomous linear flow (no horizontal diffusion, no transport).
    #[serde(rename = "linear-l")]
    LinearL,
}

/// Initial-data library; every member vanishes at the wall.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params")]
pub enum InitData {
    /// `amp * Y exp(-a X^2 - b Y^2)`
    #[serde(rename = "bump")]
    Bump { a: f64, b: f64, amp: f64 },
    /// Bump rescaled so the grid moment `M2` equals `m2` exactly.
    #[serde(rename = "bump-m2")]
    BumpM2 { a: f64, b: f64, m2: f64 },
    /// Difference of two bumps balanced so the grid moment `M2` vanishes.
    #[serde(rename = "bump-diff")]
    BumpDiff {
        a: f64,
        b: f64,
        a2: f64,
        b2: f64,
        amp: f64,
    },
}

impl InitData {
    pub fn build(&self, grid: Grid2) -> HalfPlaneField {
        let bump = |a: f64, b: f64| {
            HalfPlaneField::from_fn(grid, move |x, y| y * (-a * x * x - b * y * y).exp())
        };
        match *self {
            InitData::Bump { a, b, amp } => {
                let mut f = bump(a, b);
                f.v.iter_mut().for_each(|v| *v *= amp);
                f
            }
            InitData::BumpM2 { a, b, m2 } => {
                let mut f = bump(a, b);
                let (_, _, m2g) = moments(&f);
                let s = m2 / m2g;
                f.v.iter_mut().for_each(|v| *v *= s);
                f
            }
            InitData::BumpDiff { a, b, a2, b2, amp } => {
                let f1 = bump(a, b);
                let f2 = bump(a2, b2);
                let c = moments(&f1).2 / moments(&f2).2;
                f1.lin_comb(amp, &f2, -amp * c)
            }
        }
    }
}

fn default_output_every() -> usize {
    50
}

fn default_sponge() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub nu: f64,
    /// Polynomial weight order for the `L^2(m)` diagnostics; must exceed 5.
    pub m: u32,
    #[serde(rename = "LX")]
    pub lx: f64,
    #[serde(rename = "LY")]
    pub ly: f64,
    #[serde(rename = "NX")]
    pub nx: usize,
    #[serde(rename = "NY")]
    pub ny: usize,
    pub dtau: f64,
    pub tau_end: f64,
    pub scheme: Scheme,
    pub init: InitData,
    /// Steps between diagnostics rows.
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default)]
    pub model: Model,
    #[serde(default = "default_sponge")]
    pub sponge: bool,
}

impl SimConfig {
    pub fn grid(&self) -> Result<Grid2> {
        Grid2::new(self.lx, self.ly, self.nx, self.ny)
    }

    /// Production configuration for the long nonlinear horizon.
    pub fn standard_nonlinear() -> SimConfig {
        SimConfig {
            nu: 1.0,
            m: 6,
            lx: 24.0,
            ly: 16.0,
            nx: 384,
            ny: 256,
            dtau: 7.5e-4,
            tau_end: (201.0f64).ln(),
            scheme: Scheme::Rk3DiffusionImplicit,
            init: InitData::BumpM2 {
                a: 1.0,
                b: 1.0,
                m2: 1.0,
            },
            output_every: 50,
            model: Model::Nonlinear,
            sponge: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.nu > 0.0) {
            return Err(Error::InvalidInput(format!("nu must be > 0 (got {})", self.nu)));
        }
        if self.m <= 5 {
            return Err(Error::InvalidInput(format!(
                "weight order m must exceed 5 (got {})",
                self.m
            )));
        }
        if !(self.dtau > 0.0) || !(self.tau_end > 0.0) {
            return Err(Error::InvalidInput(
                "dtau and tau_end must be positive".into(),
            ));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidInput("output_every must be >= 1".into()));
        }
        let limit = stability_dtau_limit(self.grid()?, self.scheme);
        if self.dtau > limit {
            return Err(Error::InvalidInput(format!(
                "dtau = {:.3e} exceeds the explicit-drift stability limit \
                 ~{:.3e} for this box and scheme; refusing to run into blow-up",
                self.dtau, limit
            )));
        }
        Ok(())
    }
}

/// Explicit-step stability limit: the drift carries X-waves of speed up to
/// `3 lx / 2 + ly` against the resolved wavenumber `pi nx / (2 lx)`. Without
/// horizontal diffusion those modes sit on the imaginary axis, where the
/// Adams-Bashforth 2 amplification exceeds one for every nonzero step (weak
/// instability, ~ exp(mu^3 N / 4) over N steps) — so `imex-cn` is held to a
/// small Courant number and long horizons should use the SSP-RK3 scheme,
/// whose stability region genuinely contains `|mu| <= sqrt(3)`.
pub fn stability_dtau_limit(grid: Grid2, scheme: Scheme) -> f64 {
    let kx_max = std::f64::consts::PI * (grid.nx as f64 / 2.0) / grid.lx;
    let c = match scheme {
        Scheme::ImexCn => 0.5,
        Scheme::Rk3DiffusionImplicit => 1.5,
    };
    c / (kx_max * (1.5 * grid.lx + grid.ly))
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// Solve `Delta_t phi = f` with Dirichlet walls. Inputs that do not decay
/// inside the box (boundary ring comparable to the interior maximum) are
/// rejected, since the capped solve would then be meaningless.
pub fn laplace_inverse_dirichlet(f: &HalfPlaneField, t: f64) -> Result<HalfPlaneField> {
    let g = f.grid;
    let mx = f.max_abs();
    if mx > 0.0 {
        let mut ring: f64 = 0.0;
        for iy in 0..g.rows() {
            let y = g.y(iy);
            for ix in 0..g.nx {
                let x = g.x(ix);
                if x.abs() > 0.92 * g.lx || y > 0.92 * g.ly {
                    ring = ring.max(f.at(iy, ix).abs());
                }
            }
        }
        if ring > 0.1 * mx {
            return Err(Error::InvalidInput(format!(
                "field does not decay inside the box (boundary ring {:.2e} vs max {:.2e})",
                ring, mx
            )));
        }
    }
    let ops = SpectralOps::new(g);
    Ok(ops.poisson_dirichlet(f, (1.0 + t).powi(-2)))
}

fn drift_with(f: &HalfPlaneField, xfac: f64) -> HalfPlaneField {
    let g = f.grid;
    let ops = SpectralOps::new(g);
    let dx = ops.dx(f);
    let dxx = ops.dxx(f);
    let dy = dy_fd4(f);
    let dyy = dyy_fd4(f);
    let mut out = HalfPlaneField::zeros(g);
    for iy in 0..g.rows() {
        let y = g.y(iy);
        for ix in 0..g.nx {
            let x = g.x(ix);
            let i = iy * g.nx + ix;
            out.v[i] = xfac * dxx.v[i]
                + dyy.v[i]
                + (1.5 * x - y) * dx.v[i]
                + 0.5 * y * dy.v[i]
                + 2.5 * f.v[i];
        }
    }
    out
}

/// `L_t Omega` (spectral in `X`, fourth-order differences in `Y`).
pub fn apply_lt(f: &HalfPlaneField, t: f64) -> HalfPlaneField {
    drift_with(f, (1.0 + t).powi(-2))
}

/// `L Omega`: the autonomous long-time limit (no horizontal diffusion).
pub fn apply_l(f: &HalfPlaneField) -> HalfPlaneField {
    drift_with(f, 0.0)
}

/// `N_t Omega`: quadratic transport by the induced velocity field.
pub fn apply_nt(f: &HalfPlaneField, t: f64, nu: f64) -> Result<HalfPlaneField> {
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("nu must be > 0 (got {nu})")));
    }
    let g = f.grid;
    let ops = SpectralOps::new(g);
    let xfac = (1.0 + t).powi(-2);
    let xs = ops.x_spectral(f);
    let modes = ops.sine_from_x(&xs);
    let nl = nonlinear_term(&ops, &xs, &modes, xfac);
    let pref = nu.powf(-1.5) * (1.0 + t).powf(-2.5);
    let mut out = nl;
    out.v.iter_mut().for_each(|v| *v *= pref);
    Ok(out)
}

/// Unscaled transport `d_Y phi d_X f - d_X phi d_Y f` with
/// `phi = (xfac d_X^2 + d_Y^2)^{-1} f`, from prepared spectral data.
fn nonlinear_term(
    ops: &SpectralOps,
    xs: &crate::grid::XSpectral,
    modes: &SineModes,
    xfac: f64,
) -> HalfPlaneField {
    let g = ops.grid();
    // field derivatives
    let mut dxs = crate::grid::XSpectral {
        grid: g,
        c: xs.c.clone(),
    };
    ops.mul_ikx(&mut dxs);
    let dxf = ops.inv_x_spectral(&dxs);
    let dyf = ops.inv_x_spectral(&ops.dy_x_from_sine(modes));
    // stream-function derivatives
    let mut phi = SineModes {
        grid: g,
        c: modes.c.clone(),
    };
    ops.poisson_modes(&mut phi, xfac);
    let mut dxphi_s = ops.x_from_sine(&phi);
    ops.mul_ikx(&mut dxphi_s);
    let dxphi = ops.inv_x_spectral(&dxphi_s);
    let dyphi = ops.inv_x_spectral(&ops.dy_x_from_sine(&phi));
    let mut out = HalfPlaneField::zeros(g);
    for i in 0..out.v.len() {
        out.v[i] = dyphi.v[i] * dxf.v[i] - dxphi.v[i] * dyf.v[i];
    }
    out
}

// ---------------------------------------------------------------------------
// Norms and moments
// ---------------------------------------------------------------------------

/// `L^2(m)` norm by trapezoid quadrature: weight `(1 + X^2 + Y^2)^m`.
pub fn weighted_norm(f: &HalfPlaneField, m: u32) -> f64 {
    weighted_norm_tail(f, m).0
}

/// Weighted norm plus the fraction of its square carried by the outer ring
/// (`|X| > 0.9 lx` or `Y > 0.9 ly`): the box-truncation indicator.
pub fn weighted_norm_tail(f: &HalfPlaneField, m: u32) -> (f64, f64) {
    let g = f.grid;
    let wy = g.wy();
    let dx = g.dx();
    let mut total = 0.0;
    let mut ring = 0.0;
    for iy in 0..g.rows() {
        let y = g.y(iy);
        for ix in 0..g.nx {
            let x = g.x(ix);
            let v = f.at(iy, ix);
            let w = (1.0 + x * x + y * y).powi(m as i32);
            let cell = v * v * w * wy[iy] * dx;
            total += cell;
            if x.abs() > 0.9 * g.lx || y > 0.9 * g.ly {
                ring += cell;
            }
        }
    }
    let frac = if total > 0.0 { ring / total } else { 0.0 };
    (total.sqrt(), frac)
}

/// Weighted distance `|| a - c b ||_{L^2(m)}` with its tail fraction.
pub fn weighted_dist_tail(
    a: &HalfPlaneField,
    b: &HalfPlaneField,
    c: f64,
    m: u32,
) -> (f64, f64) {
    weighted_norm_tail(&a.lin_comb(1.0, b, -c), m)
}

/// Moments `(M, M1, M2) = integral of (1, X, Y) f dX dY`.
pub fn moments(f: &HalfPlaneField) -> (f64, f64, f64) {
    let g = f.grid;
    let wy = g.wy();
    let dx = g.dx();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for iy in 0..g.rows() {
        let y = g.y(iy);
        for ix in 0..g.nx {
            let v = f.at(iy, ix) * wy[iy] * dx;
            m0 += v;
            m1 += g.x(ix) * v;
            m2 += y * v;
        }
    }
    (m0, m1, m2)
}

/// `L^p` norm (trapezoid in `Y`); `p = infinity` is the grid maximum.
pub fn lp_norm(f: &HalfPlaneField, p: f64) -> f64 {
    assert!(p >= 1.0, "need p >= 1");
    if p.is_infinite() {
        return f.max_abs();
    }
    let g = f.grid;
    let wy = g.wy();
    let dx = g.dx();
    let mut acc = 0.0;
    for iy in 0..g.rows() {
        for ix in 0..g.nx {
            acc += f.at(iy, ix).abs().powf(p) * wy[iy] * dx;
        }
    }
    acc.powf(1.0 / p)
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

pub struct Simulator {
    pub cfg: SimConfig,
    pub grid: Grid2,
    ops: SpectralOps,
    pub omega: HalfPlaneField,
    pub tau: f64,
    /// explicit right-hand side at the previous step (Adams–Bashforth memory)
    a_prev: Option<Vec<f64>>,
    /// per-cell multiplicative damping for one step, if the sponge is active
    sponge: Option<Vec<f64>>,
    /// dilation coefficient `1.5 S(X)` with `S` flattened across the seam
    cx: Vec<f64>,
    /// horizontal-mean deficit weights `(1 - S'(X)) / nx` (zero in the core)
    sp1: Vec<f64>,
    /// per-step spectral roll-off factors for the top of the `k_x` band
    xdamp: Vec<f64>,
    blow_limit: f64,
}

/// Dilation coordinate used by the stepper: equals `X` on the inner 85% of
/// the box and tapers (C^2, odd, periodic) to zero at the seam `|X| = lx`.
///
/// The raw coefficient `X` is discontinuous across the periodic seam; a
/// pseudo-spectral product with it rings, and the ring sits on *inflow*
/// characteristics (`dX/dtau = Y - 3X/2` points into the domain near the
/// seam), so seam junk would contaminate the interior. The true solution
/// carries no content near the seam — its features drift inward — so
/// flattening the coefficient there changes nothing physical.
fn seam_flattened_x(x: f64, lx: f64) -> f64 {
    let x0 = 0.85 * lx;
    let ax = x.abs();
    if ax <= x0 {
        return x;
    }
    let w = lx - x0;
    let u = ((ax - x0) / w).min(1.0);
    // quintic Hermite blends: value x0 / slope 1 / curvature 0 at u = 0,
    // all zero at u = 1
    let a = (1.0 - u).powi(3) * (1.0 + 3.0 * u + 6.0 * u * u);
    let b = u * (1.0 - u).powi(3) * (1.0 + 3.0 * u);
    (x0 * a + w * b).copysign(x)
}

/// `d/dX` of [`seam_flattened_x`]: `1` in the core, the blend derivative in
/// the taper (even in `X`, zero period average).
fn seam_flattened_x_deriv(x: f64, lx: f64) -> f64 {
    let x0 = 0.85 * lx;
    let ax = x.abs();
    if ax <= x0 {
        return 1.0;
    }
    let w = lx - x0;
    let u = ((ax - x0) / w).min(1.0);
    (1.0 - u) * (1.0 - u)
        * (1.0 + 2.0 * u - 15.0 * u * u - 30.0 * u * u * (x0 / w))
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Simulator> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let mut omega = cfg.init.build(grid);
        omega.clamp_walls();
        let sponge = if cfg.sponge {
            let mut s = vec![1.0f64; grid.rows() * grid.nx];
            let x0 = 0.9 * grid.lx;
            for iy in 0..grid.rows() {
                for ix in 0..grid.nx {
                    let x = grid.x(ix);
                    if x.abs() > x0 {
                        let u = (x.abs() - x0) / (grid.lx - x0);
                        let sigma = 25.0 * u * u * u;
                        s[iy * grid.nx + ix] = (-cfg.dtau * sigma).exp();
                    }
                }
            }
            Some(s)
        } else {
            None
        };
        let blow_limit = 1e6 * omega.max_abs().max(1.0);
        let cx = (0..grid.nx)
            .map(|ix| 1.5 * seam_flattened_x(grid.x(ix), grid.lx))
            .collect();
        let sp1 = (0..grid.nx)
            .map(|ix| {
                (1.0 - seam_flattened_x_deriv(grid.x(ix), grid.lx)) / grid.nx as f64
            })
            .collect();
        let ops = SpectralOps::new(grid);
        let xdamp = ops.x_rolloff(0.6, 1.0e4, cfg.dtau);
        Ok(Simulator {
            ops,
            cfg,
            grid,
            omega,
            tau: 0.0,
            a_prev: None,
            sponge,
            cx,
            sp1,
            xdamp,
            blow_limit,
        })
    }

    pub fn t(&self) -> f64 {
        self.tau.exp_m1()
    }

    fn xfac(&self, tau: f64) -> f64 {
        match self.cfg.model {
            Model::LinearL => 0.0,
            _ => (-2.0 * tau).exp(),
        }
    }

    /// Everything advanced explicitly: drift, dilation, zeroth-order term,
    /// and (in the nonlinear model) the quadratic transport.
    fn explicit_rhs(&self, f: &HalfPlaneField, tau: f64) -> Vec<f64> {
        let g = self.grid;
        let ops = &self.ops;
        let xs = ops.x_spectral(f);
        let modes = ops.sine_from_x(&xs);
        let mut dxs = crate::grid::XSpectral {
            grid: g,
            c: xs.c.clone(),
        };
        ops.mul_ikx(&mut dxs);
        let dxf = ops.inv_x_spectral(&dxs);
        let dyf = ops.inv_x_spectral(&ops.dy_x_from_sine(&modes));
        let mut rhs = vec![0.0f64; f.v.len()];
        for iy in 0..g.rows() {
            let y = g.y(iy);
            let row = &f.v[iy * g.nx..(iy + 1) * g.nx];
            // restore the dilation compression of the row mean lost to the
            // seam flattening (only the zeroth horizontal mode is touched,
            // and only by content sitting where S' deviates from 1)
            let deficit: f64 =
                1.5 * row.iter().zip(&self.sp1).map(|(v, w)| v * w).sum::<f64>();
            for ix in 0..g.nx {
                let i = iy * g.nx + ix;
                rhs[i] = (self.cx[ix] - y) * dxf.v[i] + 0.5 * y * dyf.v[i]
                    + 2.5 * f.v[i]
                    - deficit;
            }
        }
        if self.cfg.model == Model::Nonlinear {
            let t = tau.exp_m1();
            let pref = self.cfg.nu.powf(-1.5) * (1.0 + t).powf(-2.5);
            let nl = nonlinear_term(ops, &xs, &modes, self.xfac(tau));
            for (r, n) in rhs.iter_mut().zip(&nl.v) {
                *r += pref * n;
            }
        }
        rhs
    }

    fn finish_step(&mut self, next: HalfPlaneField) -> Result<()> {
        let mut next = self.ops.scale_x_modes(&next, &self.xdamp);
        if let Some(s) = &self.sponge {
            for (v, f) in next.v.iter_mut().zip(s) {
                *v *= f;
            }
        }
        next.clamp_walls();
        if !next.all_finite() || next.max_abs() > self.blow_limit {
            return Err(Error::Numerics(format!(
                "step rejected at tau = {:.4}: field diverged",
                self.tau
            )));
        }
        self.omega = next;
        self.tau += self.cfg.dtau;
        Ok(())
    }

    /// Advance one step of `dtau`.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.dtau;
        let xfac_mid = self.xfac(self.tau + 0.5 * dt);
        match self.cfg.scheme {
            Scheme::ImexCn => {
                let a_n = self.explicit_rhs(&self.omega, self.tau);
                let mut e = HalfPlaneField::zeros(self.grid);
                match &self.a_prev {
                    Some(p) => {
                        for ((v, an), ap) in e.v.iter_mut().zip(&a_n).zip(p) {
                            *v = 1.5 * an - 0.5 * ap;
                        }
                    }
                    None => e.v.copy_from_slice(&a_n),
                }
                let next = self.ops.cn_with_forcing(&self.omega, &e, dt, xfac_mid);
                self.a_prev = Some(a_n);
                self.finish_step(next)
            }
            Scheme::Rk3DiffusionImplicit => {
                // Strang sandwich: half diffusion, SSP-RK3 transport, half
                // diffusion (each half is one Crank-Nicolson update).
                let h = self.ops.diffuse_cn(&self.omega, 0.25 * dt, xfac_mid);
                let a1 = self.explicit_rhs(&h, self.tau);
                let mut u1 = h.clone();
                for (v, a) in u1.v.iter_mut().zip(&a1) {
                    *v += dt * a;
                }
                let a2 = self.explicit_rhs(&u1, self.tau + dt);
                let mut u2 = HalfPlaneField::zeros(self.grid);
                for i in 0..u2.v.len() {
                    u2.v[i] = 0.75 * h.v[i] + 0.25 * (u1.v[i] + dt * a2[i]);
                }
                let a3 = self.explicit_rhs(&u2, self.tau + 0.5 * dt);
                let mut u3 = HalfPlaneField::zeros(self.grid);
                for i in 0..u3.v.len() {
                    u3.v[i] = (h.v[i] + 2.0 * (u2.v[i] + dt * a3[i])) / 3.0;
                }
                let next = self.ops.diffuse_cn(&u3, 0.25 * dt, xfac_mid);
                self.finish_step(next)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Trajectories and diagnostics
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct DiagRow {
    pub t: f64,
    pub tau: f64,
    pub l1: f64,
    pub l2: f64,
    pub l2m: f64,
    pub linf: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    /// `|| Omega - M2(Omega_0) profile ||_{L^2(m)}`
    pub dist: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub rows: Vec<DiagRow>,
    pub max_m2_drift: f64,
    /// original-variable `L^1`, i.e. `(nu (1+t))^{-1/2} L^1(Omega)`,
    /// non-increasing across all recorded rows
    pub l1_original_monotone: bool,
    pub max_weighted_tail_fraction: f64,
    /// set when divergence stopped the run early (partial rows kept)
    pub halted: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub tau: f64,
    pub t: f64,
    pub field: HalfPlaneField,
}

#[derive(Debug)]
pub struct RunOutput {
    pub config: SimConfig,
    pub diagnostics: Diagnostics,
    pub snapshots: Vec<Snapshot>,
    pub profile: HalfPlaneField,
    /// reference moment `M2(Omega_0)` used in the distance column
    pub m2_ref: f64,
}

/// Full trajectory with diagnostics every `output_every` steps and snapshots
/// at unit `tau` marks plus the final state.
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    let mut sim = Simulator::new(cfg.clone())?;
    let profile = profile_on_grid(sim.grid);
    let m2_ref = moments(&sim.omega).2;
    let n_steps = (cfg.tau_end / cfg.dtau).ceil() as usize;
    let mut diag = Diagnostics {
        l1_original_monotone: true,
        ..Diagnostics::default()
    };
    let mut snapshots = Vec::new();
    let mut prev_l1_orig = f64::INFINITY;
    let mut next_snap = 1.0f64;
    let record =
        |sim: &Simulator, diag: &mut Diagnostics, prev_l1_orig: &mut f64| {
            let t = sim.t();
            let (l2m, tail1) = weighted_norm_tail(&sim.omega, cfg.m);
            let (dist, tail2) = weighted_dist_tail(&sim.omega, &profile, m2_ref, cfg.m);
            let (m0, m1, m2) = moments(&sim.omega);
            let l1 = lp_norm(&sim.omega, 1.0);
            let row = DiagRow {
                t,
                tau: sim.tau,
                l1,
                l2: lp_norm(&sim.omega, 2.0),
                l2m,
                linf: sim.omega.max_abs(),
                m0,
                m1,
                m2,
                dist,
            };
            if m2_ref != 0.0 {
                diag.max_m2_drift = diag.max_m2_drift.max((m2 - m2_ref).abs() / m2_ref.abs());
            } else {
                diag.max_m2_drift = diag.max_m2_drift.max(m2.abs());
            }
            let l1_orig = l1 / (cfg.nu * (1.0 + t)).sqrt();
            if l1_orig > *prev_l1_orig * (1.0 + 1e-12) {
                diag.l1_original_monotone = false;
            }
            *prev_l1_orig = l1_orig;
            diag.max_weighted_tail_fraction =
                diag.max_weighted_tail_fraction.max(tail1).max(tail2);
            diag.rows.push(row);
        };
    record(&sim, &mut diag, &mut prev_l1_orig);
    for step in 1..=n_steps {
        if let Err(e) = sim.step() {
            diag.halted = Some(e.to_string());
            break;
        }
        if step % cfg.output_every == 0 || step == n_steps {
            record(&sim, &mut diag, &mut prev_l1_orig);
        }
        if sim.tau + 1e-12 >= next_snap {
            snapshots.push(Snapshot {
                tau: sim.tau,
                t: sim.t(),
                field: sim.omega.clone(),
            });
            next_snap += 1.0;
        }
    }
    snapshots.push(Snapshot {
        tau: sim.tau,
        t: sim.t(),
        field: sim.omega.clone(),
    });
    Ok(RunOutput {
        config: cfg.clone(),
        diagnostics: diag,
        snapshots,
        profile,
        m2_ref,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
        (a - b).abs() / b.abs().max(floor)
    }

    fn small_grid() -> Grid2 {
        Grid2::new(6.0, 8.0, 64, 96).unwrap()
    }

    fn small_cfg() -> SimConfig {
        SimConfig {
            nu: 1.0,
            m: 6,
            lx: 6.0,
            ly: 8.0,
            nx: 64,
            ny: 96,
            dtau: 5.0e-4,
            tau_end: 0.05,
            scheme: Scheme::ImexCn,
            init: InitData::Bump {
                a: 1.0,
                b: 0.8,
                amp: 0.7,
            },
            output_every: 10,
            model: Model::Nonlinear,
            sponge: true,
        }
    }

    #[test]
    fn poisson_matches_dense_tridiagonal_oracle() {
        // separable input: one Fourier harmonic times a vertical profile that
        // vanishes at both walls, so a refined second-order two-point solve
        // per harmonic is an independent oracle
        let g = Grid2::new(6.0, 8.0, 32, 256).unwrap();
        let b = 2.0 * std::f64::consts::PI / g.lx * 2.0; // grid harmonic
        let a = 3.0 * std::f64::consts::PI / g.ly;
        let f = HalfPlaneField::from_fn(g, |x, y| (a * y).sin() * (-y).exp() * (b * x).cos());
        let t = 1.0;
        let xfac = (1.0f64 + t).powi(-2);
        // the input is a pure harmonic in X (deliberately non-decaying), so
        // call the grid-level solver directly rather than the guarded entry
        let phi = SpectralOps::new(g).poisson_dirichlet(&f, xfac);

        // dense solve of g'' - xfac b^2 g = sin(aY) e^{-Y} on a 16x finer grid
        let nfine = 4096usize;
        let h = g.ly / nfine as f64;
        let mut sub = vec![0.0; nfine - 1];
        let mut dia = vec![0.0; nfine - 1];
        let mut sup = vec![0.0; nfine - 1];
        let mut rhs = vec![0.0; nfine - 1];
        for j in 1..nfine {
            let y = h * j as f64;
            sub[j - 1] = 1.0 / (h * h);
            sup[j - 1] = 1.0 / (h * h);
            dia[j - 1] = -2.0 / (h * h) - xfac * b * b;
            rhs[j - 1] = (a * y).sin() * (-y).exp();
        }
        for j in 1..nfine - 1 {
            let w = sub[j] / dia[j - 1];
            dia[j] -= w * sup[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        let mut sol = vec![0.0; nfine - 1];
        sol[nfine - 2] = rhs[nfine - 2] / dia[nfine - 2];
        for j in (0..nfine - 2).rev() {
            sol[j] = (rhs[j] - sup[j] * sol[j + 1]) / dia[j];
        }
        let stride = nfine / g.ny; // nested grids
        let mut err = 0.0f64;
        for iy in 1..g.ny {
            let gy = sol[iy * stride - 1];
            for ix in 0..g.nx {
                let oracle = gy * (b * g.x(ix)).cos();
                err = err.max((phi.at(iy, ix) - oracle).abs());
            }
        }
        assert!(err < 1e-6, "dense-oracle mismatch {err:.3e}");
    }

    #[test]
    fn poisson_spectral_residual_and_t_limit() {
        let g = small_grid();
        let ops = SpectralOps::new(g);
        let f = HalfPlaneField::from_fn(g, |x, y| {
            y * (g.ly - y) * (-0.4 * (x * x + 0.3 * y * y)).exp() * (1.0 + 0.3 * x)
        });
        let t = 2.0;
        let xfac = (1.0f64 + t).powi(-2);
        let phi = laplace_inverse_dirichlet(&f, t).unwrap();
        // apply the diagonal operator back, spectrally
        let s = ops.x_spectral(&phi);
        let mut modes = ops.sine_from_x(&s);
        let nx = g.nx;
        for (n, row) in modes.c.chunks_exact_mut(nx).enumerate() {
            let ky2 = (std::f64::consts::PI * (n + 1) as f64 / g.ly).powi(2);
            for (j, z) in row.iter_mut().enumerate() {
                let m = if j <= nx / 2 {
                    j as f64
                } else {
                    j as f64 - nx as f64
                };
                let k2 = (std::f64::consts::PI * m / g.lx).powi(2);
                *z *= -(xfac * k2 + ky2);
            }
        }
        let back = ops.inv_x_spectral(&ops.x_from_sine(&modes));
        let mut num = 0.0;
        let mut den = 0.0;
        for iy in 1..g.ny {
            for ix in 0..g.nx {
                num += (back.at(iy, ix) - f.at(iy, ix)).powi(2);
                den += f.at(iy, ix).powi(2);
            }
        }
        assert!((num / den).sqrt() < 1e-8, "residual {:.3e}", (num / den).sqrt());

        // increasing t decouples X: the solve approaches the pure 1D one
        let lim = SpectralOps::new(g).poisson_dirichlet(&f, 0.0);
        let d10 = laplace_inverse_dirichlet(&f, 10.0)
            .unwrap()
            .lin_comb(1.0, &lim, -1.0)
            .max_abs();
        let d100 = laplace_inverse_dirichlet(&f, 100.0)
            .unwrap()
            .lin_comb(1.0, &lim, -1.0)
            .max_abs();
        assert!(d100 < 0.02 * d10, "no (1+t)^-2 convergence: {d10:.3e} -> {d100:.3e}");

        // non-decaying input is refused
        let bad = HalfPlaneField::from_fn(g, |_, y| y);
        assert!(laplace_inverse_dirichlet(&bad, 1.0).is_err());
    }

    #[test]
    fn apply_lt_matches_symbolic_gaussian() {
        let g = Grid2::new(10.0, 12.0, 128, 384).unwrap();
        let (a, b) = (0.6, 0.25);
        let f = HalfPlaneField::from_fn(g, |x, y| y * (-a * x * x - b * y * y).exp());
        let t = 0.7;
        let xfac = (1.0f64 + t).powi(-2);
        let lf = apply_lt(&f, t);
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for iy in 0..g.rows() {
            let y = g.y(iy);
            for ix in 0..g.nx {
                let x = g.x(ix);
                let e = (-a * x * x - b * y * y).exp();
                let fxx = (4.0 * a * a * x * x - 2.0 * a) * y * e;
                let fy = (1.0 - 2.0 * b * y * y) * e;
                let fyy = (4.0 * b * b * y * y * y - 6.0 * b * y) * e;
                let fx = -2.0 * a * x * y * e;
                let exact = xfac * fxx + fyy + (1.5 * x - y) * fx + 0.5 * y * fy
                    + 2.5 * y * e;
                err = err.max((lf.at(iy, ix) - exact).abs());
                scale = scale.max(exact.abs());
            }
        }
        assert!(err < 1.5e-6 * scale, "symbolic mismatch {err:.3e} (scale {scale:.3e})");
    }

    #[test]
    fn apply_lt_limit_and_linearity() {
        let g = small_grid();
        let f = HalfPlaneField::from_fn(g, |x, y| {
            y * (-0.5 * x * x - 0.4 * y * y).exp() * (1.0 + 0.2 * x)
        });
        let far = apply_lt(&f, 1e8);
        let l = apply_l(&f);
        let diff = far.lin_comb(1.0, &l, -1.0).max_abs();
        assert!(diff < 1e-12, "t -> infinity limit broken: {diff:.3e}");

        let mut f37 = f.clone();
        f37.v.iter_mut().for_each(|v| *v *= 3.7);
        let scaled = apply_l(&f37);
        let mut err = 0.0f64;
        for (s, l) in scaled.v.iter().zip(&l.v) {
            err = err.max((s - 3.7 * l).abs());
        }
        assert!(err < 1e-12 * l.max_abs().max(1.0) * 3.7, "not linear: {err:.3e}");

        let zero = HalfPlaneField::zeros(g);
        assert_eq!(apply_l(&zero).max_abs(), 0.0);
    }

    #[test]
    fn apply_l_annihilates_whole_plane_translate_profile() {
        // (Y - 3X) G_L with G_L = (sqrt 3 / 2 pi) exp(-3X^2 + 3XY - Y^2) is a
        // closed-form element of the operator kernel on the whole plane; the
        // grid restriction exercises every term of the assembled operator
        // (the one-sided wall stencils see a non-Dirichlet field here, so the
        // vertical resolution is what controls the residual)
        let g = Grid2::new(10.0, 10.0, 320, 512).unwrap();
        let c = 3.0f64.sqrt() / (2.0 * std::f64::consts::PI);
        let f = HalfPlaneField::from_fn(g, |x, y| {
            (y - 3.0 * x) * c * (-3.0 * x * x + 3.0 * x * y - y * y).exp()
        });
        let lf = apply_l(&f);
        let mut res = 0.0f64;
        for iy in 0..g.rows() {
            for ix in 0..g.nx {
                res = res.max(lf.at(iy, ix).abs());
            }
        }
        assert!(res < 1e-4 * f.max_abs(), "residual {res:.3e}");
    }

    #[test]
    fn apply_nt_moment_scaling_and_prefactor() {
        let g = small_grid();
        let f = InitData::Bump {
            a: 1.0,
            b: 0.8,
            amp: 0.7,
        }
        .build(g);
        let (t, nu) = (0.8, 0.9);
        let n1 = apply_nt(&f, t, nu).unwrap();

        // vertical first moment of the transport vanishes
        let wy = g.wy();
        let dx = g.dx();
        let (mut mom, mut scale) = (0.0f64, 0.0f64);
        for iy in 0..g.rows() {
            let y = g.y(iy);
            for ix in 0..g.nx {
                mom += y * n1.at(iy, ix) * wy[iy] * dx;
                scale += (y * n1.at(iy, ix)).abs() * wy[iy] * dx;
            }
        }
        assert!(mom.abs() <= 1e-6 * scale, "moment {mom:.3e} vs scale {scale:.3e}");

        // exactly quadratic under amplitude doubling
        let mut f2 = f.clone();
        f2.v.iter_mut().for_each(|v| *v *= 2.0);
        let n2 = apply_nt(&f2, t, nu).unwrap();
        let mut err = 0.0f64;
        for (a, b) in n2.v.iter().zip(&n1.v) {
            err = err.max((a - 4.0 * b).abs());
        }
        assert!(err < 1e-13 * n1.max_abs(), "not quadratic: {err:.3e}");

        // halving nu^{3/2} doubles the output
        let n3 = apply_nt(&f, t, nu * 0.5f64.powf(2.0 / 3.0)).unwrap();
        let mut rel = 0.0f64;
        for (a, b) in n3.v.iter().zip(&n1.v) {
            if b.abs() > 1e-12 * n1.max_abs() {
                rel = rel.max(rel_err(*a, 2.0 * *b, 0.0));
            }
        }
        assert!(rel < 1e-12, "prefactor scaling off by {rel:.3e}");
    }

    #[test]
    fn norms_and_moments_against_closed_forms() {
        let g = Grid2::new(10.0, 14.0, 128, 224).unwrap();
        // f = Y exp(-(X^2+Y^2)/2): half-plane closed forms
        //   ||f||_2^2            = sqrt(pi) * sqrt(pi)/4          = pi/4
        //   int X^2 f^2          = (sqrt(pi)/2) * (sqrt(pi)/4)    = pi/8
        //   int Y^2 f^2          = sqrt(pi) * (3 sqrt(pi)/8)      = 3 pi/8
        //   M  = sqrt(2 pi) * 1,  M1 = 0,  M2 = sqrt(2 pi) * sqrt(pi/2) = pi
        let f = HalfPlaneField::from_fn(g, |x, y| y * (-0.5 * (x * x + y * y)).exp());
        let pi = std::f64::consts::PI;
        let l2_exact = (pi / 4.0).sqrt();
        assert!(rel_err(lp_norm(&f, 2.0), l2_exact, 0.0) < 1e-10);
        let w1_exact = (pi / 4.0 + pi / 8.0 + 3.0 * pi / 8.0).sqrt();
        assert!(
            rel_err(weighted_norm(&f, 1), w1_exact, 0.0) < 1e-6,
            "weighted norm {} vs {}",
            weighted_norm(&f, 1),
            w1_exact
        );
        assert!(weighted_norm(&f, 3) > weighted_norm(&f, 2));
        assert!((weighted_norm(&f, 0) - lp_norm(&f, 2.0)).abs() < 1e-12);
        let (m0, m1, m2) = moments(&f);
        // the mass integrand Y e^{-Y^2/2} has nonzero slope at the wall, so
        // plain trapezoid carries an O(dy^2) bias there; M2's integrand is
        // even in Y and converges beyond all orders
        assert!(rel_err(m0, (2.0 * pi).sqrt(), 0.0) < 1e-3, "M = {m0}");
        assert!(m1.abs() < 1e-12, "symmetric field must have M1 = 0 (got {m1:.3e})");
        assert!(rel_err(m2, pi, 0.0) < 1e-9, "M2 {m2} vs exact {pi}");
        assert!(lp_norm(&f, f64::INFINITY) > 0.0);
    }

    #[test]
    fn step_self_convergence_is_second_order() {
        for scheme in [Scheme::ImexCn, Scheme::Rk3DiffusionImplicit] {
            let run_to = |dtau: f64| {
                let mut cfg = small_cfg();
                cfg.scheme = scheme;
                cfg.dtau = dtau;
                cfg.init = InitData::Bump {
                    a: 1.0,
                    b: 0.8,
                    amp: 0.7,
                };
                let mut sim = Simulator::new(cfg).unwrap();
                let n = (0.04 / dtau).round() as usize;
                for _ in 0..n {
                    sim.step().unwrap();
                }
                sim.omega
            };
            let f1 = run_to(8.0e-4);
            let f2 = run_to(4.0e-4);
            let f3 = run_to(2.0e-4);
            let e1 = f1.lin_comb(1.0, &f2, -1.0).max_abs();
            let e2 = f2.lin_comb(1.0, &f3, -1.0).max_abs();
            let order = (e1 / e2).log2();
            assert!(
                order > 1.7,
                "{scheme:?}: self-convergence order {order:.2} (e1 {e1:.2e}, e2 {e2:.2e})"
            );
        }
    }

    #[test]
    fn linear_flow_is_nu_independent() {
        let mut cfg1 = small_cfg();
        cfg1.model = Model::LinearLt;
        cfg1.tau_end = 0.01;
        let mut cfg2 = cfg1.clone();
        cfg2.nu = 7.3;
        let mut s1 = Simulator::new(cfg1).unwrap();
        let mut s2 = Simulator::new(cfg2).unwrap();
        for _ in 0..20 {
            s1.step().unwrap();
            s2.step().unwrap();
        }
        let d = s1.omega.lin_comb(1.0, &s2.omega, -1.0).max_abs();
        assert!(d == 0.0, "nu leaked into the linear flow: {d:.3e}");
    }

    #[test]
    fn nonlinear_perturbation_scales_linearly_with_amplitude() {
        // with the amplitude scaled down 100x, (nonlinear - linear)/amp^2
        // is invariant: first-order agreement of the two flows
        let deviation = |amp: f64| {
            let mut cfg = small_cfg();
            cfg.tau_end = 0.02;
            cfg.init = InitData::Bump {
                a: 1.0,
                b: 0.8,
                amp,
            };
            let mut nl = Simulator::new(cfg.clone()).unwrap();
            cfg.model = Model::LinearLt;
            let mut li = Simulator::new(cfg).unwrap();
            for _ in 0..40 {
                nl.step().unwrap();
                li.step().unwrap();
            }
            nl.omega.lin_comb(1.0, &li.omega, -1.0).max_abs() / amp
        };
        let d1 = deviation(0.5);
        let d2 = deviation(0.005);
        // quadratic correction: deviation/amp shrinks ~ linearly in amp
        let ratio = d2 / d1 * 100.0;
        assert!(
            (0.5..2.0).contains(&ratio),
            "nonlinear correction not first-order-small: ratio {ratio:.3}"
        );
    }

    #[test]
    fn short_run_keeps_m2_and_original_l1_monotone() {
        let mut cfg = small_cfg();
        cfg.tau_end = 0.4;
        cfg.dtau = 4.0e-4;
        cfg.init = InitData::BumpM2 {
            a: 1.0,
            b: 0.8,
            m2: 1.0,
        };
        let out = run(&cfg).unwrap();
        let d = &out.diagnostics;
        assert!(d.halted.is_none());
        assert!(d.max_m2_drift < 1e-8, "M2 drift {:.3e}", d.max_m2_drift);
        assert!(d.l1_original_monotone, "original-variable L1 increased");
        assert!(d.rows.iter().all(|r| r.t.is_finite()
            && r.l1.is_finite()
            && r.l2m.is_finite()
            && r.dist.is_finite()));
        // Dirichlet rows stay pinned
        for s in &out.snapshots {
            assert_eq!(s.field.wall_max_abs(), 0.0);
        }
        // a too-coarse step is refused up front
        let mut bad = small_cfg();
        bad.dtau = 0.05;
        assert!(Simulator::new(bad).is_err());
        // m <= 5 is refused
        let mut badm = small_cfg();
        badm.m = 5;
        assert!(Simulator::new(badm).is_err());
    }

    #[test]
    fn linear_run_contracts_toward_profile() {
        // autonomous linear model on a reduced box: the weighted distance to
        // M2(Omega_0) * profile must visibly shrink over one unit of tau, and
        // doubling the vertical resolution must not move the answer by more
        // than a few percent (the distance is grid-converged)
        let cfg = |ny: usize| SimConfig {
            nu: 1.0,
            m: 6,
            lx: 12.0,
            ly: 10.0,
            nx: 128,
            ny,
            dtau: 1.5e-3,
            tau_end: 1.2,
            scheme: Scheme::Rk3DiffusionImplicit,
            init: InitData::BumpM2 {
                a: 1.0,
                b: 1.0,
                m2: 1.0,
            },
            output_every: 100,
            model: Model::LinearL,
            sponge: true,
        };
        let out = run(&cfg(128)).unwrap();
        let d = &out.diagnostics;
        assert!(d.halted.is_none());
        let d0 = d.rows.first().unwrap().dist;
        let d1 = d.rows.last().unwrap().dist;
        assert!(
            d1 < 0.6 * d0,
            "no contraction: dist {d0:.4e} -> {d1:.4e} over tau in [0, 1.2]"
        );
        assert!(d.max_weighted_tail_fraction < 0.05);
        let out2 = run(&cfg(256)).unwrap();
        let d1b = out2.diagnostics.rows.last().unwrap().dist;
        assert!(
            (d1 - d1b).abs() < 0.05 * d1b,
            "dist not grid-converged: {d1:.5e} vs {d1b:.5e}"
        );
    }

    #[test]
    fn bump_variants_hit_their_moments() {
        let g = small_grid();
        let f = InitData::BumpM2 {
            a: 0.9,
            b: 0.7,
            m2: 1.0,
        }
        .build(g);
        assert!((moments(&f).2 - 1.0).abs() < 1e-12);
        let d = InitData::BumpDiff {
            a: 1.0,
            b: 0.9,
            a2: 0.5,
            b2: 0.45,
            amp: 1.0,
        }
        .build(g);
        assert!(moments(&d).2.abs() < 1e-12 * lp_norm(&d, 1.0));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SimConfig::standard_nonlinear();
        let s = serde_json::to_string_pretty(&cfg).unwrap();
        assert!(s.contains("\"LX\""));
        let back: SimConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.nx, cfg.nx);
        assert_eq!(back.scheme, cfg.scheme);
        let parsed: SimConfig = serde_json::from_str(
            r#"{"nu":1.0,"m":6,"LX":6.0,"LY":8.0,"NX":64,"NY":96,
                "dtau":0.0004,"tau_end":0.1,
                "scheme":"rk3-explicit-diffusion-implicit",
                "init":{"type":"bump","params":{"a":1.0,"b":1.0,"amp":0.5}}}"#,
        )
        .unwrap();
        assert_eq!(parsed.scheme, Scheme::Rk3DiffusionImplicit);
        assert_eq!(parsed.output_every, 50);
        assert!(serde_json::from_str::<SimConfig>(r#"{"nu":1.0}"#).is_err());
    }
}
