//! Constructive certificates of input redundancy: a nonzero increment that
//! leaves the output unchanged and keeps the perturbed trajectory admissible.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analysis::rho;
use crate::error::{Error, Result};
use crate::geometry::{adapted_basis, GramianTransfer, SystemQuadruple};
use crate::linalg::{kernel, rational};
use crate::trajectory::{
    admissible, interior_window, simulate, ConstraintSet, FloatSystem, Grid, Interpolation, SampledSignal,
};

/// Default safety factor applied to the margin-based scaling.
pub const DEFAULT_BETA: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    /// Bound on the output deviation of a verified increment.
    pub tol: f64,
    /// Absolute threshold for constraint membership.
    pub membership_tol: f64,
    pub beta: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            membership_tol: 1e-9,
            beta: DEFAULT_BETA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Route {
    KernelBump,
    LoopThroughR { x_hat_i: Vec<f64>, t_mid: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub y_sup_diff: f64,
    pub admissible_both: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IRCertificate {
    pub window: (f64, f64),
    pub u_hat: SampledSignal,
    pub alpha: f64,
    pub route: Route,
    pub verification: Verification,
}

impl IRCertificate {
    /// The certified increment `α û`.
    pub fn u_tilde(&self) -> SampledSignal {
        self.u_hat.scale(self.alpha)
    }
}

fn window_nodes(window: (f64, f64), grid: &Grid) -> Result<(usize, usize)> {
    let (t1, t2) = window;
    if !(t2 > t1) {
        return Err(Error::EmptyWindow);
    }
    let i1 = grid
        .node_index(t1)
        .ok_or_else(|| Error::InvalidSignal(format!("window start {t1} is not a grid node")))?;
    let i2 = grid
        .node_index(t2)
        .ok_or_else(|| Error::InvalidSignal(format!("window end {t2} is not a grid node")))?;
    if i2 < i1 + 2 {
        return Err(Error::EmptyWindow);
    }
    Ok((i1, i2))
}

/// `û(t) = h(t) k` with `k` the first canonical basis vector of
/// `ker B ∩ ker D` and `h` the unit hat on the window.
pub fn synthesize_kernel_bump(
    b: &crate::linalg::RationalMatrix,
    d: &crate::linalg::RationalMatrix,
    window: (f64, f64),
    grid: &Grid,
) -> Result<SampledSignal> {
    let kern = kernel(&b.vstack(d));
    if kern.is_zero() {
        return Err(Error::RhoZero);
    }
    let (i1, i2) = window_nodes(window, grid)?;
    let k = DVector::from_iterator(b.ncols(), kern.basis().column(0).iter().map(rational::to_f64));
    let half = (i2 - i1) as f64 / 2.0;
    let mid = i1 as f64 + half;
    let values = (0..=grid.steps)
        .map(|i| &k * (1.0 - (i as f64 - mid).abs() / half).max(0.0))
        .collect();
    SampledSignal::new(grid.t0, grid.dt, values, Interpolation::PiecewiseLinear)
}

/// Output-null loop `0 → x̂ → 0` through `R(Σ)` inside the window.
///
/// The transfer runs on `R(Σ)` coordinates augmented with an integrator on
/// the reparametrized input `w`, so `w` starts and ends at zero and the
/// increment is continuous. States are taken from the closed-form solution.
/// Returns `(û, x̂)`.
pub fn synthesize_loop_through_r(
    sys: &SystemQuadruple,
    window: (f64, f64),
    grid: &Grid,
) -> Result<(SampledSignal, SampledSignal)> {
    let ab = adapted_basis(sys)?;
    let k = ab.ta.ncols();
    if k == 0 {
        return Err(Error::RZero);
    }
    let (i1, i2) = window_nodes(window, grid)?;
    let i_mid = i1 + (i2 - i1) / 2;
    let a11 = ab.a11.to_f64();
    let b1 = ab.b1.to_f64();
    let q = b1.ncols();

    let mut aug_a = DMatrix::zeros(k + q, k + q);
    aug_a.view_mut((0, 0), (k, k)).copy_from(&a11);
    aug_a.view_mut((0, k), (k, q)).copy_from(&b1);
    let mut aug_b = DMatrix::zeros(k + q, q);
    aug_b.view_mut((k, 0), (q, q)).fill_with_identity();

    let mut target = DVector::zeros(k + q);
    target[0] = 1.0;
    let out = GramianTransfer::new(&aug_a, &aug_b, &DVector::zeros(k + q), &target, (i_mid - i1) as f64 * grid.dt)?;
    let (_, there) = out.sample(i_mid - i1);
    let at_mid = there.last().expect("nonempty").clone();
    let back = GramianTransfer::new(&aug_a, &aug_b, &at_mid, &DVector::zeros(k + q), (i2 - i_mid) as f64 * grid.dt)?;
    let (_, home) = back.sample(i2 - i_mid);

    let ta = ab.ta.to_f64();
    let feedback = ab.friend.to_f64() * &ta;
    let l = ab.input_map.to_f64();
    let m = sys.m();
    let n = sys.n();
    let mut u_vals = vec![DVector::zeros(m); grid.steps + 1];
    let mut x_vals = vec![DVector::zeros(n); grid.steps + 1];
    for (offset, z) in there.iter().enumerate().chain(home.iter().enumerate().skip(1).map(|(j, z)| (j + i_mid - i1, z))) {
        let phi = z.rows(0, k);
        let w = z.rows(k, q);
        u_vals[i1 + offset] = &feedback * phi + &l * w;
        x_vals[i1 + offset] = &ta * phi;
    }
    let u_hat = SampledSignal::new(grid.t0, grid.dt, u_vals, Interpolation::PiecewiseLinear)?;
    let x_hat = SampledSignal::new(grid.t0, grid.dt, x_vals, Interpolation::PiecewiseLinear)?;
    Ok((u_hat, x_hat))
}

/// `β · min(r_u / sup‖û‖, r_x / sup‖x̂‖)`, the state term only when `rho = 0`.
pub fn compute_alpha(
    r_u_min: f64,
    r_x_min: f64,
    u_hat: &SampledSignal,
    x_hat: Option<&SampledSignal>,
    rho: usize,
) -> Result<f64> {
    compute_alpha_with_beta(r_u_min, r_x_min, u_hat, x_hat, rho, DEFAULT_BETA)
}

pub fn compute_alpha_with_beta(
    r_u_min: f64,
    r_x_min: f64,
    u_hat: &SampledSignal,
    x_hat: Option<&SampledSignal>,
    rho: usize,
    beta: f64,
) -> Result<f64> {
    if !(r_u_min > 0.0) {
        return Err(Error::ZeroMargin);
    }
    let u_sup = u_hat.sup_norm();
    if u_sup == 0.0 {
        return Err(Error::ZeroIncrement);
    }
    let mut alpha = r_u_min / u_sup;
    if rho == 0 {
        let x_hat = x_hat.ok_or(Error::ZeroMargin)?;
        if !(r_x_min > 0.0) {
            return Err(Error::ZeroMargin);
        }
        let x_sup = x_hat.sup_norm();
        if x_sup > 0.0 {
            alpha = alpha.min(r_x_min / x_sup);
        }
    }
    Ok(if alpha.is_finite() { beta * alpha } else { 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IncrementCheck {
    pub in_u_tilde: bool,
    pub y_sup_diff: f64,
    pub admissible: bool,
    pub first_violation: Option<f64>,
}

/// Simulates the increment from rest and the perturbed trajectory from `x0`.
#[allow(clippy::too_many_arguments)]
pub fn verify_increment(
    sys: &FloatSystem,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    x0: &DVector<f64>,
    u: &SampledSignal,
    u_tilde: &SampledSignal,
    tol: f64,
    membership_tol: f64,
) -> Result<IncrementCheck> {
    u.ensure_same_grid(u_tilde)?;
    let response = simulate(sys, &DVector::zeros(sys.n()), u_tilde)?;
    let y_sup_diff = response.y.sup_norm();
    let perturbed = simulate(sys, x0, &u.add(u_tilde)?)?;
    let adm = admissible(&perturbed, u_set, x_set, membership_tol)?;
    Ok(IncrementCheck {
        in_u_tilde: y_sup_diff <= tol && adm.ok,
        y_sup_diff,
        admissible: adm.ok,
        first_violation: adm.first_violation,
    })
}

/// End-to-end certification of `(x0, y)`, with `y` produced by `u_nominal`.
pub fn certify_ir_pair(
    sys: &SystemQuadruple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    x0: &DVector<f64>,
    u_nominal: &SampledSignal,
    opts: &CertifyOptions,
) -> Result<IRCertificate> {
    let fsys = FloatSystem::from(sys);
    let nominal = simulate(&fsys, x0, u_nominal)?;
    let adm = admissible(&nominal, u_set, x_set, opts.membership_tol)?;
    if let Some(time) = adm.first_violation {
        return Err(Error::NotAdmissibleNominal { time });
    }
    let rho = rho(sys.b(), sys.d())?;
    let window = interior_window(&nominal, u_set, x_set, rho, opts.membership_tol)?.ok_or(Error::NoInteriorWindow)?;
    let grid = u_nominal.grid();
    let span = (window.t1, window.t2);
    let (u_hat, x_hat, route) = if rho > 0 {
        (synthesize_kernel_bump(sys.b(), sys.d(), span, &grid)?, None, Route::KernelBump)
    } else {
        let (u_hat, x_hat) = synthesize_loop_through_r(sys, span, &grid)?;
        let i_mid = window.start + (window.end - window.start) / 2;
        let route = Route::LoopThroughR {
            x_hat_i: x_hat.values()[i_mid].iter().copied().collect(),
            t_mid: grid.time(i_mid),
        };
        (u_hat, Some(x_hat), route)
    };
    let alpha = compute_alpha_with_beta(window.r_u_min, window.r_x_min, &u_hat, x_hat.as_ref(), rho, opts.beta)?;
    let check = verify_increment(
        &fsys,
        u_set,
        x_set,
        x0,
        u_nominal,
        &u_hat.scale(alpha),
        opts.tol,
        opts.membership_tol,
    )?;
    if !check.in_u_tilde {
        return Err(Error::VerificationFailed {
            y_sup_diff: check.y_sup_diff,
            admissible: check.admissible,
        });
    }
    Ok(IRCertificate {
        window: span,
        u_hat,
        alpha,
        route,
        verification: Verification {
            y_sup_diff: check.y_sup_diff,
            admissible_both: check.admissible,
        },
    })
}
