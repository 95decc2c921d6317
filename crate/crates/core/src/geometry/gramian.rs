//! Finite-time state transfer with the minimum-energy input.
//!
//! For `φ' = Aφ + Bw` on `[0, T]`, the input
//! `w(t) = Bᵀ exp(Aᵀ(T−t)) W(T)⁻¹ (φ_f − exp(AT) φ_0)` with the reachability
//! Gramian `W(T)` drives `φ_0` to `φ_f`. Everything here is floating point.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_dim, Error, Result};
use crate::trajectory::{Interpolation, SampledSignal};

/// Reciprocal condition numbers below this are treated as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// `W(T) = ∫₀ᵀ exp(Aτ) B Bᵀ exp(Aᵀτ) dτ` via the block exponential
/// `exp([[−A, BBᵀ], [0, Aᵀ]] T) = [[·, G], [0, Φᵀ]]`, `W = Φ G`.
pub fn reachability_gramian(a: &DMatrix<f64>, b: &DMatrix<f64>, horizon: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&(-a * horizon));
    big.view_mut((0, n), (n, n)).copy_from(&(b * b.transpose() * horizon));
    big.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * horizon));
    let e = big.exp();
    let g = e.view((0, n), (n, n)).into_owned();
    let phi = e.view((n, n), (n, n)).transpose();
    let w = phi * g;
    (&w + w.transpose()) * 0.5
}

/// Ratio of the smallest to the largest eigenvalue of a symmetric PSD matrix.
fn rcond_symmetric(w: &DMatrix<f64>) -> f64 {
    let eig = w.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().copied().fold(0.0, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        0.0
    } else {
        (min / max).max(0.0)
    }
}

/// A solved transfer problem; evaluates the input and the exact state.
#[derive(Clone, Debug)]
pub struct GramianTransfer {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    phi0: DVector<f64>,
    horizon: f64,
    /// `W(T)⁻¹ (φ_f − exp(AT) φ_0)`.
    lambda: DVector<f64>,
    rcond: f64,
}

impl GramianTransfer {
    pub fn new(
        a: &DMatrix<f64>,
        b: &DMatrix<f64>,
        phi0: &DVector<f64>,
        phif: &DVector<f64>,
        horizon: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        ensure_dim("transfer A", n, a.ncols())?;
        ensure_dim("transfer B", n, b.nrows())?;
        ensure_dim("transfer start", n, phi0.len())?;
        ensure_dim("transfer target", n, phif.len())?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidSignal(format!("transfer horizon must be positive, got {horizon}")));
        }
        let w = reachability_gramian(a, b, horizon);
        let rcond = rcond_symmetric(&w);
        if n > 0 && rcond < RCOND_THRESHOLD {
            return Err(Error::SingularGramian { rcond });
        }
        let drift = (a * horizon).exp() * phi0;
        let rhs = phif - drift;
        let lambda = match w.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => w.lu().solve(&rhs).ok_or(Error::SingularGramian { rcond })?,
        };
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            phi0: phi0.clone(),
            horizon,
            lambda,
            rcond,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Input at local time `t ∈ [0, T]`.
    pub fn input_at(&self, t: f64) -> DVector<f64> {
        let e = (self.a.transpose() * (self.horizon - t)).exp();
        self.b.transpose() * (e * &self.lambda)
    }

    /// Joint generator of state and costate: `φ' = Aφ + BBᵀμ`, `μ' = −Aᵀμ`.
    fn joint(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.a.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&(&self.b * self.b.transpose()));
        m.view_mut((n, n), (n, n)).copy_from(&(-self.a.transpose()));
        let mu0 = (self.a.transpose() * self.horizon).exp() * &self.lambda;
        let mut z0 = DVector::zeros(2 * n);
        z0.rows_mut(0, n).copy_from(&self.phi0);
        z0.rows_mut(n, n).copy_from(&mu0);
        (m, z0)
    }

    /// State at local time `t`, from the closed-form solution.
    pub fn state_at(&self, t: f64) -> DVector<f64> {
        let n = self.a.nrows();
        let (m, z0) = self.joint();
        ((m * t).exp() * z0).rows(0, n).into_owned()
    }

    /// Input and state at `steps + 1` equally spaced nodes on `[0, T]`.
    pub fn sample(&self, steps: usize) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let n = self.a.nrows();
        let (m, z0) = self.joint();
        let dt = self.horizon / steps as f64;
        let step = (m * dt).exp();
        let mut z = z0;
        let mut inputs = Vec::with_capacity(steps + 1);
        let mut states = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            if k > 0 {
                z = &step * &z;
            }
            states.push(z.rows(0, n).into_owned());
            inputs.push(self.b.transpose() * z.rows(n, n));
        }
        (inputs, states)
    }
}

/// Minimum-energy transfer input sampled with step `dt`; `T / dt` must be an
/// integer up to rounding.
pub fn gramian_transfer_input(
    a11: &DMatrix<f64>,
    b1: &DMatrix<f64>,
    phi_a0: &DVector<f64>,
    phi_af: &DVector<f64>,
    horizon: f64,
    dt: f64,
) -> Result<SampledSignal> {
    let steps = grid_steps(horizon, dt)?;
    let tr = GramianTransfer::new(a11, b1, phi_a0, phi_af, horizon)?;
    let (inputs, _) = tr.sample(steps);
    SampledSignal::new(0.0, horizon / steps as f64, inputs, Interpolation::PiecewiseLinear)
}

pub(crate) fn grid_steps(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::InvalidSignal(format!("time step must be positive, got {dt}")));
    }
    let ratio = horizon / dt;
    let steps = ratio.round();
    if steps < 1.0 || (ratio - steps).abs() > 1e-6 * steps.max(1.0) {
        return Err(Error::InvalidSignal(format!(
            "horizon {horizon} is not a whole number of steps {dt}"
        )));
    }
    Ok(steps as usize)
}
