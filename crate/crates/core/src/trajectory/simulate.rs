use nalgebra::{DMatrix, DVector};

use super::signal::{Interpolation, SampledSignal, TrajectoryTriple};
use crate::error::{ensure_dim, Result};
use crate::geometry::SystemQuadruple;

/// Floating-point copy of a system, converted once from the exact data.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl FloatSystem {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    pub fn p(&self) -> usize {
        self.c.nrows()
    }
}

impl From<&SystemQuadruple> for FloatSystem {
    fn from(sys: &SystemQuadruple) -> Self {
        Self {
            a: sys.a().to_f64(),
            b: sys.b().to_f64(),
            c: sys.c().to_f64(),
            d: sys.d().to_f64(),
        }
    }
}

/// One-step transition of `x' = Ax + Bu` for inputs interpolated between nodes.
///
/// `x_{k+1} = phi x_k + gamma0 u_k + gamma1 (u_{k+1} - u_k)`; `gamma1` is zero
/// for a zero-order hold.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub phi: DMatrix<f64>,
    pub gamma0: DMatrix<f64>,
    pub gamma1: DMatrix<f64>,
}

impl Discretization {
    pub fn new(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64, interpolation: Interpolation) -> Self {
        let (n, m) = (a.nrows(), b.ncols());
        match interpolation {
            Interpolation::ZeroOrderHold => {
                let mut big = DMatrix::zeros(n + m, n + m);
                big.view_mut((0, 0), (n, n)).copy_from(&(a * dt));
                big.view_mut((0, n), (n, m)).copy_from(&(b * dt));
                let e = big.exp();
                Self {
                    phi: e.view((0, 0), (n, n)).into_owned(),
                    gamma0: e.view((0, n), (n, m)).into_owned(),
                    gamma1: DMatrix::zeros(n, m),
                }
            }
            Interpolation::PiecewiseLinear => {
                let mut big = DMatrix::zeros(n + 2 * m, n + 2 * m);
                big.view_mut((0, 0), (n, n)).copy_from(&(a * dt));
                big.view_mut((0, n), (n, m)).copy_from(&(b * dt));
                big.view_mut((n, n + m), (m, m)).fill_with_identity();
                let e = big.exp();
                Self {
                    phi: e.view((0, 0), (n, n)).into_owned(),
                    gamma0: e.view((0, n), (n, m)).into_owned(),
                    gamma1: e.view((0, n + m), (n, m)).into_owned(),
                }
            }
        }
    }

    pub fn step(&self, x: &DVector<f64>, u0: &DVector<f64>, u1: &DVector<f64>) -> DVector<f64> {
        &self.phi * x + &self.gamma0 * u0 + &self.gamma1 * (u1 - u0)
    }
}

/// Simulates from `x0` under `u`, exactly for inputs that follow `u`'s
/// interpolation rule; `y = Cx + Du` at every node.
pub fn simulate(sys: &FloatSystem, x0: &DVector<f64>, u: &SampledSignal) -> Result<TrajectoryTriple> {
    ensure_dim("initial state", sys.n(), x0.len())?;
    ensure_dim("input signal", sys.m(), u.dim())?;
    let disc = Discretization::new(&sys.a, &sys.b, u.dt(), u.interpolation());
    let us = u.values();
    let mut xs = Vec::with_capacity(us.len());
    xs.push(x0.clone());
    for k in 0..u.steps() {
        let next = disc.step(&xs[k], &us[k], &us[k + 1]);
        xs.push(next);
    }
    let ys = xs.iter().zip(us).map(|(x, uk)| &sys.c * x + &sys.d * uk).collect();
    let x = SampledSignal::new(u.t0(), u.dt(), xs, Interpolation::PiecewiseLinear)?;
    let y = SampledSignal::new(u.t0(), u.dt(), ys, u.interpolation())?;
    TrajectoryTriple::new(u.clone(), x, y)
}
