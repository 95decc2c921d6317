//! Simulation and constraint checks: an unstable state leaving its box, and
//! two nonnegative inputs producing the same output.

use input_redundancy::geometry::SystemQuadruple;
use input_redundancy::linalg::RationalMatrix;
use input_redundancy::trajectory::{admissible, simulate, ConstraintSet, FloatSystem, Interpolation, SampledSignal};
use nalgebra::DVector;

fn signal(m: usize, f: impl Fn(f64) -> Vec<f64>) -> input_redundancy::Result<SampledSignal> {
    SampledSignal::from_fn(0.0, 1e-3, 5000, Interpolation::PiecewiseLinear, |t| {
        DVector::from_vec(f(t)).resize_vertically(m, 0.0)
    })
}

fn main() -> input_redundancy::Result<()> {
    let unstable = SystemQuadruple::new(
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[0]]),
    )?;
    let unit = ConstraintSet::new_box(vec![0.0], vec![1.0], false)?;
    let tr = simulate(&FloatSystem::from(&unstable), &DVector::from_vec(vec![0.5]), &signal(1, |_| vec![0.0])?)?;
    let adm = admissible(&tr, &unit, &unit, 1e-9)?;
    println!("x' = x + u from 0.5 leaves [0, 1] at t = {:?} (ln 2 = {:.4})", adm.first_violation, 2f64.ln());

    let sys = SystemQuadruple::new(
        RationalMatrix::from_i64(&[[-1]]),
        RationalMatrix::from_i64(&[[1, 1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1, 0]]),
    )?;
    let fsys = FloatSystem::from(&sys);
    let x0 = DVector::from_vec(vec![-1.0]);
    let a = simulate(&fsys, &x0, &signal(2, |t| vec![(-2.0 * t).exp(), 0.0])?)?;
    let b = simulate(&fsys, &x0, &signal(2, |t| vec![(-3.0 * t).exp(), (-3.0 * t).exp()])?)?;
    println!("two nonnegative inputs, outputs differ by {:.2e}", a.y.sub(&b.y)?.sup_norm());
    println!("inputs differ by {:.3}", a.u.sub(&b.u)?.sup_norm());
    Ok(())
}
