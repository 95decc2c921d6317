//! Minimum-energy finite-time transfer with the reachability Gramian.

use input_redundancy::geometry::GramianTransfer;
use nalgebra::{DMatrix, DVector};

fn main() -> input_redundancy::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -0.5]);
    let b = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let start = DVector::from_vec(vec![1.0, 0.0]);
    let target = DVector::from_vec(vec![-1.0, 0.5]);
    let tr = GramianTransfer::new(&a, &b, &start, &target, 2.0)?;
    println!("Gramian reciprocal condition number {:.3e}", tr.rcond());
    let (inputs, states) = tr.sample(8);
    for (k, (u, x)) in inputs.iter().zip(&states).enumerate() {
        println!("t = {:.2}  u = {:+.4}  x = ({:+.4}, {:+.4})", k as f64 * 0.25, u[0], x[0], x[1]);
    }
    println!("endpoint error {:.2e}", (tr.state_at(2.0) - target).norm());
    Ok(())
}
