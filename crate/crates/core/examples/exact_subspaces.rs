//! Exact subspace algebra and the largest controlled invariant subspace.

use input_redundancy::geometry::{controlled_invariant, friend, SystemQuadruple};
use input_redundancy::linalg::{image, intersect, kernel, sum, RationalMatrix};

fn main() -> input_redundancy::Result<()> {
    let m = RationalMatrix::from_i64(&[[1, 2, 3], [2, 4, 6]]);
    let ker = kernel(&m);
    let row_space = image(&m.transpose());
    println!("ker M has dimension {} with basis\n{}", ker.dim(), ker.basis());
    println!("ker M + row space = R^3: {}", sum(&ker, &row_space)?.is_full());
    println!("ker M ∩ row space = 0: {}", intersect(&ker, &row_space)?.is_zero());

    let a = RationalMatrix::from_i64(&[[0, 1, 0], [0, 0, 1], [1, 0, 0]]);
    let b = RationalMatrix::from_i64(&[[1], [0], [0]]);
    let k = kernel(&RationalMatrix::from_i64(&[[0, 0, 1]]));
    let v = controlled_invariant(&a, &b, &k)?;
    println!("largest controlled invariant subspace in ker [0 0 1]:\n{}", v.basis());

    let sys = SystemQuadruple::new(a, b, RationalMatrix::from_i64(&[[0, 0, 1]]), RationalMatrix::zeros(1, 1))?;
    let f = friend(&sys, &v, false)?;
    println!("a friend F making it invariant under A + BF:\n{f}");
    Ok(())
}
