#![allow(dead_code)]

use input_redundancy::geometry::SystemQuadruple;
use input_redundancy::linalg::rational::int;
use input_redundancy::linalg::{kernel, RationalMatrix, Subspace};
use input_redundancy::trajectory::{Interpolation, SampledSignal};
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::Rng;

pub fn ex4() -> SystemQuadruple {
    SystemQuadruple::new(
        -&RationalMatrix::identity(3),
        RationalMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]),
        RationalMatrix::from_i64(&[[0, 0, 1]]),
        RationalMatrix::zeros(1, 4),
    )
    .unwrap()
}

pub fn ex4_sets() -> (Subspace, Subspace) {
    (
        kernel(&RationalMatrix::from_i64(&[[0, 0, 1, -1]])),
        kernel(&RationalMatrix::from_i64(&[[0, 1, 1]])),
    )
}

/// Two-phase buck converter with unit inductances, capacitance, load and
/// source voltage; the inputs are the switch duty cycles.
pub fn buck() -> SystemQuadruple {
    SystemQuadruple::new(
        RationalMatrix::from_i64(&[[0, 0, -1], [0, 0, -1], [1, 1, -1]]),
        RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, 0]]),
        RationalMatrix::from_i64(&[[0, 0, 1]]),
        RationalMatrix::zeros(1, 2),
    )
    .unwrap()
}

pub fn ex1() -> SystemQuadruple {
    SystemQuadruple::new(
        RationalMatrix::from_i64(&[[-1]]),
        RationalMatrix::from_i64(&[[1, 1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1, 0]]),
    )
    .unwrap()
}

pub fn ex2() -> SystemQuadruple {
    SystemQuadruple::new(
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[1]]),
        RationalMatrix::from_i64(&[[0]]),
    )
    .unwrap()
}

pub fn ex5() -> SystemQuadruple {
    SystemQuadruple::new(
        RationalMatrix::identity(2),
        RationalMatrix::from_i64(&[[1, 0, 0], [0, 1, 1]]),
        RationalMatrix::from_i64(&[[0, 1]]),
        RationalMatrix::zeros(1, 3),
    )
    .unwrap()
}

pub fn signal(dt: f64, horizon: f64, f: impl FnMut(f64) -> DVector<f64>) -> SampledSignal {
    let steps = (horizon / dt).round() as usize;
    SampledSignal::from_fn(0.0, dt, steps, Interpolation::PiecewiseLinear, f).unwrap()
}

pub fn vector(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

pub fn random_int_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> RationalMatrix {
    let data = (0..rows * cols).map(|_| int(rng.random_range(-bound..=bound))).collect();
    RationalMatrix::new(rows, cols, data).unwrap()
}

pub fn random_invertible(rng: &mut StdRng, n: usize) -> RationalMatrix {
    loop {
        let g = random_int_matrix(rng, n, n, 3);
        if g.rank() == n {
            return g;
        }
    }
}

/// A random subspace: the whole space a third of the time, otherwise the
/// span of a few random integer vectors.
pub fn random_subspace(rng: &mut StdRng, n: usize) -> Subspace {
    if rng.random_range(0..3) == 0 {
        return Subspace::full(n);
    }
    let k = rng.random_range(1..=n);
    Subspace::from_spanning(&random_int_matrix(rng, n, k, 2))
}

pub fn random_system(rng: &mut StdRng, max_n: usize, max_m: usize, max_p: usize) -> SystemQuadruple {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    let p = rng.random_range(1..=max_p);
    let d = if rng.random_bool(0.5) {
        RationalMatrix::zeros(p, m)
    } else {
        random_int_matrix(rng, p, m, 1)
    };
    SystemQuadruple::new(
        random_int_matrix(rng, n, n, 2),
        random_int_matrix(rng, n, m, 2),
        random_int_matrix(rng, p, n, 2),
        d,
    )
    .unwrap()
}

/// Left invertibility from the ranks of the block Toeplitz matrices of
/// Markov parameters: injective iff `rank M_n − rank M_{n−1} = m`.
pub fn left_invertible_markov(sys: &SystemQuadruple) -> bool {
    let (n, m, p) = (sys.n(), sys.m(), sys.p());
    if m == 0 {
        return true;
    }
    let mut markov = vec![sys.d().clone()];
    let mut ak_b = sys.b().clone();
    for _ in 0..n {
        markov.push(sys.c() * &ak_b);
        ak_b = sys.a() * &ak_b;
    }
    let toeplitz = |k: usize| {
        let mut t = RationalMatrix::zeros((k + 1) * p, (k + 1) * m);
        for i in 0..=k {
            for j in 0..=i {
                let blk = &markov[i - j];
                for r in 0..p {
                    for c in 0..m {
                        t[(i * p + r, j * m + c)] = blk[(r, c)].clone();
                    }
                }
            }
        }
        t.rank()
    };
    let prev = if n == 0 { 0 } else { toeplitz(n - 1) };
    toeplitz(n) - prev == m
}
