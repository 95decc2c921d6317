use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use super::matrix::RationalMatrix;
use super::rational::Rational;
use crate::error::{ensure_dim, Error, Result};

/// A linear subspace of `Q^n`, held by a basis in reduced column echelon form.
///
/// The canonical form makes structural equality coincide with subspace
/// equality. The zero subspace has a basis with no columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: RationalMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: RationalMatrix::identity(n),
        }
    }

    /// The span of the columns of `m`.
    pub fn from_spanning(m: &RationalMatrix) -> Self {
        let (r, pivots) = m.transpose().rref();
        let rows: Vec<usize> = (0..pivots.len()).collect();
        Self {
            ambient_dim: m.nrows(),
            basis: r.select_rows(&rows).transpose(),
        }
    }

    pub fn from_vectors(n: usize, vectors: &[Vec<Rational>]) -> Self {
        Self::from_spanning(&RationalMatrix::from_columns(n, vectors))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Rows spanning the annihilator: the returned `N` satisfies `ker N = self`.
    pub fn annihilator(&self) -> RationalMatrix {
        self.basis.transpose().nullspace().transpose()
    }

    /// Standard basis vectors completing `self` to the whole space, in index order.
    pub fn complement_basis(&self) -> RationalMatrix {
        let n = self.ambient_dim;
        let mut current = self.basis.clone();
        let mut picked = Vec::new();
        for i in 0..n {
            if current.ncols() == n {
                break;
            }
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            let candidate = current.hstack(&RationalMatrix::column_vector(&e));
            if candidate.rank() > current.ncols() {
                current = candidate;
                picked.push(e);
            }
        }
        RationalMatrix::from_columns(n, &picked)
    }

    pub fn contains(&self, w: &[Rational]) -> Result<bool> {
        contains(self, w)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        ensure_dim("subspace inclusion", self.ambient_dim, other.ambient_dim)?;
        let n = other.annihilator();
        Ok((&n * &self.basis).is_zero())
    }

    /// `self x {0}` inside `Q^(n + extra)`.
    pub fn padded(&self, extra: usize) -> Self {
        let pad = RationalMatrix::zeros(extra, self.dim());
        Self {
            ambient_dim: self.ambient_dim + extra,
            basis: self.basis.vstack(&pad),
        }
    }
}

#[derive(Deserialize)]
struct RawSubspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSubspace::deserialize(d)?;
        if raw.basis.nrows() != raw.ambient_dim && !(raw.basis.nrows() == 0 && raw.basis.ncols() == 0) {
            return Err(serde::de::Error::custom("basis rows must equal ambient_dim"));
        }
        if raw.basis.ncols() == 0 {
            return Ok(Subspace::zero(raw.ambient_dim));
        }
        Ok(Subspace::from_spanning(&raw.basis))
    }
}

pub fn kernel(m: &RationalMatrix) -> Subspace {
    Subspace::from_spanning(&m.nullspace())
}

pub fn image(m: &RationalMatrix) -> Subspace {
    Subspace::from_spanning(m)
}

pub fn sum(v: &Subspace, w: &Subspace) -> Result<Subspace> {
    ensure_dim("subspace sum", v.ambient_dim, w.ambient_dim)?;
    Ok(Subspace::from_spanning(&v.basis.hstack(&w.basis)))
}

pub fn intersect(v: &Subspace, w: &Subspace) -> Result<Subspace> {
    ensure_dim("subspace intersection", v.ambient_dim, w.ambient_dim)?;
    // x in V ∩ W  <=>  x in V and N_W x = 0.
    let n_w = w.annihilator();
    let coeffs = (&n_w * &v.basis).nullspace();
    Ok(Subspace::from_spanning(&(&v.basis * &coeffs)))
}

/// `{u : M u ∈ V}`.
pub fn preimage(m: &RationalMatrix, v: &Subspace) -> Result<Subspace> {
    ensure_dim("preimage codomain", m.nrows(), v.ambient_dim)?;
    Ok(kernel(&(&v.annihilator() * m)))
}

pub fn contains(v: &Subspace, w: &[Rational]) -> Result<bool> {
    ensure_dim("membership vector", v.ambient_dim, w.len())?;
    let n = v.annihilator();
    Ok(n.mul_vec(w).iter().all(Zero::is_zero))
}

/// Matrix of `M` restricted to an `M`-invariant subspace, in the subspace's
/// canonical basis `T`: the unique `K` with `M T = T K`.
pub fn restriction_matrix(m: &RationalMatrix, v: &Subspace) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "restriction of a non-square map",
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    ensure_dim("restriction subspace", m.nrows(), v.ambient_dim)?;
    let t = v.basis();
    let mt = m * t;
    let k = t.solve(&mt).ok_or(Error::InvarianceViolated)?;
    if (t * &k) != mt {
        return Err(Error::InvarianceViolated);
    }
    Ok(k)
}

/// Coordinates of the columns of `m` in the canonical basis of `v`.
pub fn coordinates(v: &Subspace, m: &RationalMatrix) -> Result<RationalMatrix> {
    ensure_dim("coordinates", v.ambient_dim, m.nrows())?;
    let k = v.basis().solve(m).ok_or(Error::InvarianceViolated)?;
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn kernel_of_one_equation() {
        let k = kernel(&RationalMatrix::from_i64(&[[1, 1]]));
        assert_eq!(k, Subspace::from_vectors(2, &[v(&[1, -1])]));
    }

    #[test]
    fn kernel_of_duplicated_actuator_matrix() {
        let b = RationalMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]);
        let k = kernel(&b);
        assert_eq!(k.dim(), 1);
        assert_eq!(k, Subspace::from_vectors(4, &[v(&[0, 0, 1, -1])]));
        assert!(kernel(&RationalMatrix::identity(3)).is_zero());
    }

    #[test]
    fn image_cases() {
        assert!(image(&RationalMatrix::zeros(3, 2)).is_zero());
        let m = RationalMatrix::from_i64(&[[1, 2], [2, 4], [0, 1], [1, 1]]);
        assert_eq!(image(&m).dim(), 2);
    }

    #[test]
    fn sum_and_intersection_basics() {
        let e1 = Subspace::from_vectors(3, &[v(&[1, 0, 0])]);
        let e2 = Subspace::from_vectors(3, &[v(&[0, 1, 0])]);
        let s = sum(&e1, &e2).unwrap();
        assert_eq!(s, Subspace::from_vectors(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]));
        assert_eq!(sum(&e1, &Subspace::zero(3)).unwrap(), e1);
        assert_eq!(intersect(&s, &s).unwrap(), s);
        assert!(intersect(&e1, &e2).unwrap().is_zero());
        assert!(sum(&e1, &Subspace::zero(2)).is_err());
    }

    #[test]
    fn preimage_cases() {
        let b = RationalMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]);
        let target = Subspace::from_vectors(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let p = preimage(&b, &target).unwrap();
        assert_eq!(p, kernel(&RationalMatrix::from_i64(&[[0, 0, 1, 1]])));
        assert_eq!(preimage(&b, &Subspace::full(3)).unwrap(), Subspace::full(4));
        assert_eq!(preimage(&RationalMatrix::identity(3), &target).unwrap(), target);
        assert_eq!(preimage(&b, &Subspace::zero(3)).unwrap(), kernel(&b));
    }

    #[test]
    fn membership() {
        let s = Subspace::from_vectors(3, &[v(&[1, -1, 0])]);
        assert!(s.contains(&v(&[0, 0, 0])).unwrap());
        assert!(s.contains(&v(&[2, -2, 0])).unwrap());
        assert!(!s.contains(&v(&[1, 0, 0])).unwrap());
        assert!(s.contains(&v(&[1, 0])).is_err());
    }

    #[test]
    fn restriction_cases() {
        let x = kernel(&RationalMatrix::from_i64(&[[0, 1, 1]]));
        let minus_i = -&RationalMatrix::identity(3);
        assert_eq!(restriction_matrix(&minus_i, &x).unwrap(), -&RationalMatrix::identity(2));
        assert_eq!(
            restriction_matrix(&RationalMatrix::identity(3), &x).unwrap(),
            RationalMatrix::identity(2)
        );
        let rot = RationalMatrix::from_i64(&[[0, -1], [1, 0]]);
        let axis = Subspace::from_vectors(2, &[v(&[1, 0])]);
        assert!(matches!(restriction_matrix(&rot, &axis), Err(Error::InvarianceViolated)));
    }

    #[test]
    fn complement_extends_to_basis() {
        let s = Subspace::from_vectors(3, &[v(&[1, 1, 0])]);
        let c = s.complement_basis();
        assert_eq!(c.ncols(), 2);
        assert_eq!(s.basis().hstack(&c).rank(), 3);
    }

    #[test]
    fn zero_subspace_round_trips_through_json() {
        let z = Subspace::zero(3);
        let text = serde_json::to_string(&z).unwrap();
        let back: Subspace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
    }
}
