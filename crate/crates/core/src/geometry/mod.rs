//! Geometric control: controlled invariant subspaces, weakly unobservable
//! subspaces, friends, and the reduction of a linearly constrained system to
//! an unconstrained one.
//!
//! All subspace computations are exact fixpoint iterations on rational data.
//! The Gramian transfer in [`gramian`] is the only floating-point piece.

mod adapted;
pub mod gramian;
mod sigma_f;

pub use adapted::{adapted_basis, AdaptedBasis};
pub use gramian::{gramian_transfer_input, GramianTransfer};
pub use sigma_f::{build_sigma_f, embed_triple, PinnedBases, SigmaFBundle};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{image, intersect, kernel, preimage, sum, RationalMatrix, Subspace};

/// The quadruple `(A, B, C, D)` of `x' = Ax + Bu`, `y = Cx + Du`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemQuadruple {
    #[serde(rename = "A")]
    a: RationalMatrix,
    #[serde(rename = "B")]
    b: RationalMatrix,
    #[serde(rename = "C")]
    c: RationalMatrix,
    #[serde(rename = "D")]
    d: RationalMatrix,
}

impl SystemQuadruple {
    /// Checks shapes; requires at least one state, input and output.
    pub fn new(a: RationalMatrix, b: RationalMatrix, c: RationalMatrix, d: RationalMatrix) -> Result<Self> {
        let sys = Self::from_parts(a, b, c, d)?;
        if sys.n() == 0 || sys.m() == 0 || sys.p() == 0 {
            return Err(Error::InvalidConstraint(
                "system needs n, m, p >= 1".into(),
            ));
        }
        Ok(sys)
    }

    /// Shape-checked constructor that tolerates an empty input space, as
    /// produced by reductions where no input direction survives.
    pub fn from_parts(a: RationalMatrix, b: RationalMatrix, c: RationalMatrix, d: RationalMatrix) -> Result<Self> {
        let n = a.nrows();
        ensure_dim("A columns", n, a.ncols())?;
        ensure_dim("B rows", n, b.nrows())?;
        ensure_dim("C columns", n, c.ncols())?;
        ensure_dim("D rows", c.nrows(), d.nrows())?;
        ensure_dim("D columns", b.ncols(), d.ncols())?;
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &RationalMatrix {
        &self.b
    }

    pub fn c(&self) -> &RationalMatrix {
        &self.c
    }

    pub fn d(&self) -> &RationalMatrix {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    pub fn p(&self) -> usize {
        self.c.nrows()
    }

    /// `[A; C]`
    fn state_map(&self) -> RationalMatrix {
        self.a.vstack(&self.c)
    }

    /// `[B; D]`
    fn input_map(&self) -> RationalMatrix {
        self.b.vstack(&self.d)
    }
}

impl<'de> Deserialize<'de> for SystemQuadruple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "A")]
            a: RationalMatrix,
            #[serde(rename = "B")]
            b: RationalMatrix,
            #[serde(rename = "C")]
            c: RationalMatrix,
            #[serde(rename = "D")]
            d: RationalMatrix,
        }
        let raw = Raw::deserialize(d)?;
        SystemQuadruple::new(raw.a, raw.b, raw.c, raw.d).map_err(serde::de::Error::custom)
    }
}

/// Largest `(A, B)`-controlled invariant subspace contained in `k`.
///
/// Iterates `V_0 = K`, `V_{i+1} = K ∩ A^{-1}(V_i + im B)` to its fixpoint,
/// reached after at most `dim K` strict decreases.
pub fn controlled_invariant(a: &RationalMatrix, b: &RationalMatrix, k: &Subspace) -> Result<Subspace> {
    ensure_dim("controlled invariant A", a.nrows(), a.ncols())?;
    ensure_dim("controlled invariant B", a.nrows(), b.nrows())?;
    ensure_dim("controlled invariant K", a.nrows(), k.ambient_dim())?;
    let im_b = image(b);
    let mut v = k.clone();
    loop {
        let next = intersect(k, &preimage(a, &sum(&v, &im_b)?)?)?;
        if next.dim() == v.dim() {
            return Ok(next);
        }
        v = next;
    }
}

/// Weakly unobservable subspace `V(Σ)`: states from which some input keeps
/// the output identically zero.
pub fn weakly_unobservable(sys: &SystemQuadruple) -> Result<Subspace> {
    let state_map = sys.state_map();
    let im_input = image(&sys.input_map());
    let mut v = Subspace::full(sys.n());
    loop {
        let target = sum(&v.padded(sys.p()), &im_input)?;
        let next = preimage(&state_map, &target)?;
        if next.dim() == v.dim() {
            return Ok(next);
        }
        v = next;
    }
}

/// A friend `F` of `w`: `(A + BF) w ⊆ w`, and additionally `w ⊆ ker(C + DF)`
/// when `output_nulling` is set.
///
/// Each basis column `t_i` of `w` yields one exact linear system in
/// `(ξ, f_i)`; the solution with free variables at zero is taken, and `F` is
/// extended by zero on the standard-basis complement of `w`.
pub fn friend(sys: &SystemQuadruple, w: &Subspace, output_nulling: bool) -> Result<RationalMatrix> {
    ensure_dim("friend subspace", sys.n(), w.ambient_dim())?;
    let (n, m) = (sys.n(), sys.m());
    let k = w.dim();
    if k == 0 {
        return Ok(RationalMatrix::zeros(m, n));
    }
    let t = w.basis();
    let invariance = t.hstack(&-sys.b());
    let rhs_inv = sys.a() * t;
    let values = if output_nulling {
        let nulling = RationalMatrix::zeros(sys.p(), k).hstack(&-sys.d());
        let lhs = invariance.vstack(&nulling);
        let rhs = rhs_inv.vstack(&(sys.c() * t));
        match lhs.solve(&rhs) {
            Some(x) => x,
            None if invariance.solve(&rhs_inv).is_some() => return Err(Error::NotOutputNulling),
            None => return Err(Error::NotControlledInvariant),
        }
    } else {
        invariance.solve(&rhs_inv).ok_or(Error::NotControlledInvariant)?
    };
    // F T = rows k..k+m of the solution; F Tc = 0.
    let ft = values.block(k, k + m, 0, k);
    let q = t.hstack(&w.complement_basis());
    let q_inv = q.inverse().expect("basis plus complement is invertible");
    let padded = ft.hstack(&RationalMatrix::zeros(m, n - k));
    Ok(&padded * &q_inv)
}

/// `V(Σ)`, one of its output-nulling friends, the input reparametrization `L`
/// with `im L = B^{-1} V(Σ) ∩ ker D`, and `R(Σ)`.
#[derive(Clone, Debug)]
pub(crate) struct NullingStructure {
    pub v: Subspace,
    pub friend: RationalMatrix,
    pub input_map: RationalMatrix,
    pub r: Subspace,
}

pub(crate) fn nulling_structure(sys: &SystemQuadruple) -> Result<NullingStructure> {
    let v = weakly_unobservable(sys)?;
    let f = friend(sys, &v, true)?;
    let directions = intersect(&preimage(sys.b(), &v)?, &kernel(sys.d()))?;
    let l = directions.basis().clone();
    let closed_loop = sys.a() + &(sys.b() * &f);
    let mut r = image(&(sys.b() * &l));
    loop {
        let next = sum(&r, &image(&(&closed_loop * r.basis())))?;
        if next.dim() == r.dim() {
            break;
        }
        r = next;
    }
    Ok(NullingStructure {
        v,
        friend: f,
        input_map: l,
        r,
    })
}

/// Controllable weakly unobservable subspace `R(Σ)`: the smallest
/// `(A + BF)`-invariant subspace containing `im BL`, for `F` an
/// output-nulling friend of `V(Σ)` and `im L = B^{-1}V(Σ) ∩ ker D`.
pub fn controllable_weakly_unobservable(sys: &SystemQuadruple) -> Result<Subspace> {
    Ok(nulling_structure(sys)?.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;
    use crate::linalg::restriction_matrix;

    pub(crate) fn buck() -> SystemQuadruple {
        SystemQuadruple::new(
            RationalMatrix::from_i64(&[[0, 0, -1], [0, 0, -1], [1, 1, -1]]),
            RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, 0]]),
            RationalMatrix::from_i64(&[[0, 0, 1]]),
            RationalMatrix::zeros(1, 2),
        )
        .unwrap()
    }

    pub(crate) fn ex4() -> SystemQuadruple {
        SystemQuadruple::new(
            -&RationalMatrix::identity(3),
            RationalMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]),
            RationalMatrix::from_i64(&[[0, 0, 1]]),
            RationalMatrix::zeros(1, 4),
        )
        .unwrap()
    }

    fn span(n: usize, vs: &[&[i64]]) -> Subspace {
        let cols: Vec<Vec<_>> = vs.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
        Subspace::from_vectors(n, &cols)
    }

    #[test]
    fn whole_space_is_controlled_invariant() {
        let sys = ex4();
        let v = controlled_invariant(sys.a(), sys.b(), &Subspace::full(3)).unwrap();
        assert!(v.is_full());
    }

    #[test]
    fn state_constraint_already_invariant() {
        let x = kernel(&RationalMatrix::from_i64(&[[0, 1, 1]]));
        let v = controlled_invariant(&-&RationalMatrix::identity(3), &RationalMatrix::identity(3), &x).unwrap();
        assert_eq!(v, x);
    }

    #[test]
    fn controlled_invariant_can_shrink_the_constraint() {
        let a = RationalMatrix::from_i64(&[[0, -1, 0], [1, 0, 0], [0, 0, 1]]);
        let b = RationalMatrix::from_i64(&[[0], [0], [1]]);
        let k = span(3, &[&[0, 1, 0], &[0, 0, 1]]);
        let v = controlled_invariant(&a, &b, &k).unwrap();
        assert_eq!(v, span(3, &[&[0, 0, 1]]));
    }

    #[test]
    fn weakly_unobservable_examples() {
        let pinned = SystemQuadruple::new(
            RationalMatrix::from_i64(&[[1, 2], [0, 3]]),
            RationalMatrix::from_i64(&[[1], [1]]),
            RationalMatrix::identity(2),
            RationalMatrix::zeros(2, 1),
        )
        .unwrap();
        assert!(weakly_unobservable(&pinned).unwrap().is_zero());
        assert_eq!(weakly_unobservable(&ex4()).unwrap(), span(3, &[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(weakly_unobservable(&buck()).unwrap(), span(3, &[&[1, -1, 0]]));
    }

    #[test]
    fn friend_examples() {
        let sys = buck();
        assert!(friend(&sys, &Subspace::zero(3), true).unwrap().is_zero());
        let w = span(3, &[&[1, -1, 0]]);
        let f = friend(&sys, &w, true).unwrap();
        let closed = sys.a() + &(sys.b() * &f);
        assert!(restriction_matrix(&closed, &w).is_ok());
        assert!((&(sys.c() + &(sys.d() * &f)) * w.basis()).is_zero());

        let x = kernel(&RationalMatrix::from_i64(&[[0, 1, 1]]));
        let f = friend(&ex4(), &x, false).unwrap();
        let closed = ex4().a() + &(ex4().b() * &f);
        assert!(restriction_matrix(&closed, &x).is_ok());
    }

    #[test]
    fn friend_reports_infeasibility() {
        let sys = buck();
        // A e1 = e3 has a component outside span{e1} + im B.
        let e1 = span(3, &[&[1, 0, 0]]);
        assert!(matches!(friend(&sys, &e1, false), Err(Error::NotControlledInvariant)));
        // span{e3} is controlled invariant, but C e3 = 1 and D = 0.
        let e3 = span(3, &[&[0, 0, 1]]);
        assert!(friend(&sys, &e3, false).is_ok());
        assert!(matches!(friend(&sys, &e3, true), Err(Error::NotOutputNulling)));
    }

    #[test]
    fn controllable_weakly_unobservable_examples() {
        assert_eq!(controllable_weakly_unobservable(&buck()).unwrap(), span(3, &[&[1, -1, 0]]));
        assert_eq!(
            controllable_weakly_unobservable(&ex4()).unwrap(),
            span(3, &[&[1, 0, 0], &[0, 1, 0]])
        );
        let chain = SystemQuadruple::new(
            RationalMatrix::from_i64(&[[0, 1, 0], [0, 0, 1], [0, 0, 0]]),
            RationalMatrix::from_i64(&[[0], [0], [1]]),
            RationalMatrix::zeros(1, 3),
            RationalMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(controllable_weakly_unobservable(&chain).unwrap().is_full());
    }

    #[test]
    fn rejects_bad_shapes() {
        let r = SystemQuadruple::new(
            RationalMatrix::identity(2),
            RationalMatrix::zeros(3, 1),
            RationalMatrix::zeros(1, 2),
            RationalMatrix::zeros(1, 1),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
