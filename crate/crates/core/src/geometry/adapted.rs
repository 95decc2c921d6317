use serde::Serialize;

use super::{nulling_structure, SystemQuadruple};
use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, Subspace};

/// State basis `[Ta Tb Tc]` with `im Ta = R(Σ)` and `im [Ta Tb] = V(Σ)`.
///
/// In these coordinates, under `u = F x + L w`, the dynamics are block upper
/// triangular and the `R(Σ)` block `(A11, B1)` is controllable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdaptedBasis {
    pub ta: RationalMatrix,
    pub tb: RationalMatrix,
    pub tc: RationalMatrix,
    pub a11: RationalMatrix,
    pub b1: RationalMatrix,
    /// Output-nulling friend of `V(Σ)` used for the transformation.
    pub friend: RationalMatrix,
    /// Columns span `B^{-1} V(Σ) ∩ ker D`.
    pub input_map: RationalMatrix,
}

impl AdaptedBasis {
    pub fn transform(&self) -> RationalMatrix {
        self.ta.hstack(&self.tb).hstack(&self.tc)
    }
}

/// Columns of `candidates` that extend `base` to a basis of their joint span.
fn extend(base: &RationalMatrix, candidates: &RationalMatrix) -> RationalMatrix {
    let mut current = base.clone();
    let mut picked = Vec::new();
    for col in candidates.columns() {
        let trial = current.hstack(&RationalMatrix::column_vector(&col));
        if trial.rank() > current.ncols() {
            current = trial;
            picked.push(col);
        }
    }
    RationalMatrix::from_columns(base.nrows(), &picked)
}

pub fn adapted_basis(sys: &SystemQuadruple) -> Result<AdaptedBasis> {
    let ns = nulling_structure(sys)?;
    let n = sys.n();
    let ta = ns.r.basis().clone();
    let tb = extend(&ta, ns.v.basis());
    let tc = Subspace::from_spanning(&ta.hstack(&tb)).complement_basis();
    let t = ta.hstack(&tb).hstack(&tc);
    let t_inv = t.inverse().ok_or_else(|| Error::Consistency("adapted basis is singular".into()))?;
    let closed = sys.a() + &(sys.b() * &ns.friend);
    let a_bar = &(&t_inv * &closed) * &t;
    let b_bar = &(&t_inv * sys.b()) * &ns.input_map;
    let c_bar = &(sys.c() + &(sys.d() * &ns.friend)) * &t;
    let d_bar = sys.d() * &ns.input_map;

    let (ka, kv) = (ta.ncols(), ta.ncols() + tb.ncols());
    let pattern_ok = a_bar.block(ka, n, 0, ka).is_zero()
        && a_bar.block(kv, n, ka, kv).is_zero()
        && b_bar.block(ka, n, 0, b_bar.ncols()).is_zero()
        && c_bar.block(0, c_bar.nrows(), 0, kv).is_zero()
        && d_bar.is_zero();
    if !pattern_ok {
        return Err(Error::Consistency("adapted dynamics lack the block structure".into()));
    }
    Ok(AdaptedBasis {
        a11: a_bar.block(0, ka, 0, ka),
        b1: b_bar.block(0, ka, 0, b_bar.ncols()),
        ta,
        tb,
        tc,
        friend: ns.friend,
        input_map: ns.input_map,
    })
}
