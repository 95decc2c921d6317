use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{controlled_invariant, friend, SystemQuadruple};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{coordinates, image, preimage, restriction_matrix, RationalMatrix, Subspace};
use crate::trajectory::{SampledSignal, TrajectoryTriple};

/// User-supplied choices for the reduction; any subset may be given.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinnedBases {
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<RationalMatrix>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<RationalMatrix>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<RationalMatrix>,
}

/// The unconstrained system `Σ_F` on `V*(X)` together with the maps that
/// embed its trajectories back into the constrained system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaFBundle {
    pub sigma_f: SystemQuadruple,
    /// Columns span `U`.
    #[serde(rename = "R")]
    pub r: RationalMatrix,
    /// Columns span `V*(X)`.
    #[serde(rename = "T")]
    pub t: RationalMatrix,
    #[serde(rename = "F")]
    pub f: RationalMatrix,
    /// Injective, with image `(BR)^{-1} V*(X)`.
    #[serde(rename = "L")]
    pub l_map: RationalMatrix,
    /// `dim V*(X)`.
    pub l: usize,
}

fn pinned_err(which: &'static str, reason: impl Into<String>) -> Error {
    Error::PinnedInvalid {
        which,
        reason: reason.into(),
    }
}

fn check_basis(which: &'static str, m: &RationalMatrix, rows: usize, target: &Subspace) -> Result<()> {
    if m.nrows() != rows {
        return Err(pinned_err(which, format!("expected {rows} rows, found {}", m.nrows())));
    }
    if m.rank() != m.ncols() {
        return Err(pinned_err(which, "columns are linearly dependent"));
    }
    if &image(m) != target {
        return Err(pinned_err(which, "columns do not span the required subspace"));
    }
    Ok(())
}

/// Reduces `(Σ, U, X)` with linear `U`, `X` to `Σ_F`.
///
/// Canonical choices: `R` and `L` are echelon bases, `F` is the friend
/// returned by [`friend`]. Pinned matrices are validated and used as given.
pub fn build_sigma_f(
    sys: &SystemQuadruple,
    u_space: &Subspace,
    x_space: &Subspace,
    pinned: Option<&PinnedBases>,
) -> Result<SigmaFBundle> {
    ensure_dim("input constraint", sys.m(), u_space.ambient_dim())?;
    ensure_dim("state constraint", sys.n(), x_space.ambient_dim())?;
    let pinned = pinned.cloned().unwrap_or_default();
    let n = sys.n();

    let r = match pinned.r {
        Some(r) => {
            check_basis("R", &r, sys.m(), u_space)?;
            r
        }
        None => u_space.basis().clone(),
    };
    let b_u = sys.b() * &r;
    let d_u = sys.d() * &r;
    let v_star = controlled_invariant(sys.a(), &b_u, x_space)?;
    let l = v_star.dim();
    if l == 0 {
        return Err(Error::DegenerateL0);
    }
    let t = v_star.basis().clone();
    let restricted = SystemQuadruple::from_parts(sys.a().clone(), b_u.clone(), sys.c().clone(), d_u.clone())?;

    let f = match pinned.f {
        Some(f) => {
            if f.shape() != (r.ncols(), n) {
                return Err(pinned_err("F", format!("expected shape {}x{n}", r.ncols())));
            }
            let closed = sys.a() + &(&b_u * &f);
            restriction_matrix(&closed, &v_star)
                .map_err(|_| pinned_err("F", "(A + BRF) V* is not contained in V*"))?;
            f
        }
        None => friend(&restricted, &v_star, false)?,
    };

    let directions = preimage(&b_u, &v_star)?;
    let l_map = match pinned.l {
        Some(l_map) => {
            check_basis("L", &l_map, r.ncols(), &directions)?;
            l_map
        }
        None => directions.basis().clone(),
    };

    let a_f = restriction_matrix(&(sys.a() + &(&b_u * &f)), &v_star)?;
    let b_f = coordinates(&v_star, &(&b_u * &l_map))?;
    let c_f = &(sys.c() + &(&d_u * &f)) * &t;
    let d_f = &d_u * &l_map;
    Ok(SigmaFBundle {
        sigma_f: SystemQuadruple::from_parts(a_f, b_f, c_f, d_f)?,
        r,
        t,
        f,
        l_map,
        l,
    })
}

/// Maps a trajectory `(w, η, φ)` of `Σ_F` to the constrained system:
/// `(u, x, y) = (RLw + RFTη, Tη, φ)`.
pub fn embed_triple(
    bundle: &SigmaFBundle,
    eta0: &DVector<f64>,
    w: &SampledSignal,
    eta: &SampledSignal,
    phi: &SampledSignal,
) -> Result<TrajectoryTriple> {
    w.ensure_same_grid(eta)?;
    w.ensure_same_grid(phi)?;
    ensure_dim("eta0", bundle.l, eta0.len())?;
    ensure_dim("eta", bundle.l, eta.dim())?;
    ensure_dim("w", bundle.l_map.ncols(), w.dim())?;
    ensure_dim("phi", bundle.sigma_f.p(), phi.dim())?;
    let start = &eta.values()[0];
    if (start - eta0).norm() > 1e-9 * (1.0 + eta0.norm()) {
        return Err(Error::InvalidSignal("eta does not start at eta0".into()));
    }
    let rl = (&bundle.r * &bundle.l_map).to_f64();
    let rft = (&(&bundle.r * &bundle.f) * &bundle.t).to_f64();
    let t = bundle.t.to_f64();
    let us = w
        .values()
        .iter()
        .zip(eta.values())
        .map(|(wk, ek)| &rl * wk + &rft * ek)
        .collect();
    let u = SampledSignal::new(w.t0(), w.dt(), us, w.interpolation())?;
    let x = eta.map(|e| &t * e)?;
    TrajectoryTriple::new(u, x, phi.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tests::ex4;
    use crate::linalg::kernel;
    use crate::linalg::rational::frac;
    use crate::trajectory::{simulate, FloatSystem, Interpolation};

    fn ex4_sets() -> (Subspace, Subspace) {
        (
            kernel(&RationalMatrix::from_i64(&[[0, 0, 1, -1]])),
            kernel(&RationalMatrix::from_i64(&[[0, 1, 1]])),
        )
    }

    fn ex4_pinned() -> PinnedBases {
        let mut r = RationalMatrix::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 0]]);
        r[(2, 2)] = frac(1, 2);
        r[(3, 2)] = frac(1, 2);
        PinnedBases {
            r: Some(r),
            f: Some(RationalMatrix::zeros(3, 3)),
            l: Some(RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, -1]])),
        }
    }

    #[test]
    fn pinned_reduction_of_duplicated_actuators() {
        let (u, x) = ex4_sets();
        let bundle = build_sigma_f(&ex4(), &u, &x, Some(&ex4_pinned())).unwrap();
        assert_eq!(bundle.l, 2);
        assert_eq!(bundle.t, RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, -1]]));
        let s = &bundle.sigma_f;
        assert_eq!(s.a(), &-&RationalMatrix::identity(2));
        assert_eq!(s.b(), &RationalMatrix::identity(2));
        assert_eq!(s.c(), &RationalMatrix::from_i64(&[[0, -1]]));
        assert!(s.d().is_zero() && s.d().shape() == (1, 2));
    }

    #[test]
    fn unconstrained_reduction_is_identity() {
        let sys = ex4();
        let pinned = PinnedBases {
            r: None,
            f: Some(RationalMatrix::zeros(4, 3)),
            l: Some(RationalMatrix::identity(4)),
        };
        let bundle = build_sigma_f(&sys, &Subspace::full(4), &Subspace::full(3), Some(&pinned)).unwrap();
        assert_eq!(bundle.sigma_f, sys);
        let auto = build_sigma_f(&sys, &Subspace::full(4), &Subspace::full(3), None).unwrap();
        assert_eq!(auto.sigma_f, sys);
    }

    #[test]
    fn invalid_pins_are_rejected() {
        let (u, x) = ex4_sets();
        let mut bad = ex4_pinned();
        bad.l = Some(RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, 1]]));
        assert!(matches!(
            build_sigma_f(&ex4(), &u, &x, Some(&bad)),
            Err(Error::PinnedInvalid { which: "L", .. })
        ));
        let mut bad = ex4_pinned();
        bad.r = Some(RationalMatrix::identity(4));
        assert!(matches!(
            build_sigma_f(&ex4(), &u, &x, Some(&bad)),
            Err(Error::PinnedInvalid { which: "R", .. })
        ));
        let mut bad = ex4_pinned();
        let mut f = RationalMatrix::zeros(3, 3);
        f[(1, 0)] = frac(1, 1);
        bad.f = Some(f);
        assert!(matches!(
            build_sigma_f(&ex4(), &u, &x, Some(&bad)),
            Err(Error::PinnedInvalid { which: "F", .. })
        ));
    }

    #[test]
    fn empty_controlled_invariant_is_degenerate() {
        let (u, _) = ex4_sets();
        let r = build_sigma_f(&ex4(), &u, &Subspace::zero(3), None);
        assert!(matches!(r, Err(Error::DegenerateL0)));
    }

    #[test]
    fn embedding_reproduces_constrained_trajectory() {
        let (u_set, x_set) = ex4_sets();
        let bundle = build_sigma_f(&ex4(), &u_set, &x_set, Some(&ex4_pinned())).unwrap();
        let (dt, steps) = (1e-2, 200);
        let w = SampledSignal::from_fn(0.0, dt, steps, Interpolation::PiecewiseLinear, |_| {
            DVector::from_vec(vec![1.0, 1.0])
        })
        .unwrap();
        let eta0 = DVector::from_vec(vec![1.0, 0.0]);
        let sub = simulate(&FloatSystem::from(&bundle.sigma_f), &eta0, &w).unwrap();
        let tr = embed_triple(&bundle, &eta0, &w, &sub.x, &sub.y).unwrap();
        for (k, t) in tr.u.times().enumerate() {
            let e = (-t).exp();
            let u = &tr.u.values()[k];
            let x = &tr.x.values()[k];
            assert!((u - DVector::from_vec(vec![1.0, 1.0, -0.5, -0.5])).norm() < 1e-12);
            assert!((x - DVector::from_vec(vec![1.0, 1.0 - e, e - 1.0])).norm() < 1e-12);
            assert!((tr.y.values()[k][0] - (e - 1.0)).abs() < 1e-12);
        }
        let direct = simulate(&FloatSystem::from(&ex4()), &tr.x0, &tr.u).unwrap();
        assert!(direct.x.sub(&tr.x).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn embedding_checks_grids() {
        let (u_set, x_set) = ex4_sets();
        let bundle = build_sigma_f(&ex4(), &u_set, &x_set, None).unwrap();
        let w = SampledSignal::zeros(0.0, 0.1, 10, 2, Interpolation::PiecewiseLinear).unwrap();
        let eta = SampledSignal::zeros(0.0, 0.1, 10, 2, Interpolation::PiecewiseLinear).unwrap();
        let phi = SampledSignal::zeros(0.0, 0.2, 5, 1, Interpolation::PiecewiseLinear).unwrap();
        assert!(matches!(
            embed_triple(&bundle, &DVector::zeros(2), &w, &eta, &phi),
            Err(Error::GridMismatch)
        ));
        let phi = SampledSignal::zeros(0.0, 0.1, 10, 1, Interpolation::PiecewiseLinear).unwrap();
        let tr = embed_triple(&bundle, &DVector::zeros(2), &w, &eta, &phi).unwrap();
        assert_eq!(tr.u.sup_norm() + tr.x.sup_norm() + tr.y.sup_norm(), 0.0);
    }
}
