use serde::Serialize;

use super::constraint::{membership, ConstraintSet, Status};
use super::signal::{SampledSignal, TrajectoryTriple};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub ok: bool,
    pub first_violation: Option<f64>,
}

/// Checks `(u, x) ∈ U × X` at every node; boundary points are admissible.
pub fn admissible(triple: &TrajectoryTriple, u_set: &ConstraintSet, x_set: &ConstraintSet, tol: f64) -> Result<Admissibility> {
    for k in 0..triple.u.len() {
        let u_out = membership(u_set, &triple.u.values()[k], tol)?.status == Status::Outside;
        let x_out = membership(x_set, &triple.x.values()[k], tol)?.status == Status::Outside;
        if u_out || x_out {
            return Ok(Admissibility {
                ok: false,
                first_violation: Some(triple.u.time(k)),
            });
        }
    }
    Ok(Admissibility {
        ok: true,
        first_violation: None,
    })
}

/// An open time window on which the nominal trajectory is interior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InteriorWindow {
    pub t1: f64,
    pub t2: f64,
    /// Grid indices of `t1` and `t2`.
    pub start: usize,
    pub end: usize,
    pub r_u_min: f64,
    /// Infinite when the state is not required to be interior.
    pub r_x_min: f64,
}

/// Interior margins per node: `Some((r_u, r_x))` when the node qualifies.
fn interior_margins(
    triple: &TrajectoryTriple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    rho: usize,
    tol: f64,
) -> Result<Vec<Option<(f64, f64)>>> {
    (0..triple.u.len())
        .map(|k| {
            let mu = membership(u_set, &triple.u.values()[k], tol)?;
            if mu.status != Status::Interior {
                return Ok(None);
            }
            if rho > 0 {
                return Ok(Some((mu.margin, f64::INFINITY)));
            }
            let mx = membership(x_set, &triple.x.values()[k], tol)?;
            Ok((mx.status == Status::Interior).then_some((mu.margin, mx.margin)))
        })
        .collect()
}

/// Widest window where `u` (and `x` when `rho = 0`) is interior.
///
/// A maximal run of interior nodes `i..=j` yields the window
/// `(t_{i-1}, t_{j+1})`, clipped to the horizon; windows shorter than two
/// grid steps are discarded.
pub fn interior_window(
    triple: &TrajectoryTriple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    rho: usize,
    tol: f64,
) -> Result<Option<InteriorWindow>> {
    let margins = interior_margins(triple, u_set, x_set, rho, tol)?;
    let last = margins.len() - 1;
    let mut best: Option<InteriorWindow> = None;
    let mut k = 0;
    while k <= last {
        if margins[k].is_none() {
            k += 1;
            continue;
        }
        let i = k;
        let (mut r_u, mut r_x) = (f64::INFINITY, f64::INFINITY);
        while k <= last {
            let Some((mu, mx)) = margins[k] else { break };
            r_u = r_u.min(mu);
            r_x = r_x.min(mx);
            k += 1;
        }
        let j = k - 1;
        let start = i.saturating_sub(1);
        let end = (j + 1).min(last);
        if end - start >= 2 && best.is_none_or(|b| end - start > b.end - b.start) {
            best = Some(InteriorWindow {
                t1: triple.u.time(start),
                t2: triple.u.time(end),
                start,
                end,
                r_u_min: r_u,
                r_x_min: r_x,
            });
        }
    }
    Ok(best)
}

/// Sampled boundary-residence test on the continuity set of `u`.
///
/// Nodes within half a step of a breakpoint are excluded. The test holds when
/// every remaining node has `u` on the boundary of `U` (`rho > 0`) or `u` or
/// `x` on a boundary (`rho = 0`). An empty continuity set gives `false`.
pub fn boundary_residence_with_breaks(
    triple: &TrajectoryTriple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    rho: usize,
    tol: f64,
    breakpoints: &[f64],
) -> Result<bool> {
    let half = 0.5 * triple.u.dt();
    let mut checked = 0;
    for k in 0..triple.u.len() {
        let t = triple.u.time(k);
        if breakpoints.iter().any(|&b| (t - b).abs() < half) {
            continue;
        }
        checked += 1;
        let u_bd = membership(u_set, &triple.u.values()[k], tol)?.status == Status::Boundary;
        let holds = if rho > 0 {
            u_bd
        } else {
            u_bd || membership(x_set, &triple.x.values()[k], tol)?.status == Status::Boundary
        };
        if !holds {
            return Ok(false);
        }
    }
    Ok(checked > 0)
}

pub fn boundary_residence(
    triple: &TrajectoryTriple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    rho: usize,
    tol: f64,
) -> Result<bool> {
    boundary_residence_with_breaks(triple, u_set, x_set, rho, tol, &[])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleComparison {
    pub u_equal: bool,
    pub x_equal: bool,
    pub y_equal: bool,
}

/// Grid sup-norm equality of each component, relative to the larger magnitude.
pub fn signals_equal(a: &SampledSignal, b: &SampledSignal, tol: f64) -> Result<bool> {
    let diff = a.sub(b)?.sup_norm();
    Ok(diff <= tol * (1.0 + a.sup_norm().max(b.sup_norm())))
}

pub fn compare_triples(a: &TrajectoryTriple, b: &TrajectoryTriple, tol: f64) -> Result<TripleComparison> {
    Ok(TripleComparison {
        u_equal: signals_equal(&a.u, &b.u, tol)?,
        x_equal: signals_equal(&a.x, &b.x, tol)?,
        y_equal: signals_equal(&a.y, &b.y, tol)?,
    })
}
