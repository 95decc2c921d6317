//! Degree and kind of input redundancy for linearly constrained systems.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{build_sigma_f, controllable_weakly_unobservable, weakly_unobservable};
use crate::geometry::{PinnedBases, SystemQuadruple};
use crate::linalg::rational::frac;
use crate::linalg::{intersect, kernel, preimage, RationalMatrix, Subspace};
use crate::trajectory::ConstraintSet;

/// Number of random evaluation points for normal-rank estimates.
pub const RANK_SAMPLES: usize = 3;
const DEFAULT_SEED: u64 = 0x1d_5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IrKind {
    #[serde(rename = "NotIR")]
    NotIr,
    Kind1,
    Kind2,
    Kind3,
}

impl IrKind {
    pub fn from_degree(rho: usize, nu: usize) -> Self {
        match (rho > 0, nu > 0) {
            (false, false) => Self::NotIr,
            (true, false) => Self::Kind1,
            (false, true) => Self::Kind2,
            (true, true) => Self::Kind3,
        }
    }

    pub fn is_ir(self) -> bool {
        self != Self::NotIr
    }
}

impl fmt::Display for IrKind {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Self::NotIr => "not IR",
            Self::Kind1 => "IR of the 1st kind",
            Self::Kind2 => "IR of the 2nd kind",
            Self::Kind3 => "IR of the 3rd kind",
        })
    }
}

/// `dim(ker B ∩ ker D)`.
pub fn rho(b: &RationalMatrix, d: &RationalMatrix) -> Result<usize> {
    ensure_dim("rho: columns of D", b.ncols(), d.ncols())?;
    Ok(kernel(&b.vstack(d)).dim())
}

/// Degree quantities of an unconstrained system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeAndKind {
    pub rho: usize,
    pub nu: usize,
    /// `B⁻¹ V(Σ) ∩ ker D`.
    #[serde(rename = "N")]
    pub n_space: Subspace,
    #[serde(rename = "dim_V")]
    pub dim_v: usize,
    #[serde(rename = "dim_R")]
    pub dim_r: usize,
    pub kind: IrKind,
}

pub fn degree_and_kind(sys: &SystemQuadruple) -> Result<DegreeAndKind> {
    let r = rho(sys.b(), sys.d())?;
    let v = weakly_unobservable(sys)?;
    let n_space = intersect(&preimage(sys.b(), &v)?, &kernel(sys.d()))?;
    let nu = n_space
        .dim()
        .checked_sub(r)
        .ok_or_else(|| Error::Consistency("ker[B; D] is not contained in N".into()))?;
    let dim_r = controllable_weakly_unobservable(sys)?.dim();
    Ok(DegreeAndKind {
        rho: r,
        nu,
        n_space,
        dim_v: v.dim(),
        dim_r,
        kind: IrKind::from_degree(r, nu),
    })
}

/// Left invertibility of the transfer matrix `G` and the system matrix `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeftInvertibility {
    pub transfer: bool,
    pub system: bool,
    pub normal_rank_p: usize,
    pub normal_rank_g: usize,
}

pub fn left_invertibility(sys: &SystemQuadruple) -> Result<LeftInvertibility> {
    left_invertibility_with_rng(sys, &mut StdRng::seed_from_u64(DEFAULT_SEED))
}

/// Normal ranks of `P(s) = [[sI − A, −B], [C, D]]` and `G(s) = C(sI − A)⁻¹B + D`,
/// taken as the maximum rank over random rational points `s` outside the
/// spectrum of `A`.
pub fn left_invertibility_with_rng<R: Rng>(sys: &SystemQuadruple, rng: &mut R) -> Result<LeftInvertibility> {
    let (n, m) = (sys.n(), sys.m());
    let mut rank_p = 0;
    let mut rank_g = 0;
    let mut taken = 0;
    while taken < RANK_SAMPLES {
        let num = rng.random_range(-1_000_000i64..=1_000_000);
        let den = rng.random_range(1i64..=1_000_000);
        let s = frac(num, den);
        let pencil = &RationalMatrix::identity(n).scale(&s) - sys.a();
        let Some(resolvent_b) = pencil.solve(sys.b()) else {
            continue;
        };
        if pencil.rank() < n {
            continue;
        }
        taken += 1;
        let p = pencil.hstack(&-sys.b()).vstack(&sys.c().hstack(sys.d()));
        rank_p = rank_p.max(p.rank());
        let g = &(sys.c() * &resolvent_b) + sys.d();
        rank_g = rank_g.max(g.rank());
    }
    let system = rank_p == n + m;
    let transfer = rank_g == m;
    if system != transfer {
        return Err(Error::Consistency(format!(
            "normal ranks disagree: rank P = {rank_p} (n + m = {}), rank G = {rank_g} (m = {m})",
            n + m
        )));
    }
    Ok(LeftInvertibility {
        transfer,
        system,
        normal_rank_p: rank_p,
        normal_rank_g: rank_g,
    })
}

/// Analysis when `V*(X) = {0}`: only static kernel directions in `U` remain.
pub fn degenerate_l0(sys: &SystemQuadruple, u_space: &Subspace) -> Result<DegreeAndKind> {
    ensure_dim("input constraint", sys.m(), u_space.ambient_dim())?;
    let directions = intersect(u_space, &kernel(&sys.b().vstack(sys.d())))?;
    let r = directions.dim();
    Ok(DegreeAndKind {
        rho: r,
        nu: 0,
        n_space: directions,
        dim_v: 0,
        dim_r: 0,
        kind: IrKind::from_degree(r, 0),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyFlag {
    pub name: String,
    pub passed: bool,
}

impl ConsistencyFlag {
    fn new(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    pub rho: usize,
    pub nu: usize,
    #[serde(rename = "N")]
    pub n_space: Subspace,
    #[serde(rename = "dim_V")]
    pub dim_v: usize,
    #[serde(rename = "dim_R")]
    pub dim_r: usize,
    pub kind: IrKind,
    pub degree: (usize, usize),
    pub uniform: bool,
    /// `dim V*(X)`.
    pub l: usize,
    #[serde(rename = "left_invertible_G")]
    pub left_invertible_g: bool,
    #[serde(rename = "left_invertible_P")]
    pub left_invertible_p: bool,
    pub consistency_flags: Vec<ConsistencyFlag>,
    /// Kind of the system with the constraints dropped.
    pub unconstrained_kind: IrKind,
    pub unconstrained_degree: (usize, usize),
}

impl RedundancyReport {
    pub fn all_consistent(&self) -> bool {
        self.consistency_flags.iter().all(|f| f.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (ur, un) = self.unconstrained_degree;
        out += &format!("unconstrained system: {} (degree ({ur}, {un}))\n", self.unconstrained_kind);
        out += &format!("constrained system:   {}", self.kind);
        if self.kind.is_ir() {
            out += &format!(", degree ({}, {}), uniform", self.rho, self.nu);
        }
        out += "\n";
        out += &format!(
            "  l = dim V*(X) = {}, dim V = {}, dim R = {}, dim N = {}\n",
            self.l,
            self.dim_v,
            self.dim_r,
            self.n_space.dim()
        );
        out += &format!(
            "  transfer matrix left invertible: {}, system matrix left invertible: {}\n",
            self.left_invertible_g, self.left_invertible_p
        );
        for f in &self.consistency_flags {
            out += &format!("  [{}] {}\n", if f.passed { "ok" } else { "FAIL" }, f.name);
        }
        out
    }
}

/// Full analysis of `(Σ, U, X)`; both sets must be linear.
pub fn analyze(sys: &SystemQuadruple, u_set: &ConstraintSet, x_set: &ConstraintSet) -> Result<RedundancyReport> {
    analyze_with(sys, u_set, x_set, None)
}

pub fn analyze_with(
    sys: &SystemQuadruple,
    u_set: &ConstraintSet,
    x_set: &ConstraintSet,
    pinned: Option<&PinnedBases>,
) -> Result<RedundancyReport> {
    let u_space = u_set.as_subspace().ok_or(Error::NonLinearConstraints)?;
    let x_space = x_set.as_subspace().ok_or(Error::NonLinearConstraints)?;
    analyze_subspaces(sys, &u_space, &x_space, pinned)
}

pub fn analyze_subspaces(
    sys: &SystemQuadruple,
    u_space: &Subspace,
    x_space: &Subspace,
    pinned: Option<&PinnedBases>,
) -> Result<RedundancyReport> {
    let free = degree_and_kind(sys)?;
    let (dk, l, li) = match build_sigma_f(sys, u_space, x_space, pinned) {
        Ok(bundle) => {
            let dk = degree_and_kind(&bundle.sigma_f)?;
            let li = left_invertibility(&bundle.sigma_f)?;
            (dk, bundle.l, li)
        }
        Err(Error::DegenerateL0) => {
            let dk = degenerate_l0(sys, u_space)?;
            // No state remains: the map is w ↦ D R L w on ker(B R).
            let inv = dk.rho == 0;
            let rank = intersect(u_space, &kernel(sys.b()))?.dim() - dk.rho;
            let li = LeftInvertibility {
                transfer: inv,
                system: inv,
                normal_rank_p: rank,
                normal_rank_g: rank,
            };
            (dk, 0, li)
        }
        Err(e) => return Err(e),
    };

    if dk.kind.is_ir() == li.system {
        return Err(Error::Consistency(format!(
            "degree ({}, {}) disagrees with left invertibility of the system matrix ({})",
            dk.rho, dk.nu, li.system
        )));
    }
    let mut flags = vec![
        ConsistencyFlag::new("nu = dim N - rho >= 0", dk.n_space.dim() == dk.rho + dk.nu),
        ConsistencyFlag::new("IR iff system matrix not left invertible", dk.kind.is_ir() != li.system),
        ConsistencyFlag::new("transfer and system matrix agree", li.transfer == li.system),
        ConsistencyFlag::new("nu > 0 iff dim R > 0", (dk.nu > 0) == (dk.dim_r > 0)),
        ConsistencyFlag::new("R within V", dk.dim_r <= dk.dim_v),
    ];
    if matches!(free.kind, IrKind::Kind1 | IrKind::Kind2) && dk.kind.is_ir() {
        flags.push(ConsistencyFlag::new(
            "constrained kind matches unconstrained kind",
            dk.kind == free.kind,
        ));
    }
    if !free.kind.is_ir() {
        flags.push(ConsistencyFlag::new(
            "constraints cannot create redundancy",
            !dk.kind.is_ir(),
        ));
    }

    Ok(RedundancyReport {
        rho: dk.rho,
        nu: dk.nu,
        n_space: dk.n_space,
        dim_v: dk.dim_v,
        dim_r: dk.dim_r,
        kind: dk.kind,
        degree: (dk.rho, dk.nu),
        uniform: dk.kind.is_ir(),
        l,
        left_invertible_g: li.transfer,
        left_invertible_p: li.system,
        consistency_flags: flags,
        unconstrained_kind: free.kind,
        unconstrained_degree: (free.rho, free.nu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    fn ex4() -> SystemQuadruple {
        SystemQuadruple::new(
            -&RationalMatrix::identity(3),
            RationalMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]),
            RationalMatrix::from_i64(&[[0, 0, 1]]),
            RationalMatrix::zeros(1, 4),
        )
        .unwrap()
    }

    fn buck() -> SystemQuadruple {
        SystemQuadruple::new(
            RationalMatrix::from_i64(&[[0, 0, -1], [0, 0, -1], [1, 1, -1]]),
            RationalMatrix::from_i64(&[[1, 0], [0, 1], [0, 0]]),
            RationalMatrix::from_i64(&[[0, 0, 1]]),
            RationalMatrix::zeros(1, 2),
        )
        .unwrap()
    }

    fn integrator() -> SystemQuadruple {
        SystemQuadruple::new(
            RationalMatrix::zeros(1, 1),
            RationalMatrix::identity(1),
            RationalMatrix::identity(1),
            RationalMatrix::zeros(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(buck().b(), buck().d()).unwrap(), 0);
        assert_eq!(rho(ex4().b(), ex4().d()).unwrap(), 1);
        assert_eq!(rho(&RationalMatrix::zeros(2, 2), &RationalMatrix::identity(2)).unwrap(), 0);
        assert!(rho(&RationalMatrix::zeros(2, 2), &RationalMatrix::identity(3)).is_err());
    }

    #[test]
    fn unconstrained_degrees() {
        let e = degree_and_kind(&ex4()).unwrap();
        assert_eq!((e.rho, e.nu, e.kind), (1, 2, IrKind::Kind3));
        let b = degree_and_kind(&buck()).unwrap();
        assert_eq!((b.rho, b.nu, b.kind, b.dim_r), (0, 1, IrKind::Kind2, 1));
    }

    #[test]
    fn left_invertibility_examples() {
        let li = left_invertibility(&integrator()).unwrap();
        assert!(li.transfer && li.system);
        let li = left_invertibility(&buck()).unwrap();
        assert!(!li.transfer && !li.system);
    }

    #[test]
    fn duplicated_actuators_with_constraints() {
        let u = ConstraintSet::LinearSubspace(kernel(&RationalMatrix::from_i64(&[[0, 0, 1, -1]])));
        let x = ConstraintSet::LinearSubspace(kernel(&RationalMatrix::from_i64(&[[0, 1, 1]])));
        let r = analyze(&ex4(), &u, &x).unwrap();
        assert_eq!(r.unconstrained_kind, IrKind::Kind3);
        assert_eq!((r.kind, r.degree, r.l), (IrKind::Kind2, (0, 1), 2));
        assert!(r.uniform && r.all_consistent());
        assert!(!r.left_invertible_g && !r.left_invertible_p);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["kind"], "Kind2");
        assert_eq!(json["degree"], serde_json::json!([0, 1]));
    }

    #[test]
    fn trivial_integrator_is_not_ir() {
        let full = ConstraintSet::FullSpace(1);
        let r = analyze(&integrator(), &full, &full).unwrap();
        assert_eq!(r.kind, IrKind::NotIr);
        assert!(!r.uniform);
    }

    #[test]
    fn degenerate_state_space() {
        let sys = SystemQuadruple::new(
            RationalMatrix::zeros(1, 1),
            RationalMatrix::from_i64(&[[1, 0]]),
            RationalMatrix::identity(1),
            RationalMatrix::zeros(1, 2),
        )
        .unwrap();
        let e2 = Subspace::from_vectors(2, &[vec![int(0), int(1)]]);
        let r = analyze_subspaces(&sys, &e2, &Subspace::zero(1), None).unwrap();
        assert_eq!((r.rho, r.nu, r.kind, r.l), (1, 0, IrKind::Kind1, 0));
        let r = analyze_subspaces(&sys, &Subspace::zero(2), &Subspace::zero(1), None).unwrap();
        assert_eq!(r.kind, IrKind::NotIr);
    }

    #[test]
    fn nonlinear_sets_are_refused() {
        let b = ConstraintSet::new_box(vec![0.0; 2], vec![1.0; 2], false).unwrap();
        assert!(matches!(
            analyze(&buck(), &b, &ConstraintSet::FullSpace(3)),
            Err(Error::NonLinearConstraints)
        ));
    }
}
