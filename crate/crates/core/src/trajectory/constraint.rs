use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{kernel, RationalMatrix, Subspace};

/// Input or state constraint set.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    FullSpace(usize),
    LinearSubspace(Subspace),
    /// `lower <= v <= upper` componentwise, bounds may be infinite.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
        strict: bool,
    },
    /// `G v <= g`.
    Polyhedron {
        g_mat: DMatrix<f64>,
        g_vec: DVector<f64>,
        strict: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub status: Status,
    pub margin: f64,
}

impl ConstraintSet {
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>, strict: bool) -> Result<Self> {
        ensure_dim("box bounds", lower.len(), upper.len())?;
        if lower.iter().chain(&upper).any(|b| b.is_nan()) {
            return Err(Error::InvalidConstraint("box bound is NaN".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidConstraint("box lower bound exceeds upper bound".into()));
        }
        if lower.contains(&f64::INFINITY) || upper.contains(&f64::NEG_INFINITY) {
            return Err(Error::InvalidConstraint("box is empty".into()));
        }
        Ok(Self::Box { lower, upper, strict })
    }

    pub fn new_polyhedron(g_mat: DMatrix<f64>, g_vec: DVector<f64>, strict: bool) -> Result<Self> {
        ensure_dim("polyhedron rows", g_mat.nrows(), g_vec.len())?;
        if g_mat.row_iter().any(|r| r.norm() == 0.0) {
            return Err(Error::InvalidConstraint("polyhedron has a zero row".into()));
        }
        if g_mat.iter().chain(g_vec.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConstraint("polyhedron data must be finite".into()));
        }
        Ok(Self::Polyhedron { g_mat, g_vec, strict })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FullSpace(n) => *n,
            Self::LinearSubspace(s) => s.ambient_dim(),
            Self::Box { lower, .. } => lower.len(),
            Self::Polyhedron { g_mat, .. } => g_mat.ncols(),
        }
    }

    /// The exact subspace when the set is linear.
    pub fn as_subspace(&self) -> Option<Subspace> {
        match self {
            Self::FullSpace(n) => Some(Subspace::full(*n)),
            Self::LinearSubspace(s) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Self::Box { strict: true, .. } | Self::Polyhedron { strict: true, .. })
    }
}

/// Classifies `v` against `cs`; `tol` is an absolute threshold on the margin.
///
/// For strict (open) sets, points on the boundary are reported as outside.
pub fn membership(cs: &ConstraintSet, v: &DVector<f64>, tol: f64) -> Result<Membership> {
    ensure_dim("membership vector", cs.dim(), v.len())?;
    let margin = match cs {
        ConstraintSet::FullSpace(_) => {
            return Ok(Membership {
                status: Status::Interior,
                margin: f64::INFINITY,
            })
        }
        ConstraintSet::LinearSubspace(s) => return Ok(subspace_membership(s, v, tol)),
        ConstraintSet::Box { lower, upper, .. } => lower
            .iter()
            .zip(upper)
            .zip(v.iter())
            .map(|((&l, &u), &x)| (x - l).min(u - x))
            .fold(f64::INFINITY, f64::min),
        ConstraintSet::Polyhedron { g_mat, g_vec, .. } => g_mat
            .row_iter()
            .zip(g_vec.iter())
            .map(|(row, &h)| (h - row.dot(&v.transpose())) / row.norm())
            .fold(f64::INFINITY, f64::min),
    };
    let status = if margin > tol {
        Status::Interior
    } else if margin >= -tol {
        Status::Boundary
    } else {
        Status::Outside
    };
    if cs.is_strict() && status == Status::Boundary {
        return Ok(Membership {
            status: Status::Outside,
            margin: margin.min(-f64::MIN_POSITIVE),
        });
    }
    let margin = match status {
        Status::Boundary => 0.0,
        _ => margin,
    };
    Ok(Membership { status, margin })
}

fn subspace_membership(s: &Subspace, v: &DVector<f64>, tol: f64) -> Membership {
    if s.is_full() {
        return Membership {
            status: Status::Interior,
            margin: f64::INFINITY,
        };
    }
    let dist = if s.is_zero() {
        v.norm()
    } else {
        let q = s.basis().to_f64().qr().q();
        (v - &q * (q.transpose() * v)).norm()
    };
    if dist <= tol * (1.0 + v.norm()) {
        Membership {
            status: Status::Boundary,
            margin: 0.0,
        }
    } else {
        Membership {
            status: Status::Outside,
            margin: -dist,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Text(String),
    Null(()),
}

impl Bound {
    fn resolve(self, missing: f64) -> std::result::Result<f64, String> {
        match self {
            Bound::Number(x) => Ok(x),
            Bound::Null(()) => Ok(missing),
            Bound::Text(t) => match t.trim() {
                "inf" | "+inf" | "Infinity" | "+Infinity" => Ok(f64::INFINITY),
                "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(|_| format!("bad bound {other:?}")),
            },
        }
    }
}

fn encode_bound(x: f64) -> serde_json::Value {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        x.into()
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawConstraint {
    Full {
        dim: usize,
    },
    Subspace {
        span: Option<RationalMatrix>,
        kernel_of: Option<RationalMatrix>,
        dim: Option<usize>,
    },
    Box {
        lower: Vec<Bound>,
        upper: Vec<Bound>,
        #[serde(default)]
        strict: bool,
    },
    Polyhedron {
        #[serde(rename = "G")]
        g_mat: Vec<Vec<f64>>,
        g: Vec<f64>,
        #[serde(default)]
        strict: bool,
    },
}

impl TryFrom<RawConstraint> for ConstraintSet {
    type Error = Error;

    fn try_from(raw: RawConstraint) -> Result<Self> {
        match raw {
            RawConstraint::Full { dim } => Ok(Self::FullSpace(dim)),
            RawConstraint::Subspace { span, kernel_of, dim } => {
                let s = match (span, kernel_of) {
                    (Some(m), None) => {
                        if m.ncols() == 0 {
                            Subspace::zero(dim.unwrap_or(m.nrows()))
                        } else {
                            Subspace::from_spanning(&m)
                        }
                    }
                    (None, Some(m)) => kernel(&m),
                    _ => {
                        return Err(Error::InvalidConstraint(
                            "subspace needs exactly one of span or kernel_of".into(),
                        ))
                    }
                };
                if let Some(d) = dim {
                    ensure_dim("subspace ambient dimension", d, s.ambient_dim())?;
                }
                Ok(Self::LinearSubspace(s))
            }
            RawConstraint::Box { lower, upper, strict } => {
                let lower = lower
                    .into_iter()
                    .map(|b| b.resolve(f64::NEG_INFINITY))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(Error::InvalidConstraint)?;
                let upper = upper
                    .into_iter()
                    .map(|b| b.resolve(f64::INFINITY))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(Error::InvalidConstraint)?;
                Self::new_box(lower, upper, strict)
            }
            RawConstraint::Polyhedron { g_mat, g, strict } => {
                let cols = g_mat.first().map_or(0, Vec::len);
                if g_mat.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidConstraint("ragged polyhedron matrix".into()));
                }
                let m = DMatrix::from_row_iterator(g_mat.len(), cols, g_mat.into_iter().flatten());
                Self::new_polyhedron(m, DVector::from_vec(g), strict)
            }
        }
    }
}

impl<'de> Deserialize<'de> for ConstraintSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConstraint::deserialize(d)?;
        ConstraintSet::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ConstraintSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde_json::json;
        let value = match self {
            Self::FullSpace(n) => json!({"kind": "full", "dim": n}),
            Self::LinearSubspace(sub) => json!({
                "kind": "subspace",
                "dim": sub.ambient_dim(),
                "span": sub.basis(),
            }),
            Self::Box { lower, upper, strict } => json!({
                "kind": "box",
                "lower": lower.iter().map(|&x| encode_bound(x)).collect::<Vec<_>>(),
                "upper": upper.iter().map(|&x| encode_bound(x)).collect::<Vec<_>>(),
                "strict": strict,
            }),
            Self::Polyhedron { g_mat, g_vec, strict } => json!({
                "kind": "polyhedron",
                "G": g_mat.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
                "g": g_vec.iter().copied().collect::<Vec<_>>(),
                "strict": strict,
            }),
        };
        value.serialize(s)
    }
}
