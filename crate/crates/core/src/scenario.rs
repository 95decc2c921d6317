//! Self-contained JSON scenario files: a system, its constraint sets, and
//! optionally an initial state, named input signals, a grid and pinned bases.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{PinnedBases, SystemQuadruple};
use crate::linalg::RationalMatrix;
use crate::trajectory::{ConstraintSet, Grid, Interpolation, SampledSignal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    pub u: ConstraintSet,
    pub x: ConstraintSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub t0: f64,
    pub dt: f64,
    pub horizon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    pub coef: Vec<f64>,
    pub rate: f64,
}

/// A named input signal; everything except `sampled` is evaluated on the
/// scenario grid and interpolated linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Sampled(SampledSignal),
    /// Piecewise linear through `(times[i], values[i])`, constant outside.
    Knots { times: Vec<f64>, values: Vec<Vec<f64>> },
    /// `Σ coef · exp(rate t)`.
    Exponentials { terms: Vec<ExpTerm> },
    Constant { value: Vec<f64> },
}

impl SignalSpec {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Sampled(s) => Some(s.dim()),
            Self::Knots { values, .. } => values.first().map(Vec::len),
            Self::Exponentials { terms } => terms.first().map(|t| t.coef.len()),
            Self::Constant { value } => Some(value.len()),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledSignal> {
        let pwl = Interpolation::PiecewiseLinear;
        match self {
            Self::Sampled(s) => {
                let own = s.grid();
                if on_grid(s, grid) {
                    return Ok(s.clone());
                }
                let factor = (own.dt / grid.dt).round();
                if factor >= 1.0
                    && ((own.dt / grid.dt) - factor).abs() < 1e-9 * factor
                    && (own.t0 - grid.t0).abs() < 1e-12
                    && own.steps * factor as usize == grid.steps
                {
                    return s.refine(factor as usize);
                }
                Err(Error::GridMismatch)
            }
            Self::Knots { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::InvalidSignal("knots need matching, nonempty times and values".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidSignal("knot times must increase".into()));
                }
                let dim = values[0].len();
                if values.iter().any(|v| v.len() != dim) {
                    return Err(Error::InvalidSignal("knot values differ in dimension".into()));
                }
                let at = |t: f64| -> DVector<f64> {
                    let j = times.partition_point(|&s| s <= t);
                    if j == 0 {
                        return DVector::from_column_slice(&values[0]);
                    }
                    if j == times.len() {
                        return DVector::from_column_slice(&values[j - 1]);
                    }
                    let theta = (t - times[j - 1]) / (times[j] - times[j - 1]);
                    let (a, b) = (DVector::from_column_slice(&values[j - 1]), DVector::from_column_slice(&values[j]));
                    a * (1.0 - theta) + b * theta
                };
                SampledSignal::from_fn(grid.t0, grid.dt, grid.steps, pwl, at)
            }
            Self::Exponentials { terms } => {
                let dim = terms
                    .first()
                    .map(|t| t.coef.len())
                    .ok_or_else(|| Error::InvalidSignal("no exponential terms".into()))?;
                if terms.iter().any(|t| t.coef.len() != dim) {
                    return Err(Error::InvalidSignal("exponential terms differ in dimension".into()));
                }
                SampledSignal::from_fn(grid.t0, grid.dt, grid.steps, pwl, |t| {
                    terms
                        .iter()
                        .fold(DVector::zeros(dim), |acc, term| acc + DVector::from_column_slice(&term.coef) * (term.rate * t).exp())
                })
            }
            Self::Constant { value } => {
                SampledSignal::from_fn(grid.t0, grid.dt, grid.steps, pwl, |_| DVector::from_column_slice(value))
            }
        }
    }
}

fn on_grid(s: &SampledSignal, grid: &Grid) -> bool {
    let g = s.grid();
    g.steps == grid.steps
        && (g.t0 - grid.t0).abs() <= 1e-12 * (1.0 + g.t0.abs())
        && (g.dt - grid.dt).abs() <= 1e-12 * g.dt
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub signals: BTreeMap<String, SignalSpec>,
    /// Name of the signal used as nominal input when none is requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned: Option<PinnedBases>,
    /// Discontinuity times of the nominal input.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioFile {
    pub system: SystemQuadruple,
    pub constraints: Constraints,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "A")]
    a: RationalMatrix,
    #[serde(rename = "B")]
    b: RationalMatrix,
    #[serde(rename = "C")]
    c: RationalMatrix,
    #[serde(rename = "D")]
    d: RationalMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    system: RawSystem,
    constraints: Constraints,
    #[serde(default)]
    scenario: Option<Scenario>,
}

/// Overrides applied on top of the file's scenario block.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub x0: Option<Vec<f64>>,
}

impl ScenarioFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let system = SystemQuadruple::new(raw.system.a, raw.system.b, raw.system.c, raw.system.d)?;
        ensure_dim("input constraint dimension", system.m(), raw.constraints.u.dim())?;
        ensure_dim("state constraint dimension", system.n(), raw.constraints.x.dim())?;
        let file = Self {
            system,
            constraints: raw.constraints,
            scenario: raw.scenario,
        };
        file.check_scenario()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn check_scenario(&self) -> Result<()> {
        let Some(sc) = &self.scenario else { return Ok(()) };
        if let Some(x0) = &sc.x0 {
            ensure_dim("x0", self.system.n(), x0.len())?;
        }
        for spec in sc.signals.values() {
            if let Some(d) = spec.dim() {
                ensure_dim("signal dimension", self.system.m(), d)?;
            }
        }
        if let Some(name) = &sc.nominal {
            if !sc.signals.contains_key(name) {
                return Err(Error::Parse(format!("nominal signal {name:?} is not defined")));
            }
        }
        Ok(())
    }

    fn scenario(&self) -> Result<&Scenario> {
        self.scenario
            .as_ref()
            .ok_or_else(|| Error::Parse("file has no scenario block".into()))
    }

    pub fn grid(&self, ov: &Overrides) -> Result<Grid> {
        let spec = self.scenario.as_ref().and_then(|s| s.grid);
        let t0 = spec.map_or(0.0, |g| g.t0);
        let dt = ov
            .dt
            .or(spec.map(|g| g.dt))
            .ok_or_else(|| Error::Parse("no time step given".into()))?;
        let horizon = ov
            .horizon
            .or(spec.map(|g| g.horizon))
            .ok_or_else(|| Error::Parse("no horizon given".into()))?;
        Grid::new(t0, dt, horizon)
    }

    pub fn x0(&self, ov: &Overrides) -> Result<DVector<f64>> {
        let x0 = match &ov.x0 {
            Some(x0) => x0.clone(),
            None => self
                .scenario()?
                .x0
                .clone()
                .ok_or_else(|| Error::Parse("no initial state given".into()))?,
        };
        ensure_dim("x0", self.system.n(), x0.len())?;
        Ok(DVector::from_vec(x0))
    }

    /// Resolves a signal by name, falling back to the declared nominal or the
    /// only signal in the file.
    pub fn signal(&self, name: Option<&str>, grid: &Grid) -> Result<(String, SampledSignal)> {
        let sc = self.scenario()?;
        let name = match name.map(str::to_owned).or_else(|| sc.nominal.clone()) {
            Some(n) => n,
            None if sc.signals.len() == 1 => sc.signals.keys().next().cloned().unwrap_or_default(),
            None => return Err(Error::Parse("ambiguous input signal; name one".into())),
        };
        let spec = sc
            .signals
            .get(&name)
            .ok_or_else(|| Error::Parse(format!("unknown signal {name:?}")))?;
        let sig = spec.sample(grid)?;
        ensure_dim("signal dimension", self.system.m(), sig.dim())?;
        Ok((name, sig))
    }

    pub fn pinned(&self) -> Option<&PinnedBases> {
        self.scenario.as_ref().and_then(|s| s.pinned.as_ref())
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.scenario.as_ref().map_or(&[], |s| &s.breakpoints)
    }
}
