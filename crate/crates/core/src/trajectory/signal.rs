use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// How a sampled signal is reconstructed between grid nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    PiecewiseLinear,
    ZeroOrderHold,
}

/// Uniform time grid `t0 + k dt`, `k = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Grid {
    /// Grid covering `[t0, t0 + horizon]`; the horizon is rounded to whole steps.
    pub fn new(t0: f64, dt: f64, horizon: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidSignal(format!("bad grid: dt = {dt}, horizon = {horizon}")));
        }
        let steps = (horizon / dt).round().max(1.0) as usize;
        Ok(Self { t0, dt, steps })
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.steps)
    }

    /// Index of the node at `t`, if `t` is on the grid.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let s = (t - self.t0) / self.dt;
        let k = s.round();
        if k < 0.0 || k as usize > self.steps || (s - k).abs() > 1e-6 {
            return None;
        }
        Some(k as usize)
    }
}

/// A vector signal on the uniform grid `t0 + k dt`, `k = 0..len`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    t0: f64,
    dt: f64,
    values: Vec<DVector<f64>>,
    interpolation: Interpolation,
}

impl SampledSignal {
    pub fn new(t0: f64, dt: f64, values: Vec<DVector<f64>>, interpolation: Interpolation) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidSignal(format!("time step must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidSignal("start time must be finite".into()));
        }
        if values.len() < 2 {
            return Err(Error::InvalidSignal("a signal needs at least two samples".into()));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidSignal("samples have differing dimensions".into()));
        }
        if values.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidSignal("samples must be finite".into()));
        }
        Ok(Self {
            t0,
            dt,
            values,
            interpolation,
        })
    }

    /// Samples `f` at `steps + 1` nodes.
    pub fn from_fn(
        t0: f64,
        dt: f64,
        steps: usize,
        interpolation: Interpolation,
        mut f: impl FnMut(f64) -> DVector<f64>,
    ) -> Result<Self> {
        let values = (0..=steps).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::new(t0, dt, values, interpolation)
    }

    pub fn zeros(t0: f64, dt: f64, steps: usize, dim: usize, interpolation: Interpolation) -> Result<Self> {
        Self::from_fn(t0, dt, steps, interpolation, |_| DVector::zeros(dim))
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of grid intervals.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.steps())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    /// Value at an arbitrary time; clamps to the horizon.
    pub fn eval(&self, t: f64) -> DVector<f64> {
        let s = ((t - self.t0) / self.dt).max(0.0);
        let k = (s.floor() as usize).min(self.steps());
        if k == self.steps() {
            return self.values[k].clone();
        }
        match self.interpolation {
            Interpolation::ZeroOrderHold => self.values[k].clone(),
            Interpolation::PiecewiseLinear => {
                let theta = (s - k as f64).clamp(0.0, 1.0);
                &self.values[k] * (1.0 - theta) + &self.values[k + 1] * theta
            }
        }
    }

    /// Resamples on a grid whose step divides the current one.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidSignal("refinement factor must be positive".into()));
        }
        let dt = self.dt / factor as f64;
        let steps = self.steps() * factor;
        let values = (0..=steps)
            .map(|k| {
                let (coarse, sub) = (k / factor, k % factor);
                if sub == 0 || self.interpolation == Interpolation::ZeroOrderHold {
                    self.values[coarse].clone()
                } else {
                    let theta = sub as f64 / factor as f64;
                    &self.values[coarse] * (1.0 - theta) + &self.values[coarse + 1] * theta
                }
            })
            .collect();
        Self::new(self.t0, dt, values, self.interpolation)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.len() == other.len() && close(self.t0, other.t0) && close(self.dt, other.dt)
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, mut f: impl FnMut(&DVector<f64>) -> DVector<f64>) -> Result<Self> {
        Self::new(self.t0, self.dt, self.values.iter().map(&mut f).collect(), self.interpolation)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * alpha).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>) -> Result<Self> {
        self.ensure_same_grid(other)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "signal arithmetic",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    /// Largest Euclidean norm over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn grid(&self) -> Grid {
        Grid {
            t0: self.t0,
            dt: self.dt,
            steps: self.steps(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SignalRepr {
    t0: f64,
    dt: f64,
    interpolation: Interpolation,
    values: Vec<Vec<f64>>,
}

impl Serialize for SampledSignal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignalRepr {
            t0: self.t0,
            dt: self.dt,
            interpolation: self.interpolation,
            values: self.values.iter().map(|v| v.iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SampledSignal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SignalRepr::deserialize(d)?;
        let values = r.values.into_iter().map(DVector::from_vec).collect();
        SampledSignal::new(r.t0, r.dt, values, r.interpolation).map_err(serde::de::Error::custom)
    }
}

/// Input, state and output on a common grid, with the initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTriple {
    pub u: SampledSignal,
    pub x: SampledSignal,
    pub y: SampledSignal,
    #[serde(with = "dvector")]
    pub x0: DVector<f64>,
}

pub(crate) mod dvector {
    use nalgebra::DVector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        Ok(DVector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

impl TrajectoryTriple {
    pub fn new(u: SampledSignal, x: SampledSignal, y: SampledSignal) -> Result<Self> {
        u.ensure_same_grid(&x)?;
        u.ensure_same_grid(&y)?;
        let x0 = x.values()[0].clone();
        Ok(Self { u, x, y, x0 })
    }
}
