//! Constraint geometry, exact-discretization simulation and sampled checks on
//! trajectories.

mod checks;
mod constraint;
mod signal;
mod simulate;

pub use checks::{
    admissible, boundary_residence, boundary_residence_with_breaks, compare_triples, interior_window,
    signals_equal, Admissibility, InteriorWindow, TripleComparison,
};
pub use constraint::{membership, ConstraintSet, Membership, Status};
pub use signal::{Grid, Interpolation, SampledSignal, TrajectoryTriple};
pub use simulate::{simulate, Discretization, FloatSystem};
