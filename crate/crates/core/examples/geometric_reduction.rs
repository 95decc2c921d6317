//! Reduce a linearly constrained system to an unconstrained one and map a
//! reduced trajectory back.

use input_redundancy::geometry::{build_sigma_f, embed_triple};
use input_redundancy::linalg::Subspace;
use input_redundancy::scenario::ScenarioFile;
use input_redundancy::trajectory::{simulate, FloatSystem, Interpolation, SampledSignal};
use nalgebra::DVector;

fn main() -> input_redundancy::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ex4.json");
    let file = ScenarioFile::load(path)?;
    let u: Subspace = file.constraints.u.as_subspace().expect("linear input set");
    let x: Subspace = file.constraints.x.as_subspace().expect("linear state set");
    let bundle = build_sigma_f(&file.system, &u, &x, file.pinned())?;
    let sf = &bundle.sigma_f;
    println!("V*(X) has dimension {}", bundle.l);
    println!("A_F =\n{}\nB_F =\n{}\nC_F = {}\nD_F = {}", sf.a(), sf.b(), sf.c(), sf.d());

    let w = SampledSignal::from_fn(0.0, 0.01, 300, Interpolation::PiecewiseLinear, |_| DVector::from_vec(vec![1.0, 1.0]))?;
    let eta0 = DVector::from_vec(vec![1.0, 0.0]);
    let reduced = simulate(&FloatSystem::from(sf), &eta0, &w)?;
    let full = embed_triple(&bundle, &eta0, &w, &reduced.x, &reduced.y)?;
    let direct = simulate(&FloatSystem::from(&file.system), &full.x0, &full.u)?;
    println!("u(3) = {:?}", full.u.values().last().unwrap().as_slice());
    println!(
        "embedded and directly simulated outputs differ by {:.2e}",
        direct.y.sub(&full.y)?.sup_norm()
    );
    Ok(())
}
