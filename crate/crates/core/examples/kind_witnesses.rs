//! Three admissible inputs with one output: two share their state
//! trajectory, the third does not.

use input_redundancy::scenario::{Overrides, ScenarioFile};
use input_redundancy::trajectory::{admissible, compare_triples, simulate, FloatSystem};

fn main() -> input_redundancy::Result<()> {
    let file = ScenarioFile::load(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ex5.json"))?;
    let ov = Overrides::default();
    let grid = file.grid(&ov)?;
    let x0 = file.x0(&ov)?;
    let sys = FloatSystem::from(&file.system);
    let mut triples = Vec::new();
    for name in ["u4", "u5", "u6"] {
        let (_, u) = file.signal(Some(name), &grid)?;
        let tr = simulate(&sys, &x0, &u)?;
        let ok = admissible(&tr, &file.constraints.u, &file.constraints.x, 1e-9)?.ok;
        println!("{name}: admissible = {ok}, sup |y| = {:.2e}", tr.y.sup_norm());
        triples.push(tr);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = compare_triples(&triples[i], &triples[j], 1e-6)?;
        println!(
            "u{} vs u{}: same input {}, same state {}, same output {}",
            i + 4,
            j + 4,
            c.u_equal,
            c.x_equal,
            c.y_equal
        );
    }
    Ok(())
}
