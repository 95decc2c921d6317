//! Classify the redundancy of a scenario: `cargo run --example
//! classify_redundancy -- path/to/scenario.json`.

use input_redundancy::analysis::analyze_with;
use input_redundancy::scenario::ScenarioFile;

fn main() -> input_redundancy::Result<()> {
    let paths: Vec<String> = std::env::args().skip(1).collect();
    let paths = if paths.is_empty() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
        vec![format!("{dir}/ex4.json"), format!("{dir}/buck_unconstrained.json")]
    } else {
        paths
    };
    for path in paths {
        let file = ScenarioFile::load(&path)?;
        let report = analyze_with(&file.system, &file.constraints.u, &file.constraints.x, file.pinned())?;
        println!("== {path}\n{}", report.to_text());
    }
    Ok(())
}
