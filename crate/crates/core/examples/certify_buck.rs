//! Certify a redundant input pair for a two-phase buck converter whose duty
//! cycles are confined to [0, 1].

use input_redundancy::scenario::{Overrides, ScenarioFile};
use input_redundancy::synth::{certify_ir_pair, CertifyOptions, Route};
use input_redundancy::Error;

fn main() -> input_redundancy::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let file = ScenarioFile::load(format!("{dir}/buck_certify.json"))?;
    let grid = file.grid(&Overrides::default())?;
    let x0 = file.x0(&Overrides::default())?;
    let (name, u) = file.signal(None, &grid)?;
    let (sys, cs) = (&file.system, &file.constraints);
    let cert = certify_ir_pair(sys, &cs.u, &cs.x, &x0, &u, &CertifyOptions::default())?;
    println!("nominal `{name}`: window {:?}, alpha = {:.3e}", cert.window, cert.alpha);
    if let Route::LoopThroughR { x_hat_i, t_mid } = &cert.route {
        println!("loop through {x_hat_i:?} at t = {t_mid}");
    }
    println!(
        "output deviation {:.2e}, both inputs admissible: {}",
        cert.verification.y_sup_diff, cert.verification.admissible_both
    );
    println!("largest input change {:.3e}", cert.u_tilde().sup_norm());

    let idle = ScenarioFile::load(format!("{dir}/buck_zero_nominal.json"))?;
    let (_, zero) = idle.signal(None, &idle.grid(&Overrides::default())?)?;
    match certify_ir_pair(&idle.system, &idle.constraints.u, &idle.constraints.x, &x0, &zero, &CertifyOptions::default()) {
        Err(Error::NoInteriorWindow) => println!("zero duty cycles: no interior window, inconclusive"),
        other => println!("zero duty cycles: {other:?}"),
    }
    Ok(())
}
