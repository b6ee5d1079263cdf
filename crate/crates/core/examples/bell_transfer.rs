// A Bell pair on the first rung moves to the last rung and back.
//
// ```bash
// cargo run --example bell_transfer
// ```

use laddyn::dynamics::Propagator;
use laddyn::measures::pair_concurrence;
use laddyn::model::{build_hamiltonian, initial_state, CouplingGraph, ModelParams};

pub fn run_example() -> laddyn::Result<()> {
    let d = 0.6;
    let h = build_hamiltonian(&ModelParams::new(d)?, &CouplingGraph::ladder())?;
    let prop = Propagator::new(&h, &initial_state())?;
    let t_tr = laddyn::analytic::transfer_time(d, 0)?;

    println!("D = {d}, first transfer at t = {t_tr:.6}");
    println!("{:>8} {:>10} {:>10} {:>10}", "t", "C12", "C34", "C13");
    for k in 0..=8 {
        let t = t_tr * k as f64 / 4.0;
        let psi = prop.evolve(t);
        println!(
            "{t:8.4} {:10.6} {:10.6} {:10.6}",
            pair_concurrence(&psi, 1, 2)?,
            pair_concurrence(&psi, 3, 4)?,
            pair_concurrence(&psi, 1, 3)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
