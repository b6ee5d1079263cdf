// At the first W time every pair carries concurrence 1/2 and the state is a W state up to local phases.

use laddyn::analytic::w_time;
use laddyn::detect::Trajectory;
use laddyn::dynamics::{one_particle_amplitudes, DEFAULT_LEAKAGE_TOL};
use laddyn::measures::pair_observables;
use laddyn::state::all_pairs;

pub fn run_example() -> laddyn::Result<()> {
    let d = 1.5;
    let t = w_time(d, 0)?;
    let psi = Trajectory::ladder(d)?.state(t);
    let amps = one_particle_amplitudes(&psi, DEFAULT_LEAKAGE_TOL)?;

    println!("D = {d}, t_w = {t:.10}");
    println!("W fidelity = {:.15}", amps.w_fidelity());
    for (i, b) in amps.b.iter().enumerate() {
        println!("  b{} = {:+.6} {:+.6}i  |b| = {:.6}", i + 1, b.re, b.im, b.norm());
    }
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "pair", "C", "xx", "yy", "zz");
    for (p, q) in all_pairs() {
        let o = pair_observables(&psi, p.index(), q.index())?;
        println!(
            "{:>5} {:10.6} {:10.6} {:10.6} {:10.2e}",
            format!("{}{}", p.index(), q.index()),
            o.concurrence,
            o.chi[0][0],
            o.chi[1][1],
            o.chi[2][2]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
