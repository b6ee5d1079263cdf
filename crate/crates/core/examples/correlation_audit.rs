// Leg-pair correlations: numeric values against the sector closed form and the tabulated 1/8 sin form.

use laddyn::analytic::{correlation_formula, correlation_from_amplitudes, PairClass, SpectralParams};
use laddyn::detect::Trajectory;
use laddyn::measures::two_point_correlation;
use laddyn::state::{Axis, Site};

pub fn run_example() -> laddyn::Result<()> {
    let d = 0.6;
    let sp = SpectralParams::new(d)?;
    let traj = Trajectory::ladder(d)?;
    let (p, q) = (Site::new(1)?, Site::new(3)?);

    println!("pair (1,3), D = {d}, D/omega = {:.6}", d / sp.omega);
    println!("{:>6} {:>11} {:>11} {:>11} {:>11}", "t", "xx", "xx sector", "xx tab", "xy");
    for k in 0..=6 {
        let t = 0.5 * k as f64;
        let psi = traj.state(t);
        println!(
            "{t:6.2} {:11.7} {:11.7} {:11.7} {:11.7}",
            two_point_correlation(&psi, 1, 3, Axis::X, Axis::X)?,
            correlation_from_amplitudes(p, q, Axis::X, Axis::X, t, d)?,
            correlation_formula(PairClass::Leg, Axis::X, t, d)?,
            two_point_correlation(&psi, 1, 3, Axis::X, Axis::Y)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
