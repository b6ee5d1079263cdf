// Detect transfer and W-state events numerically and compare with the closed-form times.

use laddyn::detect::{Trajectory, DEFAULT_COARSE_DT};

pub fn run_example() -> laddyn::Result<()> {
    let traj = Trajectory::ladder(1.0)?;
    let mut events = traj.find_transfer_events(10.0, DEFAULT_COARSE_DT, 1e-9)?;
    events.extend(traj.find_w_events(10.0, DEFAULT_COARSE_DT, 1e-9)?);
    events.sort_by(|a, b| a.t_detected.total_cmp(&b.t_detected));

    println!("{:>9} {:>2} {:>14} {:>14} {:>10}", "kind", "n", "t_detected", "t_predicted", "|dt|");
    for e in &events {
        println!(
            "{:>9} {:>2} {:14.10} {:14.10} {:10.2e}",
            e.kind.label(),
            e.n,
            e.t_detected,
            e.t_predicted,
            e.timing_error()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
