// Pick the DM leg orientation whose one-particle amplitudes match the closed form.

use laddyn::calibration::{calibrate_leg_orientation, MATCH_TOL};

pub fn run_example() -> laddyn::Result<()> {
    let cal = calibrate_leg_orientation()?;
    for (i, c) in cal.candidates.iter().enumerate() {
        let legs: Vec<String> = c
            .graph
            .leg_bonds
            .iter()
            .map(|(a, b)| format!("{}->{}", a.index(), b.index()))
            .collect();
        let mark = if i == cal.selected { "*" } else { " " };
        println!("{mark} legs {:<12} residual {:.3e}", legs.join(","), c.residual);
    }
    println!("match within {MATCH_TOL:e}: {}", cal.is_match());
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
