// Sweep a small (D, t) grid and serialize the rows as JSON.

use laddyn::detect::sweep;
use laddyn::dynamics::time_grid;
use laddyn::output::{Cell, Table};

pub fn run_example() -> laddyn::Result<()> {
    let rows = sweep(&[0.5, 1.0, 2.0], &time_grid(0.0, 2.0, 0.5)?)?;
    let mut table = Table::new(["d", "t", "c_first", "c_last", "c_leg", "s_tot_z"]);
    for r in &rows {
        table.push([r.d, r.t, r.c_first, r.c_last, r.c_leg, r.s_tot_z].map(Cell::from).to_vec());
    }
    let json = table.to_json();
    assert_eq!(Table::from_json(&json)?, table);
    print!("{json}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
