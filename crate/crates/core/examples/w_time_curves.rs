// W times t_w(D, n) for n = 0..9 over D in [0.1, 4.0], as CSV on stdout.

use laddyn::detect::w_time_curves;
use laddyn::output::{Cell, Table};

pub fn w_time_table() -> laddyn::Result<Table> {
    let ds: Vec<f64> = (1..=40).map(|k| k as f64 / 10.0).collect();
    let curves = w_time_curves(&ds, 9)?;
    let mut columns = vec!["d".to_string()];
    columns.extend((0..curves.curves.len()).map(|n| format!("t_w_{n}")));
    let mut table = Table::new(columns);
    for (i, &d) in curves.d.iter().enumerate() {
        let mut row = vec![Cell::from(d)];
        row.extend(curves.curves.iter().map(|c| Cell::from(c[i])));
        table.push(row);
    }
    assert!(curves.curves_decreasing() && curves.curves_ordered());
    Ok(table)
}

pub fn run_example() -> laddyn::Result<()> {
    print!("{}", w_time_table()?.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
