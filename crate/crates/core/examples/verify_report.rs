// Run the invariant and oracle suite on a short grid and print the report.

use laddyn::verify::{run, VerifyConfig};

pub fn run_example() -> laddyn::Result<()> {
    let cfg = VerifyConfig {
        d_values: vec![0.6, 1.0],
        t_max: 10.0,
        dt: 0.05,
        ..VerifyConfig::default()
    };
    let report = run(&cfg)?;
    print!("{}", report.render());
    assert!(report.all_passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
