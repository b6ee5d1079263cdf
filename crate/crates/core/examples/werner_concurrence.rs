// Wootters concurrence of a mixed two-qubit state: the Werner family p|Ψ⁻⟩⟨Ψ⁻| + (1−p)I/4.

use laddyn::linalg::{ComplexMatrix, C64};
use laddyn::measures::wootters_concurrence;

fn werner(p: f64) -> ComplexMatrix {
    let mut rho = ComplexMatrix::identity(4).scale(C64::new((1.0 - p) / 4.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, -s, 0.0];
    for i in 0..4 {
        for j in 0..4 {
            rho[(i, j)] += C64::new(p * psi[i] * psi[j], 0.0);
        }
    }
    rho
}

pub fn run_example() -> laddyn::Result<()> {
    println!("{:>5} {:>10} {:>10}", "p", "C", "(3p-1)/2");
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let c = wootters_concurrence(&werner(p))?;
        let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
        println!("{p:5.2} {c:10.6} {expect:10.6}");
        assert!((c - expect).abs() < 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> laddyn::Result<()> {
    run_example()
}
