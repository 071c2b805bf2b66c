//! Multistart descent on `‖Ax - b‖² / (1 + ‖x‖²) + ρ‖x‖²`. The value is an
//! upper bound only.

use quadrange::io::DenseMatrix;
use quadrange::tls::tls_minimize;

fn main() -> quadrange::Result<()> {
    let a = DenseMatrix::new(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![0.0, 1.0]])?;
    let b = [1.0, 0.0, 2.0];
    for rho in [0.01, 0.1, 1.0] {
        let r = tls_minimize(&a, &b, rho, 8, 2000, 3)?;
        println!(
            "rho = {rho:<5} best G = {:.6} at {:?}",
            r.best_value, r.best_x
        );
    }
    Ok(())
}
