//! Searching for a positive definite combination of two forms, with the
//! hull oracle as a cross-check.

use quadrange::pencil::{find_pd_combination, hull_separation_oracle, PencilOutcome};
use quadrange::SymMatrix;

fn report(name: &str, a1: &SymMatrix, a2: &SymMatrix) -> quadrange::Result<()> {
    let out = find_pd_combination(a1, a2, 720, 60)?;
    let hull = hull_separation_oracle(a1, a2, 2000, 3)?;
    match &out {
        PencilOutcome::Certificate(c) => println!(
            "{name}: mu = ({:.4}, {:.4}), lambda_min = {:.4e}",
            c.mu[0], c.mu[1], c.lambda_min
        ),
        PencilOutcome::NoPdCombination(e) => {
            println!("{name}: none, best lambda_min = {:.4e}", e.best_lambda_min)
        }
    }
    println!(
        "  hull oracle: {:?} at distance {:.4e}",
        hull.decision, hull.distance
    );
    Ok(())
}

fn main() -> quadrange::Result<()> {
    // Indefinite pair whose combination 0.6*A1 + 0.8*A2 is positive definite.
    let a1 = SymMatrix::diagonal(&[3.0, -1.0, 1.0])?;
    let a2 = SymMatrix::diagonal(&[-1.0, 2.0, 0.5])?;
    report("definite", &a1, &a2)?;

    // Traceless pair: the origin is in the range.
    let b1 = SymMatrix::diagonal(&[1.0, -1.0])?;
    let b2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
    report("traceless", &b1, &b2)
}
