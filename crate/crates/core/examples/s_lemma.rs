//! An S-lemma certificate for `F(z) = z1 - t` over the image of
//! `(x² - 1, x²)`, checked by the split closed-form verifier.

use quadrange::certs::{
    check_sign_clauses, solve_slemma, verify_slemma_certificate, QuadCriterion, SLemmaOutcome,
};
use quadrange::{QuadForm, SymMatrix};

fn main() -> quadrange::Result<()> {
    let phi1 = QuadForm::new(SymMatrix::identity(1), vec![0.0], -1.0)?;
    let phi2 = QuadForm::new(SymMatrix::identity(1), vec![0.0], 0.0)?;
    let crit = QuadCriterion::new(SymMatrix::zeros(2), [1.0, 0.0], -1.0)?;
    match solve_slemma(&crit, &phi1, &phi2, 2000, 1)? {
        SLemmaOutcome::Certificate(c) => {
            println!(
                "alpha = {:.6}, beta = {:.6}, lambda = {:.6}",
                c.alpha, c.beta, c.lambda
            );
            let v = verify_slemma_certificate(c.alpha, c.beta, &crit, &phi1, &phi2)?;
            println!("verified: {}", v.is_verified());
            let clauses = check_sign_clauses(&c, &phi1, &phi2, &crit);
            println!("sign clauses hold: {}", clauses.all_hold);
        }
        other => println!("{other:?}"),
    }

    // Shifting t past the minimum of F on the image yields a counterexample.
    let bad = QuadCriterion::new(SymMatrix::zeros(2), [1.0, 0.0], 1.0)?;
    if let SLemmaOutcome::Counterexample { x, value, .. } =
        solve_slemma(&bad, &phi1, &phi2, 2000, 1)?
    {
        println!("counterexample x = {:?}, F = {value:.4}", x);
    }
    Ok(())
}
