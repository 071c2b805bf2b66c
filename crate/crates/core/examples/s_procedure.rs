//! Multipliers for `<A0x,x> <= α0` on `{<A1x,x> <= α1, <A2x,x> <= α2}`, and a
//! violator when the implication fails.

use quadrange::certs::{search_violator, solve_sprocedure, sproc_refutation, SProcInstance};
use quadrange::SymMatrix;

fn instance(alpha0: f64) -> quadrange::Result<SProcInstance> {
    Ok(SProcInstance {
        a0: SymMatrix::diagonal(&[1.0, 0.5, -1.0])?,
        a1: SymMatrix::identity(3),
        a2: SymMatrix::diagonal(&[2.0, 0.0, 1.0])?,
        alpha0,
        alpha1: 1.0,
        alpha2: 1.0,
        slater: Some(vec![0.0; 3]),
    })
}

fn main() -> quadrange::Result<()> {
    for alpha0 in [1.2, 0.6] {
        let inst = instance(alpha0)?;
        let out = solve_sprocedure(&inst)?;
        let c = out.pair();
        println!(
            "alpha0 = {alpha0}: certificate {} tau = ({:.4}, {:.4}) value {:.3e}",
            out.is_certificate(),
            c.tau[0],
            c.tau[1],
            c.value
        );
        if let Some((x, excess)) = search_violator(&inst, false, 20000, 9)? {
            let refutes = sproc_refutation(&inst, &x, c.tau, false).is_some_and(|r| r.refutes());
            println!("  violator excess {excess:.4}, refutes the pair: {refutes}");
        }
    }
    Ok(())
}
