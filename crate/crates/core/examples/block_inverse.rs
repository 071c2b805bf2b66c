//! Homogenizes a non-homogeneous pair, adds the corner form and inverts the
//! bordered operator through its Schur complement.

use quadrange::linalg::identity_residual;
use quadrange::quadmap::{homogenize_pair, PencilTransform};
use quadrange::{QuadForm, SymMatrix};

fn main() -> quadrange::Result<()> {
    let phi1 = QuadForm::new(
        SymMatrix::diagonal(&[1.0, -2.0, 0.5])?,
        vec![0.3, 0.0, -1.0],
        0.7,
    )?;
    let phi2 = QuadForm::new(
        SymMatrix::from_rows(&[
            vec![2.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])?,
        vec![1.0, -1.0, 0.5],
        -0.2,
    )?;
    let t = PencilTransform::from_rows([1.0, 0.0], [0.0, 1.0])?;
    let h = homogenize_pair(&phi1, &phi2, &t, 1.0)?;
    println!("mu3 bound: {:.6}", h.mu3_bound);
    println!("mu3 used:  {:.6}", h.mu3);
    let res = identity_residual(&h.z.as_dense(), &h.z_inverse.as_dense());
    println!("|Z Z^-1 - I|_max = {res:.3e}");
    Ok(())
}
