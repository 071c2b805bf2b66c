//! A definite combination of three forms lifted into a transform; the
//! image of the transformed tuple is the mapped image of the original.

use quadrange::pencil::find_pd_combination3;
use quadrange::quadmap::{apply_transform, evaluate_tuple, PencilTransform};
use quadrange::rng::{gaussian_vec, seeded};
use quadrange::{QuadForm, SymMatrix};

fn main() -> quadrange::Result<()> {
    let a1 = SymMatrix::diagonal(&[2.0, -1.0, 0.5, 1.0])?;
    let a2 = SymMatrix::diagonal(&[-1.0, 2.0, 1.0, -0.5])?;
    let a3 = SymMatrix::diagonal(&[0.5, 0.5, -1.0, 1.0])?;
    let out = find_pd_combination3(&a1, &a2, &a3, 20000, 60)?;
    let mu = out.mu();
    println!(
        "mu = ({:.4}, {:.4}, {:.4}), margin {:.4e}",
        mu[0],
        mu[1],
        mu[2],
        out.margin()
    );

    let t = PencilTransform::lift_third([mu[0], mu[1], mu[2]])?;
    let tuple: Vec<QuadForm> = [a1, a2, a3]
        .into_iter()
        .map(QuadForm::homogeneous)
        .collect();
    let mapped = apply_transform(&t, &tuple)?;
    let x = gaussian_vec(&mut seeded(1), 4);
    let direct = t.map_point(&evaluate_tuple(&tuple, &x)?);
    let via = evaluate_tuple(&mapped, &x)?;
    let gap = direct
        .iter()
        .zip(&via)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("scaling identity gap: {gap:.3e}");
    Ok(())
}
