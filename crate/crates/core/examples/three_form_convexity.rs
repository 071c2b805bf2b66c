//! Sphere image of three random symmetric forms on R^5 and its measured
//! convexity defect.

use quadrange::numrange::{convexity_defect, sample_range};
use quadrange::rng::{random_symmetric, seeded};
use quadrange::Domain;

fn main() -> quadrange::Result<()> {
    let mut rng = seeded(11);
    let ops: Vec<_> = (0..3).map(|_| random_symmetric(&mut rng, 5)).collect();
    let sample = sample_range(&ops, Domain::Sphere, 4000, 1)?;
    let report = convexity_defect(&sample, &ops, 300, 2)?;
    println!("points: {}", sample.len());
    println!("defect: {:.3e}", report.defect);
    println!("violations above 1e-6: {}", report.violations.len());
    Ok(())
}
