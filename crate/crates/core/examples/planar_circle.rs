//! In dimension two the sphere image of `diag(1,-1)` and the swap matrix is
//! the unit circle, so midpoints of antipodal pairs miss the image.

use quadrange::numrange::{convexity_defect, sample_range, trace_boundary};
use quadrange::plot::scatter_svg;
use quadrange::{Domain, SymMatrix};

fn main() -> quadrange::Result<()> {
    let a1 = SymMatrix::diagonal(&[1.0, -1.0])?;
    let a2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
    let ops = [a1.clone(), a2.clone()];
    let sample = sample_range(&ops, Domain::Sphere, 2000, 5)?;
    let report = convexity_defect(&sample, &ops, 200, 6)?;
    println!("defect: {:.4} (radius of the circle is 1)", report.defect);

    let trace = trace_boundary(&a1, &a2, 90)?;
    let pts: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
    let svg = scatter_svg("unit circle", &pts, Some(&trace.points));
    println!("svg bytes: {}", svg.len());
    Ok(())
}
