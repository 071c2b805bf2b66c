//! Residual between `(1, 1)` and the full-space image of the truncated
//! diagonal family as the truncation grows.

use quadrange::numrange::ProbeOptions;
use quadrange::quadmap::{gap_table, gap_table_csv, CounterexampleFamily};

fn main() -> quadrange::Result<()> {
    let fam = CounterexampleFamily::vanishing(10);
    let opts = ProbeOptions {
        restarts: 8,
        iterations: 300,
        ..ProbeOptions::default()
    };
    let rows = gap_table(&fam, &[10, 20, 40, 80], [1.0, 1.0], &opts, 4)?;
    print!("{}", gap_table_csv(&rows));
    for r in &rows {
        println!(
            "N = {:>3}: N * residual = {:.4}",
            r.truncation,
            r.truncation as f64 * r.best_residual
        );
    }
    Ok(())
}
