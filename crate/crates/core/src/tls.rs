//! Demo objective `G(x) = ‖Ax - b‖² / (1 + ‖x‖²) + ρ‖x‖²`.
//!
//! The minimizer here is a plain multistart descent. Its output is an
//! upper bound on `inf G`, never a certified value.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::io::DenseMatrix;
use crate::linalg::{dot, norm};
use crate::rng::{gaussian_vec, seeded};

pub fn tls_objective(a: &DenseMatrix, b: &[f64], rho: f64, x: &[f64]) -> f64 {
    let r: Vec<f64> = a.mul_vec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    let xx = dot(x, x);
    dot(&r, &r) / (1.0 + xx) + rho * xx
}

/// `2Aᵀr/s - 2‖r‖²x/s² + 2ρx` with `r = Ax - b`, `s = 1 + ‖x‖²`.
pub fn tls_gradient(a: &DenseMatrix, b: &[f64], rho: f64, x: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = a.mul_vec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    let s = 1.0 + dot(x, x);
    let rr = dot(&r, &r);
    let atr = a.mul_transpose_vec(&r);
    atr.iter()
        .zip(x)
        .map(|(g, xi)| 2.0 * g / s - 2.0 * rr * xi / (s * s) + 2.0 * rho * xi)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TlsStart {
    pub start: Vec<f64>,
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TlsReport {
    pub best_value: f64,
    pub best_x: Vec<f64>,
    /// Always false.
    pub certified: bool,
    pub trace: Vec<TlsStart>,
}

fn descend(
    a: &DenseMatrix,
    b: &[f64],
    rho: f64,
    start: &[f64],
    iterations: usize,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut f = tls_objective(a, b, rho, &x);
    let mut step = 1.0;
    for _ in 0..iterations {
        let g = tls_gradient(a, b, rho, &x);
        let gn = norm(&g);
        if gn <= 1e-15 * (1.0 + f.abs()) {
            break;
        }
        let mut s = step * 2.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - s * gi).collect();
            let fc = tls_objective(a, b, rho, &cand);
            if fc <= f - 1e-4 * s * gn * gn {
                x = cand;
                f = fc;
                step = s;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, f)
}

/// Runs descent from the origin and `starts - 1` seeded Gaussian points
/// scaled to `‖b‖ / (1 + ‖A‖)`.
pub fn tls_minimize(
    a: &DenseMatrix,
    b: &[f64],
    rho: f64,
    starts: usize,
    iterations: usize,
    seed: u64,
) -> Result<TlsReport> {
    check_dim(a.nrows(), b.len())?;
    if rho <= 0.0 || !rho.is_finite() {
        return Err(Error::InvalidInput(format!(
            "rho must be positive, got {rho}"
        )));
    }
    if starts == 0 {
        return Err(Error::InvalidInput("need at least one start".into()));
    }
    let n = a.ncols();
    let anorm: f64 = (0..a.nrows())
        .map(|i| {
            let mut e = vec![0.0; a.nrows()];
            e[i] = 1.0;
            norm(&a.mul_transpose_vec(&e))
        })
        .fold(0.0, f64::max);
    let radius = norm(b) / (1.0 + anorm);
    let mut rng = seeded(seed);
    let mut trace = Vec::with_capacity(starts);
    for k in 0..starts {
        let start = if k == 0 {
            vec![0.0; n]
        } else {
            gaussian_vec(&mut rng, n)
                .into_iter()
                .map(|v| v * radius)
                .collect()
        };
        let (x, value) = descend(a, b, rho, &start, iterations);
        trace.push(TlsStart { start, value, x });
    }
    let best = trace.iter().fold(
        &trace[0],
        |acc, t| if t.value < acc.value { t } else { acc },
    );
    Ok(TlsReport {
        best_value: best.value,
        best_x: best.x.clone(),
        certified: false,
        trace: trace.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_minimum_at_origin() {
        let a = DenseMatrix::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let r = tls_minimize(&a, &[0.0, 0.0], 0.3, 4, 100, 1).unwrap();
        assert_eq!(r.best_value, 0.0);
        assert!(!r.certified);
    }

    #[test]
    fn zero_rhs_origin_is_global() {
        let a = DenseMatrix::new(vec![vec![1.0, 2.0], vec![-3.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let r = tls_minimize(&a, &[0.0; 3], 0.1, 6, 200, 7).unwrap();
        assert!(r.best_value.abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_differences() {
        let a = DenseMatrix::new(vec![vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        let b = [0.4, -1.0];
        let x = [0.3, -0.7];
        let g = tls_gradient(&a, &b, 0.2, &x);
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (tls_objective(&a, &b, 0.2, &xp) - tls_objective(&a, &b, 0.2, &xm)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_nonpositive_rho() {
        let a = DenseMatrix::new(vec![vec![1.0]]).unwrap();
        assert!(tls_minimize(&a, &[1.0], 0.0, 1, 10, 0).is_err());
    }
}
