//! Least-squares fitting of a tuple of quadratic forms to a target output,
//! over the unit sphere or the whole space.
//!
//! Each iteration tries a minimum-norm Gauss-Newton step (the tuple has at
//! most a handful of outputs, so the normal system is tiny), then falls back
//! to a gradient step; both are globalized by backtracking.

use crate::linalg::{dot, norm, normalize};
use crate::numrange::Domain;
use crate::quadmap::QuadForm;

#[derive(Clone, Copy, Debug)]
pub(crate) struct FitSettings {
    pub iterations: usize,
    pub backtrack: f64,
}

pub(crate) fn outputs(forms: &[QuadForm], x: &[f64]) -> Vec<f64> {
    forms.iter().map(|f| f.value(x)).collect()
}

fn misfit(forms: &[QuadForm], target: &[f64], x: &[f64]) -> f64 {
    forms
        .iter()
        .zip(target)
        .map(|(f, t)| (f.value(x) - t).powi(2))
        .sum()
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_small(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in (col + 1)..k {
            let f = m[row][col] / m[col][col];
            for c in col..k {
                m[row][c] -= f * m[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut sol = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..k {
            acc -= m[row][c] * sol[c];
        }
        sol[row] = acc / m[row][row];
    }
    sol.iter().all(|v| v.is_finite()).then_some(sol)
}

fn retract(domain: Domain, x: &[f64], dir: &[f64], step: f64) -> Vec<f64> {
    let mut y: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + step * d).collect();
    if domain == Domain::Sphere && normalize(&mut y) == 0.0 {
        return x.to_vec();
    }
    y
}

/// Minimizes `‖outputs(x) - target‖^2` from `start`; returns the final point and
/// the residual norm `‖outputs(x) - target‖`.
pub(crate) fn fit(
    forms: &[QuadForm],
    target: &[f64],
    start: &[f64],
    domain: Domain,
    settings: FitSettings,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    if domain == Domain::Sphere {
        normalize(&mut x);
    }
    let k = forms.len();
    let mut f = misfit(forms, target, &x);
    let floor = 1e-32 * (1.0 + dot(target, target));
    let mut grad_step = 1.0;

    for _ in 0..settings.iterations {
        if f <= floor {
            break;
        }
        let r: Vec<f64> = forms
            .iter()
            .zip(target)
            .map(|(phi, t)| phi.value(&x) - t)
            .collect();
        let mut jac: Vec<Vec<f64>> = forms.iter().map(|phi| phi.gradient(&x)).collect();
        if domain == Domain::Sphere {
            for row in jac.iter_mut() {
                let radial = dot(row, &x);
                for (g, xi) in row.iter_mut().zip(&x) {
                    *g -= radial * xi;
                }
            }
        }

        let mut improved = false;

        // Gauss-Newton: dx = -J^T (J J^T + damping I)^{-1} r
        let mut jjt = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = dot(&jac[i], &jac[j]);
                jjt[i][j] = v;
                jjt[j][i] = v;
            }
        }
        let tr: f64 = (0..k).map(|i| jjt[i][i]).sum();
        if tr > 0.0 {
            for (i, row) in jjt.iter_mut().enumerate() {
                row[i] += 1e-14 * tr;
            }
            if let Some(y) = solve_small(jjt, r.clone()) {
                let mut dir = vec![0.0; x.len()];
                for (row, yi) in jac.iter().zip(&y) {
                    for (d, g) in dir.iter_mut().zip(row) {
                        *d -= yi * g;
                    }
                }
                let mut step = 1.0;
                for _ in 0..40 {
                    let cand = retract(domain, &x, &dir, step);
                    let fc = misfit(forms, target, &cand);
                    if fc < f {
                        x = cand;
                        f = fc;
                        improved = true;
                        break;
                    }
                    step *= settings.backtrack;
                }
            }
        }

        if !improved {
            // plain gradient of the misfit: 2 J^T r
            let mut g = vec![0.0; x.len()];
            for (row, ri) in jac.iter().zip(&r) {
                for (gi, v) in g.iter_mut().zip(row) {
                    *gi += 2.0 * ri * v;
                }
            }
            let gn = norm(&g);
            if gn == 0.0 {
                break;
            }
            let dir: Vec<f64> = g.iter().map(|v| -v / gn).collect();
            let mut step = grad_step * 2.0;
            for _ in 0..60 {
                let cand = retract(domain, &x, &dir, step);
                let fc = misfit(forms, target, &cand);
                if fc < f {
                    x = cand;
                    f = fc;
                    improved = true;
                    grad_step = step;
                    break;
                }
                step *= settings.backtrack;
            }
        }
        if !improved {
            break;
        }
    }
    (x, f.sqrt())
}

/// Scale factor `c >= 0` minimizing `‖c^2 outputs(u) - target‖` for homogeneous tuples.
pub(crate) fn best_homogeneous_scale(out: &[f64], target: &[f64]) -> f64 {
    let oo = dot(out, out);
    if oo == 0.0 {
        return 1.0;
    }
    (dot(out, target) / oo).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn small_solver() {
        let sol = solve_small(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((sol[0] - 0.8).abs() < 1e-15 && (sol[1] - 1.4).abs() < 1e-15);
        assert!(solve_small(vec![vec![0.0]], vec![1.0]).is_none());
    }

    #[test]
    fn fits_on_sphere() {
        // (x1^2 - x2^2, 2 x1 x2) hits every point of the unit circle
        let forms = [
            QuadForm::homogeneous(SymMatrix::diagonal(&[1.0, -1.0]).unwrap()),
            QuadForm::homogeneous(SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()),
        ];
        let target = [0.6, 0.8];
        let settings = FitSettings {
            iterations: 200,
            backtrack: 0.5,
        };
        let (x, res) = fit(&forms, &target, &[1.0, 0.3], Domain::Sphere, settings);
        assert!(res < 1e-12, "residual {res}");
        assert!((norm(&x) - 1.0).abs() < 1e-12);
    }
}
