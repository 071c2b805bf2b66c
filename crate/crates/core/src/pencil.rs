//! Positive-definite combinations of symmetric matrices.
//!
//! The search maximizes `g(μ) = λ_min(Σ μ_i A_i)` over unit coefficient
//! vectors. A combination is positive definite iff `g > 0`, and the maximum
//! of `g` equals the distance from the origin to the convex hull of the
//! joint numerical range, which is what [`hull_separation_oracle`] measures
//! independently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::hull::{closest_point, convex_hull, distance_to_hull, Point2};
use crate::linalg::{eigendecompose, min_eigenvalue, normalize, SymMatrix};
use crate::numrange::trace_boundary;
use crate::rng::{fibonacci_sphere, seeded, unit_vec};

pub const DEFAULT_GRID: usize = 720;
pub const DEFAULT_REFINE_ITERS: usize = 60;
pub const DEFAULT_GRID3: usize = 20_000;
/// A combination is certified when `λ_min > CERTIFY_TOL · scale`.
pub const CERTIFY_TOL: f64 = 1e-12;
/// `|g(μ*)| <= MARGIN_BAND · scale` is reported as indeterminate.
pub const MARGIN_BAND: f64 = 1e-6;

/// The largest `α` with `<Cx, x> >= α‖x‖^2`, i.e. `λ_min(C)`.
pub fn bounded_below_constant(c: &SymMatrix) -> f64 {
    min_eigenvalue(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilCertificate {
    pub mu: Vec<f64>,
    pub lambda_min: f64,
    /// Unit eigenvector of `Σ μ_i A_i` for `lambda_min`.
    pub witness: Vec<f64>,
    pub indeterminate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilEvidence {
    /// Best direction found.
    pub mu: Vec<f64>,
    /// `g` at that direction (not positive enough to certify).
    pub best_lambda_min: f64,
    pub indeterminate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PencilOutcome {
    Certificate(PencilCertificate),
    NoPdCombination(PencilEvidence),
}

impl PencilOutcome {
    pub fn is_certificate(&self) -> bool {
        matches!(self, PencilOutcome::Certificate(_))
    }

    /// Achieved maximum of `g`.
    pub fn margin(&self) -> f64 {
        match self {
            PencilOutcome::Certificate(c) => c.lambda_min,
            PencilOutcome::NoPdCombination(e) => e.best_lambda_min,
        }
    }

    pub fn mu(&self) -> &[f64] {
        match self {
            PencilOutcome::Certificate(c) => &c.mu,
            PencilOutcome::NoPdCombination(e) => &e.mu,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        match self {
            PencilOutcome::Certificate(c) => c.indeterminate,
            PencilOutcome::NoPdCombination(e) => e.indeterminate,
        }
    }
}

fn combo_scale(ops: &[&SymMatrix]) -> f64 {
    1.0 + ops.iter().map(|a| a.max_abs()).sum::<f64>()
}

fn conclude(ops: &[&SymMatrix], mu: Vec<f64>) -> PencilOutcome {
    let combo = SymMatrix::combination(&mu, ops).expect("same dims");
    let spec = eigendecompose(&combo);
    let scale = combo_scale(ops);
    let lambda = spec.min();
    let indeterminate = lambda.abs() <= MARGIN_BAND * scale;
    if lambda > CERTIFY_TOL * scale {
        PencilOutcome::Certificate(PencilCertificate {
            mu,
            lambda_min: lambda,
            witness: spec.min_vector().to_vec(),
            indeterminate,
        })
    } else {
        PencilOutcome::NoPdCombination(PencilEvidence {
            mu,
            best_lambda_min: lambda,
            indeterminate,
        })
    }
}

fn g2(a1: &SymMatrix, a2: &SymMatrix, theta: f64) -> f64 {
    min_eigenvalue(&SymMatrix::combination(&[theta.cos(), theta.sin()], &[a1, a2]).expect("dims"))
}

/// Maximizes `λ_min(cosθ A1 + sinθ A2)` on a uniform grid of `grid` angles,
/// then by golden-section search on the bracket around the best grid angle.
pub fn find_pd_combination(
    a1: &SymMatrix,
    a2: &SymMatrix,
    grid: usize,
    refine_iters: usize,
) -> Result<PencilOutcome> {
    check_dim(a1.dim(), a2.dim())?;
    if grid < 16 {
        return Err(Error::InvalidInput(
            "angular grid needs at least 16 points".into(),
        ));
    }
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let values: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|k| g2(a1, a2, k as f64 * step))
        .collect();
    let best_k = argmax(&values);
    let mut best = (best_k as f64 * step, values[best_k]);

    // golden-section on [θ_{k-1}, θ_{k+1}]
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut gc = g2(a1, a2, c);
    let mut gd = g2(a1, a2, d);
    for _ in 0..refine_iters {
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = g2(a1, a2, c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = g2(a1, a2, d);
        }
    }
    for (t, v) in [(c, gc), (d, gd)] {
        if v > best.1 {
            best = (t, v);
        }
    }
    let theta = best.0.rem_euclid(2.0 * std::f64::consts::PI);
    Ok(conclude(&[a1, a2], vec![theta.cos(), theta.sin()]))
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn g3(ops: &[&SymMatrix; 3], mu: &[f64]) -> f64 {
    min_eigenvalue(&SymMatrix::combination(mu, ops).expect("dims"))
}

/// Three-term version: spherical Fibonacci grid of `grid` directions followed
/// by `refine_iters` rounds of a tangent-plane compass search.
pub fn find_pd_combination3(
    a1: &SymMatrix,
    a2: &SymMatrix,
    a3: &SymMatrix,
    grid: usize,
    refine_iters: usize,
) -> Result<PencilOutcome> {
    check_dim(a1.dim(), a2.dim())?;
    check_dim(a1.dim(), a3.dim())?;
    if grid < 16 {
        return Err(Error::InvalidInput(
            "direction grid needs at least 16 points".into(),
        ));
    }
    let ops = [a1, a2, a3];
    let dirs = fibonacci_sphere(grid);
    let values: Vec<f64> = dirs.par_iter().map(|d| g3(&ops, d)).collect();
    let k = argmax(&values);
    let mut mu = dirs[k].to_vec();
    let mut val = values[k];
    let mut h = (4.0 * std::f64::consts::PI / grid as f64).sqrt();
    for _ in 0..refine_iters {
        let (t1, t2) = tangent_basis(&mu);
        let mut moved = false;
        for t in [&t1, &t2] {
            for sign in [1.0, -1.0] {
                let mut cand: Vec<f64> = mu
                    .iter()
                    .zip(t.iter())
                    .map(|(m, ti)| m + sign * h * ti)
                    .collect();
                normalize(&mut cand);
                let v = g3(&ops, &cand);
                if v > val {
                    mu = cand;
                    val = v;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(conclude(&ops, mu))
}

fn tangent_basis(mu: &[f64]) -> ([f64; 3], [f64; 3]) {
    let axis = if mu[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let c = mu[0] * axis[0] + mu[1] * axis[1] + mu[2] * axis[2];
    let mut t1 = [
        axis[0] - c * mu[0],
        axis[1] - c * mu[1],
        axis[2] - c * mu[2],
    ];
    normalize(&mut t1);
    let t2 = [
        mu[1] * t1[2] - mu[2] * t1[1],
        mu[2] * t1[0] - mu[0] * t1[2],
        mu[0] * t1[1] - mu[1] * t1[0],
    ];
    (t1, t2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullDecision {
    OriginSeparated,
    OriginInHull,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullOracleReport {
    pub decision: HullDecision,
    /// Distance from the origin to the hull of the collected range points.
    pub distance: f64,
    pub hull: Vec<Point2>,
}

/// Boundary directions used to enrich the random sample.
const ORACLE_DIRECTIONS: usize = 256;
const ORACLE_REFINEMENTS: usize = 200;
/// Strict exclusion requires `distance > ORACLE_MARGIN · scale`.
const ORACLE_MARGIN: f64 = 1e-9;

/// Decides whether the origin lies outside the convex hull of `W(A1, A2)`,
/// which happens iff some combination `μ1 A1 + μ2 A2` is positive definite.
///
/// The hull is built from `samples` random unit vectors plus traced boundary
/// points and is then tightened toward the origin: while the origin is
/// outside, the range point minimizing `<u, w>` (u the direction to the
/// nearest hull point) is added.
pub fn hull_separation_oracle(
    a1: &SymMatrix,
    a2: &SymMatrix,
    samples: usize,
    seed: u64,
) -> Result<HullOracleReport> {
    check_dim(a1.dim(), a2.dim())?;
    if samples < 100 {
        return Err(Error::InvalidInput(
            "hull oracle needs at least 100 samples".into(),
        ));
    }
    let n = a1.dim();
    let mut rng = seeded(seed);
    let mut pts: Vec<Point2> = (0..samples)
        .map(|_| {
            let x = unit_vec(&mut rng, n);
            [a1.quad(&x), a2.quad(&x)]
        })
        .collect();
    if n >= 2 {
        pts.extend(trace_boundary(a1, a2, ORACLE_DIRECTIONS)?.points);
    }
    let scale = combo_scale(&[a1, a2]);
    let origin = [0.0, 0.0];
    let mut hull = convex_hull(&pts);
    for _ in 0..ORACLE_REFINEMENTS {
        let (c, d) = closest_point(origin, &hull);
        if d == 0.0 {
            break;
        }
        let u = [c[0] / d, c[1] / d];
        let m = SymMatrix::combination(&u, &[a1, a2])?;
        let w = eigendecompose(&m).min_vector().to_vec();
        let p = [a1.quad(&w), a2.quad(&w)];
        if u[0] * p[0] + u[1] * p[1] >= d - 1e-15 * scale {
            break;
        }
        pts.push(p);
        hull = convex_hull(&pts);
    }
    let distance = distance_to_hull(origin, &hull);
    let decision = if distance > ORACLE_MARGIN * scale {
        HullDecision::OriginSeparated
    } else {
        HullDecision::OriginInHull
    };
    Ok(HullOracleReport {
        decision,
        distance,
        hull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::classify_definiteness;

    #[test]
    fn bounded_below_examples() {
        assert_eq!(
            bounded_below_constant(&SymMatrix::diagonal(&[2.0, 5.0]).unwrap()),
            2.0
        );
        let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((bounded_below_constant(&swap) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_zero() {
        let out =
            find_pd_combination(&SymMatrix::identity(3), &SymMatrix::zeros(3), 720, 60).unwrap();
        match out {
            PencilOutcome::Certificate(c) => {
                assert!((c.mu[0] - 1.0).abs() < 1e-9 && c.mu[1].abs() < 1e-4);
                assert!((c.lambda_min - 1.0).abs() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn traceless_pair_has_no_combination() {
        let a1 = SymMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let a2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let out = find_pd_combination(&a1, &a2, 720, 60).unwrap();
        assert!(!out.is_certificate());
        assert!(out.margin() <= 0.0);
    }

    #[test]
    fn small_grid_rejected() {
        let i = SymMatrix::identity(2);
        assert!(find_pd_combination(&i, &i, 8, 10).is_err());
        assert!(find_pd_combination(&i, &SymMatrix::identity(3), 720, 10).is_err());
    }

    #[test]
    fn three_term_identity_third() {
        let z = SymMatrix::zeros(3);
        let out = find_pd_combination3(&z, &z, &SymMatrix::identity(3), 2000, 40).unwrap();
        assert!(out.is_certificate());
        let mu = out.mu();
        assert!(mu[0].abs() < 1e-6 && mu[1].abs() < 1e-6 && (mu[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn three_traceless_have_no_combination() {
        let a1 = SymMatrix::diagonal(&[1.0, -1.0, 0.0]).unwrap();
        let a2 = SymMatrix::diagonal(&[0.0, 1.0, -1.0]).unwrap();
        let a3 = SymMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 2.0],
            vec![0.0, 2.0, 0.0],
        ])
        .unwrap();
        assert!(!find_pd_combination3(&a1, &a2, &a3, 2000, 40)
            .unwrap()
            .is_certificate());
    }

    #[test]
    fn certificates_are_positive_definite() {
        let a1 = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let a2 = SymMatrix::from_rows(&[vec![-1.0, 3.0], vec![3.0, 0.0]]).unwrap();
        let out = find_pd_combination(&a1, &a2, 720, 60).unwrap();
        let PencilOutcome::Certificate(c) = out else {
            panic!("expected certificate")
        };
        let combo = SymMatrix::combination(&c.mu, &[&a1, &a2]).unwrap();
        assert!(classify_definiteness(&combo, 1e-12).is_positive_definite());
        let resid = combo.quad(&c.witness) - c.lambda_min;
        assert!(resid.abs() <= 1e-8 * (1.0 + 3.0));
    }

    #[test]
    fn oracle_examples() {
        let i = SymMatrix::identity(3);
        let r = hull_separation_oracle(&i, &i, 100, 0).unwrap();
        assert_eq!(r.decision, HullDecision::OriginSeparated);
        assert!((r.distance - 2f64.sqrt()).abs() < 1e-9);

        let a1 = SymMatrix::diagonal(&[1.0, -1.0, 0.0]).unwrap();
        let r = hull_separation_oracle(&a1, &SymMatrix::zeros(3), 100, 0).unwrap();
        assert_eq!(r.decision, HullDecision::OriginInHull);
        assert!(hull_separation_oracle(&a1, &a1, 10, 0).is_err());
    }
}
