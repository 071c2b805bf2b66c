//! Multipliers for `F(φ1(x), φ2(x)) >= 0` with a convex quadratic `F`.
//!
//! The search has three phases: look for a point with `F∘Φ < 0`; separate
//! the sampled image of `Φ` from the sublevel set `{F < 0}` by a line;
//! scale the line by a Farkas multiplier. If the scaled line fails the
//! closed-form check, the concave dual function is maximized from it.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::{
    global_min_quadform, split_minima, verify_slemma_certificate, QuadCriterion, QuadMin,
    SLemmaVerification, VERIFY_TOL,
};
use crate::descent::{fit, FitSettings};
use crate::error::{check_dim, Error, Result};
use crate::hull::convex_hull;
use crate::linalg::{classify_definiteness, dot, eigendecompose, norm, SymMatrix, DEFAULT_PSD_TOL};
use crate::numrange::{trace_boundary, Domain, FULL_SPACE_RADII};
use crate::pencil::{find_pd_combination, PencilOutcome, DEFAULT_GRID, DEFAULT_REFINE_ITERS};
use crate::quadmap::QuadForm;
use crate::rng::{log_uniform, seeded, unit_vec};

/// Points with `F∘Φ` below `-COUNTEREXAMPLE_TOL · scale` refute the inequality.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-6;
/// Tolerance on signs asserted by [`check_sign_clauses`].
pub const SIGN_TOL: f64 = 1e-10;
const RAYS: usize = 128;
const DESCENT_STARTS: usize = 16;
const DESCENT_ITERS: usize = 300;
const FARKAS_CAP: f64 = 1_099_511_627_776.0; // 2^40

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SLemmaCertificate {
    pub alpha: f64,
    pub beta: f64,
    /// `(α̂, β̂, γ̂)`: `α̂z1 + β̂z2 + γ̂ >= 0` on the image, `< 0` where `F < 0`.
    pub separator: [f64; 3],
    pub lambda: f64,
    pub min_over_z: f64,
    pub min_over_x: f64,
    /// True when the multipliers came from dual maximization rather than
    /// directly from the separating line.
    pub polished: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SLemmaOutcome {
    Certificate(SLemmaCertificate),
    /// `F(φ1(x), φ2(x)) = value < 0`.
    Counterexample {
        x: Vec<f64>,
        z: [f64; 2],
        value: f64,
    },
    Inconclusive {
        reason: String,
        /// Smallest `F∘Φ` seen while searching for a counterexample.
        best_value: f64,
        /// Best multiplier pair tried and its dual value.
        candidate: Option<[f64; 2]>,
        candidate_value: f64,
    },
}

fn image(phi1: &QuadForm, phi2: &QuadForm, x: &[f64]) -> [f64; 2] {
    [phi1.value(x), phi2.value(x)]
}

fn composite_gradient(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    x: &[f64],
) -> Vec<f64> {
    let z = image(phi1, phi2, x);
    let tz = crit.theta().mul_vec(&z);
    let v = crit.v();
    let dz = [2.0 * tz[0] + v[0], 2.0 * tz[1] + v[1]];
    let g1 = phi1.gradient(x);
    let g2 = phi2.gradient(x);
    g1.iter()
        .zip(&g2)
        .map(|(a, b)| dz[0] * a + dz[1] * b)
        .collect()
}

/// Backtracking gradient descent on `F∘Φ`, stopping once below `stop`.
fn descend_composite(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    start: &[f64],
    stop: f64,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut f = crit.value(image(phi1, phi2, &x));
    let mut step = 1.0;
    for _ in 0..DESCENT_ITERS {
        if f < stop {
            break;
        }
        let g = composite_gradient(crit, phi1, phi2, &x);
        let gn = norm(&g);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut s = step * 2.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - s * gi / gn).collect();
            let fc = crit.value(image(phi1, phi2, &cand));
            if fc < f {
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

struct PhaseA {
    counterexample: Option<(Vec<f64>, f64)>,
    best_value: f64,
    image_points: Vec<[f64; 2]>,
}

fn search_counterexample(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    center: Option<[f64; 2]>,
    samples: usize,
    seed: u64,
) -> PhaseA {
    let n = phi1.dim();
    let stop = -COUNTEREXAMPLE_TOL * crit.scale();
    let mut rng = seeded(seed);
    let (lo, hi) = FULL_SPACE_RADII;
    let mut xs: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for k in 0..samples {
        // every other radius comes from the unit decade band
        let r = if k % 2 == 0 {
            log_uniform(&mut rng, lo, hi)
        } else {
            log_uniform(&mut rng, 0.1, 10.0)
        };
        xs.push(unit_vec(&mut rng, n).into_iter().map(|v| v * r).collect());
    }
    let mut scored: Vec<(f64, usize)> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (crit.value(image(phi1, phi2, x)), i))
        .collect();
    let image_points: Vec<[f64; 2]> = xs.iter().map(|x| image(phi1, phi2, x)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (xs[scored[0].1].clone(), scored[0].0);
    let consider = |x: Vec<f64>, f: f64, best: &mut (Vec<f64>, f64)| {
        if f < best.1 {
            *best = (x, f);
        }
    };
    for &(_, i) in scored.iter().take(DESCENT_STARTS) {
        if best.1 < stop {
            break;
        }
        let (x, f) = descend_composite(crit, phi1, phi2, &xs[i], stop);
        consider(x, f, &mut best);
    }
    if let Some(c) = center {
        // aim the image straight at the deepest point of {F < 0}
        let settings = FitSettings {
            iterations: DESCENT_ITERS,
            backtrack: 0.5,
        };
        let forms = [phi1.clone(), phi2.clone()];
        for &(_, i) in scored.iter().take(4) {
            if best.1 < stop {
                break;
            }
            let (x, _) = fit(&forms, &c, &xs[i], Domain::FullSpace, settings);
            let f = crit.value(image(phi1, phi2, &x));
            consider(x, f, &mut best);
        }
    }
    PhaseA {
        counterexample: (best.1 < stop).then(|| best.clone()),
        best_value: best.1,
        image_points,
    }
}

/// Boundary samples and recession directions of `{F < 0}`, shot from `center`.
fn sublevel_samples(crit: &QuadCriterion, center: [f64; 2]) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let theta = crit.theta();
    let v = crit.v();
    let fc = crit.value(center);
    let tc = theta.mul_vec(&center);
    let slope = [2.0 * tc[0] + v[0], 2.0 * tc[1] + v[1]];
    let flat = 1e-12 * (1.0 + theta.max_abs());
    let mut boundary = Vec::new();
    let mut recession = Vec::new();
    let shoot = |u: [f64; 2], boundary: &mut Vec<[f64; 2]>, recession: &mut Vec<[f64; 2]>| {
        let q = theta.quad(&u);
        let l = slope[0] * u[0] + slope[1] * u[1];
        let s = if q > flat {
            (-l + (l * l - 4.0 * q * fc).sqrt()) / (2.0 * q)
        } else if l > 0.0 {
            -fc / l
        } else {
            recession.push(u);
            return;
        };
        boundary.push([center[0] + s * u[0], center[1] + s * u[1]]);
    };
    for k in 0..RAYS {
        let a = 2.0 * std::f64::consts::PI * k as f64 / RAYS as f64;
        shoot([a.cos(), a.sin()], &mut boundary, &mut recession);
    }
    let spec = eigendecompose(theta);
    let mut extra: Vec<[f64; 2]> = Vec::new();
    if spec.max() <= flat {
        let nv = norm(&v);
        if nv > 0.0 {
            extra.push([-v[1] / nv, v[0] / nv]);
            extra.push([v[1] / nv, -v[0] / nv]);
        }
    } else if spec.min() <= flat {
        let u = spec.min_vector();
        extra.push([u[0], u[1]]);
        extra.push([-u[0], -u[1]]);
    }
    for u in extra {
        if v[0] * u[0] + v[1] * u[1] <= 0.0 {
            recession.push(u);
        }
    }
    (boundary, recession)
}

/// Separating line `(n1, n2, γ)` with `|n_i| <= 1`, maximizing the depth `δ`
/// of the center on the negative side. Returns the line and `δ`.
fn separation_lp(
    image_hull: &[[f64; 2]],
    image_recession: &[[f64; 2]],
    boundary: &[[f64; 2]],
    recession: &[[f64; 2]],
    center: [f64; 2],
) -> Option<([f64; 3], f64)> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let n1 = p.add_var(0.0, (-1.0, 1.0));
    let n2 = p.add_var(0.0, (-1.0, 1.0));
    let g = p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let d = p.add_var(1.0, (0.0, 1.0));
    let row = |pt: &[f64; 2], c: f64| {
        let s = (pt[0] * pt[0] + pt[1] * pt[1] + c * c).sqrt().max(1e-300);
        [(n1, pt[0] / s), (n2, pt[1] / s), (g, c / s)]
    };
    for q in image_hull {
        p.add_constraint(row(q, 1.0), ComparisonOp::Ge, 0.0);
    }
    for w in image_recession {
        p.add_constraint(row(w, 0.0), ComparisonOp::Ge, 0.0);
    }
    for q in boundary {
        p.add_constraint(row(q, 1.0), ComparisonOp::Le, 0.0);
    }
    for u in recession {
        p.add_constraint(row(u, 0.0), ComparisonOp::Le, 0.0);
    }
    let s = (center[0] * center[0] + center[1] * center[1] + 1.0).sqrt();
    let mut expr = row(&center, 1.0).to_vec();
    expr.push((d, 1.0 / s));
    p.add_constraint(expr, ComparisonOp::Le, 0.0);
    let sol = p.solve().ok()?;
    Some(([sol[n1], sol[n2], sol[g]], sol[d]))
}

/// `min_z F(z) - λ(α̂z1 + β̂z2 + γ̂)`; `-∞` when unbounded.
pub fn farkas_gap(crit: &QuadCriterion, separator: [f64; 3], lambda: f64) -> f64 {
    let [a, b, c] = separator;
    global_min_quadform(&crit.shifted([lambda * a, lambda * b], -lambda * c)).value()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Smallest `λ >= 0` with `F(z) - λ(α̂z1 + β̂z2 + γ̂) >= 0` for every `z`.
///
/// The valid set is an interval because the gap is concave in `λ`. When `Θ`
/// is singular the gap is finite only where `v - λ(α̂, β̂)` stays in the
/// range of `Θ`, which pins `λ` down directly. Returns `None` when no `λ` up
/// to `2^40` is valid within the verification tolerance.
pub fn farkas_multiplier(crit: &QuadCriterion, separator: [f64; 3]) -> Option<f64> {
    let tol = VERIFY_TOL * crit.scale();
    let gap = |l: f64| farkas_gap(crit, separator, l);
    let nvec = [separator[0], separator[1]];
    let nn = norm(&nvec);
    let theta = crit.theta();
    let spec = eigendecompose(theta);
    let flat = DEFAULT_PSD_TOL * (1.0 + theta.max_abs());
    let v = crit.v();
    let pinned = if spec.max() <= flat {
        (nn > 0.0).then(|| dot(&nvec, &v) / (nn * nn))
    } else if spec.min() <= flat {
        let u = spec.min_vector();
        let un = dot(u, &nvec);
        (un.abs() > 1e-12 * nn).then(|| dot(u, &v) / un)
    } else {
        None
    };
    if let Some(l) = pinned {
        let l = l.max(0.0);
        return (gap(l) >= -tol).then_some(l);
    }
    if gap(0.0) >= 0.0 {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut found = false;
    while hi <= FARKAS_CAP {
        if gap(hi) >= 0.0 {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        // the valid interval may fall between doublings
        let (peak, best) = golden_max(gap, 0.0, FARKAS_CAP, 200);
        if best < -tol {
            return None;
        }
        if best < 0.0 {
            return Some(peak);
        }
        lo = 0.0;
        hi = peak;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Value of the dual function `min_z[F - αz1 - βz2] + min_x[αφ1 + βφ2]`.
fn dual_value(crit: &QuadCriterion, phi1: &QuadForm, phi2: &QuadForm, ab: [f64; 2]) -> f64 {
    match split_minima(ab[0], ab[1], crit, phi1, phi2) {
        Ok((mz, mx, _, _)) => mz.value() + mx.value(),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Affine parametrization of the multipliers that keep `min_z` finite.
struct Feasible {
    origin: [f64; 2],
    dirs: Vec<[f64; 2]>,
}

impl Feasible {
    fn new(crit: &QuadCriterion) -> Self {
        let theta = crit.theta();
        let spec = eigendecompose(theta);
        let flat = DEFAULT_PSD_TOL * (1.0 + theta.max_abs());
        let v = crit.v();
        if spec.max() <= flat {
            Feasible {
                origin: v,
                dirs: vec![],
            }
        } else if spec.min() <= flat {
            let u = spec.min_vector();
            let uv = dot(u, &v);
            Feasible {
                origin: [uv * u[0], uv * u[1]],
                dirs: vec![[-u[1], u[0]]],
            }
        } else {
            Feasible {
                origin: [0.0, 0.0],
                dirs: vec![[1.0, 0.0], [0.0, 1.0]],
            }
        }
    }

    fn point(&self, p: &[f64]) -> [f64; 2] {
        let mut out = self.origin;
        for (d, s) in self.dirs.iter().zip(p) {
            out[0] += s * d[0];
            out[1] += s * d[1];
        }
        out
    }

    fn coords(&self, ab: [f64; 2]) -> Vec<f64> {
        let rel = [ab[0] - self.origin[0], ab[1] - self.origin[1]];
        self.dirs.iter().map(|d| dot(d, &rel)).collect()
    }
}

/// Compass search on the concave dual from each start; returns the best point.
fn maximize_dual(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    starts: &[[f64; 2]],
) -> ([f64; 2], f64) {
    let feas = Feasible::new(crit);
    let eval = |p: &[f64]| dual_value(crit, phi1, phi2, feas.point(p));
    let mut best = (feas.point(&feas.coords(starts[0])), f64::NEG_INFINITY);
    for s in starts {
        let mut p = feas.coords(*s);
        let mut val = eval(&p);
        if val.is_finite() {
            let mut h = 0.25 * (1.0 + norm(&p));
            for _ in 0..2000 {
                if h < 1e-14 * (1.0 + norm(&p)) {
                    break;
                }
                let mut moved = false;
                for k in 0..p.len() {
                    for sign in [1.0, -1.0] {
                        let mut cand = p.clone();
                        cand[k] += sign * h;
                        let vc = eval(&cand);
                        if vc > val {
                            p = cand;
                            val = vc;
                            moved = true;
                        }
                    }
                }
                if moved {
                    h *= 1.5;
                } else {
                    h *= 0.5;
                }
            }
        }
        if val > best.1 {
            best = (feas.point(&p), val);
        }
    }
    best
}

fn certificate(
    ab: [f64; 2],
    separator: Option<([f64; 3], f64)>,
    min_over_z: f64,
    min_over_x: f64,
    polished: bool,
) -> SLemmaCertificate {
    let (separator, lambda) = separator.unwrap_or_else(|| {
        let lambda = ab[0].abs().max(ab[1].abs());
        if lambda == 0.0 {
            ([0.0, 0.0, 1.0], 0.0)
        } else {
            (
                [ab[0] / lambda, ab[1] / lambda, -min_over_x / lambda],
                lambda,
            )
        }
    });
    SLemmaCertificate {
        alpha: ab[0],
        beta: ab[1],
        separator,
        lambda,
        min_over_z,
        min_over_x,
        polished,
    }
}

/// Searches for multipliers `(α, β)` with
/// `F(z) + α(φ1(x) - z1) + β(φ2(x) - z2) >= 0` for all `x`, `z`.
///
/// Requires a positive definite combination of `φ1.A` and `φ2.A`; fails with
/// `HypothesisUnmet` otherwise. Any returned certificate has passed
/// [`verify_slemma_certificate`].
pub fn solve_slemma(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    samples: usize,
    seed: u64,
) -> Result<SLemmaOutcome> {
    check_dim(phi1.dim(), phi2.dim())?;
    if samples < 16 {
        return Err(Error::InvalidInput(
            "S-lemma search needs at least 16 samples".into(),
        ));
    }
    let pencil = find_pd_combination(
        &phi1.matrix,
        &phi2.matrix,
        DEFAULT_GRID,
        DEFAULT_REFINE_ITERS,
    )?;
    let PencilOutcome::Certificate(pencil) = pencil else {
        return Err(Error::HypothesisUnmet(
            "no positive definite combination of the quadratic parts".into(),
        ));
    };
    let scale = crit.scale();
    let tol = VERIFY_TOL * scale;
    let fmin = global_min_quadform(&crit.as_form());

    // F >= 0 everywhere: zero multipliers
    if fmin.value() >= -tol {
        if let SLemmaVerification::Verified {
            min_over_z,
            min_over_x,
        } = verify_slemma_certificate(0.0, 0.0, crit, phi1, phi2)?
        {
            return Ok(SLemmaOutcome::Certificate(certificate(
                [0.0, 0.0],
                Some(([0.0, 0.0, 1.0], 0.0)),
                min_over_z,
                min_over_x,
                false,
            )));
        }
    }
    let center = match &fmin {
        QuadMin::Finite { minimizer, .. } => [minimizer[0], minimizer[1]],
        QuadMin::UnboundedBelow { direction } => {
            let z = super::descend_below(&crit.as_form(), &[0.0, 0.0], direction, -scale);
            [z[0], z[1]]
        }
    };

    let a = search_counterexample(crit, phi1, phi2, Some(center), samples, seed);
    if let Some((x, value)) = a.counterexample {
        let z = image(phi1, phi2, &x);
        return Ok(SLemmaOutcome::Counterexample { x, z, value });
    }

    let image_hull = convex_hull(&a.image_points);
    let n = phi1.dim();
    let mut rng = seeded(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut cone: Vec<[f64; 2]> = (0..256)
        .map(|_| {
            let u = unit_vec(&mut rng, n);
            [phi1.matrix.quad(&u), phi2.matrix.quad(&u)]
        })
        .collect();
    if n >= 2 {
        cone.extend(trace_boundary(&phi1.matrix, &phi2.matrix, 256)?.points);
    }
    let cone_hull = convex_hull(&cone);
    let (boundary, recession) = sublevel_samples(crit, center);

    let inconclusive = |reason: &str, candidate: Option<[f64; 2]>, candidate_value: f64| {
        SLemmaOutcome::Inconclusive {
            reason: reason.into(),
            best_value: a.best_value,
            candidate,
            candidate_value,
        }
    };
    let separated = separation_lp(&image_hull, &cone_hull, &boundary, &recession, center);
    let mut reason = match separated {
        None => "separation LP failed",
        Some((_, depth)) if depth <= 1e-12 => "no strict separating line for the sampled sets",
        Some(_) => "no multiplier pair passed verification",
    };
    let mut starts = Vec::new();
    if let Some((sep, _)) = separated.filter(|&(_, depth)| depth > 1e-12) {
        if let Some(l) = farkas_multiplier(crit, sep) {
            let mut ab = [l * sep[0], l * sep[1]];
            let feas = Feasible::new(crit);
            if feas.dirs.is_empty() {
                ab = feas.origin;
            }
            if let SLemmaVerification::Verified {
                min_over_z,
                min_over_x,
            } = verify_slemma_certificate(ab[0], ab[1], crit, phi1, phi2)?
            {
                let exact = feas.dirs.len() == 2 || ab == [l * sep[0], l * sep[1]];
                let line = exact.then_some((sep, l));
                return Ok(SLemmaOutcome::Certificate(certificate(
                    ab, line, min_over_z, min_over_x, !exact,
                )));
            }
            starts.push(ab);
        }
    }
    let mu = pencil.mu;
    for k in -3..=3 {
        let c = 10f64.powi(k);
        starts.push([c * mu[0], c * mu[1]]);
    }
    let (ab, val) = maximize_dual(crit, phi1, phi2, &starts);
    if val >= -tol {
        if let SLemmaVerification::Verified {
            min_over_z,
            min_over_x,
        } = verify_slemma_certificate(ab[0], ab[1], crit, phi1, phi2)?
        {
            return Ok(SLemmaOutcome::Certificate(certificate(
                ab, None, min_over_z, min_over_x, true,
            )));
        }
    }
    if val < -tol {
        if let Some((x, value)) = dual_guided_counterexample(crit, phi1, phi2, ab) {
            let z = image(phi1, phi2, &x);
            return Ok(SLemmaOutcome::Counterexample { x, z, value });
        }
    }
    if val >= -tol {
        reason = "dual optimum is nonnegative but its multipliers fail verification";
    }
    Ok(inconclusive(reason, Some(ab), val))
}

/// Second counterexample pass seeded by the best dual pair: the minimizer of
/// `αφ1 + βφ2` and points fitted onto the minimizer of `F - αz1 - βz2`.
fn dual_guided_counterexample(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    ab: [f64; 2],
) -> Option<(Vec<f64>, f64)> {
    let stop = -COUNTEREXAMPLE_TOL * crit.scale();
    let (mz, mx, _, _) = split_minima(ab[0], ab[1], crit, phi1, phi2).ok()?;
    let n = phi1.dim();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let QuadMin::Finite { minimizer, .. } = &mx {
        starts.push(minimizer.clone());
    }
    if let QuadMin::Finite { minimizer, .. } = &mz {
        let target = [minimizer[0], minimizer[1]];
        let settings = FitSettings {
            iterations: DESCENT_ITERS,
            backtrack: 0.5,
        };
        let forms = [phi1.clone(), phi2.clone()];
        let mut rng = seeded(0x5eed ^ n as u64);
        let mut near: Vec<Vec<f64>> = starts.clone();
        for _ in 0..4 {
            near.push(unit_vec(&mut rng, n));
        }
        for x0 in near {
            let (x, _) = fit(&forms, &target, &x0, Domain::FullSpace, settings);
            starts.push(x);
        }
    }
    for x0 in starts {
        let (x, f) = descend_composite(crit, phi1, phi2, &x0, stop);
        if f < stop {
            return Some((x, f));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub applies: bool,
    pub requirement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignClauseReport {
    pub checks: Vec<ClauseCheck>,
    pub all_hold: bool,
}

/// `0` lies in the numerical range of `a` (no definite sign on the sphere).
fn zero_in_numerical_range(a: &SymMatrix) -> bool {
    let spec = eigendecompose(a);
    let margin = DEFAULT_PSD_TOL * (1.0 + a.max_abs());
    spec.min() <= margin && spec.max() >= -margin
}

/// Checks the multiplier signs forced by the shape of the instance.
///
/// * `0 ∈ W(A1)` and `A2 > 0` force `β >= 0`; symmetrically for `α`.
/// * `Θ = diag(0, ρ)` with `v1 > 0` forces `α = v1 > 0`.
/// * `Θ = diag(ρ, 0)` with `v2 < 0` forces `β = v2 < 0`; `α` is unconstrained.
pub fn check_sign_clauses(
    cert: &SLemmaCertificate,
    phi1: &QuadForm,
    phi2: &QuadForm,
    crit: &QuadCriterion,
) -> SignClauseReport {
    let pd = |a: &SymMatrix| classify_definiteness(a, DEFAULT_PSD_TOL).is_positive_definite();
    let theta = crit.theta();
    let zero = |x: f64| x.abs() <= DEFAULT_PSD_TOL * (1.0 + theta.max_abs());
    let v = crit.v();
    let mut checks = Vec::new();
    let mut push = |clause: &str, applies: bool, requirement: &str, ok: bool| {
        checks.push(ClauseCheck {
            clause: clause.into(),
            applies,
            requirement: requirement.into(),
            holds: !applies || ok,
        });
    };
    push(
        "a1_indefinite_sign_a2_positive",
        zero_in_numerical_range(&phi1.matrix) && pd(&phi2.matrix),
        "beta >= 0",
        cert.beta >= -SIGN_TOL,
    );
    push(
        "a2_indefinite_sign_a1_positive",
        zero_in_numerical_range(&phi2.matrix) && pd(&phi1.matrix),
        "alpha >= 0",
        cert.alpha >= -SIGN_TOL,
    );
    push(
        "theta_second_axis_v1_positive",
        zero(theta.get(0, 0)) && zero(theta.get(0, 1)) && v[0] > 0.0,
        "alpha >= 0",
        cert.alpha >= -SIGN_TOL,
    );
    push(
        "theta_first_axis_v2_negative",
        zero(theta.get(1, 1)) && zero(theta.get(0, 1)) && v[1] < 0.0,
        "beta <= 0",
        cert.beta <= SIGN_TOL,
    );
    let all_hold = checks.iter().all(|c| c.holds);
    SignClauseReport { checks, all_hold }
}
