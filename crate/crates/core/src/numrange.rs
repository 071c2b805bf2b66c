//! Joint numerical ranges and joint images of tuples of quadratic forms.
//!
//! Two complementary views are provided: Monte Carlo samples of the image
//! ([`sample_range`], [`sample_image`]) and support-function tracing of the
//! boundary of `W(A1, A2)` ([`trace_boundary`]). Attainability of a given
//! output is probed by multistart least squares ([`closedness_probe`],
//! [`distance_to_image`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descent::{best_homogeneous_scale, fit, outputs, FitSettings};
use crate::error::{check_dim, Error, Result};
use crate::hull::{convex_hull, polygon_area, Point2};
use crate::linalg::{dot, eigendecompose, norm, normalize, SymMatrix};
use crate::quadmap::QuadForm;
use crate::rng::{fibonacci_sphere, gaussian_vec, log_uniform, seeded, unit_vec, SeededRng};

/// Where generators live: the unit sphere or the whole space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Sphere,
    FullSpace,
}

/// Radii used for full-space samples are log-uniform on this interval.
pub const FULL_SPACE_RADII: (f64, f64) = (1e-3, 1e3);

/// Points of a joint image together with the domain vectors producing them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeSample {
    pub dim_out: usize,
    pub points: Vec<Vec<f64>>,
    pub generators: Vec<Vec<f64>>,
    pub kind: Domain,
}

impl RangeSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sample serializes")
    }

    /// One row per point: output coordinates then generator coordinates.
    pub fn to_csv(&self) -> String {
        let n = self.generators.first().map_or(0, Vec::len);
        let mut header: Vec<String> = (1..=self.dim_out).map(|i| format!("z{i}")).collect();
        header.extend((1..=n).map(|i| format!("x{i}")));
        let mut out = header.join(",");
        out.push('\n');
        for (p, g) in self.points.iter().zip(&self.generators) {
            let row: Vec<String> = p.iter().chain(g).map(|v| format!("{v:.17e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Largest deviation between stored points and outputs recomputed from generators.
    pub fn recompute_error(&self, forms: &[QuadForm]) -> f64 {
        self.points
            .iter()
            .zip(&self.generators)
            .flat_map(|(p, g)| {
                outputs(forms, g)
                    .into_iter()
                    .zip(p)
                    .map(|(a, b)| (a - b).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn planar_points(&self) -> Vec<Point2> {
        self.points.iter().map(|p| [p[0], p[1]]).collect()
    }
}

fn homogeneous_tuple(ops: &[SymMatrix]) -> Vec<QuadForm> {
    ops.iter().cloned().map(QuadForm::homogeneous).collect()
}

fn check_tuple(forms: &[QuadForm]) -> Result<usize> {
    let first = forms
        .first()
        .ok_or_else(|| Error::InvalidInput("empty tuple of forms".into()))?;
    let n = first.dim();
    for f in forms {
        check_dim(n, f.dim())?;
    }
    Ok(n)
}

/// Samples `{(<A_j x, x>)_j}` for 2 or 3 homogeneous forms.
pub fn sample_range(
    ops: &[SymMatrix],
    mode: Domain,
    count: usize,
    seed: u64,
) -> Result<RangeSample> {
    sample_image(&homogeneous_tuple(ops), mode, count, seed)
}

/// Samples the joint image of 2 or 3 (possibly non-homogeneous) forms.
pub fn sample_image(
    forms: &[QuadForm],
    mode: Domain,
    count: usize,
    seed: u64,
) -> Result<RangeSample> {
    if !(2..=3).contains(&forms.len()) {
        return Err(Error::InvalidInput("joint images take 2 or 3 forms".into()));
    }
    if count == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    let n = check_tuple(forms)?;
    let mut rng = seeded(seed);
    let mut points = Vec::with_capacity(count);
    let mut generators = Vec::with_capacity(count);
    for _ in 0..count {
        let mut x = unit_vec(&mut rng, n);
        if mode == Domain::FullSpace {
            let r = log_uniform(&mut rng, FULL_SPACE_RADII.0, FULL_SPACE_RADII.1);
            x.iter_mut().for_each(|v| *v *= r);
        }
        points.push(outputs(forms, &x));
        generators.push(x);
    }
    Ok(RangeSample {
        dim_out: forms.len(),
        points,
        generators,
        kind: mode,
    })
}

/// Support points of `W(A1, A2)` in evenly spaced directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub angles: Vec<f64>,
    pub points: Vec<Point2>,
    pub generators: Vec<Vec<f64>>,
}

/// For each `theta_k = 2πk/directions` the top eigenvector `u_k` of
/// `cosθ A1 + sinθ A2` maximizes `<(cosθ, sinθ), w>` over the range; the
/// emitted point is `(<A1 u_k, u_k>, <A2 u_k, u_k>)`.
pub fn trace_boundary(a1: &SymMatrix, a2: &SymMatrix, directions: usize) -> Result<BoundaryTrace> {
    check_dim(a1.dim(), a2.dim())?;
    if a1.dim() < 2 {
        return Err(Error::InvalidInput(
            "boundary tracing needs dimension >= 2".into(),
        ));
    }
    if directions < 8 {
        return Err(Error::InvalidInput(
            "boundary tracing needs at least 8 directions".into(),
        ));
    }
    let angles: Vec<f64> = (0..directions)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / directions as f64)
        .collect();
    let traced: Vec<(Point2, Vec<f64>)> = angles
        .par_iter()
        .map(|&t| {
            let m = SymMatrix::combination(&[t.cos(), t.sin()], &[a1, a2]).expect("same dims");
            let u = eigendecompose(&m).max_vector().to_vec();
            ([a1.quad(&u), a2.quad(&u)], u)
        })
        .collect();
    let (points, generators) = traced.into_iter().unzip();
    Ok(BoundaryTrace {
        angles,
        points,
        generators,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub target: Vec<f64>,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Largest distance found from a probed convex combination to the image.
    pub defect: f64,
    /// Area of the planar hull of the sample (first two coordinates).
    pub hull_area: f64,
    /// Counter-clockwise hull vertices of the sample (first two coordinates).
    pub boundary: Vec<Point2>,
    pub violations: Vec<Violation>,
}

/// Distances at or below this (relative to `1 + ‖target‖`) are roundoff.
const ATTAIN_FLOOR: f64 = 1e-12;
/// Probes farther than this (relative) from the image are listed as violations.
const VIOLATION_TOL: f64 = 1e-6;
/// Directions scanned when the probe subspace is three-dimensional.
const SPHERE_DIRECTIONS: usize = 2000;
/// Distinct coarse candidates polished by [`distance_to_image`].
const STARTS: usize = 8;

/// Convexity defect of a sample of a homogeneous tuple.
pub fn convexity_defect(
    sample: &RangeSample,
    ops: &[SymMatrix],
    probes: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    convexity_defect_forms(sample, &homogeneous_tuple(ops), probes, seed)
}

/// Probes convex combinations `t·p + (1-t)·q` of sample points and measures
/// their distance to the attainable image.
///
/// Even-numbered probes use a random pair and a random `t`; odd-numbered
/// probes pair a random point with the sample point farthest from it at
/// `t = 1/2`, which is where a non-convex image shows its largest gap.
pub fn convexity_defect_forms(
    sample: &RangeSample,
    forms: &[QuadForm],
    probes: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    if probes == 0 {
        return Err(Error::InvalidInput("at least one probe is required".into()));
    }
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    check_dim(sample.dim_out, forms.len())?;
    let n = check_tuple(forms)?;
    if let Some(g) = sample.generators.first() {
        check_dim(n, g.len())?;
    }

    let mut rng = seeded(seed);
    let m = sample.len();
    let mut jobs = Vec::with_capacity(probes);
    for k in 0..probes {
        let i = rand::Rng::random_range(&mut rng, 0..m);
        let (j, t) = if k % 2 == 0 {
            let j = rand::Rng::random_range(&mut rng, 0..m);
            let t: f64 = rand::Rng::random_range(&mut rng, 1e-6..1.0 - 1e-6);
            (j, t)
        } else {
            let p = &sample.points[i];
            let far = (0..m)
                .max_by(|&a, &b| dist(p, &sample.points[a]).total_cmp(&dist(p, &sample.points[b])))
                .unwrap_or(i);
            (far, 0.5)
        };
        jobs.push((i, j, t, rand::Rng::random::<u64>(&mut rng)));
    }

    let results: Vec<(Vec<f64>, f64)> = jobs
        .par_iter()
        .map(|&(i, j, t, sub_seed)| {
            let p = &sample.points[i];
            let q = &sample.points[j];
            if p == q {
                return (p.clone(), 0.0);
            }
            let target: Vec<f64> = p
                .iter()
                .zip(q)
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect();
            let hints = [
                sample.generators[i].as_slice(),
                sample.generators[j].as_slice(),
            ];
            let (_, d) = distance_to_image(forms, &target, &hints, sample.kind, sub_seed);
            (target, d)
        })
        .collect();

    let mut defect = 0.0f64;
    let mut violations = Vec::new();
    for (target, d) in results {
        let scale = 1.0 + norm(&target);
        let d = if d <= ATTAIN_FLOOR * scale { 0.0 } else { d };
        defect = defect.max(d);
        if d > VIOLATION_TOL * scale {
            violations.push(Violation {
                target,
                distance: d,
            });
        }
    }
    let boundary = convex_hull(&sample.planar_points());
    Ok(ConvexityReport {
        defect,
        hull_area: polygon_area(&boundary),
        boundary,
        violations,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Orthonormal basis of `span(hints)` completed with random directions up to
/// `min(3, n)` vectors (the whole space when `n <= 3`).
fn probe_subspace(n: usize, hints: &[&[f64]], rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let k = n.min(3);
    if n <= 3 {
        return (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let push = |v: &[f64], basis: &mut Vec<Vec<f64>>| {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let scale = norm(v).max(1e-300);
        if normalize(&mut w) > 1e-10 * scale {
            basis.push(w);
        }
    };
    for h in hints {
        if basis.len() < k {
            push(h, &mut basis);
        }
    }
    while basis.len() < k {
        let g = gaussian_vec(rng, n);
        push(&g, &mut basis);
    }
    basis
}

/// Estimated distance from `target` to the image of `forms` over `domain`.
///
/// A dense search over the sphere (and radii, in full space) of the
/// subspace spanned by the hint vectors is followed by Gauss-Newton polishing
/// in the full space. Returns the best domain vector and its residual norm.
pub fn distance_to_image(
    forms: &[QuadForm],
    target: &[f64],
    hints: &[&[f64]],
    domain: Domain,
    seed: u64,
) -> (Vec<f64>, f64) {
    let n = forms[0].dim();
    let mut rng = seeded(seed);
    let basis = probe_subspace(n, hints, &mut rng);
    let reduced: Vec<QuadForm> = forms.iter().map(|f| f.compress(&basis)).collect();
    let homogeneous = forms.iter().all(QuadForm::is_homogeneous);

    let dirs: Vec<Vec<f64>> = match basis.len() {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..720)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 360.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => fibonacci_sphere(SPHERE_DIRECTIONS)
            .into_iter()
            .map(|p| p.to_vec())
            .collect(),
    };
    let mut radii = vec![1.0];
    if domain == Domain::FullSpace && !homogeneous {
        let r0 = hints.iter().map(|h| norm(h)).fold(1e-3, f64::max);
        radii = (0..=24)
            .map(|j| r0 * 10f64.powf(-3.0 + j as f64 / 6.0))
            .collect();
    }

    let misfit = |y: &[f64]| -> f64 {
        reduced
            .iter()
            .zip(target)
            .map(|(f, t)| (f.value(y) - t).powi(2))
            .sum()
    };
    let mut cands: Vec<(f64, Vec<f64>)> = Vec::new();
    for d in &dirs {
        match domain {
            Domain::Sphere => cands.push((misfit(d), d.clone())),
            Domain::FullSpace if homogeneous => {
                let c = best_homogeneous_scale(&outputs(&reduced, d), target);
                let y: Vec<f64> = d.iter().map(|v| c * v).collect();
                cands.push((misfit(&y), y));
            }
            Domain::FullSpace => {
                for r in &radii {
                    let y: Vec<f64> = d.iter().map(|v| r * v).collect();
                    cands.push((misfit(&y), y));
                }
            }
        }
    }
    if domain == Domain::FullSpace {
        let zero = vec![0.0; basis.len()];
        cands.push((misfit(&zero), zero));
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));

    let lift = |y: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (b, yi) in basis.iter().zip(y) {
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += yi * bi);
        }
        x
    };
    // Fibers of the map are finite sets in low dimension, so several distinct
    // basins are kept; `y` and `-y` have the same image and count once.
    let mut picked: Vec<&Vec<f64>> = Vec::new();
    for (_, y) in &cands {
        if picked.len() == STARTS {
            break;
        }
        let ny = norm(y).max(1e-300);
        let distinct = picked
            .iter()
            .all(|p| dot(p, y).abs() < 0.95 * ny * norm(p).max(1e-300));
        if distinct {
            picked.push(y);
        }
    }
    let mut starts: Vec<Vec<f64>> = picked.into_iter().map(|y| lift(y)).collect();
    starts.extend(hints.iter().map(|h| h.to_vec()));
    let settings = FitSettings {
        iterations: 100,
        backtrack: 0.5,
    };
    let mut best = (starts[0].clone(), f64::INFINITY);
    for s in &starts {
        let (x, r) = fit(forms, target, s, domain, settings);
        if r < best.1 {
            best = (x, r);
        }
    }
    best
}

/// Budget for [`closedness_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub backtrack: f64,
    /// A target counts as attained when the residual is at most
    /// `attain_tol · (1 + ‖target‖)`.
    pub attain_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            restarts: 32,
            iterations: 500,
            backtrack: 0.5,
            attain_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbeOutcome {
    Attained {
        x: Vec<f64>,
        residual: f64,
    },
    GapEvidence {
        best_residual: f64,
        best_x: Vec<f64>,
    },
}

impl ProbeOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            ProbeOutcome::Attained { residual, .. } => *residual,
            ProbeOutcome::GapEvidence { best_residual, .. } => *best_residual,
        }
    }

    pub fn point(&self) -> &[f64] {
        match self {
            ProbeOutcome::Attained { x, .. } => x,
            ProbeOutcome::GapEvidence { best_x, .. } => best_x,
        }
    }
}

/// Multistart search for a preimage of `target` under the tuple `forms`.
///
/// Starts are the extreme eigenvectors of every operator in the tuple plus
/// `restarts` Gaussian vectors; in full space each start is first rescaled to
/// best match the target. Reports `GapEvidence` rather than a hard "no".
pub fn closedness_probe(
    forms: &[QuadForm],
    target: &[f64],
    domain: Domain,
    opts: &ProbeOptions,
    seed: u64,
) -> Result<ProbeOutcome> {
    let n = check_tuple(forms)?;
    check_dim(forms.len(), target.len())?;
    let mut rng = seeded(seed);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for f in forms {
        let spec = eigendecompose(&f.matrix);
        starts.push(spec.min_vector().to_vec());
        starts.push(spec.max_vector().to_vec());
    }
    for _ in 0..opts.restarts {
        starts.push(gaussian_vec(&mut rng, n));
    }
    let homogeneous = forms.iter().all(QuadForm::is_homogeneous);
    let settings = FitSettings {
        iterations: opts.iterations,
        backtrack: opts.backtrack,
    };

    let results: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|s| {
            let mut x = s.clone();
            if domain == Domain::Sphere {
                normalize(&mut x);
            } else {
                x = rescale_start(forms, target, &x, homogeneous);
            }
            fit(forms, target, &x, domain, settings)
        })
        .collect();

    let mut best = (Vec::new(), f64::INFINITY);
    for (x, r) in results {
        if r < best.1 {
            best = (x, r);
        }
    }
    let (best_x, residual) = best;
    if residual <= opts.attain_tol * (1.0 + norm(target)) {
        Ok(ProbeOutcome::Attained {
            x: best_x,
            residual,
        })
    } else {
        Ok(ProbeOutcome::GapEvidence {
            best_residual: residual,
            best_x,
        })
    }
}

fn rescale_start(forms: &[QuadForm], target: &[f64], x: &[f64], homogeneous: bool) -> Vec<f64> {
    let mut u = x.to_vec();
    if normalize(&mut u) == 0.0 {
        return u;
    }
    let mut scales: Vec<f64> = (0..=60)
        .map(|j| 10f64.powf(-3.0 + j as f64 / 10.0))
        .collect();
    if homogeneous {
        scales.push(best_homogeneous_scale(&outputs(forms, &u), target));
    }
    let mut best = (f64::INFINITY, 1.0);
    for c in scales {
        let y: Vec<f64> = u.iter().map(|v| c * v).collect();
        let m = dist(&outputs(forms, &y), target);
        if m < best.0 {
            best = (m, c);
        }
    }
    u.iter().map(|v| best.1 * v).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ZeroInRange {
    /// A unit vector with `|<A1 w, w>| + |<A2 w, w>| <= 1e-9`.
    Yes { witness: Vec<f64> },
    /// Smallest `‖(<A1 x, x>, <A2 x, x>)‖` found on the sphere.
    NoEvidence { min_norm: f64 },
}

/// Searches the unit sphere for a vector mapped to `(0, 0)`.
pub fn zero_in_range(a1: &SymMatrix, a2: &SymMatrix) -> Result<ZeroInRange> {
    zero_in_range_with(a1, a2, &ProbeOptions::default(), 0)
}

pub fn zero_in_range_with(
    a1: &SymMatrix,
    a2: &SymMatrix,
    opts: &ProbeOptions,
    seed: u64,
) -> Result<ZeroInRange> {
    let forms = homogeneous_tuple(&[a1.clone(), a2.clone()]);
    let outcome = closedness_probe(&forms, &[0.0, 0.0], Domain::Sphere, opts, seed)?;
    let w = outcome.point().to_vec();
    if a1.quad(&w).abs() + a2.quad(&w).abs() <= 1e-9 {
        Ok(ZeroInRange::Yes { witness: w })
    } else {
        Ok(ZeroInRange::NoEvidence {
            min_norm: outcome.residual(),
        })
    }
}
