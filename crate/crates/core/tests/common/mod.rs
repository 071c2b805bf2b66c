//! Reference computations shared by the integration tests. Everything here
//! is written directly against dense row-major arrays so it does not lean on
//! the library routines under test.

#![allow(dead_code)]

use quadrange::certs::QuadCriterion;
use quadrange::rng::{gaussian_vec, random_gram, random_symmetric, seeded};
use quadrange::QuadForm;

pub type Dense = Vec<Vec<f64>>;

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            c[i][j] = (0..k).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Dense) -> Dense {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Dense) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Gauss-Jordan with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn gauss_jordan_inverse(a: &Dense) -> Option<Dense> {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// True when the Cholesky factorization succeeds with pivots above `tol`.
pub fn cholesky_ok(a: &Dense, tol: f64) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d <= tol {
            return false;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            l[i][j] = (a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / l[j][j];
        }
    }
    true
}

/// `I - 2vvᵀ/‖v‖²`.
pub fn householder(v: &[f64]) -> Dense {
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let n = v.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (if i == j { 1.0 } else { 0.0 }) - 2.0 * v[i] * v[j] / vv)
                .collect()
        })
        .collect()
}

pub fn quad(a: &Dense, x: &[f64]) -> f64 {
    a.iter()
        .zip(x)
        .map(|(r, xi)| xi * r.iter().zip(x).map(|(v, xj)| v * xj).sum::<f64>())
        .sum()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|r| r.iter().zip(x).map(|(v, xj)| v * xj).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Small deterministic generator (SplitMix64) so oracles draw from a stream
/// unrelated to the library's.
pub struct Mix(pub u64);

impl Mix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn unit(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            let r = dot(&v, &v).sqrt();
            if r > 1e-12 {
                return v.into_iter().map(|x| x / r).collect();
            }
        }
    }
}

/// Exact peak of `f0 - α0` along the ray through `u` for the feasible set
/// `{f1 <= α1, f2 <= α2}` of homogeneous forms. `None` when the ray is
/// feasible for all lengths while `f0` grows along it.
pub fn ray_peak(forms: [&Dense; 3], alphas: [f64; 3], u: &[f64]) -> Option<(f64, f64)> {
    let q: Vec<f64> = forms.iter().map(|a| quad(a, u)).collect();
    let mut smax = f64::INFINITY;
    for k in 1..3 {
        if q[k] > 0.0 {
            smax = smax.min(alphas[k] / q[k]);
        }
    }
    if q[0] > 0.0 {
        if !smax.is_finite() {
            return None;
        }
        // stay strictly inside so the point is feasible after rounding
        let s = smax * (1.0 - 1e-12);
        Some((s * q[0] - alphas[0], s))
    } else {
        Some((-alphas[0], 0.0))
    }
}

/// Largest `f0 - α0` found by `rays` random rays, each solved exactly, after
/// which the best few rays are refined by random-perturbation hill climbing.
/// `None` reports an unbounded feasible ray with `q0 > 0`.
pub fn sproc_ray_oracle(
    forms: [&Dense; 3],
    alphas: [f64; 3],
    rays: usize,
    seed: u64,
) -> Option<(f64, Vec<f64>)> {
    let n = forms[0].len();
    let mut rng = Mix(seed);
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..rays {
        let u = rng.unit(n);
        let (v, _) = ray_peak(forms, alphas, &u)?;
        top.push((v, u));
        if top.len() > 64 {
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            top.truncate(16);
        }
    }
    top.sort_by(|a, b| b.0.total_cmp(&a.0));
    top.truncate(16);
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for (mut v, mut u) in top {
        let mut step = 0.1;
        while step > 1e-9 {
            let mut moved = false;
            for _ in 0..8 {
                let w: Vec<f64> = u.iter().map(|x| x + step * rng.normal()).collect();
                let r = dot(&w, &w).sqrt();
                let w: Vec<f64> = w.iter().map(|x| x / r).collect();
                let (vw, _) = ray_peak(forms, alphas, &w)?;
                if vw > v {
                    v = vw;
                    u = w;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if v > best.0 {
            let (_, s) = ray_peak(forms, alphas, &u)?;
            best = (v, u.iter().map(|x| x * s.sqrt()).collect());
        }
    }
    Some(best)
}

/// Minimizes `xᵀAx + aᵀx` by linear conjugate gradients from several starts.
pub fn cg_min(a: &Dense, lin: &[f64], starts: usize, seed: u64) -> f64 {
    let n = lin.len();
    let f = |x: &[f64]| quad(a, x) + dot(lin, x);
    let mut rng = Mix(seed);
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..n).map(|_| 3.0 * rng.normal()).collect();
        let grad = |x: &[f64]| -> Vec<f64> {
            matvec(a, x)
                .iter()
                .zip(lin)
                .map(|(ax, l)| 2.0 * ax + l)
                .collect()
        };
        let mut g = grad(&x);
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        for _ in 0..3 * n + 5 {
            let gg = dot(&g, &g);
            if gg < 1e-30 {
                break;
            }
            let curv = 2.0 * quad(a, &d);
            if curv <= 0.0 {
                break;
            }
            let step = -dot(&g, &d) / curv;
            x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += step * di);
            let g_new = grad(&x);
            let beta = dot(&g_new, &g_new) / gg;
            d = d
                .iter()
                .zip(&g_new)
                .map(|(di, gi)| -gi + beta * di)
                .collect();
            g = g_new;
        }
        best = best.min(f(&x));
    }
    best
}

/// Builds `(φ1, φ2)` on `R^n` with `α·A1 + β·A2` positive definite.
pub fn planted_pair(seed: u64, n: usize, alpha: f64, beta: f64) -> (QuadForm, QuadForm) {
    let mut rng = seeded(seed);
    let a1 = random_symmetric(&mut rng, n);
    let p = random_gram(&mut rng, n, 0.2);
    let a2 = p.sub(&a1.scaled(alpha)).unwrap().scaled(1.0 / beta);
    let phi1 = QuadForm::new(a1, gaussian_vec(&mut rng, n), gaussian_vec(&mut rng, 1)[0]).unwrap();
    let phi2 = QuadForm::new(a2, gaussian_vec(&mut rng, n), gaussian_vec(&mut rng, 1)[0]).unwrap();
    (phi1, phi2)
}

/// Joint minimum over `(x, z)` of `F(z) + α(φ1(x) - z1) + β(φ2(x) - z2)`.
pub fn joint_min(
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> f64 {
    let n = phi1.dim();
    let m = n + 2;
    let mut h = vec![vec![0.0; m]; m];
    let (r1, r2) = (phi1.matrix.to_rows(), phi2.matrix.to_rows());
    for i in 0..n {
        for j in 0..n {
            h[i][j] = alpha * r1[i][j] + beta * r2[i][j];
        }
    }
    let th = crit.theta().to_rows();
    for i in 0..2 {
        for j in 0..2 {
            h[n + i][n + j] = th[i][j];
        }
    }
    let mut lin: Vec<f64> = (0..n)
        .map(|i| alpha * phi1.linear[i] + beta * phi2.linear[i])
        .collect();
    lin.push(crit.v()[0] - alpha);
    lin.push(crit.v()[1] - beta);
    cg_min(&h, &lin, 4, seed) + alpha * phi1.constant + beta * phi2.constant - crit.t()
}
