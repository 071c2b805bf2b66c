//! Seeded random sources. Every randomized routine takes an explicit `u64`
//! seed and draws from ChaCha8, so results do not depend on platform RNGs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{normalize, SymMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Uniform point on the unit sphere of `R^n` (normalized Gaussian).
pub fn unit_vec(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian_vec(rng, n);
        if normalize(&mut v) > 1e-300 {
            return v;
        }
    }
}

/// Radius drawn log-uniformly from `[lo, hi]`.
pub fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Symmetric matrix with independent standard normal entries on and above
/// the diagonal.
pub fn random_symmetric(rng: &mut SeededRng, n: usize) -> SymMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SymMatrix::from_symmetric_unchecked(n, data)
}

/// Gram matrix `B^T B + shift·I` with Gaussian `B`.
pub fn random_gram(rng: &mut SeededRng, n: usize, shift: f64) -> SymMatrix {
    let b = gaussian_vec(rng, n * n);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += b[k * n + i] * b[k * n + j];
            }
            if i == j {
                acc += shift;
            }
            data[i * n + j] = acc;
            data[j * n + i] = acc;
        }
    }
    SymMatrix::from_symmetric_unchecked(n, data)
}

/// Evenly spread directions on the unit sphere of `R^3` (spherical Fibonacci lattice).
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}
