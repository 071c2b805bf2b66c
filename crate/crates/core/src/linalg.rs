//! Dense symmetric linear algebra.
//!
//! Everything here works on [`SymMatrix`], a row-major dense matrix that is
//! symmetric by construction. The eigensolver is a cyclic Jacobi method with
//! a fixed sweep order, so results are bitwise reproducible for a given input.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative off-diagonal threshold at which the Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;
/// Hard cap on the number of Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default relative tolerance used for positive-semidefinite checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;
/// Relative tolerance below which a pivot (eigenvalue, Schur complement) counts as zero.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A dense real symmetric `n x n` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// On-disk JSON shape: `{"n": 3, "rows": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixRepr {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for SymMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.rows.len() != repr.n {
            return Err(Error::Format(format!(
                "matrix declares n = {} but has {} rows",
                repr.n,
                repr.rows.len()
            )));
        }
        SymMatrix::from_rows(&repr.rows)
    }
}

impl From<SymMatrix> for MatrixRepr {
    fn from(m: SymMatrix) -> Self {
        MatrixRepr {
            n: m.n,
            rows: m.to_rows(),
        }
    }
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, replacing it by its symmetric
    /// part `(M + M^T) / 2`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "matrix dimension must be at least 1".into(),
            ));
        }
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite matrix entry {bad}"
            )));
        }
        let mut data = data;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        SymMatrix::new(n, data)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        SymMatrix::new(n, data)
    }

    /// Internal constructor for data already known to be symmetric and finite.
    pub(crate) fn from_symmetric_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        SymMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix::from_symmetric_unchecked(n, vec![0.0; n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        SymMatrix::new(n, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// The quadratic form `<Ax, x>`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += x[i] * dot(self.row(i), x);
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix::from_symmetric_unchecked(self.n, self.data.iter().map(|v| c * v).collect())
    }

    /// `sum_k coeffs[k] * mats[k]`.
    pub fn combination(coeffs: &[f64], mats: &[&SymMatrix]) -> Result<SymMatrix> {
        if coeffs.len() != mats.len() || mats.is_empty() {
            return Err(Error::InvalidInput(
                "linear combination needs one coefficient per matrix".into(),
            ));
        }
        let n = mats[0].n;
        let mut data = vec![0.0; n * n];
        for (c, m) in coeffs.iter().zip(mats) {
            check_dim(n, m.n)?;
            if *c == 0.0 {
                continue;
            }
            for (d, v) in data.iter_mut().zip(&m.data) {
                *d += c * v;
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite linear combination".into()));
        }
        Ok(SymMatrix::from_symmetric_unchecked(n, data))
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        SymMatrix::combination(&[1.0, 1.0], &[self, other])
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        SymMatrix::combination(&[1.0, -1.0], &[self, other])
    }

    /// Restriction `B^T A B` to the span of the orthonormal columns `basis`.
    pub fn compress(&self, basis: &[Vec<f64>]) -> SymMatrix {
        let k = basis.len();
        let images: Vec<Vec<f64>> = basis.iter().map(|b| self.mul_vec(b)).collect();
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = dot(&basis[i], &images[j]);
                data[i * k + j] = v;
                data[j * k + i] = v;
            }
        }
        SymMatrix::from_symmetric_unchecked(k, data)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    /// Column-major: vector `k` occupies `vectors[k*n .. (k+1)*n]`.
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.dim() - 1]
    }

    pub fn min_vector(&self) -> &[f64] {
        self.vector(0)
    }

    pub fn max_vector(&self) -> &[f64] {
        self.vector(self.dim() - 1)
    }

    /// Rebuilds `Q f(diag) Q^T` for a spectral function `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let fvals: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, fk) in fvals.iter().enumerate() {
                    if *fk != 0.0 {
                        acc += fk * self.vectors[k * n + i] * self.vectors[k * n + j];
                    }
                }
                data[i * n + j] = acc;
                data[j * n + i] = acc;
            }
        }
        SymMatrix::from_symmetric_unchecked(n, data)
    }
}

/// Cyclic Jacobi sweeps in the fixed order `(0,1), (0,2), ..., (n-2,n-1)`.
/// Returns the rotated diagonal and, when requested, the accumulated rotations
/// (column-major).
fn jacobi(a: &SymMatrix, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };
    let norm = a.frobenius();
    let threshold = JACOBI_TOL * norm;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[r * n + p] = new_rp;
                    m[p * n + r] = new_rp;
                    m[r * n + q] = new_rq;
                    m[q * n + r] = new_rq;
                }
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v[p * n + r];
                        let vrq = v[q * n + r];
                        v[p * n + r] = c * vrp - s * vrq;
                        v[q * n + r] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), v)
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn eigendecompose(a: &SymMatrix) -> Spectrum {
    let n = a.n;
    let (diag, vecs) = jacobi(a, true);
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&vecs[k * n..(k + 1) * n]);
    }
    Spectrum { values, vectors }
}

/// Eigenvalues only (ascending); skips accumulating the rotations.
pub fn eigenvalues(a: &SymMatrix) -> Vec<f64> {
    let (mut diag, _) = jacobi(a, false);
    diag.sort_by(f64::total_cmp);
    diag
}

pub fn min_eigenvalue(a: &SymMatrix) -> f64 {
    eigenvalues(a)[0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NegativeSemidefinite,
    NegativeDefinite,
}

impl Definiteness {
    pub fn is_positive_definite(self) -> bool {
        self == Definiteness::PositiveDefinite
    }

    /// True for both `PositiveDefinite` and `PositiveSemidefinite`.
    pub fn is_positive_semidefinite(self) -> bool {
        matches!(
            self,
            Definiteness::PositiveDefinite | Definiteness::PositiveSemidefinite
        )
    }
}

/// Classifies `a` from its extreme eigenvalues against `±tol·(1 + ‖a‖_max)`.
pub fn classify_definiteness(a: &SymMatrix, tol: f64) -> Definiteness {
    let vals = eigenvalues(a);
    classify_values(&vals, tol * (1.0 + a.max_abs()))
}

fn classify_values(ascending: &[f64], margin: f64) -> Definiteness {
    let lo = ascending[0];
    let hi = ascending[ascending.len() - 1];
    if lo > margin {
        Definiteness::PositiveDefinite
    } else if hi < -margin {
        Definiteness::NegativeDefinite
    } else if lo >= -margin {
        Definiteness::PositiveSemidefinite
    } else if hi <= margin {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Principal square root of a positive semidefinite matrix, using
/// [`DEFAULT_PSD_TOL`] for the clamping threshold.
pub fn sqrt_psd(a: &SymMatrix) -> Result<SymMatrix> {
    sqrt_psd_with_tol(a, DEFAULT_PSD_TOL)
}

/// Square root with an explicit tolerance; eigenvalues in `[-tol·(1+‖a‖_max), 0)`
/// are clamped to zero, anything more negative is rejected.
pub fn sqrt_psd_with_tol(a: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    let spec = eigendecompose(a);
    if spec.min() < -tol * (1.0 + a.max_abs()) {
        return Err(Error::NotPsd(spec.min()));
    }
    Ok(spec.map(|l| l.max(0.0).sqrt()))
}

/// Moore-Penrose pseudoinverse; eigenvalues with `|λ| <= rank_tol · max|λ|` are
/// treated as zero.
pub fn pseudoinverse(a: &SymMatrix, rank_tol: f64) -> SymMatrix {
    let spec = eigendecompose(a);
    let scale = spec.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return SymMatrix::zeros(a.n);
    }
    let cut = rank_tol * scale;
    spec.map(|l| if l.abs() <= cut { 0.0 } else { 1.0 / l })
}

/// Spectral inverse. Fails when the smallest |λ| is below
/// `SINGULAR_TOL · (1 + ‖a‖_max)`.
pub fn inverse(a: &SymMatrix) -> Result<SymMatrix> {
    let spec = eigendecompose(a);
    let smallest = spec
        .values()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if smallest <= SINGULAR_TOL * (1.0 + a.max_abs()) {
        return Err(Error::SingularBlock(format!(
            "smallest |eigenvalue| {smallest:e} is numerically zero"
        )));
    }
    Ok(spec.map(|l| 1.0 / l))
}

/// The symmetric `(n+1) x (n+1)` operator `[[A, d], [d^T, s]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub a: SymMatrix,
    pub d: Vec<f64>,
    pub s: f64,
}

impl BlockOperator {
    pub fn new(a: SymMatrix, d: Vec<f64>, s: f64) -> Result<Self> {
        check_dim(a.dim(), d.len())?;
        if !s.is_finite() || d.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite block entry".into()));
        }
        Ok(BlockOperator { a, d, s })
    }

    /// Dimension of the assembled operator, `n + 1`.
    pub fn dim(&self) -> usize {
        self.a.dim() + 1
    }

    pub fn as_dense(&self) -> SymMatrix {
        let n = self.a.dim();
        let m = n + 1;
        let mut data = vec![0.0; m * m];
        for i in 0..n {
            data[i * m..i * m + n].copy_from_slice(self.a.row(i));
            data[i * m + n] = self.d[i];
            data[n * m + i] = self.d[i];
        }
        data[n * m + n] = self.s;
        SymMatrix::from_symmetric_unchecked(m, data)
    }

    /// `<Z (x, t), (x, t)> = <Ax, x> + 2t<d, x> + s t^2`.
    pub fn quad(&self, x: &[f64], t: f64) -> f64 {
        self.a.quad(x) + 2.0 * t * dot(&self.d, x) + self.s * t * t
    }

    pub fn max_abs(&self) -> f64 {
        self.d
            .iter()
            .fold(self.a.max_abs().max(self.s.abs()), |m, v| m.max(v.abs()))
    }
}

/// Inverse of `Z = [[A, d], [d^T, s]]` through the Schur complement
/// `z = s - d^T A^{-1} d`:
///
/// ```text
/// Z^{-1} = [[A^{-1} + A^{-1} d z^{-1} d^T A^{-1},  -A^{-1} d z^{-1}],
///           [-z^{-1} d^T A^{-1},                    z^{-1}        ]]
/// ```
pub fn block_schur_inverse(z: &BlockOperator) -> Result<BlockOperator> {
    let a_inv = inverse(&z.a)?;
    let g = a_inv.mul_vec(&z.d);
    let dg = dot(&z.d, &g);
    let complement = z.s - dg;
    if complement.abs() <= SINGULAR_TOL * (1.0 + z.s.abs() + dg.abs()) {
        return Err(Error::SingularBlock(format!(
            "Schur complement {complement:e} is numerically zero"
        )));
    }
    let zi = 1.0 / complement;
    let n = z.a.dim();
    let mut top = a_inv.as_slice().to_vec();
    for i in 0..n {
        for j in 0..n {
            top[i * n + j] += g[i] * zi * g[j];
        }
    }
    let top = SymMatrix::new(n, top)?;
    let off: Vec<f64> = g.iter().map(|gi| -gi * zi).collect();
    BlockOperator::new(top, off, zi)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(x: &mut [f64]) -> f64 {
    let r = norm(x);
    if r > 0.0 {
        x.iter_mut().for_each(|v| *v /= r);
    }
    r
}

/// Plain dense matrix product of two square row-major arrays.
pub(crate) fn dense_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `‖Z·W − I‖_max` for square row-major arrays.
pub fn identity_residual(z: &SymMatrix, w: &SymMatrix) -> f64 {
    let n = z.dim();
    let prod = dense_mul(n, z.as_slice(), w.as_slice());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[i * n + j] - target).abs());
        }
    }
    worst
}
