//! Non-homogeneous quadratic forms and the constructions built on them:
//! linear changes of the output coordinates, homogenization into block
//! operators, and the diagonal families whose joint image is not closed.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    block_schur_inverse, classify_definiteness, dot, eigendecompose, BlockOperator, SymMatrix,
    DEFAULT_PSD_TOL,
};
use crate::numrange::{closedness_probe, Domain, ProbeOptions, ProbeOutcome};

/// `phi(x) = <Ax, x> + <x, a> + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadFormRepr")]
pub struct QuadForm {
    #[serde(rename = "A")]
    pub matrix: SymMatrix,
    #[serde(rename = "a")]
    pub linear: Vec<f64>,
    #[serde(rename = "b")]
    pub constant: f64,
}

#[derive(Deserialize)]
struct QuadFormRepr {
    #[serde(rename = "A")]
    matrix: SymMatrix,
    #[serde(rename = "a", default)]
    linear: Option<Vec<f64>>,
    #[serde(rename = "b", default)]
    constant: f64,
}

impl TryFrom<QuadFormRepr> for QuadForm {
    type Error = Error;

    fn try_from(r: QuadFormRepr) -> Result<Self> {
        let n = r.matrix.dim();
        QuadForm::new(
            r.matrix,
            r.linear.unwrap_or_else(|| vec![0.0; n]),
            r.constant,
        )
    }
}

impl QuadForm {
    pub fn new(matrix: SymMatrix, linear: Vec<f64>, constant: f64) -> Result<Self> {
        check_dim(matrix.dim(), linear.len())?;
        if !constant.is_finite() || linear.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite quadratic form data".into()));
        }
        Ok(QuadForm {
            matrix,
            linear,
            constant,
        })
    }

    /// The homogeneous form `<Ax, x>`.
    pub fn homogeneous(matrix: SymMatrix) -> Self {
        let n = matrix.dim();
        QuadForm {
            matrix,
            linear: vec![0.0; n],
            constant: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0.0 && self.linear.iter().all(|v| *v == 0.0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.matrix.quad(x) + dot(&self.linear, x) + self.constant
    }

    /// `2Ax + a`.
    pub(crate) fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.matrix.mul_vec(x);
        for (gi, ai) in g.iter_mut().zip(&self.linear) {
            *gi = 2.0 * *gi + ai;
        }
        g
    }

    /// Restriction to the span of orthonormal `basis` vectors.
    pub(crate) fn compress(&self, basis: &[Vec<f64>]) -> QuadForm {
        QuadForm {
            matrix: self.matrix.compress(basis),
            linear: basis.iter().map(|b| dot(b, &self.linear)).collect(),
            constant: self.constant,
        }
    }

    /// `sum_k c_k phi_k`.
    pub fn combination(coeffs: &[f64], forms: &[&QuadForm]) -> Result<QuadForm> {
        let mats: Vec<&SymMatrix> = forms.iter().map(|f| &f.matrix).collect();
        let matrix = SymMatrix::combination(coeffs, &mats)?;
        let n = matrix.dim();
        let mut linear = vec![0.0; n];
        let mut constant = 0.0;
        for (c, f) in coeffs.iter().zip(forms) {
            for (l, a) in linear.iter_mut().zip(&f.linear) {
                *l += c * a;
            }
            constant += c * f.constant;
        }
        QuadForm::new(matrix, linear, constant)
    }
}

/// Evaluates a whole tuple of forms at `x`.
pub fn evaluate_tuple(forms: &[QuadForm], x: &[f64]) -> Result<Vec<f64>> {
    forms.iter().map(|f| f.evaluate(x)).collect()
}

/// `phi -> [[A, a/2], [a^T/2, b]]`, so that `<Â(x,t),(x,t)> = t^2 phi(x/t)`.
pub fn homogenize(phi: &QuadForm) -> BlockOperator {
    BlockOperator {
        a: phi.matrix.clone(),
        d: phi.linear.iter().map(|v| 0.5 * v).collect(),
        s: phi.constant,
    }
}

/// The operator of `f(x, t) = t^2`: zero block with a single 1 in the corner.
pub fn corner_operator(n: usize) -> BlockOperator {
    BlockOperator {
        a: SymMatrix::zeros(n),
        d: vec![0.0; n],
        s: 1.0,
    }
}

/// `‖A^{-1/2} a/2‖^2 - b`; every `mu3` strictly above this makes
/// `homogenize(phi) + mu3·corner` positive definite.
pub fn mu3_bound(phi: &QuadForm) -> Result<f64> {
    let spec = eigendecompose(&phi.matrix);
    if !classify_definiteness(&phi.matrix, DEFAULT_PSD_TOL).is_positive_definite() {
        return Err(Error::NotPd(spec.min()));
    }
    let half: Vec<f64> = phi.linear.iter().map(|v| 0.5 * v).collect();
    let mut acc = 0.0;
    for (k, lambda) in spec.values().iter().enumerate() {
        let c = dot(spec.vector(k), &half);
        acc += c * c / lambda;
    }
    Ok(acc - phi.constant)
}

/// A linear map `R^k -> R^k` acting on the outputs of a `k`-tuple of forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilTransform {
    coefficients: Vec<Vec<f64>>,
    invertible: bool,
}

impl PencilTransform {
    /// Any square `2x2` or `3x3` coefficient matrix; no invertibility claim.
    pub fn general(coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let k = coefficients.len();
        if !(2..=3).contains(&k) || coefficients.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput(
                "transform coefficients must form a 2x2 or 3x3 matrix".into(),
            ));
        }
        if coefficients.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite transform coefficient".into(),
            ));
        }
        Ok(PencilTransform {
            coefficients,
            invertible: false,
        })
    }

    /// Like [`general`](Self::general) but requires `|det| > 1e-12·‖μ‖_F^k`.
    pub fn invertible(coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let mut t = PencilTransform::general(coefficients)?;
        t.check_invertible()?;
        t.invertible = true;
        Ok(t)
    }

    /// `T(r, s, t) = (r, s, mu1 r + mu2 s + mu3 t)`, invertible iff `mu3 != 0`.
    pub fn lift_third(mu: [f64; 3]) -> Result<Self> {
        PencilTransform::invertible(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], mu.to_vec()])
    }

    /// `T(r, t) = (alpha1 r + alpha2 t, beta1 r + beta2 t)`.
    pub fn from_rows(alpha: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        PencilTransform::invertible(vec![alpha.to_vec(), beta.to_vec()])
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.coefficients;
        match self.dim() {
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
        }
    }

    fn check_invertible(&self) -> Result<()> {
        let det = self.determinant();
        let fro = self
            .coefficients
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        if det.abs() > 1e-12 * fro.powi(self.dim() as i32) {
            Ok(())
        } else {
            Err(Error::SingularTransform(det))
        }
    }

    pub fn map_point(&self, p: &[f64]) -> Vec<f64> {
        self.coefficients.iter().map(|row| dot(row, p)).collect()
    }
}

/// Replaces the tuple by the row-wise linear combinations prescribed by `t`;
/// pointwise the new outputs are `t` applied to the old ones.
pub fn apply_transform(t: &PencilTransform, tuple: &[QuadForm]) -> Result<Vec<QuadForm>> {
    check_dim(t.dim(), tuple.len())?;
    if t.invertible {
        t.check_invertible()?;
    }
    let refs: Vec<&QuadForm> = tuple.iter().collect();
    t.coefficients
        .iter()
        .map(|row| QuadForm::combination(row, &refs))
        .collect()
}

/// Result of homogenizing a transformed pair into three block operators.
#[derive(Clone, Debug)]
pub struct HomogenizedPair {
    pub transformed: [QuadForm; 2],
    pub hat: [BlockOperator; 3],
    pub mu3_bound: f64,
    pub mu3: f64,
    /// `hat[1] + mu3·hat[2]`.
    pub z: BlockOperator,
    pub z_inverse: BlockOperator,
}

/// Transforms `(phi1, phi2)` by `t`, homogenizes both forms, adds the corner
/// operator, and inverts `Z = Â2 + mu3·Â3` with `mu3 = mu3_bound + epsilon`.
pub fn homogenize_pair(
    phi1: &QuadForm,
    phi2: &QuadForm,
    t: &PencilTransform,
    epsilon: f64,
) -> Result<HomogenizedPair> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    check_dim(2, t.dim())?;
    let mut forms = apply_transform(t, &[phi1.clone(), phi2.clone()])?.into_iter();
    let f1 = forms.next().expect("two forms");
    let f2 = forms.next().expect("two forms");
    let bound = mu3_bound(&f2)?;
    let mu3 = bound + epsilon;
    let hat1 = homogenize(&f1);
    let hat2 = homogenize(&f2);
    let hat3 = corner_operator(f1.dim());
    let z = BlockOperator {
        a: hat2.a.clone(),
        d: hat2.d.clone(),
        s: hat2.s + mu3,
    };
    let z_inverse = block_schur_inverse(&z)?;
    Ok(HomogenizedPair {
        transformed: [f1, f2],
        hat: [hat1, hat2, hat3],
        mu3_bound: bound,
        mu3,
        z,
        z_inverse,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Diagonal entries tending to zero (compact, positive definite).
    VanishingDiag,
    /// Diagonal entries tending to a positive limit (bounded below).
    ConvergentDiag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AlphaRule {
    /// `alpha_n = 1/n`.
    Harmonic,
    /// `alpha_n = 1 + 1/(2n)`.
    ShiftedHarmonic,
    /// Explicit values `alpha_1, alpha_2, ...`; must cover the truncation.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleFamily {
    pub kind: FamilyKind,
    pub truncation: usize,
    pub alpha: AlphaRule,
}

impl CounterexampleFamily {
    pub fn vanishing(truncation: usize) -> Self {
        CounterexampleFamily {
            kind: FamilyKind::VanishingDiag,
            truncation,
            alpha: AlphaRule::Harmonic,
        }
    }

    pub fn convergent(truncation: usize) -> Self {
        CounterexampleFamily {
            kind: FamilyKind::ConvergentDiag,
            truncation,
            alpha: AlphaRule::ShiftedHarmonic,
        }
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        CounterexampleFamily {
            truncation,
            ..self.clone()
        }
    }

    /// `alpha_1 .. alpha_N`, validated against the family's invariants.
    pub fn alphas(&self) -> Result<Vec<f64>> {
        let n = self.truncation;
        if n < 2 {
            return Err(Error::InvalidInput("truncation must be at least 2".into()));
        }
        let alphas: Vec<f64> = match &self.alpha {
            AlphaRule::Harmonic => (1..=n).map(|k| 1.0 / k as f64).collect(),
            AlphaRule::ShiftedHarmonic => (1..=n).map(|k| 1.0 + 0.5 / k as f64).collect(),
            AlphaRule::Explicit(v) => {
                if v.len() < n {
                    return Err(Error::InvalidInput(format!(
                        "explicit sequence has {} terms, truncation needs {n}",
                        v.len()
                    )));
                }
                v[..n].to_vec()
            }
        };
        if let Some(bad) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "sequence terms must be positive, found {bad}"
            )));
        }
        if self.kind == FamilyKind::VanishingDiag && alphas[n - 1] >= alphas[0] {
            return Err(Error::InvalidInput(
                "a vanishing sequence must satisfy alpha_N < alpha_1".into(),
            ));
        }
        Ok(alphas)
    }
}

/// `A0 = diag(alpha_n)` and `A1 = diag(alpha_n (1 + 1/n))`.
pub fn build_counterexample(fam: &CounterexampleFamily) -> Result<(SymMatrix, SymMatrix)> {
    let alphas = fam.alphas()?;
    let a0 = SymMatrix::diagonal(&alphas)?;
    let d1: Vec<f64> = alphas
        .iter()
        .enumerate()
        .map(|(k, a)| a * (1.0 + 1.0 / (k + 1) as f64))
        .collect();
    Ok((a0, SymMatrix::diagonal(&d1)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub truncation: usize,
    pub best_residual: f64,
    pub witness_norm: f64,
    /// Residual of the scaled basis-vector witness alone.
    pub analytic_residual: f64,
}

/// For each truncation, the smallest distance found from `target` to the
/// full-space image of the family's pair. The analytic witness
/// `alpha_N^{-1/2} e_N` and a multistart probe both run; the better one is kept.
pub fn gap_table(
    fam: &CounterexampleFamily,
    truncations: &[usize],
    target: [f64; 2],
    opts: &ProbeOptions,
    seed: u64,
) -> Result<Vec<GapRow>> {
    if truncations.is_empty() {
        return Err(Error::InvalidInput(
            "at least one truncation is required".into(),
        ));
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "truncations must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::with_capacity(truncations.len());
    for &n in truncations {
        let fam_n = fam.with_truncation(n);
        let alphas = fam_n.alphas()?;
        let (a0, a1) = build_counterexample(&fam_n)?;
        let forms = [QuadForm::homogeneous(a0), QuadForm::homogeneous(a1)];

        let mut witness = vec![0.0; n];
        witness[n - 1] = alphas[n - 1].powf(-0.5);
        let out = [forms[0].value(&witness), forms[1].value(&witness)];
        let analytic = ((out[0] - target[0]).powi(2) + (out[1] - target[1]).powi(2)).sqrt();

        let probe = closedness_probe(&forms, &target, Domain::FullSpace, opts, seed)?;
        let (probe_res, probe_x) = match probe {
            ProbeOutcome::Attained { x, residual } => (residual, x),
            ProbeOutcome::GapEvidence {
                best_residual,
                best_x,
            } => (best_residual, best_x),
        };
        let (best_residual, best_x) = if probe_res < analytic {
            (probe_res, probe_x)
        } else {
            (analytic, witness)
        };
        rows.push(GapRow {
            truncation: n,
            best_residual,
            witness_norm: crate::linalg::norm(&best_x),
            analytic_residual: analytic,
        });
    }
    Ok(rows)
}

/// CSV rendering `N,best_residual,witness_norm`.
pub fn gap_table_csv(rows: &[GapRow]) -> String {
    let mut s = String::from("N,best_residual,witness_norm\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.17e},{:.17e}\n",
            r.truncation, r.best_residual, r.witness_norm
        ));
    }
    s
}
