//! Multiplier certificates for quadratic inequalities.
//!
//! Every certificate returned here is checked in closed form before it is
//! handed out; searches only propose candidates.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{classify_definiteness, dot, eigendecompose, norm, SymMatrix, DEFAULT_PSD_TOL};
use crate::quadmap::QuadForm;

mod slemma;
mod sproc;

pub use slemma::{
    check_sign_clauses, farkas_gap, farkas_multiplier, solve_slemma, ClauseCheck,
    SLemmaCertificate, SLemmaOutcome, SignClauseReport,
};
pub use sproc::{
    search_violator, solve_sprocedure, solve_sprocedure_eq, sproc_refutation, SProcCertificate,
    SProcInstance, SProcOutcome, SProcRefutation, SLATER_MARGIN,
};

/// Tolerance for the closed-form certificate check, relative to the instance scale.
pub const VERIFY_TOL: f64 = 1e-8;
/// Relative range test tolerance in [`global_min_quadform`].
pub const RANGE_TOL: f64 = 1e-8;

/// `F(z) = <Θz, z> + <z, v> - t` on `R^2` with `Θ` positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CriterionRepr", into = "CriterionRepr")]
pub struct QuadCriterion {
    theta: SymMatrix,
    v: [f64; 2],
    t: f64,
}

#[derive(Serialize, Deserialize)]
struct CriterionRepr {
    #[serde(rename = "Theta")]
    theta: SymMatrix,
    v: [f64; 2],
    t: f64,
}

impl TryFrom<CriterionRepr> for QuadCriterion {
    type Error = Error;

    fn try_from(r: CriterionRepr) -> Result<Self> {
        QuadCriterion::new(r.theta, r.v, r.t)
    }
}

impl From<QuadCriterion> for CriterionRepr {
    fn from(c: QuadCriterion) -> Self {
        CriterionRepr {
            theta: c.theta,
            v: c.v,
            t: c.t,
        }
    }
}

impl QuadCriterion {
    pub fn new(theta: SymMatrix, v: [f64; 2], t: f64) -> Result<Self> {
        check_dim(2, theta.dim())?;
        if !classify_definiteness(&theta, DEFAULT_PSD_TOL).is_positive_semidefinite() {
            return Err(Error::NotPsd(eigendecompose(&theta).min()));
        }
        if !t.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite criterion data".into()));
        }
        Ok(QuadCriterion { theta, v, t })
    }

    pub fn theta(&self) -> &SymMatrix {
        &self.theta
    }

    pub fn v(&self) -> [f64; 2] {
        self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn value(&self, z: [f64; 2]) -> f64 {
        self.theta.quad(&z) + self.v[0] * z[0] + self.v[1] * z[1] - self.t
    }

    /// `1 + |t| + ‖v‖`.
    pub fn scale(&self) -> f64 {
        1.0 + self.t.abs() + norm(&self.v)
    }

    /// `F(z) - <w, z>` as a quadratic form on `R^2`.
    pub(crate) fn shifted(&self, w: [f64; 2], offset: f64) -> QuadForm {
        QuadForm {
            matrix: self.theta.clone(),
            linear: vec![self.v[0] - w[0], self.v[1] - w[1]],
            constant: offset - self.t,
        }
    }

    pub(crate) fn as_form(&self) -> QuadForm {
        self.shifted([0.0, 0.0], 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum QuadMin {
    Finite {
        value: f64,
        minimizer: Vec<f64>,
    },
    /// `phi(x + s·direction) -> -∞` as `s -> ∞` from any `x`.
    UnboundedBelow {
        direction: Vec<f64>,
    },
}

impl QuadMin {
    pub fn value(&self) -> f64 {
        match self {
            QuadMin::Finite { value, .. } => *value,
            QuadMin::UnboundedBelow { .. } => f64::NEG_INFINITY,
        }
    }
}

/// Infimum of `<Ax,x> + <x,a> + b` over `R^n`.
///
/// Finite iff `A ⪰ 0` and `a` lies in the range of `A`; then the minimum is
/// `b - <A⁺a, a>/4`, attained at `-A⁺a/2`.
pub fn global_min_quadform(phi: &QuadForm) -> QuadMin {
    let spec = eigendecompose(&phi.matrix);
    // relative to A itself so that tiny combinations are judged on their own scale
    let psd_margin = DEFAULT_PSD_TOL * phi.matrix.max_abs();
    if spec.min() < -psd_margin {
        return QuadMin::UnboundedBelow {
            direction: spec.min_vector().to_vec(),
        };
    }
    // the same cut decides the range, so no eigenvalue inside the margin is inverted
    let pinv = spec.map(|l| if l <= psd_margin { 0.0 } else { 1.0 / l });
    let y = pinv.mul_vec(&phi.linear);
    let back = phi.matrix.mul_vec(&y);
    let resid: Vec<f64> = phi.linear.iter().zip(&back).map(|(a, r)| a - r).collect();
    if norm(&resid) > RANGE_TOL * norm(&phi.linear) {
        // a has a component in ker A: walk against it
        return QuadMin::UnboundedBelow {
            direction: resid.iter().map(|r| -r).collect(),
        };
    }
    let minimizer: Vec<f64> = y.iter().map(|v| -0.5 * v).collect();
    QuadMin::Finite {
        value: phi.constant - 0.25 * dot(&y, &phi.linear),
        minimizer,
    }
}

/// Point along `direction` from `base` where `phi` drops below `level`.
/// Gives up after 200 doublings and returns the last point tried.
pub(crate) fn descend_below(
    phi: &QuadForm,
    base: &[f64],
    direction: &[f64],
    level: f64,
) -> Vec<f64> {
    let mut s = 1.0;
    let mut x = base.to_vec();
    for _ in 0..200 {
        x = base.iter().zip(direction).map(|(b, d)| b + s * d).collect();
        if phi.value(&x) < level {
            break;
        }
        s *= 2.0;
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SLemmaVerification {
    Verified {
        min_over_z: f64,
        min_over_x: f64,
    },
    /// `F(z) + α(φ1(x) - z1) + β(φ2(x) - z2) = value < 0`.
    Refuted {
        x: Vec<f64>,
        z: [f64; 2],
        value: f64,
    },
}

impl SLemmaVerification {
    pub fn is_verified(&self) -> bool {
        matches!(self, SLemmaVerification::Verified { .. })
    }
}

/// The two closed-form minima whose sum decides a multiplier pair.
pub(crate) fn split_minima(
    alpha: f64,
    beta: f64,
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
) -> Result<(QuadMin, QuadMin, QuadForm, QuadForm)> {
    check_dim(phi1.dim(), phi2.dim())?;
    let zform = crit.shifted([alpha, beta], 0.0);
    let xform = QuadForm::combination(&[alpha, beta], &[phi1, phi2])?;
    Ok((
        global_min_quadform(&zform),
        global_min_quadform(&xform),
        zform,
        xform,
    ))
}

/// Checks `F(z) + α(φ1(x) - z1) + β(φ2(x) - z2) >= 0` for all `x`, `z`.
///
/// The expression splits as `[F(z) - αz1 - βz2] + [αφ1 + βφ2](x)`, so it is
/// decided by two closed-form minimizations. On failure a concrete pair
/// `(x, z)` with a negative value is returned.
pub fn verify_slemma_certificate(
    alpha: f64,
    beta: f64,
    crit: &QuadCriterion,
    phi1: &QuadForm,
    phi2: &QuadForm,
) -> Result<SLemmaVerification> {
    let (mz, mx, zform, xform) = split_minima(alpha, beta, crit, phi1, phi2)?;
    let n = phi1.dim();
    let tol = VERIFY_TOL * crit.scale();
    let (z, x) = match (&mz, &mx) {
        (QuadMin::Finite { value: vz, .. }, QuadMin::Finite { value: vx, .. })
            if vz + vx >= -tol =>
        {
            return Ok(SLemmaVerification::Verified {
                min_over_z: *vz,
                min_over_x: *vx,
            });
        }
        (QuadMin::Finite { minimizer: z, .. }, QuadMin::Finite { minimizer: x, .. }) => {
            (z.clone(), x.clone())
        }
        (QuadMin::Finite { value, minimizer }, QuadMin::UnboundedBelow { direction }) => {
            let x = descend_below(&xform, &vec![0.0; n], direction, -value - 1.0 - tol);
            (minimizer.clone(), x)
        }
        (QuadMin::UnboundedBelow { direction }, QuadMin::Finite { value, minimizer }) => {
            let z = descend_below(&zform, &[0.0, 0.0], direction, -value - 1.0 - tol);
            (z, minimizer.clone())
        }
        (QuadMin::UnboundedBelow { direction: dz }, QuadMin::UnboundedBelow { direction: dx }) => {
            let x = descend_below(&xform, &vec![0.0; n], dx, 0.0);
            let z = descend_below(&zform, &[0.0, 0.0], dz, -xform.value(&x) - 1.0 - tol);
            (z, x)
        }
    };
    let z = [z[0], z[1]];
    let value = crit.value(z) + alpha * (phi1.value(&x) - z[0]) + beta * (phi2.value(&x) - z[1]);
    Ok(SLemmaVerification::Refuted { x, z, value })
}
