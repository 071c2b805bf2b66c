//! Two-constraint S-procedure for homogeneous forms `f_i(x) = <A_i x, x>`.
//!
//! A pair `τ` certifies `f0 <= α0` on `{f1 <= α1, f2 <= α2}` when
//! `A0 <= τ1A1 + τ2A2` and `α0 >= τ1α1 + τ2α2`. Both slacks are concave in
//! `τ`, so the search maximizes their normalized minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{min_eigenvalue, SymMatrix};
use crate::pencil::{find_pd_combination, DEFAULT_GRID, DEFAULT_REFINE_ITERS};
use crate::rng::{seeded, unit_vec};

/// Margin by which the Slater point must satisfy the constraints.
pub const SLATER_MARGIN: f64 = 1e-9;
/// A pair is accepted when both normalized slacks are at least `-ACCEPT_TOL`.
pub const ACCEPT_TOL: f64 = 1e-8;
const GRID: usize = 64;
const BOX_EXPANSIONS: u32 = 6;
const GOLDEN_ITERS: usize = 80;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SProcInstance {
    #[serde(rename = "A0")]
    pub a0: SymMatrix,
    #[serde(rename = "A1")]
    pub a1: SymMatrix,
    #[serde(rename = "A2")]
    pub a2: SymMatrix,
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SProcCertificate {
    pub tau: [f64; 2],
    /// `λ_min(τ1A1 + τ2A2 - A0)`.
    pub slack_operator: f64,
    /// `α0 - τ1α1 - τ2α2`.
    pub slack_scalar: f64,
    /// Normalized max-min value at `tau`.
    pub value: f64,
    /// Set for the equality variant, where `τ2` may be negative.
    pub tau2_unrestricted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SProcOutcome {
    Certificate(SProcCertificate),
    /// Best pair found; its value is below `-ACCEPT_TOL`.
    NoCertificate(SProcCertificate),
}

impl SProcOutcome {
    pub fn pair(&self) -> &SProcCertificate {
        match self {
            SProcOutcome::Certificate(c) | SProcOutcome::NoCertificate(c) => c,
        }
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, SProcOutcome::Certificate(_))
    }
}

impl SProcInstance {
    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn forms(&self, x: &[f64]) -> [f64; 3] {
        [self.a0.quad(x), self.a1.quad(x), self.a2.quad(x)]
    }

    /// `1 + max_i ‖A_i‖_max`.
    pub fn operator_scale(&self) -> f64 {
        1.0 + self
            .a0
            .max_abs()
            .max(self.a1.max_abs())
            .max(self.a2.max_abs())
    }

    /// `1 + |α0| + |α1| + |α2|`.
    pub fn scalar_scale(&self) -> f64 {
        1.0 + self.alpha0.abs() + self.alpha1.abs() + self.alpha2.abs()
    }

    /// Evaluates both slacks at `tau`.
    pub fn slacks(&self, tau: [f64; 2]) -> (f64, f64) {
        let m = SymMatrix::combination(&[tau[0], tau[1], -1.0], &[&self.a1, &self.a2, &self.a0])
            .expect("validated dims");
        (
            min_eigenvalue(&m),
            self.alpha0 - tau[0] * self.alpha1 - tau[1] * self.alpha2,
        )
    }

    fn merit(&self, tau: [f64; 2]) -> f64 {
        let (op, sc) = self.slacks(tau);
        (op / self.operator_scale()).min(sc / self.scalar_scale())
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.a0.dim(), self.a1.dim())?;
        check_dim(self.a0.dim(), self.a2.dim())?;
        if [self.alpha0, self.alpha1, self.alpha2]
            .iter()
            .any(|a| !a.is_finite())
        {
            return Err(Error::InvalidInput("non-finite right-hand side".into()));
        }
        if let Some(x) = &self.slater {
            check_dim(self.dim(), x.len())?;
        }
        let pencil = find_pd_combination(&self.a1, &self.a2, DEFAULT_GRID, DEFAULT_REFINE_ITERS)?;
        if !pencil.is_certificate() {
            return Err(Error::HypothesisUnmet(
                "no positive definite combination of A1 and A2".into(),
            ));
        }
        Ok(())
    }

    fn slater_point(&self) -> Result<&[f64]> {
        self.slater
            .as_deref()
            .ok_or_else(|| Error::HypothesisUnmet("instance has no Slater point".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SProcRefutation {
    /// `f0(x) - α0 > 0`.
    pub excess: f64,
    /// `f0(x) - τ1f1(x) - τ2f2(x)`; positive means the operator inequality fails at `x`.
    pub operator_term: f64,
    /// `τ1(f1(x) - α1) + τ2(f2(x) - α2)`, never positive at a feasible `x`.
    pub constraint_term: f64,
    /// `τ1α1 + τ2α2 - α0`; positive means the scalar inequality fails.
    pub scalar_term: f64,
}

impl SProcRefutation {
    /// True when `x` exposes a failed inequality for the pair.
    pub fn refutes(&self) -> bool {
        self.operator_term > 0.0 || self.scalar_term > 0.0
    }
}

/// If `x` violates `f0 <= α0` while meeting the constraints (with an equality
/// on `f2` when `equality` is set), splits the excess as
/// `f0 - α0 = [f0 - τ·f] + [τ·(f - α)] + [τ·α - α0]`.
pub fn sproc_refutation(
    inst: &SProcInstance,
    x: &[f64],
    tau: [f64; 2],
    equality: bool,
) -> Option<SProcRefutation> {
    let [f0, f1, f2] = inst.forms(x);
    let feasible = f1 <= inst.alpha1
        && if equality {
            (f2 - inst.alpha2).abs() <= SLATER_MARGIN * (1.0 + inst.alpha2.abs())
        } else {
            f2 <= inst.alpha2
        };
    if !feasible || f0 <= inst.alpha0 {
        return None;
    }
    Some(SProcRefutation {
        excess: f0 - inst.alpha0,
        operator_term: f0 - tau[0] * f1 - tau[1] * f2,
        constraint_term: tau[0] * (f1 - inst.alpha1) + tau[1] * (f2 - inst.alpha2),
        scalar_term: tau[0] * inst.alpha1 + tau[1] * inst.alpha2 - inst.alpha0,
    })
}

/// Largest `f0 - α0` over feasible points found by exact search along
/// `directions` random rays. Along a ray `x = √s·u` each form is linear in
/// `s`, so the feasible `s` form an interval and `f0` peaks at one end.
/// Returns the best point when it violates `f0 <= α0`.
pub fn search_violator(
    inst: &SProcInstance,
    equality: bool,
    directions: usize,
    seed: u64,
) -> Result<Option<(Vec<f64>, f64)>> {
    check_dim(inst.a0.dim(), inst.a1.dim())?;
    check_dim(inst.a0.dim(), inst.a2.dim())?;
    let n = inst.dim();
    let mut rng = seeded(seed);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| unit_vec(&mut rng, n)).collect();
    let found: Vec<Option<(f64, f64)>> = dirs
        .par_iter()
        .map(|u| ray_peak(inst, &inst.forms(u), equality))
        .collect();
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, f) in found.iter().enumerate() {
        if let Some((s, excess)) = *f {
            if best.is_none_or(|b| excess > b.2) {
                best = Some((i, s, excess));
            }
        }
    }
    Ok(best.and_then(|(i, s, excess)| {
        (excess > 0.0).then(|| (dirs[i].iter().map(|u| u * s.sqrt()).collect(), excess))
    }))
}

/// Best `s >= 0` on the ray with values `q = (q0, q1, q2)` and its excess.
fn ray_peak(inst: &SProcInstance, q: &[f64; 3], equality: bool) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut limit = |qi: f64, ai: f64| -> bool {
        if qi > 0.0 {
            hi = hi.min(ai / qi);
        } else if qi < 0.0 {
            lo = lo.max(ai / qi);
        } else if ai < 0.0 {
            return false;
        }
        true
    };
    if !limit(q[1], inst.alpha1) {
        return None;
    }
    if equality {
        if q[2] == 0.0 {
            return None;
        }
        let s = inst.alpha2 / q[2];
        if s < lo || s > hi || s < 0.0 {
            return None;
        }
        return Some((s, s * q[0] - inst.alpha0));
    }
    if !limit(q[2], inst.alpha2) || lo > hi {
        return None;
    }
    // endpoints pulled inward by a few ulps so the point stays feasible
    let s = if q[0] > 0.0 {
        if hi.is_finite() {
            hi * (1.0 - 1e-12)
        } else {
            (lo * (1.0 + 1e-12)).max(2.0 * (inst.alpha0.abs() + 1.0) / q[0])
        }
    } else {
        lo * (1.0 + 1e-12)
    };
    if s > hi {
        return None;
    }
    Some((s, s * q[0] - inst.alpha0))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
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

fn maximize(inst: &SProcInstance, unrestricted: bool) -> SProcOutcome {
    let mut best = ([0.0, 0.0], inst.merit([0.0, 0.0]));
    let mut side = 1.0;
    for k in 0..=BOX_EXPANSIONS {
        side = f64::from(1u32 << k);
        let lo2 = if unrestricted { -side } else { 0.0 };
        let step1 = side / (GRID - 1) as f64;
        let step2 = (side - lo2) / (GRID - 1) as f64;
        let values: Vec<([f64; 2], f64)> = (0..GRID * GRID)
            .into_par_iter()
            .map(|idx| {
                let tau = [
                    (idx / GRID) as f64 * step1,
                    lo2 + (idx % GRID) as f64 * step2,
                ];
                (tau, inst.merit(tau))
            })
            .collect();
        let mut box_best = values[0];
        for v in &values {
            if v.1 > box_best.1 {
                box_best = *v;
            }
        }
        if box_best.1 > best.1 {
            best = box_best;
        }
        // an interior maximizer of a concave function is global
        let t = box_best.0;
        let on_edge = t[0] >= side - 0.5 * step1
            || t[1] >= side - 0.5 * step2
            || (unrestricted && t[1] <= lo2 + 0.5 * step2);
        if !on_edge {
            break;
        }
    }
    let lo2 = if unrestricted { -side } else { 0.0 };
    let inner = |t1: f64| golden_max(|t2| inst.merit([t1, t2]), lo2, side);
    let (t1, _) = golden_max(|t1| inner(t1).1, 0.0, side);
    let (t2, v) = inner(t1);
    if v > best.1 {
        best = ([t1, t2], v);
    }
    let (tau, value) = best;
    let (slack_operator, slack_scalar) = inst.slacks(tau);
    let cert = SProcCertificate {
        tau,
        slack_operator,
        slack_scalar,
        value,
        tau2_unrestricted: unrestricted,
    };
    if value >= -ACCEPT_TOL {
        SProcOutcome::Certificate(cert)
    } else {
        SProcOutcome::NoCertificate(cert)
    }
}

/// Searches `τ1, τ2 >= 0` with `A0 <= τ1A1 + τ2A2` and `α0 >= τ1α1 + τ2α2`.
///
/// Requires a positive definite combination of `A1, A2` and a Slater point
/// with `f_i(x0) < α_i - SLATER_MARGIN`.
pub fn solve_sprocedure(inst: &SProcInstance) -> Result<SProcOutcome> {
    inst.validate()?;
    let x0 = inst.slater_point()?;
    let [_, f1, f2] = inst.forms(x0);
    if f1 >= inst.alpha1 - SLATER_MARGIN || f2 >= inst.alpha2 - SLATER_MARGIN {
        return Err(Error::HypothesisUnmet(
            "Slater point is not strictly feasible".into(),
        ));
    }
    Ok(maximize(inst, false))
}

/// Variant with `f2(x) = α2`: `τ2` ranges over all reals. Requires `α2 != 0`
/// and a Slater point with `f1(x0) < α1` and `f2(x0) = α2` up to `SLATER_MARGIN`.
pub fn solve_sprocedure_eq(inst: &SProcInstance) -> Result<SProcOutcome> {
    if inst.alpha2 == 0.0 {
        return Err(Error::HypothesisUnmet(
            "equality level alpha2 must be nonzero".into(),
        ));
    }
    inst.validate()?;
    let x0 = inst.slater_point()?;
    let [_, f1, f2] = inst.forms(x0);
    if f1 >= inst.alpha1 - SLATER_MARGIN || (f2 - inst.alpha2).abs() > SLATER_MARGIN {
        return Err(Error::HypothesisUnmet(
            "Slater point does not meet the constraints".into(),
        ));
    }
    Ok(maximize(inst, true))
}
