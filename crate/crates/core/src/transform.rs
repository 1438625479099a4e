//! Boundary trace of the Faddeev solution and the scattering transform
//! `t(k) = int e^{i conj(k) conj(z)} (F_n - F_0) u dl`.

use alloc::vec::Vec;

use crate::boundary_ops::{assemble_s, weighted_matrix, BoundaryOperator, SpaceTag};
use crate::error::{Error, Result};
use crate::exceptional::Problem;
use crate::green::KPoint;
use crate::linalg;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{CMat, CVec, C64};

/// Relative condition number beyond which a solve is reported unavailable.
pub const CONDITION_CAP: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `u = (I + S_k (F_n - F_0))^{-1} e^{ikz}`
    ViaLs,
    /// `u = (F_n - F^out)^{-1} (F_0 - F^out) e^{ikz}`
    ViaLs0428,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub k: KPoint,
    pub route: Route,
    /// trace from `route`
    pub u_nodes: CVec,
    /// trace from the other route
    pub u_other: CVec,
    /// `||u_nodes - u_other|| / ||u_nodes||`
    pub residual: f64,
}

/// Incident wave `e^{ikz}` at the nodes.
pub fn incident(problem: &Problem, k: KPoint) -> CVec {
    CVec::from_iterator(problem.nodes.len(), problem.nodes.z.iter().map(|z| (C64::new(0.0, 1.0) * k.k * z).exp()))
}

fn condition(m: &CMat) -> Result<f64> {
    let sv = linalg::singular_values(m)?;
    Ok(sv[sv.len() - 1] / sv[0])
}

pub fn trace_u(problem: &Problem, k: KPoint) -> Result<BoundaryTrace> {
    trace_u_with(problem, k, &assemble_s(k, &problem.nodes))
}

/// `trace_u` with `S_k` supplied by the caller.
pub fn trace_u_with(problem: &Problem, k: KPoint, s: &BoundaryOperator) -> Result<BoundaryTrace> {
    let nodes = &problem.nodes;
    let e = incident(problem, k);

    let p = linalg::identity(nodes.len()) + linalg::mul(&s.matrix, &problem.diff);
    let cond_p = condition(&weighted_matrix(&p, nodes, SpaceTag::L2, SpaceTag::L2))?;
    if cond_p > CONDITION_CAP {
        return Err(Error::NearSingularSystem { which: "I + S_k (F_n - F_0)", condition: cond_p, suspect: "E" });
    }
    let e_mat = CMat::from_column_slice(e.len(), 1, e.as_slice());
    let u_ls = linalg::solve(&p, &e_mat)?;

    let cond_s = condition(&s.weighted())?;
    if cond_s > CONDITION_CAP {
        return Err(Error::NearSingularSystem { which: "S_k", condition: cond_s, suspect: "E_D" });
    }
    let s_inv_e = linalg::solve(&s.matrix, &e_mat)?;
    let a = &problem.diff + linalg::inverse(&s.matrix)?;
    let cond_a = condition(&weighted_matrix(&a, nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf))?;
    if cond_a > CONDITION_CAP {
        return Err(Error::NearSingularSystem { which: "F_n - F^out(k)", condition: cond_a, suspect: "E" });
    }
    let u_alt = linalg::solve(&a, &s_inv_e)?;

    let u_nodes = u_ls.column(0).into_owned();
    let u_other = u_alt.column(0).into_owned();
    let residual = (&u_nodes - &u_other).norm() / u_nodes.norm();
    Ok(BoundaryTrace { k, route: Route::ViaLs, u_nodes, u_other, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub k: KPoint,
    pub t: C64,
    /// `|t(k)| |ln |k||`
    pub bound_product: f64,
}

/// `t(k)` from a computed trace.
pub fn transform_from_trace(problem: &Problem, trace: &BoundaryTrace) -> TransformValue {
    let k = trace.k;
    let g = &problem.diff * &trace.u_nodes;
    let nodes = &problem.nodes;
    let t: C64 = (0..nodes.len())
        .map(|j| (C64::new(0.0, 1.0) * k.k.conj() * nodes.z[j].conj()).exp() * g[j] * nodes.weights[j])
        .sum();
    TransformValue { k, t, bound_product: t.norm() * k.modulus().ln().abs() }
}

pub fn scatter_t(problem: &Problem, k: KPoint) -> Result<TransformValue> {
    if problem.potential.is_zero() {
        return Ok(TransformValue { k, t: C64::new(0.0, 0.0), bound_product: 0.0 });
    }
    Ok(transform_from_trace(problem, &trace_u(problem, k)?))
}

pub fn scatter_t_with(problem: &Problem, k: KPoint, s: &BoundaryOperator) -> Result<TransformValue> {
    if problem.potential.is_zero() {
        return Ok(TransformValue { k, t: C64::new(0.0, 0.0), bound_product: 0.0 });
    }
    Ok(transform_from_trace(problem, &trace_u_with(problem, k, s)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub values: Vec<TransformValue>,
    /// `sup |t| |ln |k||` over the given sequence
    pub sup: f64,
    /// same over the sequence with geometric midpoints inserted
    pub sup_refined: f64,
    /// the refined supremum does not exceed the coarse one by more than 5%
    pub non_increasing: bool,
}

/// Geometric midpoints of consecutive points of `ks`.
pub fn refinement_points(ks: &[KPoint]) -> Result<Vec<KPoint>> {
    ks.windows(2)
        .map(|w| KPoint::polar((w[0].modulus() * w[1].modulus()).sqrt(), 0.5 * (w[0].phi() + w[1].phi())))
        .collect()
}

impl BoundReport {
    /// `values` on the sequence, `midpoints` on its refinement.
    pub fn from_values(values: Vec<TransformValue>, midpoints: &[TransformValue]) -> Self {
        let sup = values.iter().map(|v| v.bound_product).fold(0.0, f64::max);
        let sup_refined = midpoints.iter().map(|v| v.bound_product).fold(sup, f64::max);
        let non_increasing = sup_refined <= 1.05 * sup || sup_refined == 0.0;
        Self { values, sup, sup_refined, non_increasing }
    }
}

/// `sup |t(k)| |ln|k||` along `ks` and along its refinement.
pub fn bound_check(problem: &Problem, ks: &[KPoint]) -> Result<BoundReport> {
    let values: Result<Vec<TransformValue>> = ks.iter().map(|k| scatter_t(problem, *k)).collect();
    let mids: Result<Vec<TransformValue>> = refinement_points(ks)?.into_iter().map(|k| scatter_t(problem, k)).collect();
    Ok(BoundReport::from_values(values?, &mids?))
}
