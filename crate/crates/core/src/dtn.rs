//! Dirichlet-to-Neumann maps.
//!
//! `F_0` is obtained from Green's representation of harmonic functions,
//! `S (d_nu u) = (I/2 + K) u`, which holds for any curve. `F_n` for `n != 0`
//! needs an interior solve and is available on the unit disk only.

use alloc::string::ToString;
use alloc::sync::Arc;

use crate::boundary_ops::{
    self, assemble_b, assemble_s, b_inverse_mean_free, double_layer, log_single_layer, mean_projector,
};
use crate::boundary_ops::{BoundaryOperator, SpaceTag};
use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::green::KPoint;
use crate::interior::{self, PolarSolverOptions};
use crate::linalg;
use crate::potential::Potential;
use crate::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtnProvenance {
    Interior,
    ExteriorFaddeev(KPoint),
    ExteriorFaddeevZero,
    ExteriorBounded,
}

/// A DtN map `H^{1/2} -> H^{-1/2}` with its origin.
#[derive(Debug, Clone)]
pub struct DtnMap {
    pub operator: BoundaryOperator,
    pub provenance: DtnProvenance,
}

impl DtnMap {
    fn new(matrix: CMat, nodes: &Arc<NodeSet>, provenance: DtnProvenance) -> Self {
        Self {
            operator: BoundaryOperator {
                matrix,
                domain: SpaceTag::HHalf,
                range: SpaceTag::HMinusHalf,
                nodes: nodes.clone(),
            },
            provenance,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.operator.matrix
    }
}

/// Laplace DtN map `F_0` of the interior.
pub fn assemble_f0(nodes: &Arc<NodeSet>) -> Result<DtnMap> {
    let n = nodes.len();
    // The constant shift leaves S (d_nu u) unchanged because d_nu u has
    // zero mean, and makes the log layer invertible on small curves.
    let s = log_single_layer(nodes, 1.0);
    let rhs = linalg::identity(n) * C64::new(0.5, 0.0) + double_layer(nodes);
    let f0 = linalg::solve(&s, &rhs)?;
    Ok(DtnMap::new(f0, nodes, DtnProvenance::Interior))
}

/// DtN map of `-Laplace - n` (unit disk only).
pub fn assemble_fn(nodes: &Arc<NodeSet>, n: &Potential) -> Result<DtnMap> {
    assemble_fn_with(nodes, n, &PolarSolverOptions::default())
}

pub fn assemble_fn_with(nodes: &Arc<NodeSet>, n: &Potential, opts: &PolarSolverOptions) -> Result<DtnMap> {
    if !nodes.curve.is_unit_circle() {
        return Err(Error::RequiresUnitDisk(nodes.curve.name.to_string()));
    }
    let m = interior::disk_dtn_nodes(n, nodes.len(), opts)?;
    Ok(DtnMap::new(m, nodes, DtnProvenance::Interior))
}

/// `F^out(k) = F_0 - S_k^{-1}`.
pub fn assemble_fout(k: KPoint, f0: &DtnMap) -> Result<DtnMap> {
    let nodes = &f0.operator.nodes;
    let s_inv = boundary_ops::invert_s(&assemble_s(k, nodes))?;
    Ok(DtnMap::new(f0.matrix() - s_inv.matrix, nodes, DtnProvenance::ExteriorFaddeev(k)))
}

/// `F^out(0)`: zero on constants, `F_0 - B^{-1}` on mean-free densities.
pub fn assemble_fout_zero(f0: &DtnMap) -> Result<DtnMap> {
    let nodes = &f0.operator.nodes;
    let perp = linalg::identity(nodes.len()) - mean_projector(nodes);
    let b_inv = b_inverse_mean_free(&assemble_b(nodes))?;
    let m = &perp * (f0.matrix() - b_inv) * &perp;
    Ok(DtnMap::new(m, nodes, DtnProvenance::ExteriorFaddeevZero))
}

/// Exterior Laplace DtN map for bounded solutions (outward normal).
///
/// A bounded exterior harmonic `u` with limit `u_inf` satisfies
/// `S g - u_inf = (K - I/2) f` on the boundary with `g = d_nu u` of zero mean.
pub fn assemble_fout_bounded(nodes: &Arc<NodeSet>) -> Result<DtnMap> {
    let n = nodes.len();
    let s = log_single_layer(nodes, 0.0);
    let mut sys = CMat::zeros(n + 1, n + 1);
    sys.view_mut((0, 0), (n, n)).copy_from(&s);
    for i in 0..n {
        sys[(i, n)] = C64::new(-1.0, 0.0);
        sys[(n, i)] = C64::new(nodes.weights[i], 0.0);
    }
    let mut rhs = CMat::zeros(n + 1, n);
    let k = double_layer(nodes) - linalg::identity(n) * C64::new(0.5, 0.0);
    rhs.view_mut((0, 0), (n, n)).copy_from(&k);
    let sol = linalg::solve(&sys, &rhs)?;
    Ok(DtnMap::new(sol.rows(0, n).into_owned(), nodes, DtnProvenance::ExteriorBounded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCurve;
    use crate::CVec;

    fn circle(n: usize) -> Arc<NodeSet> {
        Arc::new(BoundaryCurve::circle(1.0).unwrap().sample(n).unwrap())
    }

    fn mode(nodes: &NodeSet, m: i32) -> CVec {
        CVec::from_iterator(nodes.len(), nodes.t.iter().map(|t| C64::from_polar(1.0, m as f64 * t)))
    }

    #[test]
    fn f0_on_circle_is_abs_m() {
        let nodes = circle(128);
        let f0 = assemble_f0(&nodes).unwrap();
        for m in [0, 1, 2, 5, 17, 40, 63] {
            let v = mode(&nodes, m);
            let err = (f0.matrix() * &v - &v * C64::new(m as f64, 0.0)).camax();
            assert!(err < 1e-8, "m = {m}: {err}");
        }
    }

    #[test]
    fn exterior_maps_on_circle_are_minus_abs_m() {
        let nodes = circle(128);
        let f0 = assemble_f0(&nodes).unwrap();
        let zero = assemble_fout_zero(&f0).unwrap();
        let bounded = assemble_fout_bounded(&nodes).unwrap();
        for m in [0, 1, 3, 20, 63] {
            let v = mode(&nodes, m);
            let want = &v * C64::new(-(m as f64), 0.0);
            assert!((zero.matrix() * &v - &want).camax() < 1e-6, "zero, m = {m}");
            assert!((bounded.matrix() * &v - &want).camax() < 1e-8, "bounded, m = {m}");
        }
    }

    #[test]
    fn interior_laplace_matches_bie() {
        let nodes = circle(64);
        let f0 = assemble_f0(&nodes).unwrap();
        let fn0 = assemble_fn(&nodes, &Potential::Zero).unwrap();
        assert!(linalg::max_abs(&(f0.matrix() - fn0.matrix())) < 1e-6);
    }

    #[test]
    fn fn_needs_unit_disk() {
        let nodes = Arc::new(BoundaryCurve::ellipse(2.0, 1.0).unwrap().sample(32).unwrap());
        assert!(matches!(assemble_fn(&nodes, &Potential::Zero), Err(Error::RequiresUnitDisk(_))));
    }
}
