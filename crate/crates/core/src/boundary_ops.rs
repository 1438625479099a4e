//! Nyström discretization of boundary integral operators.
//!
//! Densities are node values `sigma_j = sigma(z(t_j))` with respect to arc
//! length. The logarithmic singularity `ln|z(t) - z(s)|` is split as
//! `(1/2) ln(4 sin^2((t-s)/2))` plus a smooth remainder; the first part is
//! integrated with the periodic product rule, the rest by the trapezoid rule.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::green::{self, KPoint};
use crate::linalg;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quadrature::log_product_weights;
use crate::sobolev::SobolevWeight;
use crate::{CMat, CVec, C64};

/// Function space a discrete operator acts on or maps into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    HMinusHalf,
    HHalf,
    L2,
}

impl SpaceTag {
    pub fn order(self) -> f64 {
        match self {
            SpaceTag::HMinusHalf => -0.5,
            SpaceTag::HHalf => 0.5,
            SpaceTag::L2 => 0.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpaceTag::HMinusHalf => "H^-1/2",
            SpaceTag::HHalf => "H^1/2",
            SpaceTag::L2 => "L2",
        }
    }
}

/// Matrix mapping node-value vectors of `domain` to node values of `range`.
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub matrix: CMat,
    pub domain: SpaceTag,
    pub range: SpaceTag,
    pub nodes: Arc<NodeSet>,
}

impl BoundaryOperator {
    pub fn new(matrix: CMat, domain: SpaceTag, range: SpaceTag, nodes: Arc<NodeSet>) -> Result<Self> {
        let n = nodes.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension { expected: n, got: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { matrix, domain, range, nodes })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix whose Euclidean singular values approximate the operator norms
    /// between the tagged Sobolev spaces: `W_r D^{1/2} M D^{-1/2} W_{-d}`,
    /// with `D` the arc-length weights and `W_s` the Fourier multipliers.
    pub fn weighted(&self) -> CMat {
        weighted_matrix(&self.matrix, &self.nodes, self.domain, self.range)
    }

    /// Adjoint in the arc-length inner product, `D^{-1} M^H D`.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: arc_adjoint(&self.matrix, &self.nodes),
            domain: self.range,
            range: self.domain,
            nodes: self.nodes.clone(),
        }
    }

    /// `max |(D M) - (D M)^H|`, zero for operators self-adjoint in arc length.
    pub fn self_adjointness_defect(&self) -> f64 {
        let dm = scale_rows(&self.matrix, &self.nodes.weights);
        linalg::max_abs(&(&dm - dm.adjoint()))
    }

    pub fn sigma_min(&self) -> Result<f64> {
        linalg::sigma_min(&self.weighted())
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.matrix * v
    }
}

pub(crate) fn scale_rows(m: &CMat, w: &[f64]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * w[i])
}

pub(crate) fn arc_adjoint(m: &CMat, nodes: &NodeSet) -> CMat {
    let w = &nodes.weights;
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(j, i)].conj() * w[j] / w[i])
}

pub fn weighted_matrix(m: &CMat, nodes: &NodeSet, domain: SpaceTag, range: SpaceTag) -> CMat {
    let n = nodes.len();
    let sq: Vec<f64> = nodes.weights.iter().map(|w| w.sqrt()).collect();
    let inner = CMat::from_fn(n, n, |i, j| m[(i, j)] * sq[i] / sq[j]);
    let left = SobolevWeight::new(range.order());
    let right = SobolevWeight::new(-domain.order());
    let mut out = inner;
    if left.order != 0.0 {
        out = linalg::mul(&left.matrix(n), &out);
    }
    if right.order != 0.0 {
        out = linalg::mul(&out, &right.matrix(n));
    }
    out
}

/// Single layer with kernel `-(1/2pi) ln|z - z'| + shift`.
pub fn log_single_layer(nodes: &NodeSet, shift: f64) -> CMat {
    let n = nodes.len();
    let r = log_product_weights(n);
    let h = 2.0 * PI / n as f64;
    CMat::from_fn(n, n, |i, j| {
        let smooth = if i == j {
            -nodes.speed[i].ln() / (2.0 * PI)
        } else {
            let dist = (nodes.z[i] - nodes.z[j]).norm();
            let s = (0.5 * (nodes.t[i] - nodes.t[j])).sin();
            -(dist.ln() - 0.5 * (4.0 * s * s).ln()) / (2.0 * PI)
        };
        let v = (-r[(i + n - j) % n] / (4.0 * PI) + h * (smooth + shift)) * nodes.speed[j];
        C64::new(v, 0.0)
    })
}

/// Double layer `K f(x) = int d/dnu_y [-(1/2pi) ln|x - y|] f(y) dl_y`.
pub fn double_layer(nodes: &NodeSet) -> CMat {
    let n = nodes.len();
    CMat::from_fn(n, n, |i, j| {
        let kernel = if i == j {
            let dd = nodes.ddz[i];
            let nu = nodes.normals[i];
            (dd.re * nu.re + dd.im * nu.im) / (4.0 * PI * nodes.speed[i] * nodes.speed[i])
        } else {
            let d = nodes.z[i] - nodes.z[j];
            let nu = nodes.normals[j];
            (d.re * nu.re + d.im * nu.im) / (2.0 * PI * d.norm_sqr())
        };
        C64::new(kernel * nodes.weights[j], 0.0)
    })
}

/// Smooth-kernel part `N(k(z - z'))` of `S_k - S_k^0`.
pub fn remainder_layer(k: KPoint, nodes: &NodeSet) -> CMat {
    let n = nodes.len();
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(0.0, 0.0)
        } else {
            C64::new(green::remainder(k.k * (nodes.z[i] - nodes.z[j])) * nodes.weights[j], 0.0)
        }
    })
}

/// `S_k^0`, the single layer with kernel `G_k^0`.
pub fn assemble_s0(k: KPoint, nodes: &Arc<NodeSet>) -> BoundaryOperator {
    let m = log_single_layer(nodes, k.log_shift());
    BoundaryOperator { matrix: m, domain: SpaceTag::HMinusHalf, range: SpaceTag::HHalf, nodes: nodes.clone() }
}

/// `S_k = S_k^0 + N`.
pub fn assemble_s(k: KPoint, nodes: &Arc<NodeSet>) -> BoundaryOperator {
    let mut op = assemble_s0(k, nodes);
    op.matrix += remainder_layer(k, nodes);
    op
}

/// Arc-length mean projector `P_c psi = (int psi dl / |dO|) 1`.
pub fn mean_projector(nodes: &NodeSet) -> CMat {
    let n = nodes.len();
    let len = nodes.length();
    CMat::from_fn(n, n, |_, j| C64::new(nodes.weights[j] / len, 0.0))
}

/// `B = P_perp S_log P_perp`, the log-kernel single layer on mean-free densities.
pub fn assemble_b(nodes: &Arc<NodeSet>) -> BoundaryOperator {
    let n = nodes.len();
    let perp = linalg::identity(n) - mean_projector(nodes);
    let m = &perp * log_single_layer(nodes, 0.0) * &perp;
    BoundaryOperator { matrix: m, domain: SpaceTag::HMinusHalf, range: SpaceTag::HHalf, nodes: nodes.clone() }
}

/// Inverse of `B` on the mean-free subspace, extended by zero on constants.
pub fn b_inverse_mean_free(b: &BoundaryOperator) -> Result<CMat> {
    let q = mean_projector(&b.nodes);
    let full = &b.matrix + &q;
    Ok(linalg::inverse(&full)? - q)
}

/// Decomposition `psi = (c, phi)` of domain and range into constants and
/// mean-free functions.
#[derive(Debug, Clone)]
pub struct BlockForm {
    /// constants -> constants
    pub cc: C64,
    /// mean-free -> constants, as a row functional on node values
    pub c_perp: CMat,
    /// constants -> mean-free: image of the constant 1
    pub perp_c: CVec,
    /// mean-free -> mean-free
    pub perp_perp: CMat,
    pub weights: Vec<f64>,
}

pub fn block_form(op: &BoundaryOperator) -> BlockForm {
    block_form_matrix(&op.matrix, &op.nodes)
}

pub(crate) fn block_form_matrix(m: &CMat, nodes: &NodeSet) -> BlockForm {
    let n = nodes.len();
    let len = nodes.length();
    let q = mean_projector(nodes);
    let perp = linalg::identity(n) - &q;
    let one = CVec::from_element(n, C64::new(1.0, 0.0));
    let mean_row = CMat::from_fn(1, n, |_, j| C64::new(nodes.weights[j] / len, 0.0));
    let m_one = m * &one;
    let cc = (&mean_row * &m_one)[(0, 0)];
    BlockForm {
        cc,
        c_perp: &mean_row * m * &perp,
        perp_c: &perp * m_one,
        perp_perp: &perp * m * &perp,
        weights: nodes.weights.clone(),
    }
}

impl BlockForm {
    /// Reassemble the node-value matrix.
    pub fn reassemble(&self) -> CMat {
        let n = self.weights.len();
        let len: f64 = self.weights.iter().sum();
        let mean_row = CMat::from_fn(1, n, |_, j| C64::new(self.weights[j] / len, 0.0));
        let one = CMat::from_element(n, 1, C64::new(1.0, 0.0));
        let top = &one * (&mean_row * self.cc + &self.c_perp);
        let pc = CMat::from_fn(n, 1, |i, _| self.perp_c[i]) * &mean_row;
        top + pc + &self.perp_perp
    }
}

/// Relative threshold on `sigma_min / ||.||` of the weighted `S_k` below
/// which inversion is refused. For `|k| > 2` on the unit circle `S_k`
/// has genuinely small singular values (of order `e^{-4|k|}`, stable under
/// refinement), so the threshold sits a few digits above round-off.
pub const S_SINGULAR_THRESHOLD: f64 = 1e-12;

/// Dense inverse of `S_k`, refused when the weighted matrix is numerically
/// singular (the refusal itself flags `k` as close to E_D).
pub fn invert_s(s: &BoundaryOperator) -> Result<BoundaryOperator> {
    invert_s_with(s, S_SINGULAR_THRESHOLD)
}

pub fn invert_s_with(s: &BoundaryOperator, threshold: f64) -> Result<BoundaryOperator> {
    let sv = linalg::singular_values(&s.weighted())?;
    let (smin, smax) = (sv[0], sv[sv.len() - 1]);
    if smin < threshold * smax {
        return Err(Error::NearSingularS { sigma_min: smin, norm: smax });
    }
    let inv = linalg::inverse(&s.matrix)?;
    Ok(BoundaryOperator { matrix: inv, domain: s.range, range: s.domain, nodes: s.nodes.clone() })
}
