#![allow(dead_code)]

use std::sync::Arc;

use faddeev_core::{BoundaryCurve, CMat, CVec, NodeSet, C64};

pub fn circle(n: usize) -> Arc<NodeSet> {
    Arc::new(BoundaryCurve::circle(1.0).unwrap().sample(n).unwrap())
}

pub fn ellipse(a: f64, b: f64, n: usize) -> Arc<NodeSet> {
    Arc::new(BoundaryCurve::ellipse(a, b).unwrap().sample(n).unwrap())
}

/// `e^{i m t}` at the nodes.
pub fn mode(nodes: &NodeSet, m: i64) -> CVec {
    CVec::from_iterator(nodes.len(), nodes.t.iter().map(|t| C64::from_polar(1.0, m as f64 * t)))
}

/// Mode-`m` coefficient of node values (trapezoid in the parameter).
pub fn coefficient(nodes: &NodeSet, v: &CVec, m: i64) -> C64 {
    let s: C64 = nodes.t.iter().zip(v.iter()).map(|(t, x)| x * C64::from_polar(1.0, -(m as f64) * t)).sum();
    s / nodes.len() as f64
}

/// Galerkin matrix `<e_m, M e_l>` for `|m|, |l| <= cap`.
pub fn galerkin(nodes: &NodeSet, m: &CMat, cap: i64) -> CMat {
    let size = (2 * cap + 1) as usize;
    let mut out = CMat::zeros(size, size);
    for l in -cap..=cap {
        let image = m * mode(nodes, l);
        for r in -cap..=cap {
            out[((r + cap) as usize, (l + cap) as usize)] = coefficient(nodes, &image, r);
        }
    }
    out
}

/// Real trigonometric polynomial with the given cosine/sine coefficients.
pub fn trig(nodes: &NodeSet, cos: &[f64], sin: &[f64]) -> CVec {
    CVec::from_iterator(
        nodes.len(),
        nodes.t.iter().map(|t| {
            let c: f64 = cos.iter().enumerate().map(|(m, a)| a * (m as f64 * t).cos()).sum();
            let s: f64 = sin.iter().enumerate().map(|(m, b)| b * ((m + 1) as f64 * t).sin()).sum();
            C64::new(c + s, 0.0)
        }),
    )
}

/// `int f conj(g) dl`.
pub fn pairing(nodes: &NodeSet, f: &CVec, g: &CVec) -> C64 {
    (0..nodes.len()).map(|j| f[j] * g[j].conj() * nodes.weights[j]).sum()
}
