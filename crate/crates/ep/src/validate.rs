//! Operator-identity suite run by the `validate` detector.

use std::sync::Arc;

use faddeev_core::boundary_ops::{
    self, assemble_b, assemble_s, assemble_s0, b_inverse_mean_free, block_form, weighted_matrix, SpaceTag,
};
use faddeev_core::dtn::{assemble_f0, assemble_fout, assemble_fout_bounded, assemble_fout_zero};
use faddeev_core::geometry::NodeSet;
use faddeev_core::{linalg, CVec, KPoint, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::EpResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub curve: String,
    pub n: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn render(&self) -> String {
        let mut out = format!("operator identities on {} with N = {}\n", self.curve, self.n);
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict} {:<28} {:>12.4e}  (tol {:.1e})\n", c.name, c.value, c.tolerance));
        }
        out
    }
}

/// `value <= tolerance`
fn below(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, value, tolerance, pass: value <= tolerance && value.is_finite() }
}

/// `value >= tolerance`
fn above(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, value, tolerance, pass: value >= tolerance && value.is_finite() }
}

const EPS_BLOCK: f64 = 0.05;

pub fn run_suite(nodes: &Arc<NodeSet>, seed: u64) -> EpResult<ValidationReport> {
    let n = nodes.len();
    let nu = nodes.length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let f0 = assemble_f0(nodes)?;
    let one = CVec::from_element(n, C64::new(1.0, 0.0));
    checks.push(below("f0_annihilates_constants", (f0.matrix() * &one).camax(), 1e-8));

    // (F_0 - F^out(k)) S_k = I over |k| in [1e-3, 1], random phases
    let mut ident: f64 = 0.0;
    let mut cc_offsets = Vec::new();
    for i in 0..10 {
        let r = (1e-3f64.ln() * (1.0 - i as f64 / 9.0)).exp();
        let k = KPoint::polar(r, rng.random_range(0.0..std::f64::consts::TAU))?;
        let s = assemble_s(k, nodes);
        let fout = assemble_fout(k, &f0)?;
        let prod = (f0.matrix() - fout.matrix()) * &s.matrix;
        ident = ident.max(linalg::max_abs(&(prod - linalg::identity(n))));
        let cc = block_form(&assemble_s0(k, nodes)).cc.re;
        cc_offsets.push((cc, nu * k.log_shift()));
    }
    checks.push(below("fout_identity", ident, 1e-8));

    // cc(S_k^0) - 1/eps is a curve constant, zero on the unit circle
    let c0 = if nodes.curve.is_unit_circle() { 0.0 } else { cc_offsets[0].0 - cc_offsets[0].1 };
    let cc_dev = cc_offsets.iter().map(|(cc, inv)| (cc - inv - c0).abs() / inv.abs()).fold(0.0, f64::max);
    checks.push(below("s0_constant_block", cc_dev, 1e-10));

    let k_sym = KPoint::polar(0.1, 0.7)?;
    let s0 = assemble_s0(k_sym, nodes);
    let scale = linalg::max_abs(&s0.matrix);
    checks.push(below("s0_self_adjoint", s0.self_adjointness_defect() / scale, 1e-10));
    let b = assemble_b(nodes);
    checks.push(below("b_self_adjoint", b.self_adjointness_defect() / linalg::max_abs(&b.matrix), 1e-10));

    // block structure of S_k^{-1} at eps and eps / 2
    let b_inv = b_inverse_mean_free(&b)?;
    let block = |eps: f64| -> EpResult<(f64, f64)> {
        let k = KPoint::from_eps(eps, 0.3, nu)?;
        let inv = boundary_ops::invert_s(&assemble_s(k, nodes))?;
        let bf = block_form(&inv);
        let c = (bf.cc.re - eps).abs() / (eps * eps);
        let d =
            linalg::norm2(&weighted_matrix(&(&bf.perp_perp - &b_inv), nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf))?;
        Ok((c, d))
    };
    let (c1, d1) = block(EPS_BLOCK)?;
    let (c2, d2) = block(0.5 * EPS_BLOCK)?;
    checks.push(below("s_inverse_cc_quadratic", c2 - 2.0 * c1, 1e-6));
    checks.push(below("s_inverse_perp_to_b_inverse", d1, 0.1));
    checks.push(below("s_inverse_perp_halving", d2 - 0.6 * d1, 1e-10));

    let fz = assemble_fout_zero(&f0)?;
    let fz_scale = linalg::max_abs(fz.matrix()).max(1.0);
    checks.push(below("fout_zero_self_adjoint", fz.operator.self_adjointness_defect() / fz_scale, 1e-8));
    checks.push(below("fout_zero_constants", (fz.matrix() * &one).camax(), 1e-8));
    checks.push(above("fout_zero_gap", spectral_gap(nodes, fz.matrix())?, 1e-6));

    let fk = assemble_fout(KPoint::polar(0.3, 1.1)?, &f0)?;
    checks.push(below("fout_real_kernel", linalg::max_imag(fk.matrix()), 1e-8));

    let fb = assemble_fout_bounded(nodes)?;
    let perp = linalg::identity(n) - boundary_ops::mean_projector(nodes);
    let kkk = (f0.matrix() - fb.matrix() - &b_inv) * &perp;
    checks.push(below("bounded_exterior_identity", linalg::max_abs(&kkk) / linalg::max_abs(&b_inv), 1e-6));

    let pass = checks.iter().all(|c| c.pass);
    Ok(ValidationReport { curve: nodes.curve.name.clone(), n, checks, pass })
}

/// `delta = min <-F psi, psi> / ||psi||^2` over mean-free `psi` in the
/// weighted `H^{1/2} -> H^{-1/2}` form.
pub fn spectral_gap(nodes: &NodeSet, fout_zero: &faddeev_core::CMat) -> EpResult<f64> {
    let w = weighted_matrix(fout_zero, nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf);
    let (eigs, _) = linalg::hermitian_eigen(&linalg::hermitian_part(&(-w)))?;
    // the constant mode is the eigenvalue closest to zero; the gap is the next one
    let mut sorted = eigs;
    sorted.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    Ok(sorted.iter().skip(1).copied().fold(f64::INFINITY, f64::min))
}
