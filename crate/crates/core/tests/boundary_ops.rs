mod common;

use common::{circle, ellipse, galerkin, mode};
use faddeev_core::boundary_ops::{
    assemble_b, assemble_s, assemble_s0, b_inverse_mean_free, block_form, invert_s, weighted_matrix,
};
use faddeev_core::dtn::{assemble_f0, assemble_fout};
use faddeev_core::{linalg, KPoint, SpaceTag};

#[test]
fn s_converges_under_node_doubling() {
    let k = KPoint::polar(0.5, 0.8).unwrap();
    let (a, b) = (circle(128), circle(256));
    let ga = galerkin(&a, &assemble_s(k, &a).matrix, 8);
    let gb = galerkin(&b, &assemble_s(k, &b).matrix, 8);
    let diff = linalg::max_abs(&(ga - gb));
    assert!(diff < 1e-8, "Galerkin blocks differ by {diff:e}");
}

#[test]
fn s_approaches_s0_for_small_k() {
    let nodes = circle(128);
    let k = KPoint::polar(1e-4, 2.1).unwrap();
    let d = &assemble_s(k, &nodes).matrix - &assemble_s0(k, &nodes).matrix;
    let norm = linalg::norm2(&weighted_matrix(&d, &nodes, SpaceTag::HMinusHalf, SpaceTag::HHalf)).unwrap();
    assert!(norm < 1e-3, "||S - S0|| = {norm:e}");
}

#[test]
fn s_is_real() {
    for nodes in [circle(128), ellipse(2.0, 1.0, 128)] {
        for (r, phi) in [(0.01, 0.3), (0.5, 4.0), (2.0, 1.0)] {
            let s = assemble_s(KPoint::polar(r, phi).unwrap(), &nodes);
            assert!(linalg::max_imag(&s.matrix) < 1e-7);
        }
    }
}

#[test]
fn b_modes_on_the_circle() {
    let nodes = circle(128);
    let b = assemble_b(&nodes);
    for m in [1i64, 2, 5, -7, 20] {
        let e = mode(&nodes, m);
        let expected = &e * faddeev_core::C64::new(0.5 / m.abs() as f64, 0.0);
        assert!((b.apply(&e) - expected).norm() / e.norm() < 1e-8);
    }
    assert!(b.self_adjointness_defect() < 1e-10);
}

/// `|cc(S^{-1}) - eps| / eps^2` and the weighted distance of the mean-free
/// block from `B^{-1}` at `eps`.
fn block_defects(nodes: &std::sync::Arc<faddeev_core::NodeSet>, eps: f64) -> (f64, f64, f64) {
    let k = KPoint::from_eps(eps, 0.9, nodes.length()).unwrap();
    let inv = invert_s(&assemble_s(k, nodes)).unwrap();
    let bf = block_form(&inv);
    let b_inv = b_inverse_mean_free(&assemble_b(nodes)).unwrap();
    let d = weighted_matrix(&(&bf.perp_perp - &b_inv), nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf);
    ((bf.cc.re - eps).abs(), (bf.cc.re - eps).abs() / (eps * eps), linalg::norm2(&d).unwrap())
}

#[test]
fn s_inverse_block_structure_on_the_circle() {
    let nodes = circle(128);
    let (abs, _, dist) = block_defects(&nodes, 0.05);
    assert!(abs < 0.01 * 0.05);
    assert!(dist < 0.1);
}

#[test]
fn s_inverse_block_structure_under_eps_halving() {
    // an ellipse so that the second-order terms do not vanish
    let nodes = ellipse(1.5, 1.0, 128);
    let (_, c1, d1) = block_defects(&nodes, 0.05);
    let (_, c2, d2) = block_defects(&nodes, 0.025);
    let (_, c3, d3) = block_defects(&nodes, 0.0125);
    for (a, b) in [(c1, c2), (c2, c3)] {
        assert!(b / a > 0.8 && b / a < 1.25, "C = {c1} {c2} {c3}");
    }
    assert!(d1 < 0.1);
    for (a, b) in [(d1, d2), (d2, d3)] {
        assert!(b / a > 0.4 && b / a < 0.6, "distance {d1} {d2} {d3}");
    }
}

#[test]
fn s_inverse_contract() {
    let nodes = ellipse(2.0, 1.0, 128);
    let s = assemble_s(KPoint::polar(0.2, 1.0).unwrap(), &nodes);
    let inv = invert_s(&s).unwrap();
    let defect = linalg::max_abs(&(&s.matrix * &inv.matrix - linalg::identity(128)));
    assert!(defect < 1e-10);
}

#[test]
fn exterior_identity_on_several_curves() {
    for nodes in [circle(128), ellipse(2.0, 1.0, 128), ellipse(1.2, 0.7, 128)] {
        let f0 = assemble_f0(&nodes).unwrap();
        for (r, phi) in [(1e-3, 0.1), (0.05, 2.0), (0.4, 3.3), (1.0, 5.5)] {
            let k = KPoint::polar(r, phi).unwrap();
            let s = assemble_s(k, &nodes);
            let fout = assemble_fout(k, &f0).unwrap();
            let prod = (f0.matrix() - fout.matrix()) * &s.matrix;
            let defect = linalg::max_abs(&(prod - linalg::identity(nodes.len())));
            assert!(defect < 1e-8, "{} |k| = {r}: {defect:e}", nodes.curve.name);
        }
    }
}
