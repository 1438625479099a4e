mod common;

use common::circle;
use faddeev_core::exceptional::{
    eps_grid, fit_xi, mu, parity_path, polar_grid, ray_angles, ray_eigenvalue, trace_locus, KPath, Problem, Tolerances,
};
use faddeev_core::{linalg, Conductivity, KPoint, Omega, ParityVerdict, Potential, C64};

fn perturbed(lambda: f64) -> Potential {
    Potential::PerturbedConductive { q: Conductivity::bump(), omega: Omega::radial(vec![(3, 1.0)]), lambda }
}

fn problem(p: Potential) -> Problem {
    Problem::new(circle(128), p).unwrap()
}

fn fixture_mu() -> f64 {
    mu(&Omega::radial(vec![(3, 1.0)]), &Conductivity::bump()).unwrap()
}

#[test]
fn conductive_potential_has_no_kernel_on_the_scan_grid() {
    let p = problem(Potential::Conductive(Conductivity::bump()));
    let tol = Tolerances::default().tol_ker;
    let mut gap = f64::INFINITY;
    for k in polar_grid(1e-3, 1.0, 16, 8).unwrap() {
        let c = p.criterion(k).unwrap();
        assert_eq!(c.kernel_dim_estimate, 0, "kernel at k = {}", k.k);
        gap = gap.min(c.sigma_min / c.norm);
    }
    assert!(gap > tol, "relative gap {gap:e}");
}

#[test]
fn constant_mode_eigenvalue_is_eps_at_zero_lambda() {
    let p = problem(Potential::Conductive(Conductivity::bump()));
    for eps in [0.04, 0.02, 0.01] {
        let k = KPoint::from_eps(eps, 0.6, p.nu()).unwrap();
        let e = p.eig_near_zero(k).unwrap();
        assert!((e - eps).abs() <= eps * eps, "eps = {eps}: eigenvalue {e}");
    }
}

#[test]
fn positive_lambda_gives_a_closed_radially_symmetric_locus() {
    let p = problem(perturbed(0.05));
    let grid = eps_grid(2e-3, 0.25, 24);
    let locus = trace_locus(&p, fixture_mu(), 0.05, &ray_angles(4), &grid).unwrap();
    let cell = grid[1] / grid[0] - 1.0;
    assert!(locus.is_closed(cell), "{locus:?}");
    assert!(locus.angular_spread() < 0.01, "spread {}", locus.angular_spread());
}

#[test]
fn negative_lambda_has_no_sign_change() {
    let p = problem(perturbed(-0.05));
    for phi in [0.3, 2.9] {
        let signs: Vec<bool> = (0..24)
            .map(|i| {
                let r = (1e-6f64.ln() * (1.0 - i as f64 / 23.0)).exp();
                p.eig_near_zero(KPoint::polar(r, phi).unwrap()).unwrap() > 0.0
            })
            .collect();
        assert!(signs.windows(2).all(|w| w[0] == w[1]), "phi = {phi}: {signs:?}");
    }
}

#[test]
fn criterion_and_parity_operator_vanish_together() {
    let p = problem(perturbed(0.05));
    let grid = eps_grid(2e-3, 0.25, 24);
    let locus = trace_locus(&p, fixture_mu(), 0.05, &[1.0], &grid).unwrap();
    let k = KPoint::from_eps(locus.points[0].eps, 1.0, p.nu()).unwrap();
    let c = p.criterion(k).unwrap();
    let tol = Tolerances::default().tol_ker;
    assert!(c.sigma_min < tol * c.norm, "sigma_min(A) = {:e}", c.sigma_min);
    assert_eq!(c.kernel_dim_estimate, 1);
    let sp = p.sigma_min_p(k).unwrap();
    assert!(sp < tol, "sigma_min(P) = {sp:e}");
    // away from the locus neither is small
    let far = KPoint::from_eps(2.0 * locus.points[0].eps, 1.0, p.nu()).unwrap();
    assert!(p.sigma_min_p(far).unwrap() > 100.0 * tol);
}

#[test]
fn parity_operator_clusters_at_one() {
    let p = problem(perturbed(0.05));
    let k = KPoint::polar(0.5, 0.4).unwrap();
    let eigs = linalg::eigenvalues(&p.p_matrix(k)).unwrap();
    let outside = eigs.iter().filter(|z| (*z - C64::new(1.0, 0.0)).norm() > 0.1).count();
    assert!(outside <= 128 / 8, "{outside} eigenvalues away from 1");
}

#[test]
fn negative_count_changes_parity_across_the_locus() {
    let p = problem(perturbed(0.05));
    let inner = p.n_minus(KPoint::from_eps(0.004, 0.0, p.nu()).unwrap()).unwrap();
    let outer = p.n_minus(KPoint::from_eps(0.06, 0.0, p.nu()).unwrap()).unwrap();
    assert!(!inner.near_exceptional && !outer.near_exceptional);
    assert!(inner.pairing_check && outer.pairing_check);
    assert_ne!(inner.n_minus % 2, outer.n_minus % 2, "n^- = {} and {}", inner.n_minus, outer.n_minus);
}

#[test]
fn zero_potential_has_no_negative_eigenvalues() {
    let p = problem(Potential::Zero);
    for k in polar_grid(1e-3, 1.0, 4, 3).unwrap() {
        assert_eq!(p.n_minus(k).unwrap().n_minus, 0);
    }
    let (ka, kb) = (KPoint::polar(1e-3, 0.0).unwrap(), KPoint::polar(0.5, 2.0).unwrap());
    assert!(matches!(parity_path(&p, ka, kb, KPath::Geometric, 1e-3).unwrap(), ParityVerdict::NoEvidence { .. }));
}

#[test]
fn parity_bracket_contains_the_locus() {
    let p = problem(perturbed(0.05));
    let nu = p.nu();
    let phi = 0.5;
    let grid = eps_grid(2e-3, 0.25, 24);
    let locus = trace_locus(&p, fixture_mu(), 0.05, &[phi], &grid).unwrap();
    let star = locus.points[0];
    let ka = KPoint::from_eps(0.004, phi, nu).unwrap();
    let kb = KPoint::from_eps(0.06, phi, nu).unwrap();
    match parity_path(&p, ka, kb, KPath::Geometric, 1e-4).unwrap() {
        ParityVerdict::Bracket { k_lo, k_hi, .. } => {
            let (e_lo, e_hi) = (k_lo.eps(nu).unwrap(), k_hi.eps(nu).unwrap());
            let (lo, hi) = (e_lo.min(e_hi), e_lo.max(e_hi));
            assert!(lo <= star.cell.1 && hi >= star.cell.0, "bracket [{lo}, {hi}] vs cell {:?}", star.cell);
        }
        v => panic!("expected a bracket, got {v:?}"),
    }
    // both endpoints outside the circle
    let kc = KPoint::from_eps(0.03, phi, nu).unwrap();
    assert!(matches!(parity_path(&p, kc, kb, KPath::Geometric, 1e-4).unwrap(), ParityVerdict::NoEvidence { .. }));
}

#[test]
fn detectors_agree_along_a_ray() {
    let p = problem(perturbed(0.05));
    let grid = eps_grid(2e-3, 0.25, 24);
    let phi = 2.2;
    let eig: Vec<f64> = grid.iter().map(|e| ray_eigenvalue(&p, phi, *e).unwrap()).collect();
    let parity: Vec<usize> =
        grid.iter().map(|e| p.n_minus(KPoint::from_eps(*e, phi, p.nu()).unwrap()).unwrap().n_minus % 2).collect();
    let sign_cell = (1..grid.len()).find(|&i| (eig[i - 1] < 0.0) != (eig[i] < 0.0)).expect("sign change");
    let parity_cell = (1..grid.len()).find(|&i| parity[i - 1] != parity[i]).expect("parity change");
    assert!(sign_cell.abs_diff(parity_cell) <= 1, "cells {sign_cell} and {parity_cell}");
}

#[test]
fn continued_eigenvalue_anchor_and_eps_slope() {
    let p = problem(perturbed(0.05));
    let lambdas = [-0.05, -0.025, 0.0, 0.025, 0.05];
    let eps = [0.0125, 0.025, 0.0375, 0.05];
    let xi = fit_xi(&p, &lambdas, &eps, 0.0).unwrap();
    assert!(xi.anchor.abs() < 1e-6, "xi(0, 0) = {}", xi.anchor);
    assert!((xi.b - 1.0).abs() < 0.05, "b = {}", xi.b);
}

#[test]
fn linear_fit_residual_is_second_order() {
    let p = problem(perturbed(0.05));
    let lambdas = [-0.08, -0.04, 0.0, 0.04, 0.08];
    let eps = [0.02, 0.04, 0.06, 0.08];
    let half = |v: &[f64]| v.iter().map(|x| 0.5 * x).collect::<Vec<_>>();
    let full = fit_xi(&p, &lambdas, &eps, 0.0).unwrap().linear_residual;
    let small = fit_xi(&p, &half(&lambdas), &half(&eps), 0.0).unwrap().linear_residual;
    let ratio = full / small;
    assert!(ratio > 3.0 && ratio < 5.0, "residuals {full:e} / {small:e} = {ratio}");
}
