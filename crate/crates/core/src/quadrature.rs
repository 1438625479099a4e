//! Quadrature rules: Gauss-Legendre on an interval and the periodic
//! product rule for logarithmic kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::prelude::*;

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let left = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(left + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Weights `R_j` of the periodic product rule
/// `int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds ~ sum_j R_{(i-j) mod N} f(t_j)`
/// on the uniform grid `t_j = 2 pi j / N`, `N` even.
///
/// The rule is exact for trigonometric polynomials of degree below `N/2`.
pub fn log_product_weights(n_nodes: usize) -> Vec<f64> {
    let n = n_nodes / 2;
    let nf = n as f64;
    (0..n_nodes)
        .map(|j| {
            let tj = PI * j as f64 / nf;
            let mut s = 0.0;
            for m in 1..n {
                s += (m as f64 * tj).cos() / m as f64;
            }
            -2.0 * PI / nf * s - PI / (nf * nf) * (nf * tj).cos()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        for p in 0..24 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "x^{p}: {got} vs {want}");
        }
    }

    #[test]
    fn odd_order_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_rule_exact_on_fourier_modes() {
        // int ln(4 sin^2(s/2)) e^{ims} ds = -2 pi / |m| (m != 0), 0 for m = 0
        let nn = 32;
        let r = log_product_weights(nn);
        for m in 0..(nn as i32 / 2) {
            let got: f64 = (0..nn)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / nn as f64;
                    // i = 0, so R index is (0 - j) mod N
                    r[(nn - j) % nn] * (m as f64 * t).cos()
                })
                .sum();
            let want = if m == 0 { 0.0 } else { -2.0 * PI / m as f64 };
            assert!((got - want).abs() < 1e-12, "m={m}: {got} vs {want}");
        }
    }
}
