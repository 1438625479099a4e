//! Spectral solver for `-Laplace u - n u = 0` in the unit disk with
//! prescribed Dirichlet trace, returning the Dirichlet-to-Neumann map.
//!
//! The solution is expanded in angular Fourier modes `u = sum_m u_m(r) e^{im theta}`.
//! Each `u_m` is collocated on the positive half of an odd Chebyshev grid on
//! `[-1, 1]`, folded with the parity `u_m(-r) = (-1)^m u_m(r)` so that the
//! origin never appears as a node. Non-radial potentials couple modes
//! `m` and `l` through `n_{m-l}(r)`; with coupling width `L` the modes are
//! grouped in blocks of `L` and the system is block tridiagonal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg;
use crate::potential::Potential;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSolverOptions {
    /// Chebyshev degree on `[-1, 1]`; must be odd.
    pub chebyshev_degree: usize,
    /// Angular samples per ring used to extract potential modes.
    pub angular_samples: usize,
    /// Largest angular coupling kept.
    pub max_coupling: usize,
    /// Relative size below which a potential mode is dropped.
    pub mode_cutoff: f64,
    /// `sigma_min` of a pivot block relative to the potential-free block
    /// below which the Dirichlet problem is declared singular.
    pub singular_ratio: f64,
}

impl Default for PolarSolverOptions {
    fn default() -> Self {
        Self { chebyshev_degree: 75, angular_samples: 64, max_coupling: 12, mode_cutoff: 1e-13, singular_ratio: 1e-8 }
    }
}

struct Chebyshev {
    /// positive interior radii `r_1 > ... > r_h`
    r: Vec<f64>,
    d: CMatReal,
    d2: CMatReal,
    degree: usize,
}

type CMatReal = nalgebra::DMatrix<f64>;

impl Chebyshev {
    fn new(degree: usize) -> Self {
        let n = degree;
        let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
        let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
        let mut d = CMatReal::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    d[(i, j)] = c(i) / c(j) * sign / (x[i] - x[j]);
                }
            }
            let row_sum: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
            d[(i, i)] = -row_sum;
        }
        let d2 = &d * &d;
        let half = (n - 1) / 2;
        Self { r: x[1..=half].to_vec(), d, d2, degree: n }
    }

    fn half(&self) -> usize {
        self.r.len()
    }

    /// Folded interior operator for parity `s` and angular mode `m`,
    /// plus the coefficient column of the boundary value `u_m(1)`.
    fn mode_operator(&self, s: f64, m: i64) -> (CMatReal, Vec<f64>) {
        let n = self.degree;
        let h = self.half();
        let m2 = (m * m) as f64;
        let mut op = CMatReal::zeros(h, h);
        let mut bnd = vec![0.0; h];
        for a in 0..h {
            let i = a + 1;
            let inv_r = 1.0 / self.r[a];
            for b in 0..h {
                let j = b + 1;
                op[(a, b)] =
                    self.d2[(i, j)] + s * self.d2[(i, n - j)] + inv_r * (self.d[(i, j)] + s * self.d[(i, n - j)]);
            }
            op[(a, a)] -= m2 * inv_r * inv_r;
            bnd[a] = self.d2[(i, 0)] + s * self.d2[(i, n)] + inv_r * (self.d[(i, 0)] + s * self.d[(i, n)]);
        }
        (op, bnd)
    }

    /// `d/dr` at `r = 1`: interior coefficients and the boundary coefficient.
    fn boundary_derivative(&self, s: f64) -> (Vec<f64>, f64) {
        let n = self.degree;
        let h = self.half();
        let coeffs = (0..h).map(|b| self.d[(0, b + 1)] + s * self.d[(0, n - b - 1)]).collect();
        (coeffs, self.d[(0, 0)] + s * self.d[(0, n)])
    }
}

/// DtN map in the angular Fourier basis: `dtn[(m + M, m0 + M)]` is the
/// mode-`m` coefficient of `d_r u(1, .)` for the trace `e^{i m0 theta}`.
#[derive(Debug, Clone)]
pub struct ModeDtn {
    pub max_mode: i64,
    pub dtn: CMat,
    pub coupling: usize,
}

/// Angular Fourier coefficients `n_l(r_i)` for `|l| <= max_coupling`.
fn potential_modes(n: &Potential, radii: &[f64], opts: &PolarSolverOptions) -> (usize, Vec<Vec<C64>>) {
    let samples = opts.angular_samples.max(4 * opts.max_coupling + 4);
    let cap = opts.max_coupling as i64;
    // coeffs[l + cap][i]
    let mut coeffs = vec![vec![C64::new(0.0, 0.0); radii.len()]; (2 * cap + 1) as usize];
    for (i, &r) in radii.iter().enumerate() {
        let ring: Vec<C64> =
            (0..samples).map(|j| n.eval(C64::from_polar(r, 2.0 * PI * j as f64 / samples as f64))).collect();
        for l in -cap..=cap {
            let c: C64 = ring
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -(l as f64) * 2.0 * PI * j as f64 / samples as f64))
                .sum();
            coeffs[(l + cap) as usize][i] = c / samples as f64;
        }
    }
    let scale = coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let mut width = 0usize;
    for l in 1..=cap {
        let mag =
            coeffs[(l + cap) as usize].iter().chain(&coeffs[(cap - l) as usize]).map(|c| c.norm()).fold(0.0, f64::max);
        if mag > opts.mode_cutoff * scale.max(1e-300) {
            width = l as usize;
        }
    }
    let trimmed = coeffs[(cap - width as i64) as usize..=(cap + width as i64) as usize].to_vec();
    (width, trimmed)
}

/// Solve the interior problem for every trace mode `|m0| <= max_mode`.
pub fn disk_dtn_modes(n: &Potential, max_mode: i64, opts: &PolarSolverOptions) -> Result<ModeDtn> {
    if opts.chebyshev_degree % 2 == 0 || opts.chebyshev_degree < 9 {
        return Err(Error::InvalidParameter(format!(
            "Chebyshev degree must be odd and >= 9, got {}",
            opts.chebyshev_degree
        )));
    }
    let cheb = Chebyshev::new(opts.chebyshev_degree);
    let h = cheb.half();
    let (width, nmodes) = potential_modes(n, &cheb.r, opts);
    let coupling = width as i64;
    let pad = 2 * coupling;
    let big_m = max_mode + pad;
    let total_modes = (2 * big_m + 1) as usize;
    let bs = width.max(1);
    let n_blocks = total_modes.div_ceil(bs);
    let block_modes = |b: usize| (b * bs)..((b + 1) * bs).min(total_modes);
    let mode_of = |p: usize| p as i64 - big_m;
    let parity = |m: i64| if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let n_inputs = (2 * max_mode + 1) as usize;

    let coupling_at = |m: i64, l: i64, i: usize| -> C64 {
        let d = m - l;
        if d.abs() > coupling {
            C64::new(0.0, 0.0)
        } else {
            nmodes[(d + coupling) as usize][i]
        }
    };

    // Assemble the blocks of the tridiagonal system.
    let assemble = |rows: core::ops::Range<usize>, cols: core::ops::Range<usize>, with_laplace: bool| -> CMat {
        let mut out = CMat::zeros(rows.len() * h, cols.len() * h);
        for (a, p) in rows.clone().enumerate() {
            let m = mode_of(p);
            for (b, q) in cols.clone().enumerate() {
                let l = mode_of(q);
                if with_laplace && p == q {
                    let (op, _) = cheb.mode_operator(parity(m), m);
                    for i in 0..h {
                        for j in 0..h {
                            out[(a * h + i, b * h + j)] += C64::new(op[(i, j)], 0.0);
                        }
                    }
                }
                for i in 0..h {
                    out[(a * h + i, b * h + i)] += coupling_at(m, l, i);
                }
            }
        }
        out
    };
    let laplace_only = |rows: core::ops::Range<usize>| -> CMat {
        let mut out = CMat::zeros(rows.len() * h, rows.len() * h);
        for (a, p) in rows.enumerate() {
            let m = mode_of(p);
            let (op, _) = cheb.mode_operator(parity(m), m);
            for i in 0..h {
                for j in 0..h {
                    out[(a * h + i, a * h + j)] = C64::new(op[(i, j)], 0.0);
                }
            }
        }
        out
    };
    let rhs_block = |rows: core::ops::Range<usize>| -> CMat {
        let mut out = CMat::zeros(rows.len() * h, n_inputs);
        for (a, p) in rows.enumerate() {
            let m = mode_of(p);
            if m.abs() > max_mode {
                continue;
            }
            let (_, bnd) = cheb.mode_operator(parity(m), m);
            let col = (m + max_mode) as usize;
            for i in 0..h {
                out[(a * h + i, col)] = C64::new(-bnd[i], 0.0);
            }
        }
        out
    };

    // Block Thomas elimination.
    let mut c_prime: Vec<CMat> = Vec::with_capacity(n_blocks);
    let mut y_prime: Vec<CMat> = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        let rows = block_modes(b);
        let mut pivot = assemble(rows.clone(), rows.clone(), true);
        let mut rhs = rhs_block(rows.clone());
        if b > 0 {
            let lower = assemble(rows.clone(), block_modes(b - 1), false);
            pivot -= &lower * &c_prime[b - 1];
            rhs -= &lower * &y_prime[b - 1];
        }
        let free = linalg::sigma_min(&laplace_only(rows.clone()))?;
        let smin = linalg::sigma_min(&pivot)?;
        let ratio = smin / free;
        if ratio < opts.singular_ratio {
            return Err(Error::InteriorDirichletSingular { relative_sigma: ratio });
        }
        let lu = pivot.lu();
        let upper = if b + 1 < n_blocks {
            assemble(rows.clone(), block_modes(b + 1), false)
        } else {
            CMat::zeros(rows.len() * h, 0)
        };
        let cp = if b + 1 < n_blocks {
            lu.solve(&upper).ok_or(Error::InteriorDirichletSingular { relative_sigma: 0.0 })?
        } else {
            upper
        };
        let yp = lu.solve(&rhs).ok_or(Error::InteriorDirichletSingular { relative_sigma: 0.0 })?;
        c_prime.push(cp);
        y_prime.push(yp);
    }
    let mut x: Vec<CMat> = vec![CMat::zeros(0, 0); n_blocks];
    x[n_blocks - 1] = y_prime[n_blocks - 1].clone();
    for b in (0..n_blocks - 1).rev() {
        x[b] = &y_prime[b] - &c_prime[b] * &x[b + 1];
    }

    // Normal derivatives at r = 1 for the kept output modes.
    let mut dtn = CMat::zeros(n_inputs, n_inputs);
    for b in 0..n_blocks {
        for (a, p) in block_modes(b).enumerate() {
            let m = mode_of(p);
            if m.abs() > max_mode {
                continue;
            }
            let (coeffs, direct) = cheb.boundary_derivative(parity(m));
            let row = (m + max_mode) as usize;
            for col in 0..n_inputs {
                let mut v: C64 = (0..h).map(|i| x[b][(a * h + i, col)] * coeffs[i]).sum();
                if col == row {
                    v += direct;
                }
                dtn[(row, col)] = v;
            }
        }
    }
    Ok(ModeDtn { max_mode, dtn, coupling: width })
}

/// DtN map of `-Laplace - n` on the unit disk acting on node values at
/// `theta_j = 2 pi j / N`.
pub fn disk_dtn_nodes(n: &Potential, n_nodes: usize, opts: &PolarSolverOptions) -> Result<CMat> {
    let half = (n_nodes / 2) as i64;
    let modes = disk_dtn_modes(n, half, opts)?;
    Ok(modes_to_nodes(&modes.dtn, n_nodes))
}

/// `V D E`: node values -> trigonometric coefficients (Nyquist split evenly
/// between `+-N/2`) -> mode map -> node values.
pub fn modes_to_nodes(dtn: &CMat, n_nodes: usize) -> CMat {
    let half = (n_nodes / 2) as i64;
    let nm = (2 * half + 1) as usize;
    let h = 2.0 * PI / n_nodes as f64;
    let analysis = CMat::from_fn(nm, n_nodes, |p, j| {
        let m = p as i64 - half;
        let w = if m.abs() == half { 0.5 } else { 1.0 };
        C64::from_polar(w / n_nodes as f64, -(m as f64) * h * j as f64)
    });
    let synthesis = CMat::from_fn(n_nodes, nm, |j, p| {
        let m = p as i64 - half;
        C64::from_polar(1.0, m as f64 * h * j as f64)
    });
    synthesis * dtn * analysis
}
