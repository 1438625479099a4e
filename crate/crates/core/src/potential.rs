//! Potentials `n(z)` supported in the closed unit disk.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quadrature::composite_gauss;
use crate::C64;

/// Radial conductivity `q(r) = 1 + sum_p c_p (1 - r^2)^p` on the disk,
/// `q = 1` outside. Powers must be at least 3 so that `q` is C^2.
#[derive(Debug, Clone, PartialEq)]
pub struct Conductivity {
    pub terms: Vec<(u32, f64)>,
}

impl Conductivity {
    pub fn unit() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<(u32, f64)>) -> Result<Self> {
        if let Some((p, _)) = terms.iter().find(|(p, _)| *p < 3) {
            return Err(Error::InvalidParameter(format!("conductivity power {p} < 3 is not C^2 across the boundary")));
        }
        let q = Self { terms };
        for i in 0..=200 {
            let r = i as f64 / 200.0;
            if !(q.q(r) > 0.0) {
                return Err(Error::InvalidParameter(format!("conductivity is not positive at r = {r}")));
            }
        }
        Ok(q)
    }

    /// The fixture `q = 1 + 2 (1 - r^2)^3`.
    pub fn bump() -> Self {
        Self { terms: alloc::vec![(3, 2.0)] }
    }

    pub fn q(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 1.0;
        }
        let s = 1.0 - r * r;
        1.0 + self.terms.iter().map(|&(p, c)| c * s.powi(p as i32)).sum::<f64>()
    }

    /// `(q'/r, q'')` in the radial variable.
    fn derivatives(&self, r: f64) -> (f64, f64) {
        if r >= 1.0 {
            return (0.0, 0.0);
        }
        let s = 1.0 - r * r;
        let mut dq_over_r = 0.0;
        let mut d2q = 0.0;
        for &(p, c) in &self.terms {
            let p = p as f64;
            let a = -2.0 * c * p * s.powf(p - 1.0);
            dq_over_r += a;
            d2q += a + 4.0 * r * r * c * p * (p - 1.0) * s.powf(p - 2.0);
        }
        (dq_over_r, d2q)
    }

    pub fn sqrt_q(&self, r: f64) -> f64 {
        self.q(r).sqrt()
    }

    /// `n = -q^{-1/2} Laplace q^{1/2}`.
    pub fn potential(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let q = self.q(r);
        let (dq_over_r, d2q) = self.derivatives(r);
        let dq = dq_over_r * r;
        -(d2q / (2.0 * q) - dq * dq / (4.0 * q * q) + dq_over_r / (2.0 * q))
    }
}

/// Real perturbation profile
/// `omega(r, theta) = sum_p a_p (1 - r^2)^p (m + c cos theta + s sin theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega {
    pub radial: Vec<(u32, f64)>,
    pub mean: f64,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl Omega {
    pub fn radial(radial: Vec<(u32, f64)>) -> Self {
        Self { radial, mean: 1.0, cos_amp: 0.0, sin_amp: 0.0 }
    }

    pub fn eval(&self, z: C64) -> f64 {
        let r = z.norm();
        if r > 1.0 {
            return 0.0;
        }
        let s = 1.0 - r * r;
        let radial: f64 = self.radial.iter().map(|&(p, a)| a * s.powi(p as i32)).sum();
        let angular = if r > 0.0 { self.mean + (self.cos_amp * z.re + self.sin_amp * z.im) / r } else { self.mean };
        radial * angular
    }
}

/// Complex potential supported in the closed unit disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    /// `n = c` on the disk.
    Constant(C64),
    Conductive(Conductivity),
    /// `n_lambda = -q^{-1/2} Laplace q^{1/2} + lambda omega`.
    PerturbedConductive {
        q: Conductivity,
        omega: Omega,
        lambda: f64,
    },
    /// `n = real + i delta` on the disk with `delta > 0`.
    Absorbing {
        real: f64,
        delta: f64,
    },
    /// Samples on a uniform grid over `[x0, x0 + (nx-1) dx] x [y0, ...]`,
    /// row-major in `y`, bilinearly interpolated; zero off the grid and
    /// outside the disk.
    Raster {
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        nx: usize,
        ny: usize,
        values: Vec<C64>,
    },
}

impl Potential {
    pub fn absorbing(real: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("absorbing potential needs delta > 0, got {delta}")));
        }
        Ok(Self::Absorbing { real, delta })
    }

    pub fn raster(x0: f64, y0: f64, dx: f64, dy: f64, nx: usize, ny: usize, values: Vec<C64>) -> Result<Self> {
        if nx < 2 || ny < 2 || values.len() != nx * ny || !(dx > 0.0 && dy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "raster needs nx, ny >= 2, positive spacing and nx*ny values (got {nx}x{ny}, {} values)",
                values.len()
            )));
        }
        Ok(Self::Raster { x0, y0, dx, dy, nx, ny, values })
    }

    pub fn eval(&self, z: C64) -> C64 {
        let r = z.norm();
        if r > 1.0 {
            return C64::new(0.0, 0.0);
        }
        match self {
            Potential::Zero => C64::new(0.0, 0.0),
            Potential::Constant(c) => *c,
            Potential::Conductive(q) => C64::new(q.potential(r), 0.0),
            Potential::PerturbedConductive { q, omega, lambda } => {
                C64::new(q.potential(r) + lambda * omega.eval(z), 0.0)
            }
            Potential::Absorbing { real, delta } => C64::new(*real, *delta),
            Potential::Raster { x0, y0, dx, dy, nx, ny, values } => {
                let fx = (z.re - x0) / dx;
                let fy = (z.im - y0) / dy;
                if fx < 0.0 || fy < 0.0 || fx > (*nx - 1) as f64 || fy > (*ny - 1) as f64 {
                    return C64::new(0.0, 0.0);
                }
                let ix = (fx.floor() as usize).min(nx - 2);
                let iy = (fy.floor() as usize).min(ny - 2);
                let (tx, ty) = (fx - ix as f64, fy - iy as f64);
                let at = |i: usize, j: usize| values[j * nx + i];
                at(ix, iy) * ((1.0 - tx) * (1.0 - ty))
                    + at(ix + 1, iy) * (tx * (1.0 - ty))
                    + at(ix, iy + 1) * ((1.0 - tx) * ty)
                    + at(ix + 1, iy + 1) * (tx * ty)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }

    /// True when `n` is real-valued everywhere.
    pub fn is_real(&self) -> bool {
        match self {
            Potential::Constant(c) => c.im == 0.0,
            Potential::Absorbing { .. } => false,
            Potential::Raster { values, .. } => values.iter().all(|v| v.im == 0.0),
            _ => true,
        }
    }

    pub fn is_radial(&self) -> bool {
        match self {
            Potential::PerturbedConductive { omega, .. } => omega.cos_amp == 0.0 && omega.sin_amp == 0.0,
            Potential::Raster { .. } => false,
            _ => true,
        }
    }

    /// Underlying conductivity of the conductive families.
    pub fn conductivity(&self) -> Option<&Conductivity> {
        match self {
            Potential::Conductive(q) | Potential::PerturbedConductive { q, .. } => Some(q),
            _ => None,
        }
    }

    /// Same family with a different perturbation strength.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        match self {
            Potential::PerturbedConductive { q, omega, .. } => {
                Potential::PerturbedConductive { q: q.clone(), omega: omega.clone(), lambda }
            }
            other => other.clone(),
        }
    }
}

/// Result of `mu = int_O omega q dS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuValue {
    pub mu: f64,
    /// false when `mu <= 0`, i.e. the sign hypothesis of the locus theorem fails
    pub positive: bool,
}

/// `mu = int_O omega q dS` on the unit disk by polar Gauss-Legendre x trapezoid.
pub fn mu(omega: &Omega, q: &Conductivity) -> MuValue {
    let (rs, ws) = composite_gauss(0.0, 1.0, 8, 16);
    let n_theta = 64;
    let mut total = 0.0;
    for (r, w) in rs.iter().zip(&ws) {
        let mut ring = 0.0;
        for j in 0..n_theta {
            let th = 2.0 * PI * j as f64 / n_theta as f64;
            ring += omega.eval(C64::from_polar(*r, th));
        }
        total += w * r * q.q(*r) * ring * 2.0 * PI / n_theta as f64;
    }
    // relative noise floor for the angular-mean-zero case
    let positive = total > 1e-12;
    MuValue { mu: total, positive }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_reference_values() {
        let one = Conductivity::unit();
        let flat = Omega::radial(alloc::vec![(0, 1.0)]);
        assert!((mu(&flat, &one).mu - PI).abs() < 1e-12);
        let parab = Omega::radial(alloc::vec![(1, 1.0)]);
        assert!((mu(&parab, &one).mu - PI / 2.0).abs() < 1e-12);
        let dipole = Omega { radial: alloc::vec![(1, 1.0)], mean: 0.0, cos_amp: 1.0, sin_amp: 0.0 };
        let m = mu(&dipole, &one);
        assert!(m.mu.abs() < 1e-14);
        assert!(!m.positive);
    }

    #[test]
    fn conductive_potential_matches_finite_differences() {
        // n = -q^{-1/2} Laplace q^{1/2}, checked with a 5-point Laplacian on a grid
        let q = Conductivity::bump();
        let s = |x: f64, y: f64| q.sqrt_q((x * x + y * y).sqrt());
        let h = 1e-3;
        for i in 0..9 {
            for j in 0..9 {
                let (x, y) = (-0.8 + 0.2 * i as f64, -0.8 + 0.2 * j as f64);
                if x * x + y * y > 0.95 {
                    continue;
                }
                let lap = (s(x + h, y) + s(x - h, y) + s(x, y + h) + s(x, y - h) - 4.0 * s(x, y)) / (h * h);
                let n_fd = -lap / s(x, y);
                let n = q.potential((x * x + y * y).sqrt());
                assert!((n - n_fd).abs() < 1e-4, "({x}, {y}): {n} vs {n_fd}");
            }
        }
        assert_eq!(q.potential(1.0), 0.0);
        assert_eq!(q.q(1.5), 1.0);
    }

    #[test]
    fn support_and_kinds() {
        let p = Potential::absorbing(0.0, 1.0).unwrap();
        assert_eq!(p.eval(C64::new(1.2, 0.0)), C64::new(0.0, 0.0));
        assert!(p.eval(C64::new(0.3, 0.2)).im >= 1.0);
        assert!(!p.is_real());
        assert!(Potential::absorbing(0.0, 0.0).is_err());
        assert!(Conductivity::new(alloc::vec![(2, 1.0)]).is_err());
        assert!(Conductivity::new(alloc::vec![(3, -2.0)]).is_err());
    }

    #[test]
    fn raster_interpolates_bilinearly() {
        let vals: Vec<C64> = (0..9).map(|i| C64::new(i as f64, 0.0)).collect();
        let p = Potential::raster(-1.0, -1.0, 1.0, 1.0, 3, 3, vals).unwrap();
        assert!((p.eval(C64::new(0.0, 0.0)) - 4.0).norm() < 1e-14);
        assert!((p.eval(C64::new(0.5, 0.0)) - 4.5).norm() < 1e-14);
        assert!((p.eval(C64::new(0.0, 0.5)) - 5.5).norm() < 1e-14);
    }
}
