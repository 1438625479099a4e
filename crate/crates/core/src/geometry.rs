//! Smooth closed boundary curves and their uniform-parameter samplings.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::C64;

/// Parametrization family of a boundary curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `z(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`
    Kite,
    /// `z(t) = sum_m c_m e^{imt}` with complex coefficients.
    Fourier {
        coeffs: Vec<(i32, C64)>,
    },
}

/// A 2 pi-periodic, counterclockwise, regular parametrization of the
/// boundary. Points of the plane are identified with complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub shape: CurveShape,
    pub name: String,
}

impl BoundaryCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self { shape: CurveShape::Circle { radius }, name: "circle".to_string() })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("degenerate ellipse axes a={a}, b={b}")));
        }
        Ok(Self { shape: CurveShape::Ellipse { a, b }, name: "ellipse".to_string() })
    }

    pub fn kite() -> Self {
        Self { shape: CurveShape::Kite, name: "kite".to_string() }
    }

    /// Custom curve from Fourier coefficients of `z(t)`. Rejects curves
    /// that are singular or clockwise on a fine sampling.
    pub fn fourier(name: &str, coeffs: Vec<(i32, C64)>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty Fourier coefficient table".to_string()));
        }
        let curve = Self { shape: CurveShape::Fourier { coeffs }, name: name.to_string() };
        let probe = 1024;
        let mut min_speed = f64::INFINITY;
        let mut area2 = 0.0;
        for j in 0..probe {
            let t = 2.0 * PI * j as f64 / probe as f64;
            let d = curve.deriv(t);
            min_speed = min_speed.min(d.norm());
            // 2 * area = oint x dy - y dx
            let z = curve.point(t);
            area2 += (z.re * d.im - z.im * d.re) * 2.0 * PI / probe as f64;
        }
        if !(min_speed > 1e-10) {
            return Err(Error::InvalidParameter(format!("curve `{name}` is not regular (min |z'| = {min_speed:.3e})")));
        }
        if !(area2 > 0.0) {
            return Err(Error::InvalidParameter(format!("curve `{name}` must be counterclockwise")));
        }
        Ok(curve)
    }

    pub fn point(&self, t: f64) -> C64 {
        match &self.shape {
            CurveShape::Circle { radius } => C64::new(radius * t.cos(), radius * t.sin()),
            CurveShape::Ellipse { a, b } => C64::new(a * t.cos(), b * t.sin()),
            CurveShape::Kite => C64::new(t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()),
            CurveShape::Fourier { coeffs } => coeffs.iter().map(|&(m, c)| c * C64::from_polar(1.0, m as f64 * t)).sum(),
        }
    }

    pub fn deriv(&self, t: f64) -> C64 {
        match &self.shape {
            CurveShape::Circle { radius } => C64::new(-radius * t.sin(), radius * t.cos()),
            CurveShape::Ellipse { a, b } => C64::new(-a * t.sin(), b * t.cos()),
            CurveShape::Kite => C64::new(-t.sin() - 1.3 * (2.0 * t).sin(), 1.5 * t.cos()),
            CurveShape::Fourier { coeffs } => {
                coeffs.iter().map(|&(m, c)| c * C64::new(0.0, m as f64) * C64::from_polar(1.0, m as f64 * t)).sum()
            }
        }
    }

    pub fn second_deriv(&self, t: f64) -> C64 {
        match &self.shape {
            CurveShape::Circle { radius } => C64::new(-radius * t.cos(), -radius * t.sin()),
            CurveShape::Ellipse { a, b } => C64::new(-a * t.cos(), -b * t.sin()),
            CurveShape::Kite => C64::new(-t.cos() - 2.6 * (2.0 * t).cos(), -1.5 * t.sin()),
            CurveShape::Fourier { coeffs } => {
                coeffs.iter().map(|&(m, c)| -c * (m as f64 * m as f64) * C64::from_polar(1.0, m as f64 * t)).sum()
            }
        }
    }

    /// Outward unit normal `(y', -x') / |z'|`.
    pub fn normal(&self, t: f64) -> C64 {
        let d = self.deriv(t);
        C64::new(d.im, -d.re) / d.norm()
    }

    /// True for the unit circle (also a unit-axes ellipse).
    pub fn is_unit_circle(&self) -> bool {
        match self.shape {
            CurveShape::Circle { radius } => (radius - 1.0).abs() < 1e-14,
            CurveShape::Ellipse { a, b } => (a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14,
            _ => false,
        }
    }

    /// Uniform-parameter sampling with trapezoidal arc-length weights.
    pub fn sample(&self, n_nodes: usize) -> Result<NodeSet> {
        if n_nodes < 16 || n_nodes % 2 != 0 {
            return Err(Error::InvalidParameter(format!("node count must be even and >= 16, got {n_nodes}")));
        }
        let h = 2.0 * PI / n_nodes as f64;
        let t: Vec<f64> = (0..n_nodes).map(|j| h * j as f64).collect();
        let z: Vec<C64> = t.iter().map(|&t| self.point(t)).collect();
        let dz: Vec<C64> = t.iter().map(|&t| self.deriv(t)).collect();
        let ddz: Vec<C64> = t.iter().map(|&t| self.second_deriv(t)).collect();
        let speed: Vec<f64> = dz.iter().map(|d| d.norm()).collect();
        if let Some(j) = speed.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::Domain(format!("curve `{}` has z'(t_{j}) = 0", self.name)));
        }
        let weights: Vec<f64> = speed.iter().map(|s| s * h).collect();
        let normals: Vec<C64> = dz.iter().map(|d| C64::new(d.im, -d.re) / d.norm()).collect();
        Ok(NodeSet { curve: self.clone(), t, z, dz, ddz, speed, weights, normals })
    }
}

/// Quadrature nodes on the boundary.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub curve: BoundaryCurve,
    pub t: Vec<f64>,
    pub z: Vec<C64>,
    pub dz: Vec<C64>,
    pub ddz: Vec<C64>,
    pub speed: Vec<f64>,
    /// `|z'(t_j)| 2 pi / N`
    pub weights: Vec<f64>,
    pub normals: Vec<C64>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Boundary length `|dO|` by the trapezoid rule.
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `int_dO f dl` for node values `f`.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        f.iter().zip(&self.weights).map(|(f, w)| f * *w).sum()
    }

    /// Arc-length mean `c = int psi dl / |dO|`.
    pub fn mean(&self, f: &[C64]) -> C64 {
        self.integrate(f) / self.length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: C64, b: C64) -> f64 {
        a.re * b.re + a.im * b.im
    }

    #[test]
    fn circle_length_and_first_node() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let nodes = c.sample(64).unwrap();
        assert!((nodes.length() - 2.0 * PI).abs() < 1e-12);
        assert!((nodes.z[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((nodes.normals[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let c2 = BoundaryCurve::circle(2.0).unwrap().sample(64).unwrap();
        assert!((c2.length() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(BoundaryCurve::circle(0.0).is_err());
        assert!(BoundaryCurve::circle(-1.0).is_err());
        assert!(BoundaryCurve::ellipse(1.0, 0.0).is_err());
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert!(c.sample(63).is_err());
        assert!(c.sample(8).is_err());
    }

    #[test]
    fn unit_ellipse_matches_circle() {
        let a = BoundaryCurve::ellipse(1.0, 1.0).unwrap().sample(32).unwrap();
        let b = BoundaryCurve::circle(1.0).unwrap().sample(32).unwrap();
        for j in 0..32 {
            assert!((a.z[j] - b.z[j]).norm() < 1e-15);
            assert!((a.weights[j] - b.weights[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn ellipse_perimeter_against_adaptive_quadrature() {
        // oracle: composite Gauss-Legendre of |z'| with panel refinement
        let curve = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        let oracle = |panels| {
            let (x, w) = crate::quadrature::composite_gauss(0.0, 2.0 * PI, panels, 10);
            x.iter().zip(&w).map(|(t, w)| w * curve.deriv(*t).norm()).sum::<f64>()
        };
        let (coarse, fine) = (oracle(32), oracle(64));
        assert!((coarse - fine).abs() < 1e-12);
        assert!((fine - 9.688_448).abs() < 1e-6);
        let n64 = curve.sample(64).unwrap().length();
        let n128 = curve.sample(128).unwrap().length();
        assert!((n64 - n128).abs() < 1e-10);
        assert!((n128 - fine).abs() < 1e-10);
    }

    #[test]
    fn kite_is_regular_with_positive_weights() {
        let nodes = BoundaryCurve::kite().sample(256).unwrap();
        let min = nodes.speed.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
        assert!(nodes.weights.iter().all(|&w| w > 0.0));
        assert!(BoundaryCurve::kite().sample(128).unwrap().weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn normals_are_outward_and_orthogonal() {
        for curve in
            [BoundaryCurve::circle(1.5).unwrap(), BoundaryCurve::ellipse(2.0, 1.0).unwrap(), BoundaryCurve::kite()]
        {
            let nodes = curve.sample(128).unwrap();
            let mut flux = 0.0;
            for j in 0..nodes.len() {
                assert!(dot(nodes.normals[j], nodes.dz[j]).abs() < 1e-12);
                flux += dot(nodes.normals[j], nodes.z[j]) * nodes.weights[j];
            }
            assert!(flux > 0.0, "{}", curve.name);
            let closing = curve.point(0.0) - curve.point(2.0 * PI);
            assert!(closing.norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_curve_reproduces_ellipse() {
        // (2 cos t, sin t) = 1.5 e^{it} + 0.5 e^{-it}
        let f = BoundaryCurve::fourier("ell", alloc::vec![(1, C64::new(1.5, 0.0)), (-1, C64::new(0.5, 0.0))]).unwrap();
        let e = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        for j in 0..20 {
            let t = j as f64 * 0.3;
            assert!((f.point(t) - e.point(t)).norm() < 1e-14);
            assert!((f.deriv(t) - e.deriv(t)).norm() < 1e-14);
            assert!((f.second_deriv(t) - e.second_deriv(t)).norm() < 1e-14);
        }
        assert!(BoundaryCurve::fourier("cw", alloc::vec![(-1, C64::new(1.0, 0.0))]).is_err());
        assert!(BoundaryCurve::fourier("pt", alloc::vec![(0, C64::new(1.0, 0.0))]).is_err());
    }
}
