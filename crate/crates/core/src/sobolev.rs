//! Fourier multipliers `max(1,|m|)^s` realizing `H^s` norms of node-value
//! densities on the parameter circle.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevWeight {
    pub order: f64,
}

impl SobolevWeight {
    pub const PLUS_HALF: Self = Self { order: 0.5 };
    pub const MINUS_HALF: Self = Self { order: -0.5 };

    pub fn new(order: f64) -> Self {
        Self { order }
    }

    pub fn inverse(self) -> Self {
        Self { order: -self.order }
    }

    fn multiplier(&self, m: usize) -> f64 {
        (m.max(1) as f64).powf(self.order)
    }

    /// DFT, multiply each mode, inverse DFT. `v.len()` must be even.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = v.len();
        debug_assert!(n % 2 == 0);
        let h = 2.0 * PI / n as f64;
        let modes: Vec<(i64, C64)> = (0..n as i64)
            .map(|q| {
                let m = if q <= n as i64 / 2 { q } else { q - n as i64 };
                let c: C64 =
                    v.iter().enumerate().map(|(j, x)| x * C64::from_polar(1.0, -(m as f64) * h * j as f64)).sum();
                (m, c * self.multiplier(m.unsigned_abs() as usize) / n as f64)
            })
            .collect();
        (0..n).map(|j| modes.iter().map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * h * j as f64)).sum()).collect()
    }

    /// The multiplier as a dense real symmetric circulant matrix.
    pub fn matrix(&self, n: usize) -> CMat {
        let h = 2.0 * PI / n as f64;
        let half = n / 2;
        let row: Vec<f64> = (0..n)
            .map(|d| {
                let delta = h * d as f64;
                let mut s = self.multiplier(0);
                for m in 1..half {
                    s += 2.0 * self.multiplier(m) * (m as f64 * delta).cos();
                }
                s += self.multiplier(half) * (half as f64 * delta).cos();
                s / n as f64
            })
            .collect();
        CMat::from_fn(n, n, |i, j| C64::new(row[(i + n - j) % n], 0.0))
    }
}
