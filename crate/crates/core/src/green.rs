//! The zero-energy Faddeev Green function.
//!
//! With `zeta = (k, ik)` the incident wave is `e^{i zeta.z} = e^{ikz}`,
//! `z = x + iy`. The Green function is harmonic away from the origin,
//! real-valued and satisfies `|e^{-ikz} G_k(z)| -> 0` at infinity; these
//! properties single out
//!
//! ```text
//! G_k(z) = (1/2pi) Re E1(-ikz)
//!        = -(1/2pi) ln|z| - gamma/2pi - (1/2pi) ln|k| + (1/2pi) Re Ein(-ikz),
//! ```
//!
//! so the smooth remainder is `N(w) = (1/2pi) Re Ein(-iw)`, a function of
//! the product `w = kz` alone with `N(0) = 0`.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::special::{e1, re_ein, EULER_GAMMA};
use crate::C64;

/// Spectral parameter `k != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub k: C64,
}

impl KPoint {
    pub fn new(k: C64) -> Result<Self> {
        if k == C64::new(0.0, 0.0) || !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::Domain(format!("k must be a finite nonzero complex number, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn polar(modulus: f64, phi: f64) -> Result<Self> {
        Self::new(C64::from_polar(modulus, phi))
    }

    /// The point with `eps(k) = eps` on the ray `arg k = phi` for a boundary
    /// of length `nu`: `ln|k| = -2pi/(nu eps) - gamma`.
    pub fn from_eps(eps: f64, phi: f64, nu: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        let ln_k = -2.0 * PI / (nu * eps) - EULER_GAMMA;
        // keep huge negative logarithms representable
        if ln_k < -700.0 {
            return Err(Error::InvalidParameter(format!("eps = {eps} maps to |k| = e^{ln_k:.1}, below f64 range")));
        }
        Self::polar(ln_k.exp(), phi)
    }

    pub fn modulus(&self) -> f64 {
        self.k.norm()
    }

    /// `arg k` in `[0, 2pi)`.
    pub fn phi(&self) -> f64 {
        let a = self.k.im.atan2(self.k.re);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// `eps(k)` for boundary length `nu`.
    pub fn eps(&self, nu: f64) -> Result<f64> {
        epsilon(self.modulus(), nu)
    }

    /// Additive constant `-gamma/2pi - ln|k|/2pi` of `G_k^0`.
    pub fn log_shift(&self) -> f64 {
        -(EULER_GAMMA + self.modulus().ln()) / (2.0 * PI)
    }
}

/// `eps = [-nu (gamma/2pi + ln|k|/2pi)]^{-1}`.
pub fn epsilon(k_abs: f64, nu: f64) -> Result<f64> {
    if !(k_abs > 0.0) || !(nu > 0.0) {
        return Err(Error::Domain(format!("eps needs |k| > 0 and nu > 0, got |k| = {k_abs}, nu = {nu}")));
    }
    let bracket = -nu * (EULER_GAMMA + k_abs.ln()) / (2.0 * PI);
    if bracket.abs() < 1e-14 {
        return Err(Error::EpsilonPole(k_abs));
    }
    if k_abs >= (-EULER_GAMMA).exp() {
        log::warn!("eps(k) requested at |k| = {k_abs} outside the small-|k| regime |k| < e^-gamma");
    }
    Ok(1.0 / bracket)
}

/// `G_k(z)` split into its logarithmic part and smooth remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub g: f64,
    pub g0: f64,
    pub remainder: f64,
}

/// `G_k^0(z) = -(1/2pi) ln|z| - gamma/2pi - (1/2pi) ln|k|`.
pub fn g0(k: KPoint, z: C64) -> Result<f64> {
    let r = z.norm();
    if !(r > 0.0) {
        return Err(Error::Domain("G_k^0 is singular at z = 0".into()));
    }
    Ok(-r.ln() / (2.0 * PI) + k.log_shift())
}

/// Smooth remainder `N(w) = G_k(z) - G_k^0(z)` with `w = kz`.
pub fn remainder(w: C64) -> f64 {
    if w.norm() == 0.0 {
        return 0.0;
    }
    re_ein(C64::new(w.im, -w.re)) / (2.0 * PI)
}

/// `G_k(z)`.
pub fn faddeev_g(k: KPoint, z: C64) -> Result<GreenValue> {
    let g0 = g0(k, z)?;
    let n = remainder(k.k * z);
    Ok(GreenValue { g: g0 + n, g0, remainder: n })
}

/// Complex-valued evaluation `(E1(-ikz) + E1(conj(-ikz))) / 4pi` whose two
/// terms are computed independently; the imaginary part measures how well
/// the evaluation respects the realness of `G_k`.
pub fn faddeev_g_raw(k: KPoint, z: C64) -> Result<C64> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("G_k is singular at z = 0".into()));
    }
    let u = C64::new(0.0, -1.0) * k.k * z;
    Ok((e1(u) + e1(u.conj())) / (4.0 * PI))
}
