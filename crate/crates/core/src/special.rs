//! Exponential integrals of complex argument.
//!
//! `Ein` is the entire function `sum_{n>=1} (-1)^{n+1} u^n / (n n!)`
//! and `E1(u) = -gamma - ln u + Ein(u)` on the principal branch.

#[allow(unused_imports)]
use crate::prelude::*;
use crate::C64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_RADIUS: f64 = 4.0;
const ASYMPTOTIC_RADIUS: f64 = 40.0;

fn ein_series(u: C64) -> C64 {
    // term_n = (-1)^{n+1} u^n / n!, summand term_n / n
    let mut term = u;
    let mut sum = u;
    let mut n = 1.0_f64;
    loop {
        n += 1.0;
        term = -term * u / n;
        let add = term / n;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm().max(1e-300) && n > 3.0 {
            break;
        }
        if n > 400.0 {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the continued fraction
/// `E1(u) = e^{-u} / (u + 1 - 1/(u + 3 - 4/(u + 5 - ...)))`.
fn e1_continued_fraction(u: C64) -> C64 {
    let tiny = C64::new(1e-300, 0.0);
    let mut b = u + 1.0;
    let mut c = C64::new(1.0 / 1e-300, 0.0);
    let mut d = C64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..20_000 {
        let fi = i as f64;
        let a = -fi * fi;
        b += 2.0;
        d = C64::new(1.0, 0.0) / (a * d + b);
        c = b + a / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-u).exp()
}

fn e1_asymptotic(u: C64) -> C64 {
    // e^{-u}/u * sum_n (-1)^n n! / u^n, truncated at the smallest term
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for n in 1..200 {
        term = -term * (n as f64) / u;
        let mag = term.norm();
        if mag > prev || mag < 1e-18 {
            break;
        }
        sum += term;
        prev = mag;
    }
    (-u).exp() / u * sum
}

/// Entire exponential integral `Ein(u)`.
pub fn ein(u: C64) -> C64 {
    if u.norm() <= SERIES_RADIUS {
        ein_series(u)
    } else {
        e1(u) + EULER_GAMMA + u.ln()
    }
}

/// Principal-branch exponential integral `E1(u)`, `u != 0`.
pub fn e1(u: C64) -> C64 {
    let r = u.norm();
    if r <= SERIES_RADIUS {
        -EULER_GAMMA - u.ln() + ein_series(u)
    } else if r >= ASYMPTOTIC_RADIUS {
        e1_asymptotic(u)
    } else if u.re < 0.0 && u.im.abs() < -u.re {
        // within 45 degrees of the negative axis the fraction converges
        // slowly while the series loses at most e^{0.3|u|} in relative terms
        -EULER_GAMMA - u.ln() + ein_series(u)
    } else {
        e1_continued_fraction(u)
    }
}

/// `Re Ein(u)` without the cancellation that `Re E1 + gamma + ln|u|`
/// suffers for small arguments.
pub fn re_ein(u: C64) -> f64 {
    if u.norm() <= SERIES_RADIUS {
        ein_series(u).re
    } else {
        e1(u).re + EULER_GAMMA + u.norm().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_real_reference_values() {
        // Abramowitz & Stegun table 5.1
        let cases = [
            (0.5, 0.559_773_594_776_160_8),
            (1.0, 0.219_383_934_395_520_3),
            (2.0, 0.048_900_510_708_061_2),
            (5.0, 0.001_148_295_591_275_3),
            (10.0, 4.156_968_929_685_324e-6),
        ];
        for (x, want) in cases {
            let got = e1(C64::new(x, 0.0)).re;
            assert!((got - want).abs() <= 1e-13 * want.max(1e-3), "E1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn e1_negative_axis_is_minus_ei() {
        // E1(-x + i0) = -Ei(x) - i pi ; Ei(1) = 1.8951178163559368
        let v = e1(C64::new(-1.0, 1e-300));
        assert!((v.re + 1.895_117_816_355_936_8).abs() < 1e-13);
        assert!((v.im + core::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn regimes_agree_at_their_borders() {
        for deg in (0..360).step_by(7) {
            let a = (deg as f64).to_radians();
            let dir = C64::new(a.cos(), a.sin());
            let inner = dir * SERIES_RADIUS;
            let outer = dir * ASYMPTOTIC_RADIUS;
            let series = -EULER_GAMMA - inner.ln() + ein_series(inner);
            let near_negative_axis = inner.re < 0.0 && inner.im.abs() < -inner.re;
            if !near_negative_axis {
                let cf = e1_continued_fraction(inner);
                assert!((series - cf).norm() < 1e-12 * series.norm().max(1.0), "deg {deg} r 4");
                let cf = e1_continued_fraction(outer);
                let asy = e1_asymptotic(outer);
                assert!((asy - cf).norm() < 1e-12 * asy.norm().max(1e-300), "deg {deg} r 40: {asy} vs {cf}");
            }
        }
    }

    #[test]
    fn e1_complex_reference_values() {
        // high-precision values, E1(40 e^{i 98 deg}) and E1(10 e^{i 150 deg})
        let u = C64::from_polar(40.0, 98.0_f64.to_radians());
        let want = C64::new(-5.888_885_797_430_27, 2.884_640_574_983_4);
        assert!((e1(u) - want).norm() < 1e-11 * want.norm());
        let u = C64::from_polar(10.0, 150.0_f64.to_radians());
        let want = C64::new(189.671_571_077_859_17, -603.236_563_507_448_5);
        assert!((e1(u) - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn continued_fraction_matches_series_off_axis() {
        for deg in [0.0_f64, 30.0, 60.0, 90.0, 120.0, 130.0] {
            let a = deg.to_radians();
            let u = C64::new(a.cos(), a.sin()) * 6.0;
            let cf = e1_continued_fraction(u);
            let series = -EULER_GAMMA - u.ln() + ein_series(u);
            assert!((cf - series).norm() < 1e-10 * series.norm().max(1e-3), "deg {deg}");
        }
    }

    #[test]
    fn ein_is_odd_to_first_order() {
        let u = C64::new(1e-7, 2e-7);
        assert!((ein(u) - u).norm() < 1e-13);
    }
}
