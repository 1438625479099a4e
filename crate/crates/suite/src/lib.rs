//! Fixtures and reporting for the acceptance run.

use std::sync::Arc;
use std::time::Instant;

use faddeev_core::exceptional::{mu, Problem};
use faddeev_core::{BoundaryCurve, Conductivity, NodeSet, Omega, Potential};

pub fn circle(n: usize) -> Arc<NodeSet> {
    Arc::new(BoundaryCurve::circle(1.0).unwrap().sample(n).unwrap())
}

/// `omega = (1 - r^2)^3`
pub fn radial_omega() -> Omega {
    Omega::radial(vec![(3, 1.0)])
}

/// `omega = (1 - r^2)^3 (1 + 0.5 cos theta)`
pub fn tilted_omega() -> Omega {
    Omega { cos_amp: 0.5, ..radial_omega() }
}

pub fn conductive() -> Potential {
    Potential::Conductive(Conductivity::bump())
}

pub fn perturbed(omega: Omega, lambda: f64) -> Potential {
    Potential::PerturbedConductive { q: Conductivity::bump(), omega, lambda }
}

pub fn fixture_mu(omega: &Omega) -> f64 {
    mu(omega, &Conductivity::bump()).unwrap()
}

pub fn problem(n: usize, p: Potential) -> Problem {
    Problem::new(circle(n), p).unwrap()
}

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{} {verdict} [{}] {} ({:.1} s)", self.id, self.title, self.detail, self.seconds)
    }
}

/// Run `f`, which returns the verdict and a one-line detail, and time it.
pub fn criterion(id: &'static str, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    Outcome { id, title, pass, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
