//! Exceptional-point detectors.
//!
//! * the kernel criterion on `A(lambda, k) = F_{n_lambda} - F^out(k)`;
//! * the small eigenvalue `xi(lambda, eps, phi)` of `A` near `(0, 0)` and the
//!   locus `xi = 0`;
//! * the count `n^-(k)` of negative eigenvalues of `P(k) = I + S_k (F_n - F_0)`
//!   and its parity along paths.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::boundary_ops::{self, assemble_s, weighted_matrix, BoundaryOperator, SpaceTag};
use crate::dtn::{self, DtnMap};
use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::green::{epsilon, KPoint};
use crate::linalg;
use crate::potential::{self, Conductivity, MuValue, Omega, Potential};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{CMat, C64};

/// Tolerances shared by the detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// relative kernel threshold: singular values below `tol_ker * ||A||` count
    pub tol_ker: f64,
    /// half-width of the band around 0 where `n^-` is unreliable
    pub tol_neg: f64,
    /// relative `sigma_min` of weighted `S_k` below which it is not inverted
    pub s_singular: f64,
    /// conjugate pairing tolerance for eigenvalues of `P(k)`
    pub pairing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol_ker: 1e-5, tol_neg: 1e-6, s_singular: boundary_ops::S_SINGULAR_THRESHOLD, pairing: 1e-8 }
    }
}

/// `mu = int omega q dS`, refused when it is not positive.
pub fn mu(omega: &Omega, q: &Conductivity) -> Result<f64> {
    let MuValue { mu, positive } = potential::mu(omega, q);
    if !positive {
        return Err(Error::InvalidParameter(format!("mu = {mu:.3e} is not positive")));
    }
    Ok(mu)
}

/// Everything about one potential on one boundary that does not depend on `k`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub nodes: Arc<NodeSet>,
    pub potential: Potential,
    pub f0: DtnMap,
    pub fn_map: DtnMap,
    /// `F_n - F_0`
    pub diff: CMat,
    pub tol: Tolerances,
}

impl Problem {
    pub fn new(nodes: Arc<NodeSet>, potential: Potential) -> Result<Self> {
        let f0 = dtn::assemble_f0(&nodes)?;
        Self::with_f0(f0, potential)
    }

    /// Reuse an assembled `F_0` (it depends on the boundary only).
    pub fn with_f0(f0: DtnMap, potential: Potential) -> Result<Self> {
        let nodes = f0.operator.nodes.clone();
        let fn_map = if potential.is_zero() { f0.clone() } else { dtn::assemble_fn(&nodes, &potential)? };
        Self::from_maps(f0, fn_map, potential)
    }

    /// Build from precomputed maps (used by caches).
    pub fn from_maps(f0: DtnMap, fn_map: DtnMap, potential: Potential) -> Result<Self> {
        let nodes = f0.operator.nodes.clone();
        let diff = fn_map.matrix() - f0.matrix();
        Ok(Self { nodes, potential, f0, fn_map, diff, tol: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Same boundary and `F_0`, different perturbation strength.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(Self::with_f0(self.f0.clone(), self.potential.with_lambda(lambda))?.with_tolerances(self.tol))
    }

    pub fn nu(&self) -> f64 {
        self.nodes.length()
    }

    /// `S_k^{-1}` or the E_D refusal.
    pub fn s_inverse(&self, k: KPoint) -> Result<CMat> {
        self.s_inverse_of(&assemble_s(k, &self.nodes))
    }

    pub fn s_inverse_of(&self, s: &BoundaryOperator) -> Result<CMat> {
        Ok(boundary_ops::invert_s_with(s, self.tol.s_singular)?.matrix)
    }

    /// `A(lambda, k) = F_n - F^out(k) = (F_n - F_0) + S_k^{-1}` (node basis).
    pub fn a_matrix(&self, k: KPoint) -> Result<CMat> {
        Ok(&self.diff + self.s_inverse(k)?)
    }

    /// `A(lambda, 0) = F_n - F^out(0)`.
    pub fn a_matrix_zero(&self) -> Result<CMat> {
        Ok(self.fn_map.matrix() - dtn::assemble_fout_zero(&self.f0)?.matrix())
    }

    pub fn criterion(&self, k: KPoint) -> Result<CriterionOperator> {
        self.criterion_with(k, &assemble_s(k, &self.nodes))
    }

    /// Criterion operator from an already assembled `S_k`.
    pub fn criterion_with(&self, k: KPoint, s: &BoundaryOperator) -> Result<CriterionOperator> {
        let a = &self.diff + self.s_inverse_of(s)?;
        CriterionOperator::from_matrix(Some(k), &a, &self.nodes, self.tol.tol_ker)
    }

    /// `eig_near_zero` of the criterion operator alone (no SVD of `A`).
    pub fn eig_near_zero(&self, k: KPoint) -> Result<f64> {
        let a = self.a_matrix(k)?;
        let w = weighted_matrix(&a, &self.nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf);
        Ok(nearest_to_zero(&linalg::hermitian_eigenvalues(&w)))
    }

    pub fn criterion_zero(&self) -> Result<CriterionOperator> {
        CriterionOperator::from_matrix(None, &self.a_matrix_zero()?, &self.nodes, self.tol.tol_ker)
    }

    /// `P(k) = I + S_k (F_n - F_0)`.
    pub fn p_matrix(&self, k: KPoint) -> CMat {
        self.p_matrix_with(&assemble_s(k, &self.nodes))
    }

    pub fn p_matrix_with(&self, s: &BoundaryOperator) -> CMat {
        linalg::identity(self.nodes.len()) + linalg::mul(&s.matrix, &self.diff)
    }

    pub fn n_minus(&self, k: KPoint) -> Result<ParityRecord> {
        ParityRecord::from_matrix(k, &self.p_matrix(k), self.tol)
    }

    /// `sigma_min` of `P(k)` in `L2` (arc-length weighted).
    pub fn sigma_min_p(&self, k: KPoint) -> Result<f64> {
        self.sigma_min_of_p(&self.p_matrix(k))
    }

    fn sigma_min_of_p(&self, p: &CMat) -> Result<f64> {
        linalg::sigma_min(&weighted_matrix(p, &self.nodes, SpaceTag::L2, SpaceTag::L2))
    }
}

/// Weighted `A = F_n - F^out` with its spectral summaries.
#[derive(Debug, Clone)]
pub struct CriterionOperator {
    pub k: Option<KPoint>,
    /// `W_{-1/2} D^{1/2} A D^{-1/2} W_{-1/2}`
    pub a: CMat,
    pub sigma_min: f64,
    pub norm: f64,
    /// eigenvalue of the Hermitian part nearest 0
    pub eig_near_zero: f64,
    pub kernel_dim_estimate: usize,
}

impl CriterionOperator {
    pub fn from_matrix(k: Option<KPoint>, a_nodes: &CMat, nodes: &NodeSet, tol_ker: f64) -> Result<Self> {
        let a = weighted_matrix(a_nodes, nodes, SpaceTag::HHalf, SpaceTag::HMinusHalf);
        let sv = linalg::singular_values(&a)?;
        let norm = *sv.last().unwrap_or(&0.0);
        let kernel_dim_estimate = sv.iter().filter(|s| **s < tol_ker * norm).count();
        let eig_near_zero = nearest_to_zero(&linalg::hermitian_eigenvalues(&a));
        Ok(Self { k, a, sigma_min: sv[0], norm, eig_near_zero, kernel_dim_estimate })
    }

    /// Hermitian-part eigenvalues and eigenvectors (ascending).
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMat)> {
        linalg::hermitian_eigen(&self.a)
    }
}

fn nearest_to_zero(eigs: &[f64]) -> f64 {
    eigs.iter().copied().fold(f64::INFINITY, |best, e| if e.abs() < best.abs() { e } else { best })
}

/// Flags attached to scan records.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanFlag {
    /// `S_k` refused: `k` is near E_D
    NearED,
    /// real eigenvalue of `P(k)` inside `(-tol_neg, tol_neg)`
    NearExceptional,
    /// conjugate pairing of `P(k)` eigenvalues violated
    PairingViolated,
    Failed(String),
}

impl ScanFlag {
    pub fn label(&self) -> String {
        match self {
            ScanFlag::NearED => "near_ED".into(),
            ScanFlag::NearExceptional => "near_exceptional".into(),
            ScanFlag::PairingViolated => "pairing_violated".into(),
            ScanFlag::Failed(msg) => format!("failed:{msg}"),
        }
    }
}

/// Per-`k` scan output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub k: KPoint,
    pub eps: Option<f64>,
    pub sigma_min_a: Option<f64>,
    pub eig_near_zero: Option<f64>,
    pub sigma_min_p: Option<f64>,
    pub n_minus: Option<usize>,
    pub t: Option<C64>,
    pub flags: Vec<ScanFlag>,
}

/// Which quantities a scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub criterion: bool,
    pub parity: bool,
    pub transform: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { criterion: true, parity: true, transform: false }
    }
}

/// Evaluate the detectors at one `k`; failures are recorded, not returned.
pub fn scan_point(problem: &Problem, k: KPoint, opts: ScanOptions) -> ScanRecord {
    scan_point_with(problem, k, &assemble_s(k, &problem.nodes), opts)
}

/// `scan_point` with `S_k` supplied by the caller.
pub fn scan_point_with(problem: &Problem, k: KPoint, s: &BoundaryOperator, opts: ScanOptions) -> ScanRecord {
    let mut rec = ScanRecord {
        k,
        // eps is defined (positive) only for |k| < e^{-gamma}
        eps: if k.log_shift() > 0.0 { epsilon(k.modulus(), problem.nu()).ok() } else { None },
        sigma_min_a: None,
        eig_near_zero: None,
        sigma_min_p: None,
        n_minus: None,
        t: None,
        flags: Vec::new(),
    };
    let note = |flags: &mut Vec<ScanFlag>, e: Error| {
        let f = match e {
            Error::NearSingularS { .. } => ScanFlag::NearED,
            other => ScanFlag::Failed(format!("{other}")),
        };
        if !flags.contains(&f) {
            flags.push(f);
        }
    };
    if opts.criterion {
        match problem.criterion_with(k, s) {
            Ok(c) => {
                rec.sigma_min_a = Some(c.sigma_min);
                rec.eig_near_zero = Some(c.eig_near_zero);
            }
            Err(e) => note(&mut rec.flags, e),
        }
    }
    if opts.parity {
        let p = problem.p_matrix_with(s);
        match problem.sigma_min_of_p(&p) {
            Ok(v) => rec.sigma_min_p = Some(v),
            Err(e) => note(&mut rec.flags, e),
        }
        match ParityRecord::from_matrix(k, &p, problem.tol) {
            Ok(p) => {
                if p.near_exceptional {
                    rec.flags.push(ScanFlag::NearExceptional);
                } else {
                    rec.n_minus = Some(p.n_minus);
                }
                if !p.pairing_check {
                    rec.flags.push(ScanFlag::PairingViolated);
                }
            }
            Err(e) => note(&mut rec.flags, e),
        }
    }
    if opts.transform {
        match crate::transform::scatter_t_with(problem, k, s) {
            Ok(t) => rec.t = Some(t.t),
            Err(e) => note(&mut rec.flags, e),
        }
    }
    rec
}

/// Sequential scan in grid order.
pub fn scan(problem: &Problem, grid: &[KPoint], opts: ScanOptions) -> Vec<ScanRecord> {
    grid.iter().map(|k| scan_point(problem, *k, opts)).collect()
}

/// Log-radial x angular grid, radii outermost.
pub fn polar_grid(k_min: f64, k_max: f64, n_radii: usize, n_angles: usize) -> Result<Vec<KPoint>> {
    if !(k_min > 0.0 && k_max >= k_min) || n_radii == 0 || n_angles == 0 {
        return Err(Error::InvalidParameter(format!(
            "polar grid needs 0 < k_min <= k_max and positive counts, got [{k_min}, {k_max}] x {n_radii} x {n_angles}"
        )));
    }
    let mut out = Vec::with_capacity(n_radii * n_angles);
    for i in 0..n_radii {
        let s = if n_radii == 1 { 0.0 } else { i as f64 / (n_radii - 1) as f64 };
        let r = (k_min.ln() * (1.0 - s) + k_max.ln() * s).exp();
        for j in 0..n_angles {
            out.push(KPoint::polar(r, 2.0 * PI * j as f64 / n_angles as f64)?);
        }
    }
    Ok(out)
}

/// Equally spaced ray angles in `[0, 2 pi)`.
pub fn ray_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Geometric grid in `eps`.
pub fn eps_grid(eps_min: f64, eps_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let s = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            (eps_min.ln() * (1.0 - s) + eps_max.ln() * s).exp()
        })
        .collect()
}

/// `eig_near_zero` along the ray `arg k = phi` at the given `eps`.
pub fn ray_eigenvalue(problem: &Problem, phi: f64, eps: f64) -> Result<f64> {
    let k = KPoint::from_eps(eps, phi, problem.nu())?;
    problem.eig_near_zero(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusPoint {
    pub phi: f64,
    pub eps: f64,
    pub k_abs: f64,
    /// bracketing grid cell `[eps_lo, eps_hi]` the root was refined in
    pub cell: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Locus {
    pub points: Vec<LocusPoint>,
    /// rays with no sign change
    pub missing: Vec<f64>,
    pub mu: f64,
    pub lambda: f64,
    pub nu: f64,
    /// `max_phi |eps*(phi) / (mu lambda) - 1|`
    pub max_ratio_error: f64,
    pub mean_eps: f64,
}

impl Locus {
    /// Assemble from per-ray results (in ray order).
    pub fn from_points(points: Vec<LocusPoint>, missing: Vec<f64>, mu: f64, lambda: f64, nu: f64) -> Self {
        let target = mu * lambda;
        let max_ratio_error = points.iter().map(|p| (p.eps / target - 1.0).abs()).fold(0.0, f64::max);
        let mean_eps =
            if points.is_empty() { f64::NAN } else { points.iter().map(|p| p.eps).sum::<f64>() / points.len() as f64 };
        Self { points, missing, mu, lambda, nu, max_ratio_error, mean_eps }
    }

    /// Every ray crossed and neighbouring rays agree within `jump`
    /// relative: the locus is a closed curve around 0.
    pub fn is_closed(&self, jump: f64) -> bool {
        if !self.missing.is_empty() || self.points.is_empty() {
            return false;
        }
        let n = self.points.len();
        (0..n).all(|i| {
            let (a, b) = (self.points[i].eps, self.points[(i + 1) % n].eps);
            (a - b).abs() <= jump * a.max(b)
        })
    }

    /// Largest relative spread of `eps*` over the rays.
    pub fn angular_spread(&self) -> f64 {
        let max = self.points.iter().map(|p| p.eps).fold(f64::NEG_INFINITY, f64::max);
        let min = self.points.iter().map(|p| p.eps).fold(f64::INFINITY, f64::min);
        (max - min) / self.mean_eps
    }
}

/// Sign changes of `eig_near_zero` along each ray, refined by bisection
/// inside the bracketing grid cell.
pub fn trace_locus(problem: &Problem, mu: f64, lambda: f64, angles: &[f64], eps: &[f64]) -> Result<Locus> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("locus tracing needs mu > 0, got {mu}")));
    }
    let nu = problem.nu();
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for &phi in angles {
        let values: Result<Vec<f64>> = eps.iter().map(|&e| ray_eigenvalue(problem, phi, e)).collect();
        let values = values?;
        let cell = (1..eps.len())
            .find(|&i| values[i - 1] < 0.0 && values[i] >= 0.0 || values[i - 1] > 0.0 && values[i] <= 0.0);
        let Some(i) = cell else {
            missing.push(phi);
            continue;
        };
        let root = bisect(|e| ray_eigenvalue(problem, phi, e), eps[i - 1], eps[i], values[i - 1], 1e-7)?;
        let k = KPoint::from_eps(root, phi, nu)?;
        points.push(LocusPoint { phi, eps: root, k_abs: k.modulus(), cell: (eps[i - 1], eps[i]) });
    }
    Ok(Locus::from_points(points, missing, mu, lambda, nu))
}

/// Bisection on a sign change of `f`, geometric in the argument.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, f_lo: f64, rel_tol: f64) -> Result<f64> {
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        if (hi - lo) <= rel_tol * hi {
            break;
        }
        let mid = (lo * hi).sqrt();
        let v = f(mid)?;
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// One tracked sample of the continued eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiSample {
    pub lambda: f64,
    pub eps: f64,
    pub phi: f64,
    pub xi: f64,
}

/// Tracked eigenvalue samples with their linear model `xi ~ a lambda + b eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiCurve {
    pub samples: Vec<XiSample>,
    pub a: f64,
    pub b: f64,
    /// RMS residual of the pure linear least-squares fit
    pub linear_residual: f64,
    /// `xi` at `(0, 0)`
    pub anchor: f64,
}

/// Track the eigenvalue of `A(lambda, eps)` continued from the zero mode
/// at `(0, 0)` and fit its linear part.
///
/// Tracking follows rows of constant `lambda` outward from `eps = 0`,
/// matching eigenvectors by maximal overlap; row starts are matched
/// outward from `lambda = 0`. The coefficients `(a, b)` are the linear
/// terms of a fit that also carries the three quadratic monomials, so
/// that curvature of `xi` does not bias them.
pub fn fit_xi(base: &Problem, lambdas: &[f64], eps: &[f64], phi: f64) -> Result<XiCurve> {
    if lambdas.is_empty() || eps.is_empty() {
        return Err(Error::InvalidParameter("fit_xi needs non-empty grids".into()));
    }
    let nu = base.nu();
    let anchor_problem = base.with_lambda(0.0)?;
    let zero = anchor_problem.criterion_zero()?;
    let (eigs0, vecs0) = zero.hermitian_eigen()?;
    // zero mode at (0, 0): the eigenvalue nearest zero
    let i0 = nearest_zero(&eigs0);
    let anchor = eigs0[i0];
    let v_anchor = vecs0.column(i0).into_owned();

    // order lambdas outward from 0 so row starts continue from the anchor
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&i, &j| lambdas[i].abs().partial_cmp(&lambdas[j].abs()).unwrap_or(core::cmp::Ordering::Equal));
    let mut eps_sorted = eps.to_vec();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));

    let mut samples = Vec::new();
    let mut row_start_pos: Option<nalgebra::DVector<C64>> = None;
    let mut row_start_neg: Option<nalgebra::DVector<C64>> = None;
    for &li in &order {
        let lambda = lambdas[li];
        let p = base.with_lambda(lambda)?;
        let start = if lambda >= 0.0 { row_start_pos.clone() } else { row_start_neg.clone() };
        let mut prev = start.unwrap_or_else(|| v_anchor.clone());
        // eps = 0 member of this row
        let (xi0, v0) = follow(&p.criterion_zero()?, &prev)?;
        if lambda >= 0.0 {
            row_start_pos = Some(v0.clone());
        }
        if lambda <= 0.0 {
            row_start_neg = Some(v0.clone());
        }
        if lambda == 0.0 {
            samples.push(XiSample { lambda, eps: 0.0, phi, xi: xi0 });
        }
        prev = v0;
        for &e in &eps_sorted {
            let k = KPoint::from_eps(e, phi, nu)?;
            let (xi, v) = follow(&p.criterion(k)?, &prev)?;
            samples.push(XiSample { lambda, eps: e, phi, xi });
            prev = v;
        }
    }

    let (coef, _) = least_squares(&samples, true)?;
    let (_, linear_residual) = least_squares(&samples, false)?;
    Ok(XiCurve { samples, a: coef[0], b: coef[1], linear_residual, anchor })
}

fn nearest_zero(eigs: &[f64]) -> usize {
    let mut best = 0;
    for (i, e) in eigs.iter().enumerate() {
        if e.abs() < eigs[best].abs() {
            best = i;
        }
    }
    best
}

/// Eigenpair of the Hermitian part with maximal overlap with `prev`.
fn follow(c: &CriterionOperator, prev: &nalgebra::DVector<C64>) -> Result<(f64, nalgebra::DVector<C64>)> {
    let (eigs, vecs) = c.hermitian_eigen()?;
    let mut overlaps: Vec<(usize, f64)> = (0..eigs.len()).map(|i| (i, vecs.column(i).dotc(prev).norm())).collect();
    overlaps.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal));
    let (best, ov) = overlaps[0];
    let second = overlaps.get(1).map(|o| o.1).unwrap_or(0.0);
    if ov < 0.5 || ov - second < 0.1 {
        return Err(Error::BranchLost(format!("eigenvector overlap {ov:.3} (runner-up {second:.3})")));
    }
    let mut v = vecs.column(best).into_owned();
    // fix the phase so later overlaps stay comparable
    let ph = v.dotc(prev);
    if ph.norm() > 0.0 {
        v *= ph.conj() / ph.norm();
    }
    Ok((eigs[best], v))
}

/// Least squares `xi ~ a lambda + b eps (+ c lambda^2 + d lambda eps + e eps^2)`;
/// returns coefficients and the RMS residual.
fn least_squares(samples: &[XiSample], quadratic: bool) -> Result<(Vec<f64>, f64)> {
    let cols = if quadratic { 5 } else { 2 };
    if samples.len() < cols {
        return Err(Error::InvalidParameter(format!("{} samples cannot determine {cols} coefficients", samples.len())));
    }
    let m = nalgebra::DMatrix::from_fn(samples.len(), cols, |i, j| {
        let (l, e) = (samples[i].lambda, samples[i].eps);
        [l, e, l * l, l * e, e * e][j]
    });
    let y = nalgebra::DVector::from_iterator(samples.len(), samples.iter().map(|s| s.xi));
    let svd = m.clone().svd(true, true);
    let coef = svd.solve(&y, 1e-14).map_err(|_| Error::NoConvergence("least squares"))?;
    let res = &m * &coef - &y;
    let rms = (res.norm_squared() / samples.len() as f64).sqrt();
    Ok((coef.iter().copied().collect(), rms))
}

/// Negative-eigenvalue count of `P(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityRecord {
    pub k: KPoint,
    /// all eigenvalues of `P(k)`
    pub eigs: Vec<C64>,
    pub n_minus: usize,
    /// real eigenvalue within `tol_neg` of 0: the count is unreliable
    pub near_exceptional: bool,
    /// non-real eigenvalues come in conjugate pairs
    pub pairing_check: bool,
}

impl ParityRecord {
    pub fn from_matrix(k: KPoint, p: &CMat, tol: Tolerances) -> Result<Self> {
        let scale = linalg::max_abs(p).max(1.0);
        let real_entries = linalg::max_imag(p) <= 1e-12 * scale;
        let eigs = if real_entries { linalg::real_matrix_eigenvalues(p)? } else { linalg::eigenvalues(p)? };
        // an eigenvalue is real when the real Schur form gives a 1x1 block
        let is_real = |z: &C64| if real_entries { z.im == 0.0 } else { z.im.abs() <= tol.pairing * z.norm().max(1.0) };
        let n_minus = eigs.iter().filter(|z| is_real(z) && z.re < -tol.tol_neg).count();
        let near_exceptional = eigs.iter().any(|z| is_real(z) && z.re.abs() <= tol.tol_neg);
        // pairing is checked on an independent complex Schur decomposition
        let complex = if real_entries { linalg::eigenvalues(p)? } else { eigs.clone() };
        let pairing_check = conjugate_pairing(&complex, tol.pairing);
        Ok(Self { k, eigs, n_minus, near_exceptional, pairing_check })
    }
}

/// Every eigenvalue with `|Im| > tol` has a distinct partner within `tol` of its conjugate.
pub fn conjugate_pairing(eigs: &[C64], tol: f64) -> bool {
    let mut used = vec![false; eigs.len()];
    for i in 0..eigs.len() {
        let z = eigs[i];
        let t = tol * z.norm().max(1.0);
        if used[i] || z.im.abs() <= t {
            continue;
        }
        used[i] = true;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..eigs.len() {
            if used[j] {
                continue;
            }
            let d = (eigs[j] - z.conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= t => used[j] = true,
            _ => return false,
        }
    }
    true
}

/// Analytic path between two spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KPath {
    /// `k(s) = exp((1 - s) ln k_a + s ln k_b)`
    Geometric,
    /// straight segment; must not pass through 0
    Segment,
}

impl KPath {
    pub fn at(self, ka: KPoint, kb: KPoint, s: f64) -> Result<KPoint> {
        match self {
            KPath::Geometric => {
                let la = C64::new(ka.modulus().ln(), ka.phi());
                let mut lb = C64::new(kb.modulus().ln(), kb.phi());
                // shorter way round
                if lb.im - la.im > PI {
                    lb.im -= 2.0 * PI;
                } else if la.im - lb.im > PI {
                    lb.im += 2.0 * PI;
                }
                KPoint::new((la * (1.0 - s) + lb * s).exp())
            }
            KPath::Segment => KPoint::new(ka.k * (1.0 - s) + kb.k * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParityVerdict {
    /// `n^-` parity differs on `[s_lo, s_hi]`; an exceptional point lies between
    Bracket {
        s_lo: f64,
        s_hi: f64,
        k_lo: KPoint,
        k_hi: KPoint,
        n_lo: usize,
        n_hi: usize,
    },
    NoEvidence {
        n_a: usize,
        n_b: usize,
    },
}

/// Parity test of `n^-` between `k_a` and `k_b`, bisecting on parity.
pub fn parity_path(problem: &Problem, ka: KPoint, kb: KPoint, path: KPath, s_tol: f64) -> Result<ParityVerdict> {
    let count = |s: f64| -> Result<Option<usize>> {
        let rec = problem.n_minus(path.at(ka, kb, s)?)?;
        Ok(if rec.near_exceptional { None } else { Some(rec.n_minus) })
    };
    let ends = |s: f64| -> Result<usize> {
        let rec = problem.n_minus(path.at(ka, kb, s)?)?;
        if rec.near_exceptional {
            let v = rec.eigs.iter().filter(|z| z.im == 0.0).map(|z| z.re).fold(f64::INFINITY, |b, x| {
                if x.abs() < b.abs() {
                    x
                } else {
                    b
                }
            });
            return Err(Error::NearExceptional { value: v });
        }
        Ok(rec.n_minus)
    };
    let (na, nb) = (ends(0.0)?, ends(1.0)?);
    if (na + nb) % 2 == 0 {
        return Ok(ParityVerdict::NoEvidence { n_a: na, n_b: nb });
    }
    let (mut lo, mut hi, mut n_lo, mut n_hi) = (0.0, 1.0, na, nb);
    while hi - lo > s_tol {
        let mid = 0.5 * (lo + hi);
        match count(mid)? {
            Some(n) if n % 2 == n_lo % 2 => {
                lo = mid;
                n_lo = n;
            }
            Some(n) => {
                hi = mid;
                n_hi = n;
            }
            // an eigenvalue sits on 0 here: this is the exceptional point
            None => {
                let w = 0.5 * s_tol;
                lo = (mid - w).max(lo);
                hi = (mid + w).min(hi);
                break;
            }
        }
    }
    Ok(ParityVerdict::Bracket {
        s_lo: lo,
        s_hi: hi,
        k_lo: path.at(ka, kb, lo)?,
        k_hi: path.at(ka, kb, hi)?,
        n_lo,
        n_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCurve;

    fn disk(n: usize) -> Arc<NodeSet> {
        Arc::new(BoundaryCurve::circle(1.0).unwrap().sample(n).unwrap())
    }

    #[test]
    fn zero_potential_gives_identity_p() {
        let p = Problem::new(disk(32), Potential::Zero).unwrap();
        let k = KPoint::polar(0.3, 0.4).unwrap();
        assert_eq!(p.p_matrix(k), linalg::identity(32));
        let rec = p.n_minus(k).unwrap();
        assert_eq!(rec.n_minus, 0);
        assert!(rec.pairing_check);
    }

    #[test]
    fn pairing_detects_lonely_eigenvalue() {
        let ok = [C64::new(1.0, 2.0), C64::new(1.0, -2.0), C64::new(-3.0, 0.0)];
        assert!(conjugate_pairing(&ok, 1e-8));
        let bad = [C64::new(1.0, 2.0), C64::new(1.0, -2.1)];
        assert!(!conjugate_pairing(&bad, 1e-8));
    }

    #[test]
    fn geometric_path_hits_endpoints() {
        let a = KPoint::polar(1e-3, 0.2).unwrap();
        let b = KPoint::polar(1e-1, 6.0).unwrap();
        assert!((KPath::Geometric.at(a, b, 0.0).unwrap().k - a.k).norm() < 1e-15);
        assert!((KPath::Geometric.at(a, b, 1.0).unwrap().k - b.k).norm() < 1e-14);
        let mid = KPath::Geometric.at(a, b, 0.5).unwrap();
        assert!((mid.modulus() - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn mu_sign_is_enforced() {
        let dip = Omega { radial: vec![(1, 1.0)], mean: 0.0, cos_amp: 1.0, sin_amp: 0.0 };
        assert!(mu(&dip, &Conductivity::unit()).is_err());
        assert!((mu(&Omega::radial(vec![(0, 1.0)]), &Conductivity::unit()).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn polar_grid_layout() {
        let g = polar_grid(1e-3, 1.0, 4, 8).unwrap();
        assert_eq!(g.len(), 32);
        assert!((g[0].modulus() - 1e-3).abs() < 1e-15);
        assert!((g[31].modulus() - 1.0).abs() < 1e-12);
        assert!(polar_grid(0.0, 1.0, 4, 8).is_err());
    }
}
