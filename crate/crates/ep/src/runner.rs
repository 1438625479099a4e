//! Detector orchestration for one configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use faddeev_core::boundary_ops::{assemble_s, BoundaryOperator};
use faddeev_core::dtn::{self, DtnMap, DtnProvenance};
use faddeev_core::exceptional::{self, Locus, ParityVerdict, Problem, ScanOptions, ScanRecord};
use faddeev_core::geometry::NodeSet;
use faddeev_core::potential::Potential;
use faddeev_core::transform::{self, BoundReport, TransformValue};
use faddeev_core::{KPoint, C64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{CacheKey, CacheStats, OperatorCache};
use crate::config::{Detector, RunConfig};
use crate::container;
use crate::error::{EpError, EpResult};
use crate::output;
use crate::validate::{self, ValidationReport};

#[derive(Debug, Clone, Serialize)]
pub struct DetectorRecord {
    pub name: &'static str,
    /// `ok` or `failed`
    pub status: &'static str,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub detectors: Vec<DetectorRecord>,
    pub timings: BTreeMap<String, f64>,
    pub files: Vec<FileEntry>,
    /// outcome of the embedded validation suite, when it ran
    pub validation: Option<bool>,
    pub cache: CacheStats,
    pub cache_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl RunManifest {
    /// Exit status: 2 when the embedded validation failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.validation == Some(false) {
            2
        } else {
            0
        }
    }
}

/// Seconds spent assembling operators, summed over workers.
#[derive(Debug, Default)]
struct AssemblyClock(AtomicU64);

impl AssemblyClock {
    fn time<T>(&self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.fetch_add(t.elapsed().as_nanos() as u64, Ordering::Relaxed);
        out
    }

    fn seconds(&self) -> f64 {
        self.0.load(Ordering::Relaxed) as f64 * 1e-9
    }
}

pub struct Session {
    pub config: RunConfig,
    pub nodes: Arc<NodeSet>,
    pub potential: Potential,
    pub cache: OperatorCache,
    curve_key: String,
    assembly: AssemblyClock,
    problem: Option<Problem>,
}

impl Session {
    /// Resolve curve, potential and cache. Relative file paths in the
    /// config resolve against `base`.
    pub fn new(config: RunConfig, base: &Path) -> EpResult<Self> {
        config.check()?;
        let curve = config.curve.build(base).map_err(setup_error)?;
        let nodes = Arc::new(curve.sample(config.n).map_err(|e| EpError::Config(e.to_string()))?);
        let potential = config.potential.build(base).map_err(setup_error)?;
        let cache = if config.cache.enabled {
            OperatorCache::open(OperatorCache::resolve_dir(config.cache.dir.as_deref()))?
        } else {
            OperatorCache::disabled()
        };
        let curve_key = format!("{:?}", nodes.curve);
        Ok(Self { config, nodes, potential, cache, curve_key, assembly: AssemblyClock::default(), problem: None })
    }

    fn key(&self, kind: &'static str, k: Option<C64>, potential: String) -> CacheKey {
        CacheKey { curve: self.curve_key.clone(), n: self.nodes.len(), k, kind, potential }
    }

    pub fn assembly_seconds(&self) -> f64 {
        self.assembly.seconds()
    }

    fn f0(&self) -> EpResult<DtnMap> {
        let key = self.key("f0", None, String::new());
        let op = self.assembly.time(|| {
            self.cache.get_or_build(&key, &self.nodes, || dtn::assemble_f0(&self.nodes).map(|m| m.operator))
        })?;
        Ok(DtnMap { operator: op, provenance: DtnProvenance::Interior })
    }

    fn fn_map(&self, f0: &DtnMap, potential: &Potential) -> EpResult<DtnMap> {
        if potential.is_zero() {
            return Ok(f0.clone());
        }
        let opts = faddeev_core::interior::PolarSolverOptions::default();
        let key = self.key("fn", None, format!("{potential:?} {opts:?}"));
        let op = self.assembly.time(|| {
            self.cache.get_or_build(&key, &self.nodes, || {
                dtn::assemble_fn_with(&self.nodes, potential, &opts).map(|m| m.operator)
            })
        })?;
        Ok(DtnMap { operator: op, provenance: DtnProvenance::Interior })
    }

    /// `Problem` for the configured potential, built once.
    pub fn problem(&mut self) -> EpResult<&Problem> {
        if self.problem.is_none() {
            let f0 = self.f0()?;
            let fn_map = self.fn_map(&f0, &self.potential)?;
            let p =
                Problem::from_maps(f0, fn_map, self.potential.clone())?.with_tolerances(self.config.tolerances.core());
            self.problem = Some(p);
        }
        Ok(self.problem.as_ref().expect("just built"))
    }

    /// `S_k`, through the cache.
    pub fn s_operator(&self, k: KPoint) -> EpResult<BoundaryOperator> {
        let key = self.key("s_k", Some(k.k), String::new());
        self.assembly
            .time(|| self.cache.get_or_build(&key, &self.nodes, || Ok::<_, EpError>(assemble_s(k, &self.nodes))))
    }
}

fn setup_error(e: EpError) -> EpError {
    match e {
        EpError::Core(c) => EpError::Config(c.to_string()),
        other => other,
    }
}

/// Run the configured detectors and write the output directory.
pub fn run(config: &RunConfig, base: &Path) -> EpResult<RunManifest> {
    let threads = config.threads;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EpError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(config, base))
}

fn run_in_pool(config: &RunConfig, base: &Path) -> EpResult<RunManifest> {
    let started = Instant::now();
    let hash = config.hash();
    let out_dir = config.output_dir.join(&hash);
    std::fs::create_dir_all(&out_dir).map_err(|e| EpError::io(&out_dir, e))?;
    let mut session = Session::new(config.clone(), base)?;

    let mut summary = serde_json::Map::new();
    summary.insert("config_hash".into(), json!(hash));
    summary.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    summary.insert("n".into(), json!(config.n));
    summary.insert("nu".into(), json!(session.nodes.length()));
    summary.insert("tolerances".into(), serde_json::to_value(config.tolerances).expect("serializes"));

    let mut records = Vec::new();
    let mut timings = BTreeMap::new();
    let mut validation = None;
    let mut detectors = config.detectors.clone();
    detectors.dedup();
    for det in detectors {
        let t = Instant::now();
        let result = run_detector(det, &mut session, &out_dir);
        let seconds = t.elapsed().as_secs_f64();
        timings.insert(det.name().to_string(), seconds);
        let (status, error) = match result {
            Ok(DetectorOutput { summary: value, validation: v }) => {
                summary.insert(det.name().into(), value);
                if v.is_some() {
                    validation = v;
                }
                ("ok", None)
            }
            Err(e) => {
                log::error!("detector {} failed: {e}", det.name());
                summary.insert(det.name().into(), json!({ "error": e.to_string() }));
                if det == Detector::Validate {
                    validation = Some(false);
                }
                ("failed", Some(e.to_string()))
            }
        };
        records.push(DetectorRecord { name: det.name(), status, seconds, error });
    }

    if let Some(g) = &config.green_dump {
        output::write_green_dump(&out_dir.join("green.csv"), g)?;
    }
    if config.export_operators && !config.detectors.is_empty() {
        export_operators(&mut session, &out_dir)?;
    }

    timings.insert("assembly".into(), session.assembly_seconds());
    timings.insert("total".into(), started.elapsed().as_secs_f64());
    summary.insert("runtimes".into(), serde_json::to_value(&timings).expect("serializes"));
    output::write_json(&out_dir.join("summary.json"), &Value::Object(summary))?;

    let mut versions = BTreeMap::new();
    versions.insert("faddeev-ep", env!("CARGO_PKG_VERSION"));
    versions.insert("faddeev-core", faddeev_core_version());
    let mut manifest = RunManifest {
        config_hash: hash,
        versions,
        detectors: records,
        timings,
        files: Vec::new(),
        validation,
        cache: session.cache.stats(),
        cache_dir: session.cache.dir().map(Path::to_path_buf),
        output_dir: out_dir.clone(),
    };
    manifest.files = output::inventory(&out_dir, &["manifest.json"])?;
    output::write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn faddeev_core_version() -> &'static str {
    // both crates are released together
    env!("CARGO_PKG_VERSION")
}

struct DetectorOutput {
    summary: Value,
    validation: Option<bool>,
}

impl From<Value> for DetectorOutput {
    fn from(summary: Value) -> Self {
        Self { summary, validation: None }
    }
}

fn run_detector(det: Detector, session: &mut Session, out: &Path) -> EpResult<DetectorOutput> {
    match det {
        Detector::SigmaScan => sigma_scan(session, out).map(Into::into),
        Detector::Locus => locus(session, out).map(Into::into),
        Detector::XiFit => xi_fit(session).map(Into::into),
        Detector::Parity => parity(session).map(Into::into),
        Detector::Transform => transform_grid(session, out).map(Into::into),
        Detector::Validate => {
            let report = validate::run_suite(&session.nodes, session.config.seed)?;
            log::info!("\n{}", report.render());
            Ok(DetectorOutput { validation: Some(report.pass), summary: validation_json(&report) })
        }
    }
}

fn validation_json(r: &ValidationReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

/// Scan records in grid order, evaluated in parallel.
pub fn scan_records(session: &mut Session, grid: &[KPoint], opts: ScanOptions) -> EpResult<Vec<ScanRecord>> {
    session.problem()?;
    let session = &*session;
    let problem = session.problem.as_ref().expect("built above");
    grid.par_iter()
        .map(|&k| {
            let s = session.s_operator(k)?;
            Ok(exceptional::scan_point_with(problem, k, &s, opts))
        })
        .collect()
}

fn sigma_scan(session: &mut Session, out: &Path) -> EpResult<Value> {
    let nu = session.nodes.length();
    let grid = session.config.k_grid.build(nu)?;
    let records = scan_records(session, &grid, ScanOptions { criterion: true, parity: true, transform: false })?;
    output::write_scan_csv(&out.join("scan.csv"), &records)?;

    let min_of = |f: fn(&ScanRecord) -> Option<f64>| records.iter().filter_map(f).fold(f64::INFINITY, f64::min);
    let mut n_minus: BTreeMap<usize, usize> = BTreeMap::new();
    let mut flags: BTreeMap<String, usize> = BTreeMap::new();
    for r in &records {
        if let Some(n) = r.n_minus {
            *n_minus.entry(n).or_default() += 1;
        }
        for f in &r.flags {
            let label = f.label();
            let key = label.split(':').next().unwrap_or(&label).to_string();
            *flags.entry(key).or_default() += 1;
        }
    }
    Ok(json!({
        "points": records.len(),
        "k_grid": serde_json::to_value(&session.config.k_grid).expect("serializes"),
        "min_sigma_min_a": finite(min_of(|r| r.sigma_min_a)),
        "min_sigma_min_p": finite(min_of(|r| r.sigma_min_p)),
        "n_minus_histogram": n_minus,
        "flag_counts": flags,
    }))
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// `mu` and `lambda` of a perturbed conductive potential.
pub fn perturbation(potential: &Potential) -> EpResult<(f64, f64)> {
    match potential {
        Potential::PerturbedConductive { q, omega, lambda } => Ok((exceptional::mu(omega, q)?, *lambda)),
        _ => Err(EpError::Config("this detector needs a perturbed_conductive potential".into())),
    }
}

/// Exceptional locus, one ray per worker.
pub fn locus_parallel(problem: &Problem, mu: f64, lambda: f64, angles: &[f64], eps: &[f64]) -> EpResult<Locus> {
    let rays: Vec<Locus> = angles
        .par_iter()
        .map(|&phi| exceptional::trace_locus(problem, mu, lambda, &[phi], eps))
        .collect::<Result<_, _>>()?;
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for r in rays {
        points.extend(r.points);
        missing.extend(r.missing);
    }
    Ok(Locus::from_points(points, missing, mu, lambda, problem.nu()))
}

fn locus(session: &mut Session, out: &Path) -> EpResult<Value> {
    let (mu, lambda) = perturbation(&session.potential)?;
    let spec = session.config.locus.clone();
    let angles = exceptional::ray_angles(spec.n_angles);
    let eps = exceptional::eps_grid(spec.eps_min, spec.eps_max, spec.n_eps);
    let problem = session.problem()?;
    let nu = problem.nu();
    let loc = locus_parallel(problem, mu, lambda, &angles, &eps)?;
    output::write_locus_csv(&out.join("locus.csv"), &loc)?;
    let cell_ratio = eps[1] / eps[0];
    Ok(json!({
        "mu": mu,
        "lambda": lambda,
        "nu": nu,
        "angles": angles.len(),
        "found": loc.points.len(),
        "missing": loc.missing,
        "closed": loc.is_closed(cell_ratio - 1.0),
        "eps_star_mean": finite(loc.mean_eps),
        "ratio": finite(loc.mean_eps / (mu * lambda)),
        "max_ratio_error": loc.max_ratio_error,
        "angular_spread": finite(loc.angular_spread()),
        // the crossing sits near mu lambda / nu
        "ratio_nu_normalized": finite(loc.mean_eps * nu / (mu * lambda)),
        "eps_grid": { "min": spec.eps_min, "max": spec.eps_max, "n": spec.n_eps },
    }))
}

fn xi_fit(session: &mut Session) -> EpResult<Value> {
    let spec = session.config.xi_fit.clone();
    let mu = match &session.potential {
        Potential::PerturbedConductive { .. } => Some(perturbation(&session.potential)?.0),
        _ => None,
    };
    let problem = session.problem()?;
    let nu = problem.nu();
    let curve = exceptional::fit_xi(problem, &spec.lambdas, &spec.eps, spec.phi)?;
    let samples: Vec<Value> = curve.samples.iter().map(|s| json!([s.lambda, s.eps, s.xi])).collect();
    Ok(json!({
        "a": curve.a,
        "b": curve.b,
        "mu": mu,
        "a_over_minus_mu": mu.map(|m| -curve.a / m),
        "a_nu_over_minus_mu": mu.map(|m| -curve.a * nu / m),
        "linear_residual": curve.linear_residual,
        "anchor": curve.anchor,
        "phi": spec.phi,
        "samples": samples,
    }))
}

fn parity(session: &mut Session) -> EpResult<Value> {
    let spec = session.config.parity.clone();
    let problem = session.problem()?;
    let (ka, kb) = spec.endpoints(problem.nu())?;
    let verdict = exceptional::parity_path(problem, ka, kb, spec.path.core(), spec.s_tol)?;
    let nu = problem.nu();
    let eps_of = |k: KPoint| k.eps(nu).ok();
    let endpoints =
        json!({ "k_a": [ka.k.re, ka.k.im], "k_b": [kb.k.re, kb.k.im], "eps_a": eps_of(ka), "eps_b": eps_of(kb) });
    Ok(match verdict {
        ParityVerdict::Bracket { s_lo, s_hi, k_lo, k_hi, n_lo, n_hi } => json!({
            "verdict": "bracket",
            "endpoints": endpoints,
            "s": [s_lo, s_hi],
            "k_lo": [k_lo.k.re, k_lo.k.im],
            "k_hi": [k_hi.k.re, k_hi.k.im],
            "eps": [eps_of(k_lo), eps_of(k_hi)],
            "n_minus": [n_lo, n_hi],
        }),
        ParityVerdict::NoEvidence { n_a, n_b } => json!({
            "verdict": "no_evidence",
            "endpoints": endpoints,
            "n_minus": [n_a, n_b],
        }),
    })
}

/// `t(k)` on the configured grid and its refinement, in parallel.
pub fn transform_values(session: &mut Session, ks: &[KPoint]) -> EpResult<Vec<TransformValue>> {
    session.problem()?;
    let session = &*session;
    let problem = session.problem.as_ref().expect("built above");
    ks.par_iter()
        .map(|&k| {
            let s = session.s_operator(k)?;
            Ok(transform::scatter_t_with(problem, k, &s)?)
        })
        .collect()
}

fn transform_grid(session: &mut Session, out: &Path) -> EpResult<Value> {
    let spec = session.config.transform.clone();
    let ks = exceptional::polar_grid(spec.k_min, spec.k_max, spec.n_radii, spec.n_angles)?;
    let values = transform_values(session, &ks)?;
    let mids = transform_values(session, &transform::refinement_points(&ks)?)?;
    let report = BoundReport::from_values(values, &mids);
    output::write_transform_csv(&out.join("transform.csv"), &report.values)?;
    Ok(json!({
        "points": report.values.len(),
        "sup_bound_product": report.sup,
        "sup_bound_product_refined": report.sup_refined,
        "non_increasing": report.non_increasing,
        "grid": serde_json::to_value(&spec).expect("serializes"),
    }))
}

fn export_operators(session: &mut Session, out: &Path) -> EpResult<()> {
    let problem = session.problem()?;
    container::write(
        &out.join("f0.fep"),
        container::operator_header(&problem.f0.operator, "f0", None),
        problem.f0.matrix(),
    )?;
    container::write(
        &out.join("fn.fep"),
        container::operator_header(&problem.fn_map.operator, "fn", None),
        problem.fn_map.matrix(),
    )?;
    Ok(())
}
