//! Command line: `run`, `validate` and single-detector shortcuts.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{CurveSpec, Detector, KGridSpec, PathKind, PotentialSpec, RunConfig};
use crate::error::{EpError, EpResult};
use crate::runner::{self, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "faddeev-ep", version, about = "Exceptional-point scans for the zero-energy Faddeev problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every detector listed in a JSON config
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Operator-identity suite; exit status 2 on failure
    Validate(Shortcut),
    /// sigma_min / eigenvalue / parity scan over the k grid
    Scan(Shortcut),
    /// Trace the exceptional locus ray by ray
    Locus(Shortcut),
    /// Parity of n^- along a path
    Parity(Shortcut),
    /// Scattering transform grid and the log bound
    Transform(Shortcut),
    /// Fit of the continued eigenvalue
    XiFit(Shortcut),
}

#[derive(Debug, Args)]
pub struct Shortcut {
    /// base config; defaults apply when absent
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurveKind {
    Circle,
    Ellipse,
    Kite,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    Conductive,
    PerturbedConductive,
    Absorbing,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PathArg {
    Geometric,
    Segment,
}

/// Flags overriding config fields.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub curve: Option<CurveKind>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// ellipse semi-axes
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub potential: Option<PotentialKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// absorption strength of the absorbing potential
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub n_radii: Option<usize>,
    #[arg(long)]
    pub n_angles: Option<usize>,
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub n_eps: Option<usize>,
    #[arg(long)]
    pub eps_a: Option<f64>,
    #[arg(long)]
    pub eps_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, value_enum)]
    pub path: Option<PathArg>,
    #[arg(long)]
    pub tol_g: Option<f64>,
    #[arg(long)]
    pub tol_ker: Option<f64>,
    #[arg(long)]
    pub tol_neg: Option<f64>,
    #[arg(long)]
    pub s_singular: Option<f64>,
    #[arg(long)]
    pub pairing: Option<f64>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// bypass the operator cache
    #[arg(long)]
    pub no_cache: bool,
    /// cache directory (otherwise FADDEEV_EP_CACHE or the user cache dir)
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Overrides {
    /// Apply to `cfg`; `target` says which section the grid flags address.
    pub fn apply(&self, cfg: &mut RunConfig, target: Option<Detector>) -> EpResult<()> {
        if let Some(kind) = self.curve {
            cfg.curve = match kind {
                CurveKind::Circle => CurveSpec::Circle { radius: self.radius.unwrap_or(1.0) },
                CurveKind::Ellipse => CurveSpec::Ellipse {
                    a: self.a.ok_or_else(|| EpError::Config("--curve ellipse needs --a".into()))?,
                    b: self.b.ok_or_else(|| EpError::Config("--curve ellipse needs --b".into()))?,
                },
                CurveKind::Kite => CurveSpec::Kite,
            };
        } else if let (Some(r), CurveSpec::Circle { radius }) = (self.radius, &mut cfg.curve) {
            *radius = r;
        }
        set(&mut cfg.n, self.n);
        if let Some(kind) = self.potential {
            cfg.potential = match kind {
                PotentialKind::Zero => PotentialSpec::Zero,
                PotentialKind::Conductive => PotentialSpec::Conductive { q: vec![(3, 2.0)] },
                PotentialKind::PerturbedConductive => PotentialSpec::default(),
                PotentialKind::Absorbing => PotentialSpec::Absorbing { real: 0.0, delta: self.delta.unwrap_or(1.0) },
            };
        }
        if let Some(l) = self.lambda {
            if !matches!(cfg.potential, PotentialSpec::PerturbedConductive { .. }) {
                return Err(EpError::Config("--lambda needs a perturbed_conductive potential".into()));
            }
            cfg.potential.set_lambda(l);
        }
        if let (Some(d), PotentialSpec::Absorbing { delta, .. }) = (self.delta, &mut cfg.potential) {
            *delta = d;
        }

        match target {
            Some(Detector::Transform) => {
                let t = &mut cfg.transform;
                set(&mut t.k_min, self.k_min);
                set(&mut t.k_max, self.k_max);
                set(&mut t.n_radii, self.n_radii);
                set(&mut t.n_angles, self.n_angles);
            }
            Some(Detector::Locus) => {
                set(&mut cfg.locus.n_angles, self.n_angles);
            }
            _ => self.apply_k_grid(cfg),
        }
        let l = &mut cfg.locus;
        set(&mut l.eps_min, self.eps_min);
        set(&mut l.eps_max, self.eps_max);
        set(&mut l.n_eps, self.n_eps);
        let p = &mut cfg.parity;
        set(&mut p.eps_a, self.eps_a);
        set(&mut p.eps_b, self.eps_b);
        if self.eps_a.is_some() {
            p.k_a = None;
        }
        if self.eps_b.is_some() {
            p.k_b = None;
        }
        set(&mut p.phi, self.phi);
        cfg.xi_fit.phi = self.phi.unwrap_or(cfg.xi_fit.phi);
        if let Some(path) = self.path {
            p.path = match path {
                PathArg::Geometric => PathKind::Geometric,
                PathArg::Segment => PathKind::Segment,
            };
        }
        let t = &mut cfg.tolerances;
        set(&mut t.tol_g, self.tol_g);
        set(&mut t.tol_ker, self.tol_ker);
        set(&mut t.tol_neg, self.tol_neg);
        set(&mut t.s_singular, self.s_singular);
        set(&mut t.pairing, self.pairing);
        set(&mut cfg.output_dir, self.output_dir.clone());
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.threads, self.threads);
        if self.no_cache {
            cfg.cache.enabled = false;
        }
        if self.cache_dir.is_some() {
            cfg.cache.dir = self.cache_dir.clone();
        }
        cfg.check()
    }

    fn apply_k_grid(&self, cfg: &mut RunConfig) {
        let any = self.k_min.is_some() || self.k_max.is_some() || self.n_radii.is_some() || self.n_angles.is_some();
        if !any {
            return;
        }
        let (mut k_min, mut k_max, mut n_radii, mut n_angles) = match cfg.k_grid {
            KGridSpec::Polar { k_min, k_max, n_radii, n_angles } => (k_min, k_max, n_radii, n_angles),
            _ => (1e-3, 1.0, 16, 8),
        };
        set(&mut k_min, self.k_min);
        set(&mut k_max, self.k_max);
        set(&mut n_radii, self.n_radii);
        set(&mut n_angles, self.n_angles);
        cfg.k_grid = KGridSpec::Polar { k_min, k_max, n_radii, n_angles };
    }
}

fn base_config(path: Option<&Path>) -> EpResult<(RunConfig, PathBuf)> {
    match path {
        Some(p) => Ok((RunConfig::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default())),
        None => Ok((RunConfig::default(), PathBuf::from("."))),
    }
}

fn report(manifest: &RunManifest) {
    println!("output: {}", manifest.output_dir.display());
    for d in &manifest.detectors {
        match &d.error {
            None => println!("{:<11} {} ({:.2} s)", d.name, d.status, d.seconds),
            Some(e) => println!("{:<11} {} ({:.2} s): {e}", d.name, d.status, d.seconds),
        }
    }
    if let Some(v) = manifest.validation {
        println!("validation: {}", if v { "pass" } else { "FAIL" });
    }
}

fn shortcut(s: &Shortcut, det: Detector) -> EpResult<RunManifest> {
    let (mut cfg, base) = base_config(s.config.as_deref())?;
    s.overrides.apply(&mut cfg, Some(det))?;
    cfg.detectors = vec![det];
    runner::run(&cfg, &base)
}

/// Execute a parsed command; returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Run { config, overrides } => base_config(Some(config)).and_then(|(mut cfg, base)| {
            overrides.apply(&mut cfg, None)?;
            runner::run(&cfg, &base)
        }),
        Command::Validate(s) => shortcut(s, Detector::Validate),
        Command::Scan(s) => shortcut(s, Detector::SigmaScan),
        Command::Locus(s) => shortcut(s, Detector::Locus),
        Command::Parity(s) => shortcut(s, Detector::Parity),
        Command::Transform(s) => shortcut(s, Detector::Transform),
        Command::XiFit(s) => shortcut(s, Detector::XiFit),
    };
    match result {
        Ok(m) => {
            if matches!(cli.command, Command::Validate(_)) {
                if let Ok(text) = std::fs::read_to_string(m.output_dir.join("summary.json")) {
                    print_validation(&text);
                }
            }
            report(&m);
            m.exit_code()
        }
        Err(e) => {
            eprintln!("faddeev-ep: {e}");
            e.exit_code()
        }
    }
}

fn print_validation(summary: &str) {
    let Ok(v) = serde_json::from_str::<serde_json::Value>(summary) else { return };
    let Some(checks) = v["validate"]["checks"].as_array() else { return };
    for c in checks {
        let verdict = if c["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:<28} {:>12.4e}  (tol {:.1e})",
            c["name"].as_str().unwrap_or("?"),
            c["value"].as_f64().unwrap_or(f64::NAN),
            c["tolerance"].as_f64().unwrap_or(f64::NAN)
        );
    }
}

/// Parse `args` and execute. Usage errors exit with 1 (a configuration error).
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
