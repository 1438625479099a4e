//! Run configuration: one JSON document, every field defaulted.

use std::path::{Path, PathBuf};

use faddeev_core::exceptional::{self, KPath, Tolerances};
use faddeev_core::geometry::BoundaryCurve;
use faddeev_core::potential::{Conductivity, Omega, Potential};
use faddeev_core::{KPoint, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{EpError, EpResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Kite,
    /// `z(t) = sum c_m e^{imt}`; coefficients inline or from a JSON file of `[m, re, im]` rows.
    Fourier {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        coefficients: Vec<(i32, f64, f64)>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec::Circle { radius: 1.0 }
    }
}

impl CurveSpec {
    pub fn build(&self, base: &Path) -> EpResult<BoundaryCurve> {
        let curve = match self {
            CurveSpec::Circle { radius } => BoundaryCurve::circle(*radius)?,
            CurveSpec::Ellipse { a, b } => BoundaryCurve::ellipse(*a, *b)?,
            CurveSpec::Kite => BoundaryCurve::kite(),
            CurveSpec::Fourier { name, coefficients, file } => {
                let mut rows = coefficients.clone();
                if let Some(f) = file {
                    let path = base.join(f);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| EpError::Config(format!("cannot read curve file {}: {e}", path.display())))?;
                    let extra: Vec<(i32, f64, f64)> = serde_json::from_str(&text)
                        .map_err(|e| EpError::Config(format!("curve file {}: {e}", path.display())))?;
                    rows.extend(extra);
                }
                let coeffs = rows.into_iter().map(|(m, re, im)| (m, C64::new(re, im))).collect();
                BoundaryCurve::fourier(name.as_deref().unwrap_or("fourier"), coeffs)?
            }
        };
        Ok(curve)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OmegaSpec {
    /// `(power, coefficient)` pairs of `(1 - r^2)^p`
    pub radial: Vec<(u32, f64)>,
    pub mean: f64,
    pub cos: f64,
    pub sin: f64,
}

impl Default for OmegaSpec {
    fn default() -> Self {
        Self { radial: vec![(3, 1.0)], mean: 1.0, cos: 0.0, sin: 0.0 }
    }
}

impl OmegaSpec {
    pub fn build(&self) -> Omega {
        Omega { radial: self.radial.clone(), mean: self.mean, cos_amp: self.cos, sin_amp: self.sin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Conductive {
        #[serde(default = "bump_terms")]
        q: Vec<(u32, f64)>,
    },
    PerturbedConductive {
        #[serde(default = "bump_terms")]
        q: Vec<(u32, f64)>,
        #[serde(default)]
        omega: OmegaSpec,
        #[serde(default)]
        lambda: f64,
    },
    Absorbing {
        #[serde(default)]
        real: f64,
        #[serde(default = "one")]
        delta: f64,
    },
    /// Gridded samples: JSON `{x0, y0, dx, dy, nx, ny, values: [[re, im], ...]}`
    /// or CSV with one `re[,im]` row per sample, row-major in `y`.
    Raster {
        file: PathBuf,
        #[serde(default)]
        grid: Option<RasterGrid>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterGrid {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Deserialize)]
struct RasterJson {
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
    values: Vec<(f64, f64)>,
}

fn bump_terms() -> Vec<(u32, f64)> {
    vec![(3, 2.0)]
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::PerturbedConductive { q: bump_terms(), omega: OmegaSpec::default(), lambda: 0.05 }
    }
}

impl PotentialSpec {
    pub fn build(&self, base: &Path) -> EpResult<Potential> {
        Ok(match self {
            PotentialSpec::Zero => Potential::Zero,
            PotentialSpec::Constant { re, im } => Potential::Constant(C64::new(*re, *im)),
            PotentialSpec::Conductive { q } => Potential::Conductive(Conductivity::new(q.clone())?),
            PotentialSpec::PerturbedConductive { q, omega, lambda } => Potential::PerturbedConductive {
                q: Conductivity::new(q.clone())?,
                omega: omega.build(),
                lambda: *lambda,
            },
            PotentialSpec::Absorbing { real, delta } => Potential::absorbing(*real, *delta)?,
            PotentialSpec::Raster { file, grid } => load_raster(&base.join(file), grid.as_ref())?,
        })
    }

    pub fn lambda(&self) -> f64 {
        match self {
            PotentialSpec::PerturbedConductive { lambda, .. } => *lambda,
            _ => 0.0,
        }
    }

    pub fn set_lambda(&mut self, value: f64) {
        if let PotentialSpec::PerturbedConductive { lambda, .. } = self {
            *lambda = value;
        }
    }
}

fn load_raster(path: &Path, grid: Option<&RasterGrid>) -> EpResult<Potential> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EpError::Config(format!("cannot read raster {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        let r: RasterJson =
            serde_json::from_str(&text).map_err(|e| EpError::Config(format!("raster {}: {e}", path.display())))?;
        let values = r.values.into_iter().map(|(re, im)| C64::new(re, im)).collect();
        return Ok(Potential::raster(r.x0, r.y0, r.dx, r.dy, r.nx, r.ny, values)?);
    }
    let g = grid.ok_or_else(|| EpError::Config("CSV rasters need a `grid` block".into()))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| EpError::Config(format!("raster {}: {e}", path.display())))?;
        let parse = |i: usize| -> EpResult<f64> {
            rec.get(i)
                .map(|s| s.trim().parse::<f64>())
                .transpose()
                .map_err(|e| EpError::Config(format!("raster {}: {e}", path.display())))
                .map(|v| v.unwrap_or(0.0))
        };
        values.push(C64::new(parse(0)?, parse(1)?));
    }
    Ok(Potential::raster(g.x0, g.y0, g.dx, g.dy, g.nx, g.ny, values)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KGridSpec {
    /// log-spaced radii x equally spaced angles
    Polar {
        k_min: f64,
        k_max: f64,
        n_radii: usize,
        n_angles: usize,
    },
    /// radii given by a geometric grid in `eps`
    Eps {
        eps_min: f64,
        eps_max: f64,
        n_eps: usize,
        n_angles: usize,
    },
    List {
        points: Vec<(f64, f64)>,
    },
}

impl Default for KGridSpec {
    fn default() -> Self {
        KGridSpec::Polar { k_min: 1e-3, k_max: 1.0, n_radii: 16, n_angles: 8 }
    }
}

impl KGridSpec {
    pub fn build(&self, nu: f64) -> EpResult<Vec<KPoint>> {
        Ok(match self {
            KGridSpec::Polar { k_min, k_max, n_radii, n_angles } => {
                exceptional::polar_grid(*k_min, *k_max, *n_radii, *n_angles)?
            }
            KGridSpec::Eps { eps_min, eps_max, n_eps, n_angles } => {
                let mut out = Vec::new();
                for e in exceptional::eps_grid(*eps_min, *eps_max, *n_eps) {
                    for phi in exceptional::ray_angles(*n_angles) {
                        out.push(KPoint::from_eps(e, phi, nu)?);
                    }
                }
                out
            }
            KGridSpec::List { points } => {
                points.iter().map(|&(re, im)| KPoint::new(C64::new(re, im))).collect::<Result<_, _>>()?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    SigmaScan,
    Locus,
    XiFit,
    Parity,
    Transform,
    Validate,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::SigmaScan => "sigma_scan",
            Detector::Locus => "locus",
            Detector::XiFit => "xi_fit",
            Detector::Parity => "parity",
            Detector::Transform => "transform",
            Detector::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSpec {
    pub tol_g: f64,
    pub tol_ker: f64,
    pub tol_neg: f64,
    pub s_singular: f64,
    pub pairing: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let t = Tolerances::default();
        Self { tol_g: 1e-8, tol_ker: t.tol_ker, tol_neg: t.tol_neg, s_singular: t.s_singular, pairing: t.pairing }
    }
}

impl ToleranceSpec {
    pub fn core(&self) -> Tolerances {
        Tolerances { tol_ker: self.tol_ker, tol_neg: self.tol_neg, s_singular: self.s_singular, pairing: self.pairing }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocusSpec {
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_eps: usize,
    pub n_angles: usize,
}

impl Default for LocusSpec {
    fn default() -> Self {
        Self { eps_min: 2e-3, eps_max: 0.25, n_eps: 48, n_angles: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XiFitSpec {
    pub lambdas: Vec<f64>,
    pub eps: Vec<f64>,
    pub phi: f64,
}

impl Default for XiFitSpec {
    fn default() -> Self {
        Self {
            lambdas: vec![-0.05, -0.0375, -0.025, -0.0125, 0.0, 0.0125, 0.025, 0.0375, 0.05],
            eps: vec![0.00625, 0.0125, 0.025, 0.0375, 0.05],
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Geometric,
    Segment,
}

impl PathKind {
    pub fn core(self) -> KPath {
        match self {
            PathKind::Geometric => KPath::Geometric,
            PathKind::Segment => KPath::Segment,
        }
    }
}

/// Path endpoints given either as `k` values or as `(eps, phi)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParitySpec {
    pub k_a: Option<(f64, f64)>,
    pub k_b: Option<(f64, f64)>,
    pub eps_a: f64,
    pub eps_b: f64,
    pub phi: f64,
    pub path: PathKind,
    pub s_tol: f64,
}

impl Default for ParitySpec {
    fn default() -> Self {
        Self { k_a: None, k_b: None, eps_a: 0.004, eps_b: 0.06, phi: 0.0, path: PathKind::Geometric, s_tol: 1e-4 }
    }
}

impl ParitySpec {
    pub fn endpoints(&self, nu: f64) -> EpResult<(KPoint, KPoint)> {
        let pick = |k: Option<(f64, f64)>, eps: f64| -> EpResult<KPoint> {
            Ok(match k {
                Some((re, im)) => KPoint::new(C64::new(re, im))?,
                None => KPoint::from_eps(eps, self.phi, nu)?,
            })
        };
        Ok((pick(self.k_a, self.eps_a)?, pick(self.k_b, self.eps_b)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransformSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n_radii: usize,
    pub n_angles: usize,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self { k_min: 1e-6, k_max: 1e-2, n_radii: 5, n_angles: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CacheSpec {
    pub enabled: bool,
    /// overrides the environment variable and the default location
    pub dir: Option<PathBuf>,
}

impl Default for CacheSpec {
    fn default() -> Self {
        Self { enabled: true, dir: None }
    }
}

/// Optional diagnostic dump of `N(w)` on a polar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenDumpSpec {
    pub w_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub n: usize,
    pub potential: PotentialSpec,
    pub k_grid: KGridSpec,
    pub detectors: Vec<Detector>,
    pub tolerances: ToleranceSpec,
    pub locus: LocusSpec,
    pub xi_fit: XiFitSpec,
    pub parity: ParitySpec,
    pub transform: TransformSpec,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub cache: CacheSpec,
    /// worker threads for per-k parallelism; 0 picks the machine default
    pub threads: usize,
    pub green_dump: Option<GreenDumpSpec>,
    /// write assembled `F_0` and `F_n` as binary containers next to the outputs
    pub export_operators: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            curve: CurveSpec::default(),
            n: 128,
            potential: PotentialSpec::default(),
            k_grid: KGridSpec::default(),
            detectors: Vec::new(),
            tolerances: ToleranceSpec::default(),
            locus: LocusSpec::default(),
            xi_fit: XiFitSpec::default(),
            parity: ParitySpec::default(),
            transform: TransformSpec::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            cache: CacheSpec::default(),
            threads: 0,
            green_dump: None,
            export_operators: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> EpResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| EpError::Config(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> EpResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EpError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn check(&self) -> EpResult<()> {
        if self.n < 16 || self.n % 2 == 1 {
            return Err(EpError::Config(format!("n must be even and >= 16, got {}", self.n)));
        }
        let t = &self.tolerances;
        for (name, v) in [("tol_g", t.tol_g), ("tol_ker", t.tol_ker), ("tol_neg", t.tol_neg), ("pairing", t.pairing)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EpError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if !(t.s_singular >= 0.0) {
            return Err(EpError::Config(format!("tolerance s_singular must be >= 0, got {}", t.s_singular)));
        }
        let l = &self.locus;
        if !(l.eps_min > 0.0 && l.eps_max > l.eps_min) || l.n_eps < 2 || l.n_angles == 0 {
            return Err(EpError::Config("locus needs 0 < eps_min < eps_max, n_eps >= 2, n_angles >= 1".into()));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the compact serialization,
    /// with the fields that cannot change results (output location,
    /// thread count, cache settings) reset to their defaults.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output_dir = PathBuf::new();
        canon.threads = 0;
        canon.cache = CacheSpec::default();
        let text = serde_json::to_string(&canon).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
