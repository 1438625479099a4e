use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of eps(k): the bracket -nu*(gamma + ln|k|)/(2 pi) vanishes at |k| = {0}")]
    EpsilonPole(f64),

    /// The single-layer operator is numerically singular; `k` is on or near E_D.
    #[error("S_k is near-singular (sigma_min = {sigma_min:.3e}, norm = {norm:.3e}); k is near E_D")]
    NearSingularS { sigma_min: f64, norm: f64 },

    /// Zero is (close to) a Dirichlet eigenvalue of -Laplace - n in the domain.
    #[error("interior Dirichlet problem is near-singular (relative sigma = {relative_sigma:.3e}); dilate the domain slightly")]
    InteriorDirichletSingular { relative_sigma: f64 },

    #[error("near-singular {which} system (condition estimate {condition:.3e}); suspected set {suspect}")]
    NearSingularSystem { which: &'static str, condition: f64, suspect: &'static str },

    #[error("eigenvalue within tolerance of zero ({value:.3e}); negative-eigenvalue count unreliable")]
    NearExceptional { value: f64 },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("no sign change of the criterion eigenvalue along the ray arg k = {phi}")]
    NoCrossing { phi: f64 },

    #[error("eigenvalue tracking lost the branch: {0}")]
    BranchLost(String),

    #[error("the operation requires the unit disk; got curve `{0}`")]
    RequiresUnitDisk(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
