use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree overflow: {left} + {right} exceeds 6")]
    DegreeOverflow { left: usize, right: usize },

    #[error("unsupported form degree {0} (expected {1})")]
    UnsupportedDegree(usize, &'static str),

    #[error("derivative order {0} is not supported (1..=3)")]
    UnsupportedOrder(usize),

    #[error("perturbation amplitude {0} outside (0, 0.5)")]
    DeltaOutOfRange(f64),

    #[error("sphere radius must be positive, got {0}")]
    InvalidRadius(f64),

    #[error("degenerate frame draw after {0} attempts")]
    DegenerateFrame(usize),

    #[error("frame is not adapted: {0}")]
    FrameNotAdapted(String),

    #[error("chart failure at point: {0}")]
    Chart(String),

    #[error("curvature symmetry residual {residual:.3e} exceeds {limit:.3e} ({which})")]
    CurvatureSymmetry {
        which: &'static str,
        residual: f64,
        limit: f64,
    },

    #[error("all (X, Y) pairs were degenerate while estimating mu")]
    AllPairsDegenerate,

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unknown backend `{0}`")]
    UnknownBackend(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
