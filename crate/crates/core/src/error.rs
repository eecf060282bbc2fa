use thiserror::Error;

/// Errors raised by profile integration, functionals, shooting and export.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial height z0 must be non-zero")]
    DegenerateInitialHeight,

    #[error("initial height z0 = {z0} lies in (-1/c0, 0); the boundary condition cannot hold there")]
    ForbiddenInitialHeight { z0: f64 },

    #[error("singular evaluation at r = {r}, z = {z}")]
    SingularEvaluation { r: f64, z: f64 },

    #[error("arc length exceeded sigma_max = {sigma_max} before reaching z = 0")]
    SigmaMaxExceeded { sigma_max: f64 },

    #[error("profile returned to the axis at sigma = {sigma} (z = {z})")]
    AxisReturn { sigma: f64, z: f64 },

    #[error("integrator step failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("profile did not reach the boundary plane")]
    NoBoundaryData,

    #[error("surface is not admissible: {0}")]
    NotAdmissible(String),

    #[error("c0 = 0: every initial height is an equilibrium, residual does not select roots")]
    C0Zero,

    #[error("empty scan range [{z_min}, {z_max}]")]
    EmptyRange { z_min: f64, z_max: f64 },

    #[error("bracket lost: residual has equal signs at z0 = {z0}")]
    LostBracket { z0: f64 },

    #[error("budget exhausted: found {found} of {requested} equilibria below z0 = {z_max}")]
    BudgetExceeded {
        found: usize,
        requested: usize,
        z_max: f64,
    },

    #[error("evaluation window is empty")]
    WindowEmpty,

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("bending modulus must be positive, got {0}")]
    NonPositiveModulus(f64),

    #[error("degenerate mesh resolution: n_theta = {n_theta}, n_sigma = {n_sigma}")]
    DegenerateResolution { n_theta: usize, n_sigma: usize },

    #[error("point (0, 0, -1) is the singular point of the ball-model map")]
    PointAtSouthPoleSingularity,

    #[error("I/O failure on {path}: {cause}")]
    IoFailure { path: String, cause: String },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the inputs rather than by a numerical stage.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::DegenerateInitialHeight
                | Error::ForbiddenInitialHeight { .. }
                | Error::C0Zero
                | Error::EmptyRange { .. }
                | Error::NonPositiveRadius(_)
                | Error::NonPositiveModulus(_)
                | Error::DegenerateResolution { .. }
                | Error::Parse(_)
        )
    }
}
