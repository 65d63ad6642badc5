use thiserror::Error;

/// Errors raised across the algebra, topology and approximation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains a non-finite coefficient")]
    NonFinite,

    #[error("element is not in the quadratic cone (non-real residual {residual:.3e})")]
    NotInCone { residual: f64 },

    #[error("element is not a square root of -1 in the quadratic cone")]
    NotRootSphere,

    #[error("point ({alpha}, {beta}) lies outside the domain of the stem function")]
    OutOfDomain { alpha: f64, beta: f64 },

    #[error("A^c A is not real (largest non-real coefficient {residual:.3e})")]
    NotRealDenominator { residual: f64 },

    #[error("A^c A vanishes identically")]
    ZeroDenominator,

    #[error("completion basis violates the anticommutation relations (residual {residual:.3e})")]
    BadBasis { residual: f64 },

    #[error("resolution {resolution} is below the minimum of {minimum} cells per unit")]
    ResolutionTooLow { resolution: f64, minimum: f64 },

    #[error("window is empty")]
    EmptyWindow,

    #[error("shape {index} is {cells:.2} cells thick, below the 3-cell minimum")]
    FeatureTooThin { index: usize, cells: f64 },

    #[error("invalid domain spec at {pointer}: {reason}")]
    InvalidSpec { pointer: String, reason: String },

    #[error("grids do not share window and resolution")]
    GridMismatch,

    #[error("D is not contained in D1: cell at ({x}, {y}) belongs to D only")]
    NotNested { x: f64, y: f64 },

    #[error("parity violation in component {component}: b1 = {b1}, r = {r}")]
    ParityViolation {
        component: usize,
        b1: usize,
        r: usize,
    },

    #[error(
        "degree {degree} needs {unknowns} unknowns but only {equations} equations are available"
    )]
    DegreeTooLargeForSamples {
        degree: usize,
        unknowns: usize,
        equations: usize,
    },

    #[error("prescribed pole ({alpha}, {beta}) lies inside the domain")]
    PoleInsideDomain { alpha: f64, beta: f64 },

    #[error("compact sample point ({x}, {y}) is not well inside the domain")]
    SampleOutsideDomain { x: f64, y: f64 },

    #[error("linear system is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
