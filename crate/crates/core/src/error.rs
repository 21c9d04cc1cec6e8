use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("warp c(x) is not positive at x = {x}")]
    NonPositiveWarp { x: f64 },
    #[error("warp violates c(0)=1, c'(0)=0: c(0)-1 = {c0}, c'(0) = {c1}")]
    BadNormalization { c0: f64, c1: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature unresolved: relative change {change:.3e} under refinement")]
    QuadratureUnresolved { change: f64 },
    #[error("sign changes of the matching determinant cannot be isolated near mu = {mu}")]
    RootBracketingFailed { mu: f64 },
    #[error("data support reaches x = {x_lo:.3e}, below the corner guard {guard:.3e}")]
    SupportTouchesCorner { x_lo: f64, guard: f64 },
    #[error("data do not vanish near the cap (relative size {ratio:.3e})")]
    SupportTouchesCap { ratio: f64 },
    #[error("non-finite value in the characteristic march at column {column}")]
    NonFiniteField { column: usize },
    #[error("reconstructed diagonal violates parity by {deviation:.3e} (relative)")]
    ParityViolation { deviation: f64 },
    #[error("point (t = {t}, x = {x}) lies outside the computed region")]
    OutsideTriangle { t: f64, x: f64 },
    #[error("s-window up to {s_max} exceeds the characteristic grid limit {limit}")]
    WindowExceedsTriangle { s_max: f64, limit: f64 },
    #[error("field is not in the range: round-trip residual {residual:.3e} exceeds {threshold:.3e}")]
    NotInRange { residual: f64, threshold: f64 },
    #[error("field has not decayed at the window edge (ratio {ratio:.3e})")]
    TailNotDecayed { ratio: f64 },
    #[error("differencing unresolved: relative change {change:.3e} under step halving")]
    DifferencingUnresolved { change: f64 },
    #[error("asymptotic fit ill-conditioned (condition number {cond:.3e})")]
    FitIllConditioned { cond: f64 },
    #[error("probe content too small on the whole lambda grid for mode {k:?}")]
    ProbeDeficient { k: [i32; 2] },
    #[error("jump fit residual {residual:.3e} exceeds {threshold:.3e}")]
    FitResidualHigh { residual: f64, threshold: f64 },
    #[error("clean fit window has {available} samples, need at least {needed}")]
    WindowTooShort { available: usize, needed: usize },
    #[error("probe-to-probe profile spread {spread:.3e} exceeds {threshold:.3e}")]
    InconsistentProbes { spread: f64, threshold: f64 },
    #[error("metric has point spectrum {mu:?}; inverse runs require an eigenvalue-free model")]
    PointSpectrum { mu: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;
