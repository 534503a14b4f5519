use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-finite sample at {point:?}")]
    NonFiniteSample { point: Vec<f64> },

    #[error("trajectory blew up after t = {t}")]
    BlowUp { t: f64, state: Vec<f64> },

    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("ansatz is singular at this point: {0}")]
    AnsatzSingular(String),

    #[error("poles collide at x = {x}")]
    PoleCollision { x: f64 },

    #[error("gauge term depends on y: defect {defect:e} at (y, t) = ({y}, {t})")]
    YDependentGauge { defect: f64, y: f64, t: f64 },

    #[error("degenerate denominator {value:e} at (y, t) = ({y}, {t})")]
    DegenerateDenominator { value: f64, y: f64, t: f64 },

    #[error("degenerate hessian W_yy = {value:e} at (y, t) = ({y}, {t})")]
    DegenerateHessian { value: f64, y: f64, t: f64 },

    #[error("alpha is not monotone in y on the bracket at t = {t}")]
    NonMonotone { t: f64 },

    #[error("negative radicand {value:e}")]
    NegativeRadicand { value: f64 },

    #[error("nu = 2 is a pole of the implicit relation")]
    PoleAtNu2,

    #[error("variant oracle is ambiguous: {passing} variants pass")]
    OracleAmbiguous { passing: usize },

    #[error("t = 0 is outside the automodel domain")]
    TimeZero,

    #[error("hyperbolicity lost at t = {t}: max alpha = {max_alpha}")]
    HyperbolicityLost { t: f64, max_alpha: f64 },

    #[error("time step {dt:e} exceeds the CFL bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
