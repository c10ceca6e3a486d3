use alloc::string::String;

use crate::equilibria::EquilibriumName;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("group {group} violates the simplex constraint (sum {sum}, min {min})")]
    SimplexViolation { group: usize, sum: f64, min: f64 },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("only the (2,2,2) prism reduces to the cube")]
    UnsupportedShape,

    #[error("{name} is undefined at mu = {mu} (pole of its closed form)")]
    Domain { name: EquilibriumName, mu: f64 },

    #[error("no closed-form eigenvalues for {0}")]
    NoClosedForm(EquilibriumName),

    #[error("unknown equilibrium name `{0}`")]
    UnknownEquilibrium(String),

    #[error("point is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { residual: f64 },

    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("maximum number of steps exceeded at t = {t}")]
    MaxStepsExceeded { t: f64 },

    #[error("state left the cube by {overshoot:e} at t = {t}")]
    InvarianceViolation { t: f64, overshoot: f64 },

    #[error("initial point lies outside the cube")]
    OutsideCube,

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("mu = {mu} is outside the analysed range [{lo}, {hi}]")]
    ParameterOutOfRange { mu: f64, lo: f64, hi: f64 },

    #[error("mu = {mu} sits on the case boundary `{event}`")]
    CaseBoundary { mu: f64, event: &'static str },

    #[error("interior equilibrium is not a saddle-focus at mu = {mu}")]
    NotSaddleFocus { mu: f64 },

    #[error("found {found} section returns, wanted {wanted}")]
    InsufficientReturns { found: usize, wanted: usize },

    #[error("{0}")]
    Undetermined(&'static str),
}
