use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{function}({order}, {x}) overflows double precision")]
    Overflow {
        function: &'static str,
        order: u32,
        x: f64,
    },

    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    InvalidBracket { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("sign change at {x} is a pole, not a root (|f| = {magnitude})")]
    Pole { x: f64, magnitude: f64 },

    #[error("no convergence after {iterations} iterations, last bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("degenerate least-squares design: {0}")]
    DegenerateDesign(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("energy window [{lo}, {hi}] touches the essential spectrum threshold {threshold}")]
    EssentialSpectrum { lo: f64, hi: f64, threshold: f64 },

    #[error("found {found} of {requested} eigenvalues scanning [{lo}, {hi}]")]
    BracketExhausted {
        requested: usize,
        found: usize,
        lo: f64,
        hi: f64,
    },

    #[error("eigenspace input is not orthonormal (Gram defect {defect:e})")]
    NotOrthonormal { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
