use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series for {quantity} did not converge after {terms} terms (partial value {partial})")]
    Convergence {
        quantity: &'static str,
        terms: usize,
        partial: f64,
    },

    #[error("closed form lost precision: estimated relative error {estimated:e} at {bits} bits exceeds {tol:e}")]
    PrecisionLoss { estimated: f64, bits: usize, tol: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("first-passage recursion left unabsorbed mass {mass:e} after {steps} steps")]
    Residual { mass: f64, steps: usize },

    #[error("occupancy methods disagree for {quantity}: {first} vs {second}")]
    Disagreement {
        quantity: &'static str,
        first: f64,
        second: f64,
    },

    #[error("invalid distribution: {0}")]
    Distribution(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad arguments.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::Domain(_) | Error::Distribution(_))
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Error::Domain(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
