use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{method} did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("state corruption: {0}")]
    StateCorruption(String),

    #[error("degenerate scalar reduction: |1/tau - kappa1| = {gap:.3e} below {threshold:.3e}")]
    DegenerateReduction { gap: f64, threshold: f64 },

    #[error(
        "auxiliary quadratic has no real root: discriminant {discriminant:.3e} (scale {scale:.3e})"
    )]
    NoRealRoot { discriminant: f64, scale: f64 },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("level nx={nx}: {source}")]
    Level {
        nx: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_level(self, nx: usize) -> Error {
        Error::Level {
            nx,
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
