use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    /// Non-uniform, too short or otherwise unusable sampling grid.
    #[error("grid error: {0}")]
    Grid(String),
    /// A parameter outside the admissible region.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),
    /// Profile support comes too close to the grid boundary for spectral work.
    #[error("insufficient zero padding: need {required:.3e} on each side, found left {left:.3e}, right {right:.3e}")]
    Padding { required: f64, left: f64, right: f64 },
    /// A numerical routine failed to reach its accuracy target.
    #[error("numerics error: {0}")]
    Numerics(String),
    /// A root finder or minimizer failed.
    #[error("solver error: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
