use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle must be finite")]
    NonFinite,
    #[error("kappa must be 2pi or 4pi")]
    InvalidKappa,
    #[error("current speed must be less than vehicle speed (v_w = {v_w}, v = {v})")]
    CurrentTooStrong { v_w: f64, v: f64 },
    #[error("goal heading must lie in [0, 2pi)")]
    HeadingOutOfRange,
    #[error("no closed-form row for {path_type} with k = {k} and kappa = {kappa}")]
    InvalidRow { path_type: String, k: i32, kappa: String },
    #[error("current schedule is empty")]
    EmptySchedule,
    #[error("current schedule epochs must start at 0 and increase strictly")]
    BadSchedule,
    #[error("time must be non-negative")]
    NegativeTime,
    #[error("vehicle speed and turning radius must be positive")]
    BadVehicle,
    #[error("phi is undefined for zero current")]
    DegenerateCurrent,
    #[error("empty sample set")]
    NoSamples,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
