use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis error: {0}")]
    Axis(String),

    /// Conditioning on an event whose probability does not exceed the
    /// normalization slack.
    #[error("cannot condition on {axis} = {value}: probability {mass:e} is null")]
    ZeroCondition {
        axis: String,
        value: String,
        mass: f64,
    },

    #[error("invalid table: {0}")]
    Table(String),

    #[error("invalid tolerance: {0}")]
    Tolerance(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("capacity exceeded: {what} needs {needed} entries, cap is {cap}")]
    Capacity {
        what: String,
        needed: u128,
        cap: usize,
    },
}
