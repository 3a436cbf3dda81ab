use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("price at index {index} is not strictly positive ({value})")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("series too short: {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("dates are not strictly increasing at index {index}")]
    NonMonotoneDates { index: usize },
    #[error("date labels ({labels}) do not match price count ({prices})")]
    LabelMismatch { labels: usize, prices: usize },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate series: every segment variance vanishes at scale {scale}")]
    DegenerateSeries { scale: usize },
}
