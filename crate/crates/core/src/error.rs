use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight {coordinate}_{index} = {value} is outside [0, 1]")]
    InvalidWeight {
        index: usize,
        coordinate: &'static str,
        value: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration of generation {requested} exceeds the limit of {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("every period element has |p - q| = 1; the marginal cycle is not unique")]
    DegeneratePeriod,

    #[error("weights are not eventually periodic")]
    NotPeriodic,

    #[error("regime {regime} at stage {stage} is inseparable: both measures have p0 = {p0}")]
    Inseparable { stage: usize, regime: u8, p0: f64 },

    #[error("no block length up to {limit} satisfies the stage {stage} conditions")]
    SearchExhausted { stage: usize, limit: u64 },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
