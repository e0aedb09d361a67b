use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed game file; `field` names the offending key.
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid mixed profile: {0}")]
    InvalidProfile(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration produced a non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("flowing samples of box {box_id}: {source}")]
    BoxFlow {
        box_id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("box budget exceeded: {boxes} boxes > {budget}; try kappa <= {suggested_kappa}")]
    Budget {
        boxes: u128,
        budget: usize,
        suggested_kappa: usize,
    },

    #[error("witness resolution needs {boxes} boxes > {budget}; try epsilon >= {suggested_epsilon}")]
    ResolutionBudget {
        boxes: u128,
        budget: usize,
        suggested_epsilon: f64,
    },

    #[error("subgame is not attracting: arc {from} -> {to} (player {player}) leaves it")]
    NotAttracting {
        from: String,
        to: String,
        player: usize,
    },

    #[error("trapping certificate: {0}")]
    Certificate(String),

    #[error("unknown catalog game `{name}`; available: {available}")]
    UnknownGame { name: String, available: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}
