use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Solver(#[from] lhsphere::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lhsphere::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(
                E::InvalidMedium(_)
                | E::InvalidParameter(_)
                | E::Domain(_)
                | E::MixedHandedness
                | E::DivergentMaxOrder(_),
            ) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
