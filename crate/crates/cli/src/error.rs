use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or validation problem, located by JSON path.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("cannot read {path}: {source}")]
    ReadConfig { path: String, source: std::io::Error },

    #[error(transparent)]
    Numerical(#[from] relamp::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use relamp::Error as E;
        match self {
            CliError::Config { .. } | CliError::ReadConfig { .. } => 2,
            CliError::Numerical(E::Superluminal(_) | E::Domain(_) | E::Usage(_) | E::Data(_)) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
