use std::path::PathBuf;

use thiserror::Error;

pub const FETCH_HINT: &str = "run `bench datasets fetch` (or `python3 scripts/fetch_datasets.py`) to download it";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing data: {0}; {FETCH_HINT}")]
    MissingData(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 1 config, 2 missing data, 3 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::MissingData(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<swarmclust::Error> for CliError {
    fn from(e: swarmclust::Error) -> Self {
        use swarmclust::Error as E;
        match e {
            E::MissingFile(path) => CliError::MissingData(format!("{} not found", path.display())),
            E::InvalidConfig(_) | E::Registry(_) | E::InvalidFuzzifier(_) | E::InvalidClusterCount { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
