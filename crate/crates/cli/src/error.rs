use thiserror::Error;

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, inconsistent inputs or a failed check (exit 1).
    #[error("{0}")]
    Validation(String),
    /// Anything that went wrong while running (exit 2).
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<dqcnn_core::training::TrainError> for CliError {
    fn from(e: dqcnn_core::training::TrainError) -> Self {
        use dqcnn_core::training::TrainError as T;
        match e {
            T::Shape { .. } | T::LabelOutOfRange { .. } | T::Config(_) | T::EmptyDataset => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<dqcnn_core::data::DataError> for CliError {
    fn from(e: dqcnn_core::data::DataError) -> Self {
        use dqcnn_core::data::DataError as D;
        match e {
            D::Io(_) | D::Csv(_) => CliError::Runtime(e.into()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<dqcnn_core::metrics::MetricsError> for CliError {
    fn from(e: dqcnn_core::metrics::MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<dqcnn_core::CutError> for CliError {
    fn from(e: dqcnn_core::CutError) -> Self {
        CliError::Runtime(e.into())
    }
}
