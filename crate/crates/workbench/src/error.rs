use crate::spec::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] qudit_bell::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for resource limits, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(qudit_bell::Error::Resource { .. }) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Usage(msg.into()))
}
