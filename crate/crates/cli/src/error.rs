use std::fmt;

/// A command failure, tagged with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, manifest or input; nothing was computed. Exit code 2.
    Validation(String),
    /// I/O or pipeline failure. Exit code 1.
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Runtime(_) => 1,
        }
    }

    /// Classifies a core error and prefixes it with `what` (a flag name,
    /// case id or file).
    pub fn core(what: impl fmt::Display, err: hudsal::Error) -> Self {
        use hudsal::Error as E;
        let msg = format!("{what}: {err}");
        match err {
            E::Io { .. }
            | E::Decode { .. }
            | E::Encode(_)
            | E::NonFinite
            | E::DataLength { .. }
            | E::BackendContract(_)
            | E::Backend(_) => Self::Runtime(anyhow::Error::new(err).context(format!("{what}"))),
            _ => Self::Validation(msg),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(msg) => write!(f, "{msg}"),
            Self::Runtime(err) => write!(f, "{err:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        Self::Runtime(err)
    }
}

pub type CliResult<T> = Result<T, CliError>;
