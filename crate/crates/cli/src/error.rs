use std::fmt;

/// Failure classes of a run, one per non-zero exit status.
#[derive(Debug)]
pub enum CliError {
    /// The verification suite ran and some check failed.
    VerifyFailed(String),
    /// Unreadable or invalid configuration, bad inputs or unwritable outputs.
    Config(String),
    /// A sampler or solver broke down numerically.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerifyFailed(m) => write!(f, "verification failed: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric breakdown: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<damix::Error> for CliError {
    fn from(e: damix::Error) -> Self {
        use damix::Error as E;
        match e {
            E::Breakdown(_) | E::NoConvergence(_) | E::NotSpd(_) | E::Domain(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
