use thiserror::Error;

/// Failures of a scenario run, each mapped to a process exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) | Self::Schema(_) => 2,
            Self::Hypothesis(_) => 3,
            Self::Numerical(_) | Self::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse(_) => "parse",
            Self::Schema(_) => "schema",
            Self::Hypothesis(_) => "hypothesis",
            Self::Numerical(_) => "numerical",
            Self::Io(_) => "io",
        }
    }

    /// `kind=<kind> reason=<text>` on a single line.
    pub fn one_line(&self) -> String {
        let reason: String = self.to_string().chars().map(|c| if c == '\n' { ' ' } else { c }).collect();
        format!("kind={} reason={reason}", self.kind())
    }
}

impl From<qew_core::Error> for CliError {
    fn from(e: qew_core::Error) -> Self {
        use qew_core::Error as E;
        let msg = e.to_string();
        match e {
            E::HypothesisViolated(_) => Self::Hypothesis(msg),
            E::Domain(_) | E::Contract(_) | E::UnsupportedWeight(_) => Self::Schema(msg),
            E::NotPositiveDefinite { .. } | E::Integrator { .. } => Self::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
