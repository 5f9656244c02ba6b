use serde::Serialize;

/// Failure class, which fixes the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Usage,
    Parse,
    Validation,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Parse => 3,
            ErrorKind::Validation => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Parse,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.kind.exit_code()
    }

    /// `{"error":{"code":..,"kind":..,"message":..}}` on one line.
    pub fn to_json_line(&self) -> String {
        let one_line = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "code": self.exit_code(),
                "message": one_line,
            }
        })
        .to_string()
    }

    pub(crate) fn context(self, what: impl std::fmt::Display) -> Self {
        CliError {
            message: format!("{what}: {}", self.message),
            ..self
        }
    }
}

impl From<lightstage::Error> for CliError {
    fn from(e: lightstage::Error) -> Self {
        use lightstage::Error as E;
        match e {
            E::Hdr(_) | E::Image(_) | E::Json(_) | E::Io { .. } => CliError::parse(e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
