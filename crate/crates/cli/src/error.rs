//! Machine-readable error reporting: every failure leaves a JSON object on
//! stderr and a category-specific exit code.

use serde::Serialize;
use wavesel_core::config::ConfigError;
use wavesel_core::sim::SimError;

/// Top-level CLI failure.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (parse failure or field validation).
    Config {
        message: String,
        details: Vec<ConfigError>,
    },
    /// Filesystem problem.
    Io { path: String, message: String },
    /// Episode execution failure.
    Runtime { message: String },
    /// Replay found a stored log inconsistent with its own columns.
    Inconsistent { message: String },
}

impl CliError {
    pub fn config_msg(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn io(path: &std::path::Path, err: &std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Runtime { .. } => "runtime",
            CliError::Inconsistent { .. } => "inconsistent",
        }
    }

    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Runtime { .. } => 4,
            CliError::Inconsistent { .. } => 5,
        }
    }

    /// The JSON document emitted on stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'static str,
            message: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            path: Option<&'a str>,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            details: Vec<Detail<'a>>,
        }
        #[derive(Serialize)]
        struct Detail<'a> {
            field: &'a str,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let (message, path, details): (&str, Option<&str>, Vec<Detail>) = match self {
            CliError::Config { message, details } => (
                message,
                None,
                details
                    .iter()
                    .map(|d| Detail {
                        field: &d.field,
                        message: &d.message,
                    })
                    .collect(),
            ),
            CliError::Io { path, message } => (message, Some(path), Vec::new()),
            CliError::Runtime { message } | CliError::Inconsistent { message } => {
                (message, None, Vec::new())
            }
        };
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                message,
                path,
                details,
            },
        })
        .expect("error serialization cannot fail")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { message, details } => {
                write!(f, "{message}")?;
                for d in details {
                    write!(f, "\n  {d}")?;
                }
                Ok(())
            }
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Runtime { message } | CliError::Inconsistent { message } => {
                write!(f, "{message}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(details) => CliError::Config {
                message: "configuration rejected".into(),
                details,
            },
            other => CliError::Runtime {
                message: other.to_string(),
            },
        }
    }
}
