use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CP_VIOLATION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;
pub const EXIT_CONFIG: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{}", parse_message(source_name, field.as_deref(), *line, *column, message))]
    Parse {
        source_name: String,
        field: Option<String>,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("unknown channel {name:?}; valid names: {}", valid.join(", "))]
    UnknownChannel {
        name: String,
        valid: Vec<&'static str>,
    },
    #[error("not completely positive: minimum Choi eigenvalue {min_eigenvalue:e}")]
    CpViolation { min_eigenvalue: f64 },
    #[error("channel is not a valid quantum operation")]
    CheckFailed,
    #[error("{0}")]
    Config(String),
}

fn parse_message(
    source: &str,
    field: Option<&str>,
    line: Option<usize>,
    column: Option<usize>,
    message: &str,
) -> String {
    let mut out = String::new();
    if !source.is_empty() {
        out.push_str(source);
    }
    if let (Some(l), Some(c)) = (line, column) {
        out.push_str(&format!(":{l}:{c}"));
    }
    if let Some(f) = field {
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(f);
    }
    if !out.is_empty() {
        out.push_str(": ");
    }
    out.push_str(message);
    out
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse {
            source_name: String::new(),
            field: Some(field.into()),
            line: None,
            column: None,
            message: message.into(),
        }
    }

    pub fn json(source: &str, e: &serde_json::Error) -> Self {
        let text = e.to_string();
        let message = match text.rfind(" at line ") {
            Some(i) => text[..i].to_string(),
            None => text,
        };
        CliError::Parse {
            source_name: source.to_string(),
            field: None,
            line: Some(e.line()),
            column: Some(e.column()),
            message,
        }
    }

    pub fn config(e: choiforge::Error) -> Self {
        match e {
            choiforge::Error::NotCompletelyPositive { min_eigenvalue } => {
                CliError::CpViolation { min_eigenvalue }
            }
            other => CliError::Config(other.to_string()),
        }
    }

    /// Attaches the file name to a parse error that does not have one yet.
    pub fn in_source(mut self, source: &str) -> Self {
        if let CliError::Parse { source_name, .. } = &mut self {
            if source_name.is_empty() {
                *source_name = source.to_string();
            }
        }
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        if let CliError::Parse { field: Some(f), .. } = &mut self {
            *f = format!("{prefix}.{f}");
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::UnknownChannel { .. } => EXIT_PARSE,
            CliError::CpViolation { .. } => EXIT_CP_VIOLATION,
            CliError::CheckFailed => EXIT_CHECK_FAILED,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::UnknownChannel { .. } => "unknown_channel",
            CliError::CpViolation { .. } => "cp_violation",
            CliError::CheckFailed => "check_failed",
            CliError::Config(_) => "config",
        }
    }

    pub fn diagnostic(&self) -> Diagnostic<'_> {
        let mut d = Diagnostic {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            file: None,
            field: None,
            line: None,
            column: None,
            min_eigenvalue: None,
            valid_names: None,
        };
        match self {
            CliError::Io { path, .. } => d.file = Some(path),
            CliError::Parse {
                source_name,
                field,
                line,
                column,
                ..
            } => {
                d.file = (!source_name.is_empty()).then_some(source_name.as_str());
                d.field = field.as_deref();
                d.line = *line;
                d.column = *column;
            }
            CliError::UnknownChannel { valid, .. } => d.valid_names = Some(valid),
            CliError::CpViolation { min_eigenvalue } => d.min_eigenvalue = Some(*min_eigenvalue),
            _ => {}
        }
        d
    }
}

impl From<choiforge::Error> for CliError {
    fn from(e: choiforge::Error) -> Self {
        match e {
            choiforge::Error::UnknownChannel { name, valid } => {
                CliError::UnknownChannel { name, valid }
            }
            other => CliError::config(other),
        }
    }
}

/// Written to the error stream, one JSON object per failure.
#[derive(Debug, Serialize)]
pub struct Diagnostic<'a> {
    pub error: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid_names: Option<&'a [&'static str]>,
}
