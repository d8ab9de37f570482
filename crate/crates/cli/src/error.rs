use std::process::ExitCode;

use polya_zeros::convergence::ConvergenceError;
use polya_zeros::io::IoError;
use polya_zeros::{ClassifyError, JensenError, PolyError, RegionError, RootError, SumsError};
use serde_json::{json, Value};

/// Exit 2 carries a JSON body on stdout; exit 1 is an internal failure.
#[derive(Debug)]
pub enum CliError {
    Precondition(Value),
    Internal(String),
}

impl CliError {
    pub fn precondition(kind: &str, message: impl Into<String>) -> Self {
        CliError::Precondition(json!({ "kind": kind, "message": message.into() }))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError::Internal(message.into())
    }

    pub fn report(self) -> ExitCode {
        match self {
            CliError::Precondition(body) => {
                let text = serde_json::to_string_pretty(&json!({ "error": body })).expect("json value");
                println!("{text}");
                ExitCode::from(2)
            }
            CliError::Internal(message) => {
                eprintln!("polya-zeros: internal error: {message}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Parse { path, line, column, .. } => CliError::Precondition(json!({
                "kind": "parse",
                "path": path,
                "line": line,
                "column": column,
                "message": e.to_string(),
            })),
            IoError::Read { path, .. } => CliError::Precondition(json!({
                "kind": "read",
                "path": path,
                "message": e.to_string(),
            })),
        }
    }
}

impl From<RootError> for CliError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::DegreeZero => CliError::precondition("degree_zero", e.to_string()),
            RootError::NoConvergence(_) => CliError::internal(e.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::precondition("polynomial", e.to_string())
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        CliError::precondition("region", e.to_string())
    }
}

impl From<JensenError> for CliError {
    fn from(e: JensenError) -> Self {
        CliError::precondition("overflow", e.to_string())
    }
}

impl From<SumsError> for CliError {
    fn from(e: SumsError) -> Self {
        match e {
            SumsError::Roots(r) => r.into(),
            other => CliError::precondition("power_sums", other.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Roots { source, .. } => source.into(),
            other => CliError::precondition("classify", other.to_string()),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::HypothesisViolated {
                hypothesis,
                witness,
                report,
            } => CliError::Precondition(json!({
                "kind": "hypothesis_violated",
                "hypothesis": hypothesis,
                "witness": witness,
                "report": *report,
            })),
            ConvergenceError::Io(io) => io.into(),
            ConvergenceError::Roots(r) => r.into(),
            ConvergenceError::Jensen(j) => j.into(),
            other => CliError::precondition("convergence", other.to_string()),
        }
    }
}
