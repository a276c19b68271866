use std::path::Path;

use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(.file, *.line, .key, .message))]
    Config {
        file: Option<String>,
        line: usize,
        key: String,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error("hypotheses rejected: {0}")]
    Hypothesis(String),
    #[error("no convergence within n_max = {0} iterations")]
    NotConverged(usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] hpd_core::Error),
}

fn config_message(file: &Option<String>, line: usize, key: &str, message: &str) -> String {
    let mut s = file.as_ref().map_or(String::new(), |f| format!("{f}: "));
    if line > 0 {
        s.push_str(&format!("line {line}: "));
    }
    format!("{s}{key}: {message}")
}

impl CliError {
    pub fn config(line: usize, key: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            file: None,
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Prefixes a config diagnostic with the file it came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config {
                line, key, message, ..
            } => CliError::Config {
                file: Some(path.display().to_string()),
                line,
                key,
                message,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) => 1,
            CliError::Config { .. } | CliError::Io(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}
