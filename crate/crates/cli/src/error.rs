use std::path::PathBuf;

use thiserror::Error;

/// Everything the driver can fail with, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration. `kind` is the name printed
    /// on stderr.
    #[error("{message}")]
    Config { kind: &'static str, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerical(#[from] slfd_core::Error),
    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            kind: "ConfigError",
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Config { kind, .. } => kind,
            CliError::Io { .. } => "IoError",
            CliError::Numerical(e) => e.name(),
            CliError::Validation { .. } => "ValidationFailure",
        }
    }

    /// 1 usage/config, 2 numerical, 3 validation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_group() {
        assert_eq!(CliError::config("x").exit_code(), 1);
        let num = CliError::from(slfd_core::Error::NormDegenerate { norm_sq: 0.0 });
        assert_eq!(num.exit_code(), 2);
        assert_eq!(num.name(), "NormDegenerate");
        assert_eq!(
            CliError::Validation {
                failed: 1,
                total: 3
            }
            .exit_code(),
            3
        );
    }
}
