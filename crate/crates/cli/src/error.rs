use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use freqcam_core::image::ImageError;
use freqcam_core::noise::OrderingError;
use freqcam_core::period::DesignError;
use freqcam_core::EventError;
use freqcam_sim::SimError;
use thiserror::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub const CONFIG_EXIT: u8 = 2;
    pub const DATA_EXIT: u8 = 3;
    pub const IO_EXIT: u8 = 4;

    pub fn io(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => Self::CONFIG_EXIT,
            CliError::Data(_) => Self::DATA_EXIT,
            CliError::Io { .. } => Self::IO_EXIT,
        })
    }

    /// Attaches the file an event reader was working on.
    pub fn from_event(path: &Path, e: EventError) -> CliError {
        match e {
            EventError::Io(source) => CliError::Io {
                path: path.to_owned(),
                source,
            },
            other => CliError::Data(format!("{}: {other}", path.display())),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OrderingError> for CliError {
    fn from(e: OrderingError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        match e {
            ImageError::Config(_) => CliError::Config(e.to_string()),
            ImageError::OutOfBounds { .. } => CliError::Data(e.to_string()),
        }
    }
}
