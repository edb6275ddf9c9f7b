//! Command-line driver: single-instance tools and the resumable campaign.

pub mod campaign;
pub mod commands;
pub mod config;
pub mod record;
pub mod report;

pub use campaign::{run_campaign, select_instances};
pub use config::{CampaignConfig, FamilyKey, KSample};
pub use record::{InstanceRecord, Status};
pub use report::{emit_report, Report, ReportFormat, Summary};

/// Exit status for bad arguments or configuration.
pub const EXIT_USAGE: i32 = 64;
/// Malformed report or checkpoint data.
pub const EXIT_DATA: i32 = 65;
/// Internal pipeline failure.
pub const EXIT_SOFTWARE: i32 = 70;
/// File system failure.
pub const EXIT_IO: i32 = 74;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("{0}")]
    Pipeline(String),
    /// The reader of standard output went away.
    #[error("output closed")]
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_DATA,
            CliError::Pipeline(_) => EXIT_SOFTWARE,
            CliError::Io(_) => EXIT_IO,
            CliError::Closed => 0,
        }
    }
}
