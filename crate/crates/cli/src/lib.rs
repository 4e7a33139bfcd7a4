//! Configuration, sweeps and report formatting behind the `cvleak` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}
