//! File formats: weather and load CSV ingestion, scenario configuration,
//! dispatch and summary output, SVG plots.

pub mod config;
mod output;
mod plot;
mod series;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, parse_config, ConfigError, ParsedConfig};
pub use output::{
    format_fixed, read_dispatch_csv, render_summary_table, summary_csv, write_dispatch_csv,
    write_summary, DispatchRow,
};
pub use plot::{render_plots, PLOT_FILES};
pub use series::{
    align_load, load_load_csv, load_weather_csv, read_load, read_weather, write_load_csv,
    write_weather_csv, LoadSample,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: step of {found} h differs from the series step of {expected} h")]
    NonUniformStep {
        line: u64,
        expected: f64,
        found: f64,
    },
    #[error("load timestamp mismatch at row {index}: weather {weather}, load {load}")]
    Misaligned {
        index: usize,
        weather: String,
        load: String,
    },
    #[error("weather has {weather} rows but load has {load}")]
    LengthMismatch { weather: usize, load: usize },
    #[error("{0}")]
    Format(String),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
