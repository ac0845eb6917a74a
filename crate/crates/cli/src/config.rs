//! Command-line arguments and the optional TOML config file.
//!
//! The config file has one table per subcommand using the long flag names
//! with `-` replaced by `_`:
//!
//! ```toml
//! [analyze]
//! input = "events.fcev"
//! x = 319
//! y = 239
//! mode = "interpolated"
//! noise_filter = true
//!
//! [image]
//! t_cut = 5.0
//! readout_interval_us = 10000
//! ```
//!
//! Flags given on the command line take precedence over file values.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use freqcam_core::period::Mode;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "freqcam",
    version,
    about = "Per-pixel flicker frequency from event streams"
)]
pub struct Cli {
    /// TOML file with per-subcommand defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an event file from a scenario description.
    Simulate(SimulateArgs),
    /// Measure the period of one pixel's signal.
    Analyze(AnalyzeArgs),
    /// Render frequency images at a fixed readout interval.
    Image(ImageArgs),
    /// Measure event-processing throughput.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventFormat {
    Binary,
    Csv,
}

impl EventFormat {
    /// CSV for `.csv` paths, binary otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => EventFormat::Csv,
            _ => EventFormat::Binary,
        }
    }
}

/// Fills every `None` field of `self` from `other`.
macro_rules! fill {
    ($self:ident, $other:ident; $($field:ident),+ $(,)?) => {
        $( if $self.$field.is_none() { $self.$field = $other.$field; } )+
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Scenario description (TOML).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output event file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Defaults to csv for .csv outputs, binary otherwise.
    #[arg(long, value_enum)]
    pub format: Option<EventFormat>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the scenario duration.
    #[arg(long)]
    pub duration_us: Option<u64>,
}

impl SimulateArgs {
    pub fn fill_from(&mut self, file: SimulateArgs) {
        fill!(self, file; scenario, output, format, seed, duration_us);
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    /// Event file (FCEV binary or CSV).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub x: Option<u16>,
    #[arg(long)]
    pub y: Option<u16>,
    /// baseline, baseline-off-on, filtered or interpolated [default: interpolated]
    #[arg(long)]
    pub mode: Option<String>,
    /// Filter cutoff period in events [default: 4 x the larger of the ON and
    /// OFF events per baseline period]
    #[arg(long)]
    pub t_cut: Option<f64>,
    /// Remove dark-noise OFF/ON pairs first.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub noise_filter: Option<bool>,
    /// Reference period for the deviation histogram [default: the mean]
    #[arg(long)]
    pub reference_us: Option<f64>,
    /// Per-sample CSV.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
    /// One-row summary CSV.
    #[arg(long)]
    pub summary_csv: Option<PathBuf>,
    /// Deviation histogram CSV.
    #[arg(long)]
    pub histogram_csv: Option<PathBuf>,
}

impl AnalyzeArgs {
    pub fn fill_from(&mut self, file: AnalyzeArgs) {
        fill!(self, file; input, x, y, mode, t_cut, noise_filter, reference_us,
              samples_csv, summary_csv, histogram_csv);
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode
            .as_deref()
            .unwrap_or("interpolated")
            .parse()
            .map_err(CliError::Config)
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Directory receiving frame_NNNNNN.ppm.
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
    /// [default: 5]
    #[arg(long)]
    pub t_cut: Option<f64>,
    /// [default: 10]
    #[arg(long)]
    pub freq_min_hz: Option<f64>,
    /// [default: 5000]
    #[arg(long)]
    pub freq_max_hz: Option<f64>,
    /// [default: 10000]
    #[arg(long)]
    pub readout_interval_us: Option<u64>,
    /// [default: 2]
    #[arg(long)]
    pub n_timeout: Option<u32>,
    /// [default: the readout interval]
    #[arg(long)]
    pub activity_window_us: Option<u64>,
    /// Keep emitting frames up to this time [default: last event]
    #[arg(long)]
    pub until_us: Option<u64>,
    /// Also write frame_NNNNNN.csv with the raw frequency map.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csv: Option<bool>,
    /// Update row bands on the rayon thread pool.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub parallel: Option<bool>,
    /// Rows per band in parallel mode [default: 16]
    #[arg(long)]
    pub band_rows: Option<u16>,
}

impl ImageArgs {
    pub fn fill_from(&mut self, file: ImageArgs) {
        fill!(self, file; input, output_dir, t_cut, freq_min_hz, freq_max_hz,
              readout_interval_us, n_timeout, activity_window_us, until_us, csv,
              parallel, band_rows);
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// [default: 640]
    #[arg(long)]
    pub width: Option<u16>,
    /// [default: 480]
    #[arg(long)]
    pub height: Option<u16>,
    /// Events per timed run [default: 100000000]
    #[arg(long)]
    pub events: Option<u64>,
    /// [default: 3]
    #[arg(long)]
    pub runs: Option<usize>,
    /// [default: 5]
    #[arg(long)]
    pub t_cut: Option<f64>,
    /// Working-set multiplier for the large-sensor case; 0 skips it [default: 4]
    #[arg(long)]
    pub area_scale: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl BenchArgs {
    pub fn fill_from(&mut self, file: BenchArgs) {
        fill!(self, file; width, height, events, runs, t_cut, area_scale, seed, csv);
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub simulate: SimulateArgs,
    pub analyze: AnalyzeArgs,
    pub image: ImageArgs,
    pub bench: BenchArgs,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

pub fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing --{flag}")))
}
