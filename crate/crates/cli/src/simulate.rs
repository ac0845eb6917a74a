use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use freqcam_core::event::{write_binary, write_csv};
use freqcam_core::{Event, StreamHeader};
use freqcam_sim::Scenario;

use crate::config::{require, EventFormat, SimulateArgs};
use crate::error::CliError;

pub struct SimulateReport {
    pub header: StreamHeader,
    pub events: usize,
    pub bytes: u64,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    Scenario::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_events(
    path: &Path,
    format: EventFormat,
    header: &StreamHeader,
    events: &[Event],
) -> Result<u64, CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let sink = BufWriter::new(file);
    let written = match format {
        EventFormat::Binary => write_binary(header, events, sink),
        EventFormat::Csv => write_csv(header, events, sink),
    };
    written.map_err(|e| CliError::from_event(path, e))
}

pub fn run(args: &SimulateArgs) -> Result<SimulateReport, CliError> {
    let scenario_path = require(args.scenario.as_deref(), "scenario")?;
    let output = require(args.output.as_deref(), "output")?;
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(d) = args.duration_us {
        scenario.duration_us = d;
    }
    let (header, events) = scenario.generate()?;
    let format = args
        .format
        .unwrap_or_else(|| EventFormat::from_path(output));
    let bytes = write_events(output, format, &header, &events)?;
    Ok(SimulateReport {
        header,
        events: events.len(),
        bytes,
    })
}
