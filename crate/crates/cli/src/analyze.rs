use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use freqcam_core::event::read_events;
use freqcam_core::noise::NoiseFilterParams;
use freqcam_core::period::{period_stream, recommend_tcut, FilterParams, Mode, PeriodSample};
use freqcam_core::{Event, Polarity, StreamHeader};

use crate::config::{require, AnalyzeArgs};
use crate::error::CliError;
use crate::stats::{write_histogram, write_samples, write_summary, PeriodStats};

pub struct Analysis {
    pub mode: Mode,
    /// Cutoff used by the filtered modes.
    pub t_cut: Option<f64>,
    pub events: usize,
    pub samples: Vec<PeriodSample>,
    pub stats: PeriodStats,
}

pub fn read_event_file(path: &Path) -> Result<(StreamHeader, Vec<Event>), CliError> {
    let file = File::open(path).map_err(CliError::io(path))?;
    read_events(BufReader::new(file)).map_err(|e| CliError::from_event(path, e))
}

pub fn select_pixel(events: &[Event], x: u16, y: u16) -> Vec<Event> {
    events
        .iter()
        .filter(|e| e.x == x && e.y == y)
        .copied()
        .collect()
}

/// Cutoff period from the ON and OFF counts per ON-to-OFF transition
/// interval.
pub fn estimate_tcut(events: &[Event]) -> Result<f64, CliError> {
    let transitions = events
        .windows(2)
        .filter(|w| w[0].polarity == Polarity::On && w[1].polarity == Polarity::Off)
        .count() as u64;
    if transitions == 0 {
        return Err(CliError::Config(
            "no ON to OFF transitions to infer a cutoff from; pass --t-cut".into(),
        ));
    }
    let on = events.iter().filter(|e| e.polarity == Polarity::On).count() as u64;
    let off = events.len() as u64 - on;
    let t_cut = recommend_tcut(on.div_ceil(transitions), off.div_ceil(transitions))?;
    Ok(t_cut as f64)
}

pub fn analyze(
    events: &[Event],
    mode: Mode,
    t_cut: Option<f64>,
    noise_filter: bool,
    reference_us: Option<f64>,
) -> Result<Analysis, CliError> {
    let filtered = matches!(mode, Mode::Filtered | Mode::Interpolated);
    let (params, t_cut) = if !filtered || events.is_empty() {
        // the baseline modes ignore the filter
        (FilterParams::from_t_cut(8.0)?, t_cut.filter(|_| filtered))
    } else {
        let t = match t_cut {
            Some(t) => t,
            None => estimate_tcut(events)?,
        };
        (FilterParams::from_t_cut(t)?, Some(t))
    };
    let nf = NoiseFilterParams::default();
    let samples = period_stream(events, &params, mode, noise_filter.then_some(&nf))?;
    let stats = PeriodStats::from_samples(&samples, reference_us);
    Ok(Analysis {
        mode,
        t_cut,
        events: events.len(),
        samples,
        stats,
    })
}

fn write_csv_file(path: &Path, f: impl FnOnce(File) -> csv::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    f(file).map_err(|e| CliError::Io {
        path: path.to_owned(),
        source: e.into(),
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<Analysis, CliError> {
    let input = require(args.input.as_deref(), "input")?;
    let x = require(args.x, "x")?;
    let y = require(args.y, "y")?;
    let mode = args.mode()?;
    let (header, events) = read_event_file(input)?;
    if !header.contains(x, y) {
        return Err(CliError::Config(format!(
            "pixel ({x}, {y}) outside {}x{} sensor",
            header.width, header.height
        )));
    }
    let pixel = select_pixel(&events, x, y);
    let analysis = analyze(
        &pixel,
        mode,
        args.t_cut,
        args.noise_filter.unwrap_or(false),
        args.reference_us,
    )?;

    if let Some(path) = &args.samples_csv {
        write_csv_file(path, |f| {
            write_samples(&analysis.samples, &analysis.stats, f)
        })?;
    }
    if let Some(path) = &args.summary_csv {
        write_csv_file(path, |f| {
            write_summary(&analysis.stats, mode.name(), analysis.t_cut, f)
        })?;
    }
    if let Some(path) = &args.histogram_csv {
        write_csv_file(path, |f| write_histogram(&analysis.stats, f))?;
    }
    Ok(analysis)
}
