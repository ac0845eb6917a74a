use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use freqcam_core::event::validate_events;
use freqcam_core::image::{
    colorize, write_ppm, FreqImageConfig, FrequencyImage, FrequencyMap, Raster,
};
use freqcam_core::period::FilterParams;
use freqcam_core::{Event, StreamHeader};
use rayon::prelude::*;

use crate::analyze::read_event_file;
use crate::config::{require, ImageArgs};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageJob {
    pub t_cut: f64,
    pub config: FreqImageConfig,
    /// Last frame time is at least this.
    pub until_us: Option<u64>,
    pub parallel: bool,
    pub band_rows: u16,
}

impl Default for ImageJob {
    fn default() -> Self {
        ImageJob {
            t_cut: 5.0,
            config: FreqImageConfig::default(),
            until_us: None,
            parallel: false,
            band_rows: 16,
        }
    }
}

impl ImageJob {
    pub fn from_args(args: &ImageArgs) -> Self {
        let d = ImageJob::default();
        let readout_interval_us = args
            .readout_interval_us
            .unwrap_or(d.config.readout_interval_us);
        ImageJob {
            t_cut: args.t_cut.unwrap_or(d.t_cut),
            config: FreqImageConfig {
                freq_min_hz: args.freq_min_hz.unwrap_or(d.config.freq_min_hz),
                freq_max_hz: args.freq_max_hz.unwrap_or(d.config.freq_max_hz),
                readout_interval_us,
                n_timeout: args.n_timeout.unwrap_or(d.config.n_timeout),
                activity_window_us: args.activity_window_us.unwrap_or(readout_interval_us),
            },
            until_us: args.until_us,
            parallel: args.parallel.unwrap_or(false),
            band_rows: args.band_rows.unwrap_or(d.band_rows).max(1),
        }
    }

    /// Readout times: every interval from one interval after zero until the
    /// last event (or `until_us`) has been covered.
    pub fn frame_times(&self, events: &[Event]) -> impl Iterator<Item = u64> {
        let interval = self.config.readout_interval_us;
        let last = events
            .last()
            .map_or(0, |e| e.t_us)
            .max(self.until_us.unwrap_or(0));
        let frames = last / interval + 1;
        (1..=frames).map(move |k| k * interval)
    }
}

pub struct Frame<'a> {
    pub index: usize,
    pub t_us: u64,
    pub image: &'a FrequencyImage,
    pub raster: &'a Raster,
}

/// Feeds all events, reading out a frame at every readout time. Events with
/// timestamps before a readout time are applied before it.
pub fn render_frames(
    header: StreamHeader,
    events: &[Event],
    job: &ImageJob,
    mut on_frame: impl FnMut(Frame<'_>) -> Result<(), CliError>,
) -> Result<usize, CliError> {
    job.config.validate()?;
    validate_events(&header, events).map_err(|e| CliError::Data(e.to_string()))?;
    let params = FilterParams::from_t_cut(job.t_cut)?;
    let mut map = FrequencyMap::new(header, &params);
    let mut next = 0;
    let mut count = 0;
    for (index, now) in job.frame_times(events).enumerate() {
        let end = next + events[next..].partition_point(|e| e.t_us < now);
        let batch = &events[next..end];
        if job.parallel {
            map.row_bands(job.band_rows)
                .par_iter_mut()
                .for_each(|band| {
                    for e in batch {
                        band.update(e);
                    }
                });
        } else {
            for e in batch {
                map.update(e)?;
            }
        }
        next = end;
        let image = map.readout(now, &job.config);
        let raster = colorize(&image, &job.config);
        on_frame(Frame {
            index,
            t_us: now,
            image: &image,
            raster: &raster,
        })?;
        count += 1;
    }
    Ok(count)
}

pub fn frame_path(dir: &Path, index: usize, ext: &str) -> PathBuf {
    dir.join(format!("frame_{index:06}.{ext}"))
}

pub fn write_frame(dir: &Path, frame: &Frame<'_>, csv: bool) -> Result<(), CliError> {
    let path = frame_path(dir, frame.index, "ppm");
    let file = File::create(&path).map_err(CliError::io(&path))?;
    write_ppm(frame.raster, BufWriter::new(file)).map_err(CliError::io(&path))?;
    if csv {
        let path = frame_path(dir, frame.index, "csv");
        let file = File::create(&path).map_err(CliError::io(&path))?;
        frame.image.write_csv(file).map_err(CliError::io(&path))?;
    }
    Ok(())
}

pub fn run(args: &ImageArgs) -> Result<usize, CliError> {
    let input = require(args.input.as_deref(), "input")?;
    let dir = require(args.output_dir.as_deref(), "output-dir")?;
    let job = ImageJob::from_args(args);
    let (header, events) = read_event_file(input)?;
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let csv = args.csv.unwrap_or(false);
    render_frames(header, &events, &job, |frame| write_frame(dir, &frame, csv))
}
