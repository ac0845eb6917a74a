//! Event throughput measurement on preloaded, synthetic event buffers.

use std::fs::File;
use std::hint::black_box;
use std::mem::size_of;
use std::time::{Duration, Instant};

use freqcam_core::image::{FrequencyMap, PixelState};
use freqcam_core::period::{Coefficients, FilterParams, FilterState};
use freqcam_core::{Event, Polarity, StreamHeader};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::BenchArgs;
use crate::error::CliError;

/// Upper bound on the preloaded buffer; longer runs replay it with shifted
/// timestamps.
const MAX_BUFFER: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub width: u16,
    pub height: u16,
    pub events: u64,
    pub runs: usize,
    pub t_cut: f64,
    pub area_scale: u32,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            width: 640,
            height: 480,
            events: 100_000_000,
            runs: 3,
            t_cut: 5.0,
            area_scale: 4,
            seed: 1,
        }
    }
}

impl BenchConfig {
    pub fn from_args(args: &BenchArgs) -> Self {
        let d = BenchConfig::default();
        BenchConfig {
            width: args.width.unwrap_or(d.width),
            height: args.height.unwrap_or(d.height),
            events: args.events.unwrap_or(d.events),
            runs: args.runs.unwrap_or(d.runs).max(1),
            t_cut: args.t_cut.unwrap_or(d.t_cut),
            area_scale: args.area_scale.unwrap_or(d.area_scale),
            seed: args.seed.unwrap_or(d.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub name: &'static str,
    pub width: u16,
    pub height: u16,
    pub events: u64,
    pub state_bytes: usize,
    pub runs_mevs: Vec<f64>,
}

impl BenchCase {
    pub fn median_mevs(&self) -> f64 {
        let mut r = self.runs_mevs.clone();
        r.sort_by(f64::total_cmp);
        let mid = r.len() / 2;
        if r.len() % 2 == 1 {
            r[mid]
        } else {
            0.5 * (r[mid - 1] + r[mid])
        }
    }
}

/// Uniformly random pixels, each seeing runs of 8 ON then 8 OFF events, 16
/// events per microsecond.
pub fn workload(header: &StreamHeader, len: usize, seed: u64) -> Vec<Event> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![0u32; header.pixel_count()];
    (0..len)
        .map(|k| {
            let x = rng.gen_range(0..header.width);
            let y = rng.gen_range(0..header.height);
            let n = &mut seen[header.index(x, y)];
            let polarity = if (*n / 8).is_multiple_of(2) {
                Polarity::On
            } else {
                Polarity::Off
            };
            *n += 1;
            Event::new((k >> 4) as u64, x, y, polarity)
        })
        .collect()
}

/// Replays `buf` until `total` events have been fed, shifting timestamps on
/// each pass so time keeps increasing.
fn replay(buf: &[Event], total: u64, mut feed: impl FnMut(&Event)) {
    let span = buf.last().map_or(1, |e| e.t_us + 1);
    let mut done = 0u64;
    let mut offset = 0u64;
    while done < total {
        let n = (total - done).min(buf.len() as u64) as usize;
        for e in &buf[..n] {
            feed(&Event {
                t_us: e.t_us + offset,
                ..*e
            });
        }
        done += n as u64;
        offset += span;
    }
}

fn mevs(events: u64, elapsed: Duration) -> f64 {
    events as f64 / elapsed.as_secs_f64() / 1e6
}

/// Full per-event imaging update: bounds check, filter, crossing detection
/// and period bookkeeping.
pub fn time_full_pipeline(
    header: StreamHeader,
    params: &FilterParams,
    buf: &[Event],
    events: u64,
) -> f64 {
    let mut map = FrequencyMap::new(header, params);
    // warm-up pass, untimed
    replay(buf, buf.len() as u64, |e| {
        map.update(e).expect("workload is in bounds")
    });
    let start = Instant::now();
    replay(buf, events, |e| {
        map.update(e).expect("workload is in bounds")
    });
    let elapsed = start.elapsed();
    black_box(map.pixels());
    mevs(events, elapsed)
}

/// The bare recursion for one pixel whose state stays in registers.
pub fn time_filter_hot_pixel(params: &FilterParams, buf: &[Event], events: u64) -> f64 {
    let coef = Coefficients::<f32>::new(params);
    let polarities: Vec<i8> = buf.iter().map(|e| e.polarity.as_i8()).collect();
    let mut state = FilterState::<f32>::default();
    let run = |state: &mut FilterState<f32>, total: u64| {
        let mut done = 0u64;
        while done < total {
            let n = (total - done).min(polarities.len() as u64) as usize;
            for &p in &polarities[..n] {
                state.update(&coef, black_box(p));
            }
            done += n as u64;
        }
    };
    run(&mut state, polarities.len() as u64);
    let start = Instant::now();
    run(&mut state, events);
    let elapsed = start.elapsed();
    black_box(&state);
    mevs(events, elapsed)
}

pub fn run_bench(
    cfg: &BenchConfig,
    mut progress: impl FnMut(&str),
) -> Result<Vec<BenchCase>, CliError> {
    if cfg.events == 0 {
        return Err(CliError::Config("--events must be positive".into()));
    }
    let params = FilterParams::from_t_cut(cfg.t_cut)?;
    let header =
        StreamHeader::new(cfg.width, cfg.height).map_err(|e| CliError::Config(e.to_string()))?;
    let len = (cfg.events as usize).min(MAX_BUFFER);
    let buf = workload(&header, len, cfg.seed);

    let mut cases = Vec::new();
    let mut case = |name: &'static str, h: StreamHeader, timed: &mut dyn FnMut() -> f64| {
        let mut runs = Vec::with_capacity(cfg.runs);
        for i in 0..cfg.runs {
            let r = timed();
            progress(&format!("{name} run {}/{}: {r:.1} Mev/s", i + 1, cfg.runs));
            runs.push(r);
        }
        cases.push(BenchCase {
            name,
            width: h.width,
            height: h.height,
            events: cfg.events,
            state_bytes: size_of::<PixelState>() * h.pixel_count(),
            runs_mevs: runs,
        });
    };

    case(
        "filter_hot_pixel",
        StreamHeader::new(1, 1).unwrap(),
        &mut || time_filter_hot_pixel(&params, &buf, cfg.events),
    );
    case("full_pipeline", header, &mut || {
        time_full_pipeline(header, &params, &buf, cfg.events)
    });

    if cfg.area_scale > 1 {
        let side = (cfg.area_scale as f64).sqrt();
        let big = StreamHeader::new(
            ((cfg.width as f64 * side).round() as u32).min(u16::MAX as u32) as u16,
            ((cfg.height as f64 * side).round() as u32).min(u16::MAX as u32) as u16,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let big_buf = workload(&big, len, cfg.seed);
        case("full_pipeline_large", big, &mut || {
            time_full_pipeline(big, &params, &big_buf, cfg.events)
        });
    }
    Ok(cases)
}

pub const CSV_HEADER: [&str; 7] = [
    "case",
    "width",
    "height",
    "events",
    "state_bytes",
    "runs_mevs",
    "median_mevs",
];

pub fn write_report(cases: &[BenchCase], sink: File) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for c in cases {
        let runs: Vec<String> = c.runs_mevs.iter().map(|r| format!("{r:.3}")).collect();
        w.write_record([
            c.name.to_string(),
            c.width.to_string(),
            c.height.to_string(),
            c.events.to_string(),
            c.state_bytes.to_string(),
            runs.join(" "),
            format!("{:.3}", c.median_mevs()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
