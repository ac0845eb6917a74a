//! Full-sensor frequency imaging.
//!
//! Every pixel runs the reconstruction filter and records the times of its
//! most recent zero crossings in both directions. A period is available as
//! soon as one pair of opposite-sign crossings has been seen (twice the half
//! period) and is replaced by a full-period measurement once two crossings of
//! the same sign exist. Stale estimates are only invalidated when an image is
//! read out, so the update path keeps no timers.

use std::io::{self, Write};
use std::sync::OnceLock;

use thiserror::Error;

use crate::event::{Event, StreamHeader};
use crate::period::{classify, fused, Coefficients, CrossingDirection, FilterParams};

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("event at ({x}, {y}) outside {width}x{height} sensor")]
    OutOfBounds {
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("invalid image configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqImageConfig {
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    pub readout_interval_us: u64,
    /// Number of estimated periods without events before a pixel's estimate
    /// is dropped.
    pub n_timeout: u32,
    /// A pixel without a valid frequency is drawn gray if it had events this
    /// recently, black otherwise.
    pub activity_window_us: u64,
}

impl Default for FreqImageConfig {
    fn default() -> Self {
        FreqImageConfig {
            freq_min_hz: 10.0,
            freq_max_hz: 5000.0,
            readout_interval_us: 10_000,
            n_timeout: 2,
            activity_window_us: 10_000,
        }
    }
}

impl FreqImageConfig {
    pub fn validate(&self) -> Result<(), ImageError> {
        if !(self.freq_min_hz > 0.0 && self.freq_min_hz < self.freq_max_hz) {
            return Err(ImageError::Config(format!(
                "need 0 < freq_min ({}) < freq_max ({})",
                self.freq_min_hz, self.freq_max_hz
            )));
        }
        if self.n_timeout < 1 {
            return Err(ImageError::Config("n_timeout must be at least 1".into()));
        }
        if self.readout_interval_us == 0 {
            return Err(ImageError::Config(
                "readout interval must be positive".into(),
            ));
        }
        Ok(())
    }

    fn in_band(&self, f: f64) -> bool {
        f >= self.freq_min_hz && f <= self.freq_max_hz
    }
}

const SEEN: u8 = 1;
const HAS_ABOVE: u8 = 1 << 1;
const HAS_BELOW: u8 = 1 << 2;
const HALF_PERIOD: u8 = 1 << 3;

/// Per-pixel detection state, 28 bytes.
///
/// | bytes | field                                         |
/// |-------|-----------------------------------------------|
/// | 0..8  | lagged reconstruction `l1`, `l2` (f32)        |
/// | 8..16 | last crossing from above / below (u32 us)     |
/// | 16..20| period estimate in us (f32, 0 = none)         |
/// | 20..24| time of last event (u32 us)                   |
/// | 24    | lagged polarity (i8, 0 before first event)    |
/// | 25    | flags                                         |
/// | 26..28| padding                                       |
///
/// Times are stored as the low 32 bits of the microsecond timestamp and
/// compared with wrapping subtraction, which is exact for intervals shorter
/// than about 71 minutes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PixelState {
    pub l1: f32,
    pub l2: f32,
    t_above: u32,
    t_below: u32,
    period_us: f32,
    t_last_event: u32,
    pub p_prev: i8,
    flags: u8,
}

impl PixelState {
    #[inline(always)]
    fn has(&self, flag: u8) -> bool {
        self.flags & flag != 0
    }

    pub fn period_us(&self) -> Option<f32> {
        (self.period_us > 0.0).then_some(self.period_us)
    }

    pub fn period_is_half(&self) -> bool {
        self.has(HALF_PERIOD)
    }

    pub fn t_last_event_us(&self) -> Option<u32> {
        self.has(SEEN).then_some(self.t_last_event)
    }

    pub fn last_crossing_us(&self, direction: CrossingDirection) -> Option<u32> {
        match direction {
            CrossingDirection::FromAbove => self.has(HAS_ABOVE).then_some(self.t_above),
            CrossingDirection::FromBelow => self.has(HAS_BELOW).then_some(self.t_below),
        }
    }

    /// Filter step, crossing detection and period bookkeeping for one event.
    #[inline(always)]
    pub fn update(&mut self, coef: &Coefficients<f32>, p: i8, t_us: u64) {
        let t = t_us as u32;
        let l_prev = self.l1;
        let first = self.p_prev == 0;
        let dp = (p - self.p_prev) as f32;
        let l = fused(coef.c1, self.l1, fused(coef.c2, self.l2, coef.gain * dp));
        self.l2 = self.l1;
        self.l1 = l;
        self.p_prev = p;
        self.t_last_event = t;
        self.flags |= SEEN;
        if !first {
            if let Some(direction) = classify(l_prev, l) {
                self.on_crossing(direction, t);
            }
        }
    }

    #[cold]
    fn on_crossing(&mut self, direction: CrossingDirection, t: u32) {
        let (same, opposite, t_same, t_opposite) = match direction {
            CrossingDirection::FromAbove => (HAS_ABOVE, HAS_BELOW, self.t_above, self.t_below),
            CrossingDirection::FromBelow => (HAS_BELOW, HAS_ABOVE, self.t_below, self.t_above),
        };
        if self.has(same) {
            let dt = t.wrapping_sub(t_same);
            if dt > 0 {
                self.period_us = dt as f32;
                self.flags &= !HALF_PERIOD;
            }
        } else if (self.period_us == 0.0 || self.has(HALF_PERIOD)) && self.has(opposite) {
            let dt = t.wrapping_sub(t_opposite);
            if dt > 0 {
                self.period_us = 2.0 * dt as f32;
                self.flags |= HALF_PERIOD;
            }
        }
        match direction {
            CrossingDirection::FromAbove => self.t_above = t,
            CrossingDirection::FromBelow => self.t_below = t,
        }
        self.flags |= same;
    }

    /// Classifies the pixel at `now` and drops an estimate that has gone
    /// without events for more than `n_timeout` periods. The filter state is
    /// kept, so detection resumes with the next crossings.
    pub fn readout(&mut self, now_us: u64, config: &FreqImageConfig) -> Cell {
        if !self.has(SEEN) {
            return Cell::Inactive;
        }
        let since = (now_us as u32).wrapping_sub(self.t_last_event);
        if self.period_us > 0.0 {
            if since as f64 > config.n_timeout as f64 * self.period_us as f64 {
                self.period_us = 0.0;
                self.flags &= !(HALF_PERIOD | HAS_ABOVE | HAS_BELOW);
            } else {
                let f = 1e6 / self.period_us as f64;
                if config.in_band(f) {
                    return Cell::Frequency(f as f32);
                }
            }
        }
        if since as u64 <= config.activity_window_us {
            Cell::ActiveNoFrequency
        } else {
            Cell::Inactive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Frequency(f32),
    ActiveNoFrequency,
    Inactive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyImage {
    pub width: u16,
    pub height: u16,
    pub cells: Vec<Cell>,
}

impl FrequencyImage {
    pub fn cell(&self, x: u16, y: u16) -> Cell {
        self.cells[y as usize * self.width as usize + x as usize]
    }

    /// CSV dump: `x,y,state,frequency_hz`, one row per pixel.
    pub fn write_csv<W: Write>(&self, sink: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(sink);
        writeln!(w, "x,y,state,frequency_hz")?;
        for (i, cell) in self.cells.iter().enumerate() {
            let x = i % self.width as usize;
            let y = i / self.width as usize;
            match cell {
                Cell::Frequency(f) => writeln!(w, "{x},{y},frequency,{f}")?,
                Cell::ActiveNoFrequency => writeln!(w, "{x},{y},active,")?,
                Cell::Inactive => writeln!(w, "{x},{y},inactive,")?,
            }
        }
        w.flush()
    }
}

/// Frequency-detection state for a whole sensor.
#[derive(Debug, Clone)]
pub struct FrequencyMap {
    header: StreamHeader,
    coef: Coefficients<f32>,
    pixels: Vec<PixelState>,
}

impl FrequencyMap {
    pub fn new(header: StreamHeader, params: &FilterParams) -> Self {
        FrequencyMap {
            header,
            coef: Coefficients::new(params),
            pixels: vec![PixelState::default(); header.pixel_count()],
        }
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    pub fn pixel(&self, x: u16, y: u16) -> &PixelState {
        &self.pixels[self.header.index(x, y)]
    }

    pub fn pixels(&self) -> &[PixelState] {
        &self.pixels
    }

    /// Feeds one event. Events are expected in global timestamp order.
    #[inline]
    pub fn update(&mut self, e: &Event) -> Result<(), ImageError> {
        if !self.header.contains(e.x, e.y) {
            return Err(ImageError::OutOfBounds {
                x: e.x,
                y: e.y,
                width: self.header.width,
                height: self.header.height,
            });
        }
        let idx = self.header.index(e.x, e.y);
        self.pixels[idx].update(&self.coef, e.polarity.as_i8(), e.t_us);
        Ok(())
    }

    /// Update by precomputed linear pixel index. Panics if out of range.
    #[inline(always)]
    pub fn update_index(&mut self, idx: usize, polarity: i8, t_us: u64) {
        self.pixels[idx].update(&self.coef, polarity, t_us);
    }

    pub fn readout(&mut self, now_us: u64, config: &FreqImageConfig) -> FrequencyImage {
        FrequencyImage {
            width: self.header.width,
            height: self.header.height,
            cells: self
                .pixels
                .iter_mut()
                .map(|p| p.readout(now_us, config))
                .collect(),
        }
    }

    /// Splits the sensor into disjoint bands of `rows` rows each, so that
    /// bands can be updated from different threads.
    pub fn row_bands(&mut self, rows: u16) -> Vec<RowBand<'_>> {
        let width = self.header.width as usize;
        let coef = self.coef;
        self.pixels
            .chunks_mut(width * rows.max(1) as usize)
            .enumerate()
            .map(|(i, pixels)| RowBand {
                first_row: (i * rows.max(1) as usize) as u16,
                width: width as u16,
                coef,
                pixels,
            })
            .collect()
    }
}

/// Mutable view of consecutive sensor rows.
pub struct RowBand<'a> {
    first_row: u16,
    width: u16,
    coef: Coefficients<f32>,
    pixels: &'a mut [PixelState],
}

impl RowBand<'_> {
    pub fn rows(&self) -> std::ops::Range<u16> {
        let n = (self.pixels.len() / self.width as usize) as u16;
        self.first_row..self.first_row + n
    }

    /// Applies the event if it falls inside this band.
    #[inline]
    pub fn update(&mut self, e: &Event) -> bool {
        if !self.rows().contains(&e.y) || e.x >= self.width {
            return false;
        }
        let idx = (e.y - self.first_row) as usize * self.width as usize + e.x as usize;
        self.pixels[idx].update(&self.coef, e.polarity.as_i8(), e.t_us);
        true
    }
}

pub const GRAY: [u8; 3] = [128, 128, 128];
pub const BLACK: [u8; 3] = [0, 0, 0];

/// The 256-entry "jet" color table: dark blue through cyan, yellow and red.
/// Entry `i` is `255 * clamp(1.5 - |4 i/255 - c|, 0, 1)` for the channel
/// centers `c = 3, 2, 1` (red, green, blue), rounded to nearest.
pub fn color_table() -> &'static [[u8; 3]; 256] {
    static TABLE: OnceLock<[[u8; 3]; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[0u8; 3]; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let x = 4.0 * i as f64 / 255.0;
            let channel = |center: f64| {
                let v = (1.5 - (x - center).abs()).clamp(0.0, 1.0);
                (255.0 * v).round() as u8
            };
            *entry = [channel(3.0), channel(2.0), channel(1.0)];
        }
        table
    })
}

/// Color table index for a frequency: log-scaled between the band limits,
/// clamped to the table.
pub fn color_index(freq_hz: f64, config: &FreqImageConfig) -> usize {
    let lo = config.freq_min_hz.log10();
    let hi = config.freq_max_hz.log10();
    let frac = ((freq_hz.log10() - lo) / (hi - lo)).clamp(0.0, 1.0);
    ((frac * 256.0) as usize).min(255)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u16,
    pub height: u16,
    /// Row-major RGB triples.
    pub rgb: Vec<u8>,
}

impl Raster {
    pub fn pixel(&self, x: u16, y: u16) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }
}

pub fn colorize(image: &FrequencyImage, config: &FreqImageConfig) -> Raster {
    let table = color_table();
    let rgb = image
        .cells
        .iter()
        .flat_map(|cell| match *cell {
            Cell::Frequency(f) => table[color_index(f as f64, config)],
            Cell::ActiveNoFrequency => GRAY,
            Cell::Inactive => BLACK,
        })
        .collect();
    Raster {
        width: image.width,
        height: image.height,
        rgb,
    }
}

/// Binary PPM (P6, maxval 255). Returns the number of bytes written.
pub fn write_ppm<W: Write>(raster: &Raster, mut sink: W) -> io::Result<u64> {
    let header = format!("P6\n{} {}\n255\n", raster.width, raster.height);
    sink.write_all(header.as_bytes())?;
    sink.write_all(&raster.rgb)?;
    sink.flush()?;
    Ok((header.len() + raster.rgb.len()) as u64)
}
