//! Event data model and the two on-disk event formats.
//!
//! Binary "FCEV" v1 layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "FCEV"
//! 4       2     version (u16, = 1)
//! 6       2     width   (u16)
//! 8       2     height  (u16)
//! 10      13*n  records: t_us u64, x u16, y u16, polarity i8
//! ```
//!
//! CSV layout:
//!
//! ```text
//! # width=640 height=480
//! t_us,x,y,p
//! 1000,319,239,1
//! ```

use std::fmt;
use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"FCEV";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 10;
pub const RECORD_LEN: usize = 13;

const CSV_COLUMNS: [&str; 4] = ["t_us", "x", "y", "p"];

#[derive(Debug, Error)]
pub enum EventError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("data error at record {index}: {reason}")]
    Data { index: usize, reason: String },
    #[error("ordering error at record {index}: timestamp {t_us} precedes {prev_us}")]
    Ordering {
        index: usize,
        t_us: u64,
        prev_us: u64,
    },
}

impl EventError {
    fn data(index: usize, reason: impl Into<String>) -> Self {
        EventError::Data {
            index,
            reason: reason.into(),
        }
    }
}

/// Sign of a brightness change. ON is an increase, OFF a decrease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Off,
    On,
}

impl Polarity {
    pub fn from_i8(p: i8) -> Option<Self> {
        match p {
            1 => Some(Polarity::On),
            -1 => Some(Polarity::Off),
            _ => None,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => -1,
        }
    }

    #[inline]
    pub fn is_on(self) -> bool {
        self == Polarity::On
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t_us: u64,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl Event {
    pub fn new(t_us: u64, x: u16, y: u16, polarity: Polarity) -> Self {
        Event {
            t_us,
            x,
            y,
            polarity,
        }
    }

    pub fn on(t_us: u64, x: u16, y: u16) -> Self {
        Event::new(t_us, x, y, Polarity::On)
    }

    pub fn off(t_us: u64, x: u16, y: u16) -> Self {
        Event::new(t_us, x, y, Polarity::Off)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u16,
    pub height: u16,
}

impl StreamHeader {
    pub fn new(width: u16, height: u16) -> Result<Self, EventError> {
        if width == 0 || height == 0 {
            return Err(EventError::Format(format!(
                "sensor dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(StreamHeader { width, height })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    #[inline]
    pub fn contains(&self, x: u16, y: u16) -> bool {
        x < self.width && y < self.height
    }

    /// Row-major linear index of a pixel.
    #[inline]
    pub fn index(&self, x: u16, y: u16) -> usize {
        y as usize * self.width as usize + x as usize
    }
}

/// Checks bounds and global timestamp monotonicity.
pub fn validate_events(header: &StreamHeader, events: &[Event]) -> Result<(), EventError> {
    let mut checker = Checker {
        header: *header,
        prev: 0,
    };
    events
        .iter()
        .enumerate()
        .try_for_each(|(index, e)| checker.check(index, e))
}

/// Incremental validator shared by both readers.
struct Checker {
    header: StreamHeader,
    prev: u64,
}

impl Checker {
    fn check(&mut self, index: usize, e: &Event) -> Result<(), EventError> {
        if !self.header.contains(e.x, e.y) {
            return Err(EventError::data(
                index,
                format!(
                    "pixel ({}, {}) outside {}x{} sensor",
                    e.x, e.y, self.header.width, self.header.height
                ),
            ));
        }
        if e.t_us < self.prev {
            return Err(EventError::Ordering {
                index,
                t_us: e.t_us,
                prev_us: self.prev,
            });
        }
        self.prev = e.t_us;
        Ok(())
    }
}

/// Reads either format, choosing by the leading magic bytes.
pub fn read_events<R: Read>(source: R) -> Result<(StreamHeader, Vec<Event>), EventError> {
    let mut reader = io::BufReader::new(source);
    let is_binary = reader.fill_buf()?.starts_with(&MAGIC);
    if is_binary {
        read_binary(reader)
    } else {
        read_csv(reader)
    }
}

pub fn read_binary<R: Read>(mut source: R) -> Result<(StreamHeader, Vec<Event>), EventError> {
    let mut head = [0u8; HEADER_LEN];
    source
        .read_exact(&mut head)
        .map_err(|_| EventError::Format("truncated FCEV header".into()))?;
    if head[0..4] != MAGIC {
        return Err(EventError::Format("bad magic, expected \"FCEV\"".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != VERSION {
        return Err(EventError::Format(format!(
            "unsupported FCEV version {version}"
        )));
    }
    let header = StreamHeader::new(
        u16::from_le_bytes([head[6], head[7]]),
        u16::from_le_bytes([head[8], head[9]]),
    )?;

    let mut body = Vec::new();
    source.read_to_end(&mut body)?;
    if body.len() % RECORD_LEN != 0 {
        return Err(EventError::Format(format!(
            "body length {} is not a multiple of the {RECORD_LEN}-byte record",
            body.len()
        )));
    }

    let mut checker = Checker { header, prev: 0 };
    let mut events = Vec::with_capacity(body.len() / RECORD_LEN);
    for (index, rec) in body.chunks_exact(RECORD_LEN).enumerate() {
        let t_us = u64::from_le_bytes(rec[0..8].try_into().expect("8-byte slice"));
        let x = u16::from_le_bytes([rec[8], rec[9]]);
        let y = u16::from_le_bytes([rec[10], rec[11]]);
        let raw = rec[12] as i8;
        let polarity = Polarity::from_i8(raw)
            .ok_or_else(|| EventError::data(index, format!("polarity {raw} not in {{-1, 1}}")))?;
        let e = Event::new(t_us, x, y, polarity);
        checker.check(index, &e)?;
        events.push(e);
    }
    Ok((header, events))
}

fn parse_dimensions(line: &str) -> Result<StreamHeader, EventError> {
    let bad = || {
        EventError::Format(format!(
            "expected \"# width=W height=H\" as first line, got {line:?}"
        ))
    };
    let rest = line.trim().strip_prefix('#').ok_or_else(bad)?;
    let mut width = None;
    let mut height = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("width", v)) => width = Some(v.parse::<u16>().map_err(|_| bad())?),
            Some(("height", v)) => height = Some(v.parse::<u16>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    match (width, height) {
        (Some(w), Some(h)) => StreamHeader::new(w, h),
        _ => Err(bad()),
    }
}

pub fn read_csv<R: Read>(source: R) -> Result<(StreamHeader, Vec<Event>), EventError> {
    let mut reader = io::BufReader::new(source);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let header = parse_dimensions(&first)?;

    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let columns = csv
        .headers()
        .map_err(|e| EventError::Format(format!("csv header: {e}")))?;
    if columns.iter().ne(CSV_COLUMNS) {
        return Err(EventError::Format(format!(
            "expected columns {}, got {}",
            CSV_COLUMNS.join(","),
            columns.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut checker = Checker { header, prev: 0 };
    let mut events = Vec::new();
    for (index, record) in csv.records().enumerate() {
        let record = record.map_err(|e| EventError::data(index, e.to_string()))?;
        if record.len() != 4 {
            return Err(EventError::data(
                index,
                format!("expected 4 fields, got {}", record.len()),
            ));
        }
        let field = |i: usize| &record[i];
        let t_us = field(0)
            .parse::<u64>()
            .map_err(|_| EventError::data(index, format!("bad timestamp {:?}", field(0))))?;
        let x = field(1)
            .parse::<u16>()
            .map_err(|_| EventError::data(index, format!("bad x {:?}", field(1))))?;
        let y = field(2)
            .parse::<u16>()
            .map_err(|_| EventError::data(index, format!("bad y {:?}", field(2))))?;
        let polarity = field(3)
            .parse::<i8>()
            .ok()
            .and_then(Polarity::from_i8)
            .ok_or_else(|| {
                EventError::data(index, format!("polarity {:?} not in {{-1, 1}}", field(3)))
            })?;
        let e = Event::new(t_us, x, y, polarity);
        checker.check(index, &e)?;
        events.push(e);
    }
    Ok((header, events))
}

/// Writes the binary format and returns the number of bytes written.
/// Nothing is written if the events violate the stream invariants.
pub fn write_binary<W: Write>(
    header: &StreamHeader,
    events: &[Event],
    sink: W,
) -> Result<u64, EventError> {
    validate_events(header, events)?;
    let mut sink = io::BufWriter::new(sink);
    sink.write_all(&MAGIC)?;
    sink.write_all(&VERSION.to_le_bytes())?;
    sink.write_all(&header.width.to_le_bytes())?;
    sink.write_all(&header.height.to_le_bytes())?;
    let mut rec = [0u8; RECORD_LEN];
    for e in events {
        rec[0..8].copy_from_slice(&e.t_us.to_le_bytes());
        rec[8..10].copy_from_slice(&e.x.to_le_bytes());
        rec[10..12].copy_from_slice(&e.y.to_le_bytes());
        rec[12] = e.polarity.as_i8() as u8;
        sink.write_all(&rec)?;
    }
    sink.flush()?;
    Ok((HEADER_LEN + RECORD_LEN * events.len()) as u64)
}

struct CountingWriter<W> {
    inner: W,
    count: u64,
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.count += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

pub fn write_csv<W: Write>(
    header: &StreamHeader,
    events: &[Event],
    sink: W,
) -> Result<u64, EventError> {
    validate_events(header, events)?;
    let mut sink = CountingWriter {
        inner: io::BufWriter::new(sink),
        count: 0,
    };
    writeln!(sink, "# width={} height={}", header.width, header.height)?;
    {
        let mut csv = csv::Writer::from_writer(&mut sink);
        let io_err = |e: csv::Error| EventError::Io(e.into());
        csv.write_record(CSV_COLUMNS).map_err(io_err)?;
        for e in events {
            csv.write_record(&[
                e.t_us.to_string(),
                e.x.to_string(),
                e.y.to_string(),
                e.polarity.to_string(),
            ])
            .map_err(io_err)?;
        }
        csv.flush()?;
    }
    sink.flush()?;
    Ok(sink.count)
}

/// Running sum of polarities at each event time. A plotting aid only; the
/// detectors never use it.
pub fn naive_reconstruct(events: &[Event]) -> Vec<(u64, i64)> {
    events
        .iter()
        .scan(0i64, |sum, e| {
            *sum += e.polarity.as_i8() as i64;
            Some((e.t_us, *sum))
        })
        .collect()
}
