//! Fundamental-frequency detection for event camera streams.
//!
//! - [`event`]: event types and the FCEV binary / CSV file formats
//! - [`noise`]: per-pixel dark-noise filter
//! - [`period`]: baseline transition timing, the event-time reconstruction
//!   filter and zero-crossing period measurement
//! - [`image`]: full-sensor frequency maps and their rendering

pub mod event;
pub mod image;
pub mod noise;
pub mod period;

pub use event::{Event, EventError, Polarity, StreamHeader};
