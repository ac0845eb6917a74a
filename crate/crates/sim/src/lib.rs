//! Event camera simulator producing streams with known ground-truth
//! frequency.
//!
//! The pixel works directly in log-brightness: an ON event is emitted each
//! time the (optionally low-passed) signal climbs one ON threshold above the
//! pixel's reference level, which then moves up by exactly that threshold.
//! OFF events mirror this downward.

pub mod camera;
pub mod noise;
pub mod readout;
pub mod scene;
pub mod signal;

pub use camera::{pixel_events, CameraModel, RiseLag};
pub use noise::{generate_dark_noise, inject_dark_noise, merge_noise, NoiseEpisode, NoiseSpec};
pub use readout::{nyquist_hz, per_pixel_rate, saturate_readout, ReadoutModel};
pub use scene::{Rect, Region, Scenario};
pub use signal::{sweep_plateaus, Plateau, Shape, SignalSpec, Waveform};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
}
