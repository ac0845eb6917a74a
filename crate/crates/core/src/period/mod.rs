//! Period measurement: baseline transition timing, the event-time
//! reconstruction filter and zero-crossing detection.

mod baseline;
mod crossing;
mod design;
mod filter;
mod stream;

pub use baseline::{BaselineState, Transition};
pub use crossing::{classify, detect_crossing, Crossing, CrossingDirection};
pub use design::{
    alpha_cutoff, design_alpha, design_beta, high_pass_peak, low_pass_peak, recommend_tcut,
    transfer_magnitude, DesignError, FilterParams, TransferMagnitude,
};
pub(crate) use filter::fused;
pub use filter::{Coefficients, FilterState, StagedFilter};
pub use stream::{
    period_stream, period_stream_with, reconstruct, CrossingDetector, Mode, PeriodSample,
};
