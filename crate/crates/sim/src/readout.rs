//! Readout bandwidth limit.

use freqcam_core::{Event, StreamHeader};
use serde::{Deserialize, Serialize};

use crate::SimError;

/// Token-bucket drain evaluated on fixed windows. Within an oversubscribed
/// window events are delivered in row-major pixel order, continuing from
/// where the previous oversubscribed window stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutModel {
    pub capacity_evs: f64,
    #[serde(default = "default_window")]
    pub window_us: u64,
}

fn default_window() -> u64 {
    1_000
}

impl ReadoutModel {
    pub fn new(capacity_evs: f64) -> Self {
        ReadoutModel {
            capacity_evs,
            window_us: default_window(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.capacity_evs > 0.0 && self.capacity_evs.is_finite()) {
            return Err(SimError::Config(format!(
                "capacity_evs must be positive, got {}",
                self.capacity_evs
            )));
        }
        if self.window_us == 0 {
            return Err(SimError::Config("window_us must be at least 1".into()));
        }
        Ok(())
    }

    /// Events per window at full drain.
    pub fn window_budget(&self) -> f64 {
        self.capacity_evs * self.window_us as f64 * 1e-6
    }
}

/// Update rate each pixel gets when all pixels compete for the readout.
pub fn per_pixel_rate(capacity_evs: f64, pixels: usize) -> f64 {
    capacity_evs / pixels as f64
}

/// Highest flicker frequency resolvable at `per_pixel_rate` updates per
/// second (two updates per cycle).
pub fn nyquist_hz(per_pixel_rate: f64) -> f64 {
    per_pixel_rate / 2.0
}

/// Events surviving the readout, in their original order.
pub fn saturate_readout(
    events: &[Event],
    header: &StreamHeader,
    readout: &ReadoutModel,
) -> Vec<Event> {
    let budget = readout.window_budget();
    let cap = budget.max(1.0);
    let n_pixels = header.pixel_count();
    let mut credit = cap;
    let mut last_window: Option<u64> = None;
    let mut cursor = 0usize;
    let mut out = Vec::with_capacity(events.len());
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut keep: Vec<bool> = Vec::new();

    let mut start = 0;
    while start < events.len() {
        let window = events[start].t_us / readout.window_us;
        let end = start
            + events[start..]
                .iter()
                .position(|e| e.t_us / readout.window_us != window)
                .unwrap_or(events.len() - start);
        let elapsed = last_window.map_or(0, |w| window - w);
        credit = (credit + budget * elapsed as f64).min(cap);
        last_window = Some(window);

        let group = &events[start..end];
        let allowed = (credit.floor() as usize).min(group.len());
        credit -= allowed as f64;
        if allowed == group.len() {
            out.extend_from_slice(group);
        } else if allowed > 0 {
            order.clear();
            order.extend(group.iter().enumerate().map(|(i, e)| {
                let pixel = header.index(e.x, e.y);
                ((pixel + n_pixels - cursor) % n_pixels, i)
            }));
            order.sort_unstable();
            keep.clear();
            keep.resize(group.len(), false);
            for &(_, i) in &order[..allowed] {
                keep[i] = true;
            }
            let (offset, _) = order[allowed - 1];
            cursor = (cursor + offset + 1) % n_pixels;
            out.extend(
                group
                    .iter()
                    .zip(&keep)
                    .filter(|(_, k)| **k)
                    .map(|(e, _)| *e),
            );
        }
        start = end;
    }
    out
}
