//! Single-pixel threshold model.

use freqcam_core::{Event, Polarity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::signal::SignalSpec;
use crate::SimError;

/// Extra lag on rising brightness, used to make OFF to ON transitions jitter
/// while ON to OFF transitions stay sharp.
///
/// Each rising episode is held back by a uniform random delay in
/// `[0, jitter_us]` and then follows the front end through a first-order lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiseLag {
    #[serde(default)]
    pub tau_us: f64,
    pub jitter_us: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraModel {
    pub c_on: f64,
    pub c_off: f64,
    pub refractory_us: u64,
    /// Front-end low-pass time constant, 0 disables it.
    pub lowpass_tau_us: f64,
    /// Timestamp granularity and integration step.
    pub timestamp_quantum_us: u64,
    pub rise_lag: Option<RiseLag>,
}

impl Default for CameraModel {
    /// Calibrated so that a 7-unit square wave gives 50 ON events per cycle
    /// at 10 Hz and 48 at 100 Hz.
    fn default() -> Self {
        CameraModel {
            c_on: 0.14,
            c_off: 0.14,
            refractory_us: 0,
            lowpass_tau_us: 1200.0,
            timestamp_quantum_us: 1,
            rise_lag: None,
        }
    }
}

impl CameraModel {
    /// Thresholds only: no low-pass, no refractory period.
    pub fn ideal(c: f64) -> Self {
        CameraModel {
            c_on: c,
            c_off: c,
            lowpass_tau_us: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        if !(self.c_on > 0.0 && self.c_off > 0.0) {
            return bad(format!(
                "thresholds must be positive, got c_on={} c_off={}",
                self.c_on, self.c_off
            ));
        }
        if !(self.lowpass_tau_us >= 0.0 && self.lowpass_tau_us.is_finite()) {
            return bad(format!(
                "lowpass_tau_us must be >= 0, got {}",
                self.lowpass_tau_us
            ));
        }
        if self.timestamp_quantum_us == 0 {
            return bad("timestamp_quantum_us must be at least 1".into());
        }
        if let Some(lag) = self.rise_lag {
            if !(lag.tau_us >= 0.0 && lag.tau_us.is_finite()) {
                return bad(format!("rise_lag.tau_us must be >= 0, got {}", lag.tau_us));
            }
        }
        Ok(())
    }
}

fn smoothing(tau_us: f64, step_us: f64) -> f64 {
    if tau_us > 0.0 {
        1.0 - (-step_us / tau_us).exp()
    } else {
        1.0
    }
}

struct Lag {
    gain: f64,
    jitter_us: u64,
    rng: ChaCha8Rng,
    prev: f64,
    rising: bool,
    hold_until: u64,
    level: f64,
}

impl Lag {
    fn new(lag: &RiseLag, step_us: f64, start: f64, x: u16, y: u16) -> Self {
        let pixel = (y as u64) << 16 | x as u64;
        Lag {
            gain: smoothing(lag.tau_us, step_us),
            jitter_us: lag.jitter_us,
            rng: ChaCha8Rng::seed_from_u64(lag.seed ^ pixel.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            prev: start,
            rising: false,
            hold_until: 0,
            level: start,
        }
    }

    fn follow(&mut self, v: f64, t_us: u64) -> f64 {
        let dv = v - self.prev;
        self.prev = v;
        if dv > 0.0 && !self.rising {
            self.rising = true;
            self.hold_until = t_us + self.rng.gen_range(0..=self.jitter_us);
        } else if dv < 0.0 {
            self.rising = false;
        }
        if v <= self.level {
            self.level = v;
        } else if t_us >= self.hold_until {
            self.level += self.gain * (v - self.level);
        }
        self.level
    }
}

/// Events emitted by pixel `(x, y)` viewing `spec` over `[t_start_us, t_end_us)`.
///
/// The front end starts settled at the signal level at `t_start_us`.
pub fn pixel_events(
    spec: &SignalSpec,
    model: &CameraModel,
    t_start_us: u64,
    t_end_us: u64,
    x: u16,
    y: u16,
) -> Vec<Event> {
    let q = model.timestamp_quantum_us.max(1);
    let step = q as f64;
    let mut t = t_start_us.div_ceil(q) * q;
    let mut events = Vec::new();
    if t >= t_end_us {
        return events;
    }

    let gain = smoothing(model.lowpass_tau_us, step);
    let on = model.c_on * (1.0 - 1e-9);
    let off = model.c_off * (1.0 - 1e-9);
    let mut v = spec.brightness_at(t as f64);
    let mut reference = v;
    let mut lag = model.rise_lag.map(|l| Lag::new(&l, step, v, x, y));
    let mut last_event: Option<u64> = None;

    while t < t_end_us {
        v += gain * (spec.brightness_at(t as f64) - v);
        let level = match lag.as_mut() {
            Some(lag) => lag.follow(v, t),
            None => v,
        };
        loop {
            if matches!(last_event, Some(last) if t - last < model.refractory_us) {
                break;
            }
            let polarity = if level - reference >= on {
                reference += model.c_on;
                Polarity::On
            } else if reference - level >= off {
                reference -= model.c_off;
                Polarity::Off
            } else {
                break;
            };
            events.push(Event::new(t, x, y, polarity));
            last_event = Some(t);
        }
        t += q;
    }
    events
}
