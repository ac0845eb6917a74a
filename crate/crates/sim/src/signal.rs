//! Log-brightness waveforms with known fundamental frequency.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::SimError;

/// Carrier shape used by the exponential sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    #[default]
    Square,
    Triangle,
    Sine,
}

impl Shape {
    /// Unit waveform in [-1, 1] at cycle fraction `u` in [0, 1).
    fn unit(self, u: f64) -> f64 {
        match self {
            // low during the first half-cycle, high during the second
            Shape::Square => {
                if u < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            Shape::Triangle => {
                if u < 0.25 {
                    4.0 * u
                } else if u < 0.75 {
                    2.0 - 4.0 * u
                } else {
                    4.0 * u - 4.0
                }
            }
            Shape::Sine => (TAU * u).sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Waveform {
    Square {
        freq_hz: f64,
    },
    Triangle {
        freq_hz: f64,
    },
    Sine {
        freq_hz: f64,
    },
    /// Frequency plateaus `start_hz * 2^i` (or `/ 2^i` when sweeping down),
    /// each lasting exactly `cycles_per_step` cycles. The last plateau is the
    /// power-of-two step nearest `end_hz` and holds indefinitely.
    ExpSweep {
        start_hz: f64,
        end_hz: f64,
        cycles_per_step: u32,
        #[serde(default)]
        shape: Shape,
    },
    /// Two rectangular pulses per cycle: a full-amplitude pulse over the first
    /// quarter and a pulse scaled by `second_ratio` over the third quarter.
    /// Each pulse contains an ON to OFF transition, so transition timing sees
    /// twice the true frequency.
    DoubleBurst {
        freq_hz: f64,
        second_ratio: f64,
    },
}

impl Waveform {
    fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::Config(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match *self {
            Waveform::Square { freq_hz }
            | Waveform::Triangle { freq_hz }
            | Waveform::Sine { freq_hz } => positive("freq_hz", freq_hz),
            Waveform::ExpSweep {
                start_hz,
                end_hz,
                cycles_per_step,
                ..
            } => {
                positive("start_hz", start_hz)?;
                positive("end_hz", end_hz)?;
                if cycles_per_step == 0 {
                    return Err(SimError::Config(
                        "cycles_per_step must be at least 1".into(),
                    ));
                }
                Ok(())
            }
            Waveform::DoubleBurst {
                freq_hz,
                second_ratio,
            } => {
                positive("freq_hz", freq_hz)?;
                if !(0.0..=1.0).contains(&second_ratio) {
                    return Err(SimError::Config(format!(
                        "second_ratio must lie in [0, 1], got {second_ratio}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// One sweep plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start_us: f64,
    /// `f64::INFINITY` for the final, held plateau.
    pub end_us: f64,
    pub freq_hz: f64,
}

/// Plateau schedule of an exponential sweep.
pub fn sweep_plateaus(start_hz: f64, end_hz: f64, cycles_per_step: u32) -> Vec<Plateau> {
    let steps = (end_hz / start_hz).log2().round();
    let ratio: f64 = if steps < 0.0 { 0.5 } else { 2.0 };
    let steps = steps.abs() as i32;
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut t = 0.0;
    for i in 0..=steps {
        let f = start_hz * ratio.powi(i);
        let end = if i == steps {
            f64::INFINITY
        } else {
            t + cycles_per_step as f64 * 1e6 / f
        };
        out.push(Plateau {
            start_us: t,
            end_us: end,
            freq_hz: f,
        });
        t = end;
    }
    out
}

fn sweep_locate(start_hz: f64, end_hz: f64, cycles_per_step: u32, t_us: f64) -> (f64, f64) {
    let steps = (end_hz / start_hz).log2().round();
    let ratio: f64 = if steps < 0.0 { 0.5 } else { 2.0 };
    let steps = steps.abs() as i32;
    let mut t0 = 0.0;
    let mut f = start_hz;
    for _ in 0..steps {
        let len = cycles_per_step as f64 * 1e6 / f;
        if t_us < t0 + len {
            break;
        }
        t0 += len;
        f *= ratio;
    }
    (t0, f)
}

/// Log-brightness waveform description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(flatten)]
    pub waveform: Waveform,
    /// Peak-to-peak swing in log units.
    pub amplitude: f64,
    #[serde(default)]
    pub dc: f64,
    /// Radians.
    #[serde(default)]
    pub phase: f64,
}

impl SignalSpec {
    pub fn new(waveform: Waveform, amplitude: f64) -> Self {
        SignalSpec {
            waveform,
            amplitude,
            dc: 0.0,
            phase: 0.0,
        }
    }

    pub fn square(freq_hz: f64, amplitude: f64) -> Self {
        Self::new(Waveform::Square { freq_hz }, amplitude)
    }

    pub fn triangle(freq_hz: f64, amplitude: f64) -> Self {
        Self::new(Waveform::Triangle { freq_hz }, amplitude)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(SimError::Config(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !self.dc.is_finite() || !self.phase.is_finite() {
            return Err(SimError::Config("dc and phase must be finite".into()));
        }
        self.waveform.validate()
    }

    /// Ground-truth fundamental frequency at `t_us`.
    pub fn frequency_at(&self, t_us: f64) -> f64 {
        match self.waveform {
            Waveform::Square { freq_hz }
            | Waveform::Triangle { freq_hz }
            | Waveform::Sine { freq_hz }
            | Waveform::DoubleBurst { freq_hz, .. } => freq_hz,
            Waveform::ExpSweep {
                start_hz,
                end_hz,
                cycles_per_step,
                ..
            } => sweep_locate(start_hz, end_hz, cycles_per_step, t_us).1,
        }
    }

    /// Log-brightness at `t_us`.
    pub fn brightness_at(&self, t_us: f64) -> f64 {
        let shift = self.phase / TAU;
        let frac = |cycles: f64| (cycles + shift).rem_euclid(1.0);
        let half = 0.5 * self.amplitude;
        match self.waveform {
            Waveform::Square { freq_hz } => {
                self.dc + half * Shape::Square.unit(frac(t_us * freq_hz * 1e-6))
            }
            Waveform::Triangle { freq_hz } => {
                self.dc + half * Shape::Triangle.unit(frac(t_us * freq_hz * 1e-6))
            }
            Waveform::Sine { freq_hz } => {
                self.dc + half * Shape::Sine.unit(frac(t_us * freq_hz * 1e-6))
            }
            Waveform::ExpSweep {
                start_hz,
                end_hz,
                cycles_per_step,
                shape,
            } => {
                let (t0, f) = sweep_locate(start_hz, end_hz, cycles_per_step, t_us);
                self.dc + half * shape.unit(frac((t_us - t0) * f * 1e-6))
            }
            Waveform::DoubleBurst {
                freq_hz,
                second_ratio,
            } => {
                let u = frac(t_us * freq_hz * 1e-6);
                let level = if u < 0.25 {
                    1.0
                } else if (0.5..0.75).contains(&u) {
                    second_ratio
                } else {
                    0.0
                };
                self.dc - half + self.amplitude * level
            }
        }
    }
}
