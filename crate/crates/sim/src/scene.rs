//! Multi-pixel scenes described in TOML.
//!
//! ```toml
//! width = 20
//! height = 15
//! duration_us = 1_000_000
//! seed = 7
//!
//! [camera]
//! c_on = 0.14
//! c_off = 0.14
//! lowpass_tau_us = 1200.0
//!
//! [[region]]
//! rect = { x = 0, y = 0, width = 10, height = 15 }
//! kind = "square"
//! freq_hz = 100.0
//! amplitude = 7.0
//!
//! [roi]
//! x = 10
//! y = 7
//! width = 1
//! height = 1
//!
//! [noise]
//! trigger_rate_hz = 5.0
//!
//! [readout]
//! capacity_evs = 5e4
//! ```

use freqcam_core::{Event, StreamHeader};
use serde::{Deserialize, Serialize};

use crate::camera::{pixel_events, CameraModel};
use crate::noise::{inject_dark_noise, NoiseSpec};
use crate::readout::{saturate_readout, ReadoutModel};
use crate::signal::SignalSpec;
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: u16,
    pub y: u16,
    pub width: u16,
    pub height: u16,
}

impl Rect {
    pub fn contains(&self, x: u16, y: u16) -> bool {
        (x as u32) >= self.x as u32
            && (x as u32) < self.x as u32 + self.width as u32
            && (y as u32) >= self.y as u32
            && (y as u32) < self.y as u32 + self.height as u32
    }
}

/// Pixels sharing one signal. Without `rect` the region covers the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    /// The signal freezes at this time, so the pixels fall silent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_us: Option<u64>,
    #[serde(flatten)]
    pub signal: SignalSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub width: u16,
    pub height: u16,
    pub duration_us: u64,
    #[serde(default)]
    pub start_us: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub camera: CameraModel,
    #[serde(default, rename = "region")]
    pub regions: Vec<Region>,
    /// Only pixels inside the ROI produce events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roi: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<ReadoutModel>,
}

impl Scenario {
    pub fn new(width: u16, height: u16, duration_us: u64) -> Self {
        Scenario {
            width,
            height,
            duration_us,
            start_us: 0,
            seed: 0,
            camera: CameraModel::default(),
            regions: Vec::new(),
            roi: None,
            noise: None,
            readout: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let s: Scenario = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn header(&self) -> Result<StreamHeader, SimError> {
        StreamHeader::new(self.width, self.height).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let header = self.header()?;
        if self.duration_us == 0 {
            return Err(SimError::Config("duration_us must be positive".into()));
        }
        self.camera.validate()?;
        for r in &self.regions {
            r.signal.validate()?;
            if let Some(rect) = r.rect {
                check_rect(&header, &rect, "region")?;
            }
        }
        if let Some(roi) = self.roi {
            check_rect(&header, &roi, "roi")?;
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        if let Some(r) = &self.readout {
            r.validate()?;
        }
        Ok(())
    }

    fn end_us(&self) -> u64 {
        self.start_us + self.duration_us
    }

    fn active(&self, x: u16, y: u16) -> bool {
        self.roi.is_none_or(|r| r.contains(x, y))
    }

    /// Pixels inside the ROI, row-major.
    pub fn active_pixels(&self) -> Vec<(u16, u16)> {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.active(x, y))
            .collect()
    }

    /// Signal-only events. Each region is simulated once and replicated to
    /// its pixels; a pixel belongs to the first region covering it.
    pub fn signal_events(&self) -> Result<Vec<Event>, SimError> {
        self.validate()?;
        let header = self.header()?;
        let mut owner: Vec<Option<usize>> = vec![None; header.pixel_count()];
        for (i, r) in self.regions.iter().enumerate() {
            for (x, y) in self.active_pixels() {
                let slot = &mut owner[header.index(x, y)];
                if slot.is_none() && r.rect.is_none_or(|rect| rect.contains(x, y)) {
                    *slot = Some(i);
                }
            }
        }

        let mut events = Vec::new();
        for (i, r) in self.regions.iter().enumerate() {
            let pixels: Vec<(u16, u16)> = self
                .active_pixels()
                .into_iter()
                .filter(|&(x, y)| owner[header.index(x, y)] == Some(i))
                .collect();
            let Some(&(x0, y0)) = pixels.first() else {
                continue;
            };
            let end = r.stop_us.map_or(self.end_us(), |s| s.min(self.end_us()));
            let template = pixel_events(&r.signal, &self.camera, self.start_us, end, x0, y0);
            events.reserve(template.len() * pixels.len());
            for (x, y) in pixels {
                events.extend(
                    template
                        .iter()
                        .map(|e| Event::new(e.t_us, x, y, e.polarity)),
                );
            }
        }
        // stable: same-pixel, same-time events keep their emission order
        events.sort_by_key(|e| (e.t_us, e.y, e.x));
        Ok(events)
    }

    /// The full pipeline: signal, dark noise, then readout saturation.
    pub fn generate(&self) -> Result<(StreamHeader, Vec<Event>), SimError> {
        let header = self.header()?;
        let mut events = self.signal_events()?;
        if let Some(noise) = &self.noise {
            events = inject_dark_noise(
                &events,
                &self.active_pixels(),
                noise,
                self.start_us..self.end_us(),
                self.seed,
            );
        }
        if let Some(readout) = &self.readout {
            events = saturate_readout(&events, &header, readout);
        }
        Ok((header, events))
    }
}

fn check_rect(header: &StreamHeader, r: &Rect, what: &str) -> Result<(), SimError> {
    let fits = r.width > 0
        && r.height > 0
        && r.x as u32 + r.width as u32 <= header.width as u32
        && r.y as u32 + r.height as u32 <= header.height as u32;
    if fits {
        Ok(())
    } else {
        Err(SimError::Config(format!(
            "{what} {r:?} does not fit a {}x{} sensor",
            header.width, header.height
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Waveform;

    const DOC: &str = r#"
width = 4
height = 2
duration_us = 50_000
seed = 3

[camera]
lowpass_tau_us = 0.0

[[region]]
rect = { x = 0, y = 0, width = 2, height = 2 }
kind = "square"
freq_hz = 100.0
amplitude = 0.7

[[region]]
kind = "exp_sweep"
start_hz = 100.0
end_hz = 400.0
cycles_per_step = 2
amplitude = 0.7
stop_us = 20_000
"#;

    #[test]
    fn parses_documented_keys() {
        let s = Scenario::from_toml(DOC).unwrap();
        assert_eq!(s.regions.len(), 2);
        assert_eq!(s.camera.c_on, 0.14);
        assert_eq!(s.camera.lowpass_tau_us, 0.0);
        assert!(matches!(
            s.regions[1].signal.waveform,
            Waveform::ExpSweep {
                cycles_per_step: 2,
                ..
            }
        ));
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::from_toml("width = 4\nheight = 2\nduration_us = 10\nbogus = 1").is_err());
        assert!(Scenario::from_toml("width = 0\nheight = 2\nduration_us = 10").is_err());
        let r =
            "width = 4\nheight = 2\nduration_us = 10\n[roi]\nx = 3\ny = 0\nwidth = 2\nheight = 1";
        assert!(Scenario::from_toml(r).is_err());
    }

    #[test]
    fn regions_replicate_and_stop() {
        let s = Scenario::from_toml(DOC).unwrap();
        let (h, ev) = s.generate().unwrap();
        assert_eq!((h.width, h.height), (4, 2));
        assert!(ev.windows(2).all(|w| w[0].t_us <= w[1].t_us));
        let left: Vec<_> = ev.iter().filter(|e| e.x == 0 && e.y == 1).collect();
        let right: Vec<_> = ev.iter().filter(|e| e.x == 3 && e.y == 0).collect();
        // 5 rising edges of 5 ON, 4 falling edges of 5 OFF
        assert_eq!(left.len(), 45);
        assert!(right.iter().all(|e| e.t_us < 20_000));
        assert!(!right.is_empty());
    }

    #[test]
    fn roi_restricts_pixels() {
        let mut s = Scenario::from_toml(DOC).unwrap();
        s.roi = Some(Rect {
            x: 1,
            y: 1,
            width: 1,
            height: 1,
        });
        s.noise = Some(NoiseSpec {
            trigger_rate_hz: 500.0,
            ..NoiseSpec::default()
        });
        let (_, ev) = s.generate().unwrap();
        assert!(!ev.is_empty());
        assert!(ev.iter().all(|e| (e.x, e.y) == (1, 1)));
    }
}
