//! Dark-noise episodes: a leading event, then after a delay a rapid OFF/ON
//! pair.

use std::ops::Range;

use freqcam_core::{Event, Polarity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    /// Poisson rate of episodes per pixel.
    pub trigger_rate_hz: f64,
    /// Mean of the exponential OFF to ON gap inside the pair.
    pub pair_gap_us_mean: f64,
    /// Mean of the exponential delay between the leading event and the pair.
    pub episode_delay_us_mean: f64,
    /// Probability that the leading event is ON.
    pub leading_on_prob: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            trigger_rate_hz: 0.0,
            pair_gap_us_mean: 3.0,
            episode_delay_us_mean: 2_000.0,
            leading_on_prob: 0.7,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(self.trigger_rate_hz)
            && ok(self.pair_gap_us_mean)
            && ok(self.episode_delay_us_mean))
        {
            return Err(SimError::Config(
                "noise rates and means must be finite and >= 0".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.leading_on_prob) {
            return Err(SimError::Config(format!(
                "leading_on_prob must lie in [0, 1], got {}",
                self.leading_on_prob
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseEpisode {
    pub leading: Event,
    pub pair_off: Event,
    pub pair_on: Event,
}

impl NoiseEpisode {
    pub fn events(&self) -> [Event; 3] {
        [self.leading, self.pair_off, self.pair_on]
    }
}

fn exp_sample(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    if mean > 0.0 {
        Exp::new(1.0 / mean).unwrap().sample(rng)
    } else {
        0.0
    }
}

/// Noise episodes for every listed pixel, fully contained in `window`.
/// Episodes are listed pixel by pixel in input order, each pixel's in time
/// order.
pub fn generate_dark_noise(
    pixels: &[(u16, u16)],
    noise: &NoiseSpec,
    window: Range<u64>,
    seed: u64,
) -> Vec<NoiseEpisode> {
    let mut out = Vec::new();
    if noise.trigger_rate_hz <= 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrival = Exp::new(noise.trigger_rate_hz * 1e-6).unwrap();
    for &(x, y) in pixels {
        let mut t = window.start as f64;
        loop {
            t += arrival.sample(&mut rng);
            let lead = t.round() as u64;
            let off = lead + exp_sample(&mut rng, noise.episode_delay_us_mean).round() as u64;
            let on = off + exp_sample(&mut rng, noise.pair_gap_us_mean).round() as u64;
            let leading_on = rng.gen_bool(noise.leading_on_prob);
            if on >= window.end {
                break;
            }
            let leading_polarity = if leading_on {
                Polarity::On
            } else {
                Polarity::Off
            };
            out.push(NoiseEpisode {
                leading: Event::new(lead, x, y, leading_polarity),
                pair_off: Event::new(off, x, y, Polarity::Off),
                pair_on: Event::new(on, x, y, Polarity::On),
            });
        }
    }
    out
}

/// Merge `events` (time ordered) with episodes in time order. Signal events
/// come first among equal timestamps.
pub fn merge_noise(events: &[Event], episodes: &[NoiseEpisode]) -> Vec<Event> {
    let mut noise: Vec<Event> = episodes.iter().flat_map(|e| e.events()).collect();
    noise.sort_by_key(|e| (e.t_us, e.y, e.x));
    let mut out = Vec::with_capacity(events.len() + noise.len());
    let mut n = noise.into_iter().peekable();
    for e in events {
        while let Some(next) = n.next_if(|x| x.t_us < e.t_us) {
            out.push(next);
        }
        out.push(*e);
    }
    out.extend(n);
    out
}

/// `events` with dark noise on `pixels` over `window`, deterministic in `seed`.
pub fn inject_dark_noise(
    events: &[Event],
    pixels: &[(u16, u16)],
    noise: &NoiseSpec,
    window: Range<u64>,
    seed: u64,
) -> Vec<Event> {
    merge_noise(events, &generate_dark_noise(pixels, noise, window, seed))
}
