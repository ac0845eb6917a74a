use std::fmt;
use std::str::FromStr;

use num_traits::Float;

use super::baseline::{BaselineState, Transition};
use super::crossing::{detect_crossing, CrossingDirection};
use super::design::FilterParams;
use super::filter::{Coefficients, FilterState};
use crate::event::Event;
use crate::noise::{NoiseFilterParams, NoiseFilterState, OrderingError};

/// Period estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// ON to OFF polarity transitions.
    Baseline,
    /// OFF to ON polarity transitions.
    BaselineOffOn,
    /// Reconstructed brightness crossing zero from above, stamped with the
    /// first event after the crossing.
    Filtered,
    /// As `Filtered`, linearly interpolated between the straddling events.
    Interpolated,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Baseline,
        Mode::BaselineOffOn,
        Mode::Filtered,
        Mode::Interpolated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::BaselineOffOn => "baseline-off-on",
            Mode::Filtered => "filtered",
            Mode::Interpolated => "interpolated",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

/// One period measurement, stamped with the time it completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSample {
    pub t_us: f64,
    pub period_us: f64,
}

impl PeriodSample {
    pub fn frequency_hz(&self) -> f64 {
        1e6 / self.period_us
    }
}

/// Streaming single-pixel detector measuring time between successive zero
/// crossings from above of the reconstructed brightness.
#[derive(Debug, Clone)]
pub struct CrossingDetector<F> {
    coef: Coefficients<F>,
    state: FilterState<F>,
    interpolate: bool,
    t_prev_us: u64,
    last_crossing_us: Option<f64>,
}

impl<F: Float> CrossingDetector<F> {
    pub fn new(params: &FilterParams, interpolate: bool) -> Self {
        CrossingDetector {
            coef: Coefficients::new(params),
            state: FilterState::default(),
            interpolate,
            t_prev_us: 0,
            last_crossing_us: None,
        }
    }

    pub fn state(&self) -> &FilterState<F> {
        &self.state
    }

    /// Returns the reconstructed brightness and, when a crossing from above
    /// closes a period, that period.
    pub fn update(&mut self, e: &Event) -> (F, Option<PeriodSample>) {
        let l_prev = self.state.l1;
        let first = self.state.p_prev == 0;
        let l = self.state.update(&self.coef, e.polarity.as_i8());
        let t_prev_us = std::mem::replace(&mut self.t_prev_us, e.t_us);
        if first {
            return (l, None);
        }
        let sample = match detect_crossing(l_prev, l, t_prev_us, e.t_us, self.interpolate) {
            Some(c) if c.direction == CrossingDirection::FromAbove => self
                .last_crossing_us
                .replace(c.t_us)
                .map(|prev| PeriodSample {
                    t_us: c.t_us,
                    period_us: c.t_us - prev,
                }),
            _ => None,
        };
        (l, sample)
    }
}

enum Estimator<F> {
    Baseline(BaselineState),
    Crossing(CrossingDetector<F>),
}

impl<F: Float> Estimator<F> {
    fn new(params: &FilterParams, mode: Mode) -> Self {
        match mode {
            Mode::Baseline => Estimator::Baseline(BaselineState::new(Transition::OnToOff)),
            Mode::BaselineOffOn => Estimator::Baseline(BaselineState::new(Transition::OffToOn)),
            Mode::Filtered => Estimator::Crossing(CrossingDetector::new(params, false)),
            Mode::Interpolated => Estimator::Crossing(CrossingDetector::new(params, true)),
        }
    }

    fn update(&mut self, e: &Event) -> Option<PeriodSample> {
        match self {
            Estimator::Baseline(b) => b.update(e).map(|p| PeriodSample {
                t_us: e.t_us as f64,
                period_us: p as f64,
            }),
            Estimator::Crossing(d) => d.update(e).1,
        }
    }
}

/// Per-cycle period estimates for one pixel's events, optionally after
/// dark-noise filtering. Runs in double precision.
pub fn period_stream(
    events: &[Event],
    params: &FilterParams,
    mode: Mode,
    noise_filter: Option<&NoiseFilterParams>,
) -> Result<Vec<PeriodSample>, OrderingError> {
    period_stream_with::<f64>(events, params, mode, noise_filter)
}

/// [`period_stream`] with the filter state kept in precision `F`.
pub fn period_stream_with<F: Float>(
    events: &[Event],
    params: &FilterParams,
    mode: Mode,
    noise_filter: Option<&NoiseFilterParams>,
) -> Result<Vec<PeriodSample>, OrderingError> {
    let mut estimator = Estimator::<F>::new(params, mode);
    let mut out = Vec::new();
    match noise_filter {
        Some(nf) => {
            let mut state = NoiseFilterState::new();
            let mut released = Vec::with_capacity(2);
            for e in events {
                state.push(*e, nf, &mut released)?;
                out.extend(released.drain(..).filter_map(|r| estimator.update(&r)));
            }
            state.flush(&mut released);
            out.extend(released.drain(..).filter_map(|r| estimator.update(&r)));
        }
        None => {
            let mut prev_us = 0;
            for e in events {
                if e.t_us < prev_us {
                    return Err(OrderingError {
                        t_us: e.t_us,
                        prev_us,
                        x: e.x,
                        y: e.y,
                    });
                }
                prev_us = e.t_us;
                out.extend(estimator.update(e));
            }
        }
    }
    Ok(out)
}

/// Reconstructed brightness at every event, for plotting.
pub fn reconstruct(events: &[Event], params: &FilterParams) -> Vec<(u64, f64)> {
    let coef = Coefficients::<f64>::new(params);
    let mut state = FilterState::default();
    events
        .iter()
        .map(|e| (e.t_us, state.update(&coef, e.polarity.as_i8())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Polarity;

    /// Ideal square wave: `n` ON events at each rising edge, `n` OFF events at
    /// each falling edge, one microsecond apart.
    fn square(period_us: u64, n: u64, cycles: u64) -> Vec<Event> {
        let mut events = Vec::new();
        for c in 0..cycles {
            let t0 = c * period_us;
            events.extend((0..n).map(|i| Event::on(t0 + i, 0, 0)));
            events.extend((0..n).map(|i| Event::off(t0 + period_us / 2 + i, 0, 0)));
        }
        events
    }

    #[test]
    fn empty_stream() {
        let p = FilterParams::from_t_cut(40.0).unwrap();
        for mode in Mode::ALL {
            assert!(period_stream(&[], &p, mode, None).unwrap().is_empty());
        }
    }

    #[test]
    fn ideal_square_all_modes() {
        let events = square(10_000, 10, 50);
        let p = FilterParams::from_t_cut(40.0).unwrap();
        for mode in [Mode::Baseline, Mode::Filtered, Mode::Interpolated] {
            let out = period_stream(&events, &p, mode, None).unwrap();
            assert!(out.len() >= 45, "{mode}: {}", out.len());
            // the interpolated crossing settles once the start-up transient decays
            for s in &out[5..] {
                assert!((s.period_us - 10_000.0).abs() < 1e-3, "{mode}: {s:?}");
            }
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("fft".parse::<Mode>().is_err());
    }

    #[test]
    fn rejects_regression() {
        let p = FilterParams::from_t_cut(40.0).unwrap();
        let events = [Event::on(5, 0, 0), Event::new(4, 0, 0, Polarity::Off)];
        assert!(period_stream(&events, &p, Mode::Filtered, None).is_err());
        let nf = NoiseFilterParams::default();
        assert!(period_stream(&events, &p, Mode::Filtered, Some(&nf)).is_err());
    }

    #[test]
    fn single_and_double_precision_agree() {
        let events = square(1_000, 7, 40);
        let p = FilterParams::from_t_cut(28.0).unwrap();
        let a = period_stream_with::<f32>(&events, &p, Mode::Interpolated, None).unwrap();
        let b = period_stream_with::<f64>(&events, &p, Mode::Interpolated, None).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.period_us - y.period_us).abs() <= 1e-4 * y.period_us);
        }
    }
}
