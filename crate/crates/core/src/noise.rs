//! Dark-noise filter.
//!
//! In darkness, sensors tuned for speed emit noise with a fixed temporal
//! signature: some event, then after a comparatively long pause an OFF event
//! followed by an ON event within a few microseconds. The filter drops that
//! OFF/ON pair and keeps everything else. Each pixel holds back up to two
//! events until it can tell whether they form such a pair.

use std::collections::VecDeque;

use thiserror::Error;

use crate::event::{Event, Polarity, StreamHeader};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFilterParams {
    /// Maximum OFF to ON gap classified as noise. Zero disables the filter.
    pub pair_gap_max_us: u64,
    /// Minimum quiet time between the OFF event and the event before it.
    pub pre_gap_min_us: u64,
}

impl Default for NoiseFilterParams {
    fn default() -> Self {
        NoiseFilterParams {
            pair_gap_max_us: 15,
            pre_gap_min_us: 15,
        }
    }
}

impl NoiseFilterParams {
    pub fn disabled() -> Self {
        NoiseFilterParams {
            pair_gap_max_us: 0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("timestamp {t_us} precedes previous event at {prev_us} on pixel ({x}, {y})")]
pub struct OrderingError {
    pub t_us: u64,
    pub prev_us: u64,
    pub x: u16,
    pub y: u16,
}

/// Anything carrying an event, so callers can thread bookkeeping through
/// the delay buffer.
pub trait AsEvent {
    fn event(&self) -> &Event;
}

impl AsEvent for Event {
    fn event(&self) -> &Event {
        self
    }
}

impl<T> AsEvent for (T, Event) {
    fn event(&self) -> &Event {
        &self.1
    }
}

/// Per-pixel filter state.
#[derive(Debug, Clone)]
pub struct NoiseFilterState<T = Event> {
    pending: VecDeque<T>,
    /// Time of the most recent event already released downstream.
    last_emitted_us: Option<u64>,
    last_seen_us: Option<u64>,
}

impl<T> Default for NoiseFilterState<T> {
    fn default() -> Self {
        NoiseFilterState {
            pending: VecDeque::with_capacity(3),
            last_emitted_us: None,
            last_seen_us: None,
        }
    }
}

impl<T: AsEvent> NoiseFilterState<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    /// Feeds one event of this pixel. Released events are appended to `out`.
    pub fn push(
        &mut self,
        item: T,
        params: &NoiseFilterParams,
        out: &mut Vec<T>,
    ) -> Result<(), OrderingError> {
        let e = *item.event();
        if let Some(prev_us) = self.last_seen_us {
            if e.t_us < prev_us {
                return Err(OrderingError {
                    t_us: e.t_us,
                    prev_us,
                    x: e.x,
                    y: e.y,
                });
            }
        }
        self.last_seen_us = Some(e.t_us);

        if e.polarity == Polarity::On && self.closes_noise_pair(e.t_us, params) {
            self.pending.pop_back();
            return Ok(());
        }

        self.pending.push_back(item);
        if self.pending.len() > 2 {
            let released = self.pending.pop_front().expect("buffer holds three");
            self.last_emitted_us = Some(released.event().t_us);
            out.push(released);
        }
        Ok(())
    }

    fn closes_noise_pair(&self, t_on_us: u64, params: &NoiseFilterParams) -> bool {
        let Some(prev) = self.pending.back().map(AsEvent::event) else {
            return false;
        };
        if prev.polarity != Polarity::Off || t_on_us - prev.t_us >= params.pair_gap_max_us {
            return false;
        }
        let before = if self.pending.len() == 2 {
            Some(self.pending[0].event().t_us)
        } else {
            self.last_emitted_us
        };
        match before {
            Some(t) => prev.t_us - t >= params.pre_gap_min_us,
            None => true,
        }
    }

    /// Releases whatever is still buffered, oldest first.
    pub fn flush(&mut self, out: &mut Vec<T>) {
        if let Some(last) = self.pending.back() {
            self.last_emitted_us = Some(last.event().t_us);
        }
        out.extend(self.pending.drain(..));
    }
}

/// Filters a whole multi-pixel stream offline, preserving the global order of
/// the surviving events.
pub fn filter_stream(
    header: &StreamHeader,
    events: &[Event],
    params: &NoiseFilterParams,
) -> Result<Vec<Event>, OrderingError> {
    let mut states: Vec<NoiseFilterState<(usize, Event)>> =
        vec![NoiseFilterState::default(); header.pixel_count()];
    let mut keep = vec![false; events.len()];
    let mut released = Vec::new();
    for (i, e) in events.iter().enumerate() {
        states[header.index(e.x, e.y)].push((i, *e), params, &mut released)?;
        for (idx, _) in released.drain(..) {
            keep[idx] = true;
        }
    }
    for state in &mut states {
        state.flush(&mut released);
    }
    for (idx, _) in released {
        keep[idx] = true;
    }
    Ok(events
        .iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(*e))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(events: &[Event], params: &NoiseFilterParams) -> Vec<Event> {
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        for e in events {
            state.push(*e, params, &mut out).unwrap();
        }
        state.flush(&mut out);
        out
    }

    #[test]
    fn delayed_rapid_pair_is_removed() {
        let events = [
            Event::on(0, 0, 0),
            Event::off(1000, 0, 0),
            Event::on(1010, 0, 0),
        ];
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        for e in &events {
            state
                .push(*e, &NoiseFilterParams::default(), &mut out)
                .unwrap();
        }
        assert!(out.is_empty());
        assert_eq!(state.pending(), 1);
        state.flush(&mut out);
        assert_eq!(out, vec![events[0]]);
    }

    #[test]
    fn fast_genuine_signal_is_kept() {
        let events = [
            Event::off(0, 0, 0),
            Event::off(10, 0, 0),
            Event::on(18, 0, 0),
        ];
        assert_eq!(run(&events, &NoiseFilterParams::default()), events.to_vec());
    }

    #[test]
    fn empty_input() {
        assert!(run(&[], &NoiseFilterParams::default()).is_empty());
        let mut state = NoiseFilterState::<Event>::new();
        let mut out = Vec::new();
        state.flush(&mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn flush_releases_in_order() {
        let params = NoiseFilterParams::default();
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        state.push(Event::on(3, 0, 0), &params, &mut out).unwrap();
        state.flush(&mut out);
        assert_eq!(out, vec![Event::on(3, 0, 0)]);

        out.clear();
        state.push(Event::on(5, 0, 0), &params, &mut out).unwrap();
        state.push(Event::off(9, 0, 0), &params, &mut out).unwrap();
        assert!(out.is_empty());
        state.flush(&mut out);
        assert_eq!(out, vec![Event::on(5, 0, 0), Event::off(9, 0, 0)]);
        assert_eq!(state.pending(), 0);
    }

    #[test]
    fn third_event_releases_oldest() {
        let params = NoiseFilterParams::default();
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        for t in [0, 100, 200] {
            state.push(Event::on(t, 0, 0), &params, &mut out).unwrap();
        }
        assert_eq!(out, vec![Event::on(0, 0, 0)]);
    }

    #[test]
    fn pair_at_stream_start_counts_as_isolated() {
        let events = [
            Event::off(50, 0, 0),
            Event::on(52, 0, 0),
            Event::on(500, 0, 0),
        ];
        assert_eq!(
            run(&events, &NoiseFilterParams::default()),
            vec![Event::on(500, 0, 0)]
        );
    }

    #[test]
    fn pre_gap_uses_already_released_event() {
        let params = NoiseFilterParams::default();
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        state.push(Event::on(0, 0, 0), &params, &mut out).unwrap();
        state.flush(&mut out);
        state.push(Event::off(5, 0, 0), &params, &mut out).unwrap();
        state.push(Event::on(8, 0, 0), &params, &mut out).unwrap();
        state.flush(&mut out);
        assert_eq!(
            out.len(),
            3,
            "pre-gap of 5us to the flushed event keeps the pair"
        );
    }

    #[test]
    fn within_buffer_pre_gap() {
        let events = [
            Event::on(0, 0, 0),
            Event::on(100, 0, 0),
            Event::on(200, 0, 0),
            Event::off(205, 0, 0),
            Event::on(210, 0, 0),
        ];
        assert_eq!(run(&events, &NoiseFilterParams::default()), events.to_vec());
    }

    #[test]
    fn disabled_filter_is_identity() {
        let events = [
            Event::on(0, 0, 0),
            Event::off(1000, 0, 0),
            Event::on(1001, 0, 0),
        ];
        assert_eq!(
            run(&events, &NoiseFilterParams::disabled()),
            events.to_vec()
        );
    }

    #[test]
    fn ordering_error_per_pixel() {
        let mut state = NoiseFilterState::new();
        let mut out = Vec::new();
        let params = NoiseFilterParams::default();
        state.push(Event::on(10, 1, 2), &params, &mut out).unwrap();
        let err = state
            .push(Event::on(9, 1, 2), &params, &mut out)
            .unwrap_err();
        assert_eq!(err.prev_us, 10);
    }

    #[test]
    fn multi_pixel_stream_keeps_global_order() {
        let header = StreamHeader::new(2, 1).unwrap();
        let events = [
            Event::on(0, 0, 0),
            Event::on(1, 1, 0),
            Event::off(1000, 0, 0),
            Event::off(1003, 1, 0),
            Event::on(1005, 0, 0),
            Event::on(2000, 1, 0),
        ];
        let out = filter_stream(&header, &events, &NoiseFilterParams::default()).unwrap();
        assert_eq!(
            out,
            vec![events[0], events[1], events[3], events[5]],
            "only pixel 0's OFF/ON pair matches"
        );
    }
}
