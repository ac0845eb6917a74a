use crate::event::{Event, Polarity};

/// Which polarity change marks a period boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transition {
    /// Last ON event followed by an OFF event. The first OFF event of a cycle
    /// is sharply timed, so this is the default.
    #[default]
    OnToOff,
    /// Last OFF event followed by an ON event. Jittery on real sensors
    /// because the photoreceptor responds slowly from darkness.
    OffToOn,
}

/// Period estimator that times successive polarity transitions without
/// reconstructing brightness.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BaselineState {
    p_prev: Option<Polarity>,
    t_last_transition_us: Option<u64>,
    transition: Transition,
}

impl BaselineState {
    pub fn new(transition: Transition) -> Self {
        BaselineState {
            transition,
            ..Default::default()
        }
    }

    /// Returns the elapsed time since the previous transition of the selected
    /// kind when `e` completes one.
    pub fn update(&mut self, e: &Event) -> Option<u64> {
        let (from, to) = match self.transition {
            Transition::OnToOff => (Polarity::On, Polarity::Off),
            Transition::OffToOn => (Polarity::Off, Polarity::On),
        };
        let prev = self.p_prev.replace(e.polarity);
        if prev != Some(from) || e.polarity != to {
            return None;
        }
        self.t_last_transition_us
            .replace(e.t_us)
            .map(|t_last| e.t_us - t_last)
    }
}
