use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingDirection {
    /// Positive to non-positive.
    FromAbove,
    /// Non-positive to positive.
    FromBelow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t_us: f64,
    pub direction: CrossingDirection,
}

/// Zero-level crossing between two consecutive filter outputs.
///
/// The sign classes are `> 0` and `<= 0`, so an output of exactly zero counts
/// as having crossed and the signal must turn strictly positive again before
/// the next crossing from above. Without interpolation the crossing is
/// stamped with the first event after it.
#[inline]
pub fn detect_crossing<F: Float>(
    l_prev: F,
    l_curr: F,
    t_prev_us: u64,
    t_curr_us: u64,
    interpolate: bool,
) -> Option<Crossing> {
    let direction = classify(l_prev, l_curr)?;
    let t_us = if interpolate {
        let (lp, lc) = (l_prev.to_f64()?, l_curr.to_f64()?);
        let t0 = t_prev_us as f64;
        t0 + (t_curr_us as f64 - t0) * (lp / (lp - lc))
    } else {
        t_curr_us as f64
    };
    Some(Crossing { t_us, direction })
}

#[inline(always)]
pub fn classify<F: Float>(l_prev: F, l_curr: F) -> Option<CrossingDirection> {
    let zero = F::zero();
    match (l_prev > zero, l_curr > zero) {
        (true, false) => Some(CrossingDirection::FromAbove),
        (false, true) => Some(CrossingDirection::FromBelow),
        _ => None,
    }
}
