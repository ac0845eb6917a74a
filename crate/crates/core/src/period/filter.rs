//! Second-order reconstruction recursion in event time.
//!
//! Every event is one sample, regardless of its timestamp:
//!
//! ```text
//! l[k] = (alpha + beta) l[k-1] - alpha beta l[k-2] + (1 + beta)/2 (p[k] - p[k-1])
//! ```

use num_traits::Float;

use super::design::FilterParams;

#[inline(always)]
pub(crate) fn fused<F: Float>(a: F, b: F, c: F) -> F {
    if cfg!(target_feature = "fma") {
        a.mul_add(b, c)
    } else {
        a * b + c
    }
}

/// Recursion coefficients in the working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<F> {
    /// alpha + beta
    pub c1: F,
    /// -alpha beta
    pub c2: F,
    /// (1 + beta) / 2
    pub gain: F,
}

impl<F: Float> Coefficients<F> {
    pub fn new(params: &FilterParams) -> Self {
        let cast = |v: f64| F::from(v).expect("coefficient representable");
        Coefficients {
            c1: cast(params.alpha + params.beta),
            c2: cast(-params.alpha * params.beta),
            gain: cast(0.5 * (1.0 + params.beta)),
        }
    }
}

/// Lagged filter state. `p_prev == 0` marks a pixel that has not seen an
/// event yet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState<F> {
    pub l1: F,
    pub l2: F,
    pub p_prev: i8,
}

impl<F: Float> Default for FilterState<F> {
    fn default() -> Self {
        FilterState {
            l1: F::zero(),
            l2: F::zero(),
            p_prev: 0,
        }
    }
}

impl<F: Float> FilterState<F> {
    /// Advances by one event of polarity `p` (+1 or -1) and returns the new
    /// reconstructed brightness.
    #[inline(always)]
    pub fn update(&mut self, coef: &Coefficients<F>, p: i8) -> F {
        let dp = F::from(p - self.p_prev).expect("small integer");
        let l = fused(coef.c1, self.l1, fused(coef.c2, self.l2, coef.gain * dp));
        self.l2 = self.l1;
        self.l1 = l;
        self.p_prev = p;
        l
    }
}

/// Reference implementation that keeps the moving-average polarity and the
/// high-pass output as separate stages. Only used to cross-check
/// [`FilterState::update`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StagedFilter {
    /// Exponential moving average of polarity.
    pub p_avg: f64,
    /// High-pass output.
    pub l: f64,
}

impl StagedFilter {
    pub fn update(&mut self, alpha: f64, beta: f64, p: i8) -> f64 {
        let p = p as f64;
        // subtract the running average seen so far
        let detrended = p - self.p_avg;
        self.p_avg = alpha * self.p_avg + (1.0 - alpha) * p;
        // the integration before the high-pass cancels against its difference
        self.l = beta * self.l + 0.5 * (1.0 + beta) * detrended;
        self.l
    }
}
