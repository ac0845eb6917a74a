//! Coefficient design for the event-time band-pass.
//!
//! The reconstruction filter is the product of a high-pass
//! `H_a(z) = (z - 1) / (z - alpha)` and a low-pass
//! `H_b(z) = (1 + beta) z / (2 (z - beta))`. Both coefficients are chosen so
//! that the respective power response falls to half its maximum at the
//! cutoff frequency `omega_cut = 2 pi / t_cut`, where `t_cut` is measured in
//! events rather than seconds.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("cutoff frequency {omega} rad/sample outside ({lo}, {hi})")]
    OmegaOutOfRange { omega: f64, lo: f64, hi: f64 },
    #[error("coefficient {name} = {value} outside [0, 1)")]
    Coefficient { name: &'static str, value: f64 },
    #[error("cutoff period must exceed {min} events, got {t_cut}")]
    CutoffPeriod { t_cut: f64, min: f64 },
    #[error("cannot recommend a cutoff period without any events")]
    NoEvents,
}

/// High-pass coefficient with half-power point at `omega_cut`, valid for
/// `0 < omega_cut < pi/2`.
pub fn design_alpha(omega_cut: f64) -> Result<f64, DesignError> {
    if !(omega_cut > 0.0 && omega_cut < FRAC_PI_2) {
        return Err(DesignError::OmegaOutOfRange {
            omega: omega_cut,
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    Ok((1.0 - omega_cut.sin()) / omega_cut.cos())
}

/// Low-pass coefficient with half-power point at `omega_cut`, valid for
/// `0 < omega_cut <= pi`.
pub fn design_beta(omega_cut: f64) -> Result<f64, DesignError> {
    if !(omega_cut > 0.0 && omega_cut <= PI) {
        return Err(DesignError::OmegaOutOfRange {
            omega: omega_cut,
            lo: 0.0,
            hi: PI,
        });
    }
    let b = 2.0 - omega_cut.cos();
    Ok(b - (b * b - 1.0).sqrt())
}

/// Cutoff frequency at which `design_alpha` yields `alpha`.
pub fn alpha_cutoff(alpha: f64) -> f64 {
    // (1 - sin w) / cos w == tan(pi/4 - w/2)
    FRAC_PI_2 - 2.0 * alpha.atan()
}

/// Cutoff period that keeps both ON and OFF sections of a cycle inside the
/// pass band: four times the larger per-cycle event count.
pub fn recommend_tcut(n_on: u64, n_off: u64) -> Result<u64, DesignError> {
    if n_on == 0 && n_off == 0 {
        return Err(DesignError::NoEvents);
    }
    Ok(4 * n_on.max(n_off))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub alpha: f64,
    pub beta: f64,
    pub t_cut_events: f64,
}

impl FilterParams {
    /// Equal high- and low-pass cutoffs from a single cutoff period.
    pub fn from_t_cut(t_cut_events: f64) -> Result<Self, DesignError> {
        if t_cut_events.is_nan() || t_cut_events <= 4.0 {
            return Err(DesignError::CutoffPeriod {
                t_cut: t_cut_events,
                min: 4.0,
            });
        }
        let omega = 2.0 * PI / t_cut_events;
        let alpha = design_alpha(omega)?;
        Ok(FilterParams {
            alpha,
            beta: alpha,
            t_cut_events,
        })
    }

    /// Independent coefficients. The recorded cutoff period is the one implied
    /// by `alpha`.
    pub fn with_coefficients(alpha: f64, beta: f64) -> Result<Self, DesignError> {
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..1.0).contains(&value) {
                return Err(DesignError::Coefficient { name, value });
            }
        }
        Ok(FilterParams {
            alpha,
            beta,
            t_cut_events: 2.0 * PI / alpha_cutoff(alpha),
        })
    }

    pub fn omega_cut(&self) -> f64 {
        2.0 * PI / self.t_cut_events
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMagnitude {
    pub total: f64,
    pub high_pass: f64,
    pub low_pass: f64,
}

/// Magnitudes of `H = H_a * H_b` and its factors at `z = exp(j omega)`.
pub fn transfer_magnitude(omega: f64, alpha: f64, beta: f64) -> TransferMagnitude {
    let z = Complex64::from_polar(1.0, omega);
    let h_alpha = (z - 1.0) / (z - alpha);
    let h_beta = 0.5 * z * (1.0 + beta) / (z - beta);
    TransferMagnitude {
        total: (h_alpha * h_beta).norm(),
        high_pass: h_alpha.norm(),
        low_pass: h_beta.norm(),
    }
}

/// Peak of `|H_a|`, reached at the Nyquist frequency.
pub fn high_pass_peak(alpha: f64) -> f64 {
    2.0 / (1.0 + alpha)
}

/// Peak of `|H_b|`, reached at DC.
pub fn low_pass_peak(beta: f64) -> f64 {
    0.5 * (1.0 + beta) / (1.0 - beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn alpha_examples() {
        assert_abs_diff_eq!(design_alpha(0.2 * PI).unwrap(), 0.5095254, epsilon = 1e-6);
        assert_abs_diff_eq!(design_alpha(1e-9).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(design_alpha(PI / 3.0).unwrap(), 0.2679492, epsilon = 1e-7);
        assert!(design_alpha(0.0).is_err());
        assert!(design_alpha(FRAC_PI_2).is_err());
        assert!(design_alpha(f64::NAN).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_abs_diff_eq!(design_beta(0.2 * PI).unwrap(), 0.5441132, epsilon = 1e-6);
        assert_abs_diff_eq!(design_beta(1e-9).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(design_beta(PI).unwrap(), 3.0 - 8f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(design_beta(PI).unwrap(), 0.1715729, epsilon = 1e-7);
        assert!(design_beta(-0.1).is_err());
        assert!(design_beta(PI + 1e-9).is_err());
    }

    #[test]
    fn tcut_recommendation() {
        assert_eq!(recommend_tcut(10, 7), Ok(40));
        assert_eq!(recommend_tcut(9, 9), Ok(36));
        assert_eq!(recommend_tcut(36, 20), Ok(144));
        assert_eq!(recommend_tcut(0, 3), Ok(12));
        assert_eq!(recommend_tcut(0, 0), Err(DesignError::NoEvents));
    }

    #[test]
    fn alpha_cutoff_inverts_design() {
        for w in [0.01, 0.3, 1.0, 1.5] {
            let a = design_alpha(w).unwrap();
            assert_abs_diff_eq!(alpha_cutoff(a), w, epsilon = 1e-12);
        }
    }

    #[test]
    fn params_from_t_cut() {
        let p = FilterParams::from_t_cut(10.0).unwrap();
        assert_eq!(p.alpha, p.beta);
        assert_abs_diff_eq!(p.alpha, 0.5095254, epsilon = 1e-6);
        assert_abs_diff_eq!(p.omega_cut(), 0.2 * PI, epsilon = 1e-15);
        assert!(FilterParams::from_t_cut(4.0).is_err());
        assert!(FilterParams::with_coefficients(1.0, 0.5).is_err());
        let q = FilterParams::with_coefficients(0.5095254, 0.3).unwrap();
        assert_abs_diff_eq!(q.t_cut_events, 10.0, epsilon = 1e-4);
    }

    #[test]
    fn nyquist_and_dc_gains() {
        for b in [0.0, 0.2, 0.54, 0.9] {
            let m = transfer_magnitude(PI, 0.5, b);
            assert_abs_diff_eq!(m.low_pass, 0.5, epsilon = 1e-12);
            // H_b contains an integrator; the staged high-pass it was built
            // from, (1 + b)(z - 1) / (2 (z - b)), has unit gain at Nyquist
            let z = Complex64::from_polar(1.0, PI);
            let stage = 0.5 * (1.0 + b) * (z - 1.0) / (z - b);
            assert_abs_diff_eq!(stage.norm(), 1.0, epsilon = 1e-12);
        }
        let m = transfer_magnitude(0.0, 0.5, 0.5);
        assert_eq!(m.high_pass, 0.0);
        assert_eq!(m.total, 0.0);
        assert_abs_diff_eq!(
            transfer_magnitude(0.0, 0.1, 0.54).low_pass,
            low_pass_peak(0.54),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            transfer_magnitude(PI, 0.51, 0.1).high_pass,
            high_pass_peak(0.51),
            epsilon = 1e-12
        );
    }
}
