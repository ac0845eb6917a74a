//! Period statistics and their CSV forms.

use std::collections::BTreeMap;
use std::io::Write;

use freqcam_core::period::PeriodSample;

/// Summary of a run of period measurements.
///
/// The histogram counts deviations from `reference_us` rounded to whole
/// microseconds, the camera's timestamp quantum.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodStats {
    pub count: usize,
    pub mean_us: f64,
    /// Population standard deviation.
    pub stddev_us: f64,
    pub min_us: f64,
    pub max_us: f64,
    pub reference_us: f64,
    pub histogram: BTreeMap<i64, u64>,
}

impl PeriodStats {
    /// `reference_us` defaults to the mean.
    pub fn from_samples(samples: &[PeriodSample], reference_us: Option<f64>) -> Self {
        let n = samples.len();
        let periods = samples.iter().map(|s| s.period_us);
        let (mean, stddev, min, max) = if n == 0 {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = periods.clone().sum::<f64>() / n as f64;
            let var = periods.clone().map(|p| (p - mean).powi(2)).sum::<f64>() / n as f64;
            let min = periods.clone().fold(f64::INFINITY, f64::min);
            let max = periods.clone().fold(f64::NEG_INFINITY, f64::max);
            (mean, var.sqrt(), min, max)
        };
        let reference_us = reference_us.unwrap_or(mean);
        let mut histogram = BTreeMap::new();
        if n > 0 {
            for p in periods {
                *histogram.entry(deviation_bin(p, reference_us)).or_insert(0) += 1;
            }
        }
        PeriodStats {
            count: n,
            mean_us: mean,
            stddev_us: stddev,
            min_us: min,
            max_us: max,
            reference_us,
            histogram,
        }
    }

    /// Histogram bin with the most samples; ties go to the smaller deviation.
    pub fn modal_deviation_us(&self) -> Option<i64> {
        self.histogram
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(bin, _)| *bin)
    }
}

pub fn deviation_bin(period_us: f64, reference_us: f64) -> i64 {
    (period_us - reference_us).round() as i64
}

/// Median of the period values; `None` when empty.
pub fn median_period(samples: &[PeriodSample]) -> Option<f64> {
    let mut p: Vec<f64> = samples.iter().map(|s| s.period_us).collect();
    if p.is_empty() {
        return None;
    }
    p.sort_by(f64::total_cmp);
    let mid = p.len() / 2;
    Some(if p.len() % 2 == 1 {
        p[mid]
    } else {
        0.5 * (p[mid - 1] + p[mid])
    })
}

/// Most frequent period after rounding to `bin_us`; ties go to the shorter
/// period.
pub fn modal_period(samples: &[PeriodSample], bin_us: f64) -> Option<f64> {
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for s in samples {
        *counts
            .entry((s.period_us / bin_us).round() as i64)
            .or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(bin, _)| bin as f64 * bin_us)
}

pub const SAMPLES_HEADER: [&str; 5] =
    ["index", "t_us", "period_us", "frequency_hz", "deviation_us"];
pub const SUMMARY_HEADER: [&str; 10] = [
    "status",
    "mode",
    "t_cut",
    "count",
    "mean_us",
    "stddev_us",
    "min_us",
    "max_us",
    "reference_us",
    "mean_frequency_hz",
];
pub const HISTOGRAM_HEADER: [&str; 2] = ["deviation_us", "count"];

/// One row per sample.
pub fn write_samples<W: Write>(
    samples: &[PeriodSample],
    stats: &PeriodStats,
    sink: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(SAMPLES_HEADER)?;
    for (i, s) in samples.iter().enumerate() {
        w.write_record([
            i.to_string(),
            s.t_us.to_string(),
            s.period_us.to_string(),
            s.frequency_hz().to_string(),
            (s.period_us - stats.reference_us).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Single-row summary.
pub fn write_summary<W: Write>(
    stats: &PeriodStats,
    mode: &str,
    t_cut: Option<f64>,
    sink: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(SUMMARY_HEADER)?;
    let status = if stats.count == 0 { "empty" } else { "ok" };
    let num = |v: f64| {
        if v.is_nan() {
            String::new()
        } else {
            v.to_string()
        }
    };
    w.write_record([
        status.to_string(),
        mode.to_string(),
        t_cut.map_or(String::new(), |t| t.to_string()),
        stats.count.to_string(),
        num(stats.mean_us),
        num(stats.stddev_us),
        num(stats.min_us),
        num(stats.max_us),
        num(stats.reference_us),
        num(1e6 / stats.mean_us),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(stats: &PeriodStats, sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HISTOGRAM_HEADER)?;
    for (bin, count) in &stats.histogram {
        w.write_record([bin.to_string(), count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
