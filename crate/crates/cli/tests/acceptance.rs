//! Acceptance checks, one PASS/FAIL line each. Run with
//! `cargo test -p freqcam --test acceptance`.
//!
//! Set `FREQCAM_UPDATE_GOLDEN=1` to rewrite the golden frame.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use freqcam::bench::{run_bench, BenchConfig};
use freqcam::imaging::{render_frames, ImageJob};
use freqcam::stats::{median_period, modal_period};
use freqcam_core::image::{
    color_index, color_table, write_ppm, Cell, FreqImageConfig, FrequencyMap, PixelState, BLACK,
};
use freqcam_core::noise::{NoiseFilterParams, NoiseFilterState};
use freqcam_core::period::{
    design_alpha, design_beta, period_stream, recommend_tcut, Coefficients, CrossingDirection,
    FilterParams, FilterState, Mode, PeriodSample,
};
use freqcam_core::{Event, Polarity, StreamHeader};
use freqcam_sim::{
    generate_dark_noise, merge_noise, nyquist_hz, per_pixel_rate, pixel_events, sweep_plateaus,
    CameraModel, ReadoutModel, Rect, Region, Scenario, Shape, SignalSpec, Waveform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_err(measured: f64, truth: f64) -> f64 {
    ((measured - truth) / truth).abs()
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Per-cycle ON and OFF counts in the cycle starting at `t0`.
fn cycle_counts(events: &[Event], t0: u64, period_us: u64) -> (u64, u64) {
    events
        .iter()
        .filter(|e| e.t_us >= t0 && e.t_us < t0 + period_us)
        .fold((0, 0), |(on, off), e| match e.polarity {
            Polarity::On => (on + 1, off),
            Polarity::Off => (on, off + 1),
        })
}

fn tcut_for(events: &[Event], t0: u64, period_us: u64) -> f64 {
    let (on, off) = cycle_counts(events, t0, period_us);
    recommend_tcut(on, off).expect("signal has events") as f64
}

fn after(samples: &[PeriodSample], t_us: f64) -> Vec<PeriodSample> {
    samples.iter().copied().filter(|s| s.t_us >= t_us).collect()
}

// |(e^{jw} - 1) / (e^{jw} - a)|^2
fn high_pass_power(w: f64, a: f64) -> f64 {
    let num = (w.cos() - 1.0).powi(2) + w.sin().powi(2);
    let den = (w.cos() - a).powi(2) + w.sin().powi(2);
    num / den
}

// |(1 + b) e^{jw} / (2 (e^{jw} - b))|^2
fn low_pass_power(w: f64, b: f64) -> f64 {
    let den = (w.cos() - b).powi(2) + w.sin().powi(2);
    0.25 * (1.0 + b).powi(2) / den
}

fn coefficient_design() -> Outcome {
    let a = design_alpha(0.2 * PI).map_err(|e| e.to_string())?;
    let b = design_beta(0.2 * PI).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=30 {
        let w = k as f64 * 0.01 * PI;
        let a = design_alpha(w).map_err(|e| e.to_string())?;
        let b = design_beta(w).map_err(|e| e.to_string())?;
        // high-pass peaks at Nyquist, low-pass at DC
        let hp = high_pass_power(w, a) / high_pass_power(PI, a);
        let lp = low_pass_power(w, b) / low_pass_power(0.0, b);
        worst = worst.max((hp - 0.5).abs()).max((lp - 0.5).abs());
    }
    check(
        (a - 0.51).abs() <= 0.005 && (b - 0.54).abs() <= 0.005 && worst <= 1e-9,
        format!("alpha(0.2pi)={a:.4} beta(0.2pi)={b:.4} worst half-power error {worst:.1e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t_cut = rng.gen_range(5.0..400.0);
        let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
        let (alpha, beta) = (params.alpha, params.beta);
        let coef = Coefficients::<f64>::new(&params);
        let mut combined = FilterState::<f64>::default();
        // moving-average subtraction, then the leaky integrator
        let (mut p_avg, mut l) = (0.0f64, 0.0f64);
        for _ in 0..100_000 {
            let p: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let fast = combined.update(&coef, p);
            let detrended = p as f64 - p_avg;
            p_avg = alpha * p_avg + (1.0 - alpha) * p as f64;
            l = beta * l + 0.5 * (1.0 + beta) * detrended;
            worst = worst.max((fast - l).abs());
        }
    }
    check(
        worst <= 1e-10,
        format!("100 seeds x 1e5 samples, worst difference {worst:.2e}"),
    )
}

fn dc_rejection() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for t_cut in [5.0, 25.0, 144.0] {
        let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
        let coef = Coefficients::<f64>::new(&params);
        for p in [1i8, -1] {
            let mut state = FilterState::<f64>::default();
            let mut l = 0.0;
            for _ in 0..(20.0 * t_cut) as usize {
                l = state.update(&coef, p);
            }
            ok &= l.abs() < 1e-6;
            if p == 1 {
                parts.push(format!("T_cut {t_cut}: |l| {:.1e}", l.abs()));
            }
        }
    }
    check(ok, parts.join(", "))
}

fn fundamental_frequency() -> Outcome {
    let camera = CameraModel::default();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for shape in [Shape::Square, Shape::Triangle] {
        for freq in [10.0, 100.0, 1000.0] {
            let period = (1e6 / freq) as u64;
            let cycles = 30;
            let waveform = match shape {
                Shape::Square => Waveform::Square { freq_hz: freq },
                Shape::Triangle => Waveform::Triangle { freq_hz: freq },
                Shape::Sine => Waveform::Sine { freq_hz: freq },
            };
            let spec = SignalSpec::new(waveform, 7.0);
            let ev = pixel_events(&spec, &camera, 0, cycles * period, 0, 0);
            let t_cut = tcut_for(&ev, 10 * period, period);
            let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
            let mut errs = Vec::new();
            for mode in [Mode::Baseline, Mode::Filtered, Mode::Interpolated] {
                let s = period_stream(&ev, &params, mode, None).map_err(|e| e.to_string())?;
                let s = after(&s, (5 * period) as f64);
                if s.len() < 10 {
                    ok = false;
                    errs.push(format!("{mode}: {} samples", s.len()));
                    continue;
                }
                let err = rel_err(mean(s.iter().map(|x| x.period_us)), period as f64);
                worst = worst.max(err);
                ok &= err <= 1e-3;
            }
            parts.extend(errs.into_iter().map(|e| format!("{shape:?} {freq} Hz {e}")));
        }
    }
    parts.insert(0, format!("worst mean-period error {:.2e}", worst));
    check(ok, parts.join("; "))
}

fn baseline_failure() -> Outcome {
    let freq = 100.0;
    let period = 10_000u64;
    let spec = SignalSpec::new(
        Waveform::DoubleBurst {
            freq_hz: freq,
            second_ratio: 0.2,
        },
        7.0,
    );
    // a slow front end delays the two falling edges unequally
    let camera = CameraModel {
        lowpass_tau_us: 100.0,
        ..CameraModel::default()
    };
    let ev = pixel_events(&spec, &camera, 0, 50 * period, 0, 0);
    let t_cut = tcut_for(&ev, 10 * period, period);
    let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
    let warm = (5 * period) as f64;
    let base = after(
        &period_stream(&ev, &params, Mode::Baseline, None).map_err(|e| e.to_string())?,
        warm,
    );
    let filt = after(
        &period_stream(&ev, &params, Mode::Filtered, None).map_err(|e| e.to_string())?,
        warm,
    );
    let base_hz = modal_period(&base, 10.0).map_or(0.0, |p| 1e6 / p);
    let filt_hz = median_period(&filt).map_or(0.0, |p| 1e6 / p);
    let filt_mean_hz = 1e6 / mean(filt.iter().map(|s| s.period_us));
    check(
        rel_err(base_hz, 2.0 * freq) <= 0.02
            && rel_err(filt_hz, freq) <= 0.02
            && rel_err(filt_mean_hz, freq) <= 0.02,
        format!(
            "T_cut {t_cut}: baseline modal {base_hz:.2} Hz, filtered median {filt_hz:.2} Hz \
             mean {filt_mean_hz:.2} Hz (truth {freq} Hz)"
        ),
    )
}

fn frequency_sweep() -> Outcome {
    let (start, end, cycles) = (1.0, 32_768.0, 10);
    let spec = SignalSpec::new(
        Waveform::ExpSweep {
            start_hz: start,
            end_hz: end,
            cycles_per_step: cycles,
            shape: Shape::Square,
        },
        0.87,
    );
    let camera = CameraModel {
        lowpass_tau_us: 2.0,
        ..CameraModel::default()
    };
    let plateaus = sweep_plateaus(start, end, cycles);
    let last = plateaus.last().expect("non-empty sweep");
    let duration = (last.start_us + cycles as f64 * 1e6 / last.freq_hz).ceil() as u64;
    let ev = pixel_events(&spec, &camera, 0, duration, 0, 0);
    let t_cut = 25.0;
    let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
    let samples = period_stream(&ev, &params, Mode::Filtered, None).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for p in &plateaus {
        let truth = 1e6 / p.freq_hz;
        let settled = p.start_us + 3.0 * truth;
        let end = p.end_us;
        let inside: Vec<f64> = samples
            .iter()
            .filter(|s| s.t_us >= settled && s.t_us < end)
            .map(|s| s.period_us)
            .collect();
        if inside.is_empty() {
            ok = false;
            bad.push(format!("{} Hz: no samples", p.freq_hz));
            continue;
        }
        let err = inside
            .iter()
            .map(|&q| rel_err(q, truth))
            .fold(0.0, f64::max);
        worst = worst.max(err);
        if err > 0.05 {
            ok = false;
            bad.push(format!("{} Hz: error {:.1}%", p.freq_hz, 100.0 * err));
        }
    }
    check(
        ok,
        format!(
            "{} plateaus {start}..{end} Hz, {} events, T_cut {t_cut}, worst error {:.2}%{}{}",
            plateaus.len(),
            ev.len(),
            100.0 * worst,
            if bad.is_empty() { "" } else { "; " },
            bad.join(", ")
        ),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Source {
    Signal,
    Leading,
    Pair,
}

fn recovers(samples: &[PeriodSample], truth: f64) -> (bool, f64, f64) {
    let Some(median) = median_period(samples) else {
        return (false, f64::NAN, 0.0);
    };
    let close = samples
        .iter()
        .filter(|s| rel_err(s.period_us, truth) <= 0.02)
        .count() as f64
        / samples.len() as f64;
    (
        rel_err(median, truth) <= 0.02 && close >= 0.9,
        median,
        close,
    )
}

fn dark_noise() -> Outcome {
    let period = 1_000_000u64;
    let cycles = 12;
    let window = 0..cycles * period;
    let spec = SignalSpec::square(1.0, 7.0);
    let clean = pixel_events(&spec, &CameraModel::default(), 0, window.end, 0, 0);
    let nf = NoiseFilterParams::default();

    let mut kept_clean = Vec::new();
    let mut state = NoiseFilterState::new();
    for e in &clean {
        state
            .push(*e, &nf, &mut kept_clean)
            .map_err(|e| e.to_string())?;
    }
    state.flush(&mut kept_clean);
    let genuine_removed = clean.len() - kept_clean.len();

    let noise = freqcam_sim::NoiseSpec {
        trigger_rate_hz: 20.0,
        ..Default::default()
    };
    let episodes = generate_dark_noise(&[(0, 0)], &noise, window.clone(), 5);
    let mut labeled: Vec<(Source, Event)> = clean.iter().map(|e| (Source::Signal, *e)).collect();
    for ep in &episodes {
        labeled.push((Source::Leading, ep.leading));
        labeled.push((Source::Pair, ep.pair_off));
        labeled.push((Source::Pair, ep.pair_on));
    }
    // signal first among equal timestamps, as in the merged stream
    labeled.sort_by_key(|(s, e)| (e.t_us, *s != Source::Signal));
    let mut kept = Vec::new();
    let mut state = NoiseFilterState::new();
    for item in labeled {
        state
            .push(item, &nf, &mut kept)
            .map_err(|e| e.to_string())?;
    }
    state.flush(&mut kept);
    let pairs_total = 2 * episodes.len();
    let pairs_left = kept.iter().filter(|(s, _)| *s == Source::Pair).count();
    let removed = 1.0 - pairs_left as f64 / pairs_total as f64;

    let noisy = merge_noise(&clean, &episodes);
    let t_cut = tcut_for(&clean, 3 * period, period);
    let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
    let warm = (2 * period) as f64;
    let with = after(
        &period_stream(&noisy, &params, Mode::Filtered, Some(&nf)).map_err(|e| e.to_string())?,
        warm,
    );
    let without = after(
        &period_stream(&noisy, &params, Mode::Filtered, None).map_err(|e| e.to_string())?,
        warm,
    );
    let (with_ok, with_med, with_close) = recovers(&with, period as f64);
    let (without_ok, without_med, without_close) = recovers(&without, period as f64);
    check(
        removed >= 0.95 && genuine_removed == 0 && with_ok && !without_ok,
        format!(
            "{} episodes, pair events removed {:.1}%, genuine removed {genuine_removed}; \
             filtered: {} samples median {:.4} Hz {:.0}% within 2%; \
             unfiltered: {} samples median {:.4} Hz {:.0}% within 2%",
            episodes.len(),
            100.0 * removed,
            with.len(),
            1e6 / with_med,
            100.0 * with_close,
            without.len(),
            1e6 / without_med,
            100.0 * without_close
        ),
    )
}

fn bandwidth_saturation() -> Outcome {
    let rate = per_pixel_rate(50e6, 640 * 480);
    let nyquist = nyquist_hz(rate);
    let identity_ok = (rate - 162.76).abs() < 0.005 && (nyquist - 81.0).abs() < 1.0;

    let freq = 64.0;
    let truth = 1e6 / freq;
    let mut scene = Scenario::new(20, 15, 1_000_000);
    scene.regions.push(Region {
        rect: None,
        stop_us: None,
        signal: SignalSpec::square(freq, 7.0),
    });
    scene.readout = Some(ReadoutModel::new(5e4));
    let (cx, cy) = (10, 7);
    let mut roi = scene.clone();
    roi.roi = Some(Rect {
        x: cx,
        y: cy,
        width: 1,
        height: 1,
    });
    let (_, full_ev) = scene.generate().map_err(|e| e.to_string())?;
    let (_, roi_ev) = roi.generate().map_err(|e| e.to_string())?;
    let pick = |ev: &[Event]| -> Vec<Event> {
        ev.iter()
            .copied()
            .filter(|e| e.x == cx && e.y == cy)
            .collect()
    };
    let full_px = pick(&full_ev);
    let roi_px = pick(&roi_ev);
    let t_cut = tcut_for(&roi_px, (5.0 * truth) as u64, truth.round() as u64);
    let params = FilterParams::from_t_cut(t_cut).map_err(|e| e.to_string())?;
    let warm = 3.0 * truth;
    let error = |ev: &[Event]| -> Result<Option<f64>, String> {
        let s = period_stream(ev, &params, Mode::Interpolated, None).map_err(|e| e.to_string())?;
        let s = after(&s, warm);
        Ok((!s.is_empty()).then(|| rel_err(mean(s.iter().map(|x| x.period_us)), truth)))
    };
    let full_err = error(&full_px)?;
    let roi_err = error(&roi_px)?;
    let fmt = |e: Option<f64>| e.map_or("no detection".into(), |e| format!("{:.2}%", 100.0 * e));
    check(
        identity_ok && full_err.is_none_or(|e| e > 0.25) && roi_err.is_some_and(|e| e < 0.01),
        format!(
            "{rate:.2} updates/s per pixel, Nyquist {nyquist:.1} Hz; 20x15 at 5e4 ev/s: \
             full sensor {} ({} events at center), ROI {} ({} events)",
            fmt(full_err),
            full_px.len(),
            fmt(roi_err),
            roi_px.len()
        ),
    )
}

fn imaging_rules() -> Outcome {
    let header = StreamHeader::new(1, 1).unwrap();
    let params = FilterParams::from_t_cut(5.0).map_err(|e| e.to_string())?;
    let mut map = FrequencyMap::new(header, &params);
    let period = 10_000u64;
    let mut events = Vec::new();
    for k in 0..6 {
        for i in 0..4 {
            events.push(Event::on(1_000 + k * period + 10 * i, 0, 0));
            events.push(Event::off(6_000 + k * period + 10 * i, 0, 0));
        }
    }
    events.sort_by_key(|e| e.t_us);

    let mut first_period = None;
    let mut replaced = None;
    let mut problems = Vec::new();
    let dirs = [CrossingDirection::FromAbove, CrossingDirection::FromBelow];
    for e in &events {
        let before: PixelState = *map.pixel(0, 0);
        map.update(e).map_err(|e| e.to_string())?;
        let now: PixelState = *map.pixel(0, 0);
        for (i, &dir) in dirs.iter().enumerate() {
            if now.last_crossing_us(dir) == before.last_crossing_us(dir) {
                continue;
            }
            let t = e.t_us as f32;
            let same = before.last_crossing_us(dir);
            let opposite = before.last_crossing_us(dirs[1 - i]);
            match (same, opposite, before.period_us()) {
                (None, Some(o), None) => {
                    first_period = now.period_us();
                    if now.period_us() != Some(2.0 * (t - o as f32)) || !now.period_is_half() {
                        problems.push(format!("bootstrap at {}", e.t_us));
                    }
                }
                (Some(s), _, _) if replaced.is_none() => {
                    replaced = now.period_us();
                    if now.period_us() != Some(t - s as f32) || now.period_is_half() {
                        problems.push(format!("replacement at {}", e.t_us));
                    }
                }
                _ => {}
            }
        }
    }
    if first_period.is_none() {
        problems.push("no half-period bootstrap".into());
    }
    if replaced != Some(period as f32) {
        problems.push(format!("full period {replaced:?}"));
    }

    let config = FreqImageConfig::default();
    let t_last = events.last().unwrap().t_us;
    let p = map.pixel(0, 0).period_us().unwrap() as u64;
    let limit = t_last + config.n_timeout as u64 * p;
    // no readout in between: the estimate survives any gap
    if map.pixel(0, 0).period_us().is_none() {
        problems.push("estimate lost without readout".into());
    }
    if map.readout(limit, &config).cell(0, 0) != Cell::Frequency(1e6 / p as f32) {
        problems.push("timed out early".into());
    }
    if matches!(
        map.readout(limit + 1, &config).cell(0, 0),
        Cell::Frequency(_)
    ) || map.pixel(0, 0).period_us().is_some()
    {
        problems.push("no timeout after n_timeout periods".into());
    }

    let (golden_ok, golden_detail) = golden_frame()?;
    let ok = problems.is_empty() && golden_ok;
    check(
        ok,
        format!(
            "bootstrap {:?} us, replacement {:?} us, timeout at readout; {}{}",
            first_period,
            replaced,
            golden_detail,
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems.join(", "))
            }
        ),
    )
}

fn golden_scene() -> Scenario {
    let mut scene = Scenario::new(32, 16, 200_000);
    scene.regions.push(Region {
        rect: Some(Rect {
            x: 0,
            y: 0,
            width: 16,
            height: 16,
        }),
        stop_us: None,
        signal: SignalSpec::square(100.0, 7.0),
    });
    scene.regions.push(Region {
        rect: Some(Rect {
            x: 16,
            y: 0,
            width: 16,
            height: 16,
        }),
        stop_us: None,
        signal: SignalSpec::square(200.0, 7.0),
    });
    scene
}

fn golden_frame() -> Result<(bool, String), String> {
    let (header, events) = golden_scene().generate().map_err(|e| e.to_string())?;
    let job = ImageJob::default();
    let mut last = None;
    render_frames(header, &events, &job, |f| {
        last = Some(f.raster.clone());
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let raster = last.ok_or("no frames")?;
    let mut ppm = Vec::new();
    write_ppm(&raster, &mut ppm).map_err(|e| e.to_string())?;

    let table = color_table();
    let left = table[color_index(100.0, &job.config)];
    let right = table[color_index(200.0, &job.config)];
    let colors_ok = (0..16)
        .all(|y| (0..32).all(|x| raster.pixel(x, y) == if x < 16 { left } else { right }))
        && left != BLACK;

    let path: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "tests",
        "golden",
        "two_region.ppm",
    ]
    .iter()
    .collect();
    if std::env::var_os("FREQCAM_UPDATE_GOLDEN").is_some() || !path.exists() {
        std::fs::write(&path, &ppm).map_err(|e| e.to_string())?;
        return Ok((
            colors_ok,
            format!("golden frame written to {}", path.display()),
        ));
    }
    let golden = std::fs::read(&path).map_err(|e| e.to_string())?;
    Ok((
        colors_ok && golden == ppm,
        format!(
            "golden frame {} ({} bytes), region colors {}",
            if golden == ppm { "matches" } else { "differs" },
            ppm.len(),
            if colors_ok { "as expected" } else { "wrong" }
        ),
    ))
}

fn throughput() -> Outcome {
    let cfg = BenchConfig::default();
    let cases = run_bench(&cfg, |_| {}).map_err(|e| e.to_string())?;
    let get = |name: &str| cases.iter().find(|c| c.name == name);
    let full = get("full_pipeline").ok_or("missing full_pipeline case")?;
    let hot = get("filter_hot_pixel").map_or(f64::NAN, |c| c.median_mevs());
    let large = get("full_pipeline_large").map_or(f64::NAN, |c| c.median_mevs());
    let state = std::mem::size_of::<PixelState>();
    check(
        full.median_mevs() >= 20.0 && state <= 32,
        format!(
            "{}x{} {:.0e} events x {} runs: median {:.1} Mev/s; {state} bytes per pixel; \
             hot pixel {:.1} Mev/s; {}x area {:.1} Mev/s",
            full.width,
            full.height,
            full.events as f64,
            full.runs_mevs.len(),
            full.median_mevs(),
            hot,
            cfg.area_scale,
            large
        ),
    )
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "coefficient_design",
            limit: Duration::from_secs(1),
            run: coefficient_design,
        },
        Criterion {
            name: "oracle_equivalence",
            limit: Duration::from_secs(10),
            run: oracle_equivalence,
        },
        Criterion {
            name: "dc_rejection",
            limit: Duration::from_secs(1),
            run: dc_rejection,
        },
        Criterion {
            name: "fundamental_frequency",
            limit: Duration::from_secs(30),
            run: fundamental_frequency,
        },
        Criterion {
            name: "baseline_failure_mode",
            limit: Duration::from_secs(10),
            run: baseline_failure,
        },
        Criterion {
            name: "frequency_sweep",
            limit: Duration::from_secs(60),
            run: frequency_sweep,
        },
        Criterion {
            name: "dark_noise_filter",
            limit: Duration::from_secs(10),
            run: dark_noise,
        },
        Criterion {
            name: "bandwidth_saturation",
            limit: Duration::from_secs(30),
            run: bandwidth_saturation,
        },
        Criterion {
            name: "imaging_rules",
            limit: Duration::from_secs(10),
            run: imaging_rules,
        },
        Criterion {
            name: "throughput",
            limit: Duration::from_secs(120),
            run: throughput,
        },
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > c.limit {
            pass = false;
            detail.push_str(&format!("; over the {:?} limit", c.limit));
        }
        if !pass {
            failed += 1;
        }
        println!(
            "{} {} ({:.2}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
