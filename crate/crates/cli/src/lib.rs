//! Library side of the `freqcam` command-line tool.

pub mod analyze;
pub mod bench;
pub mod config;
pub mod error;
pub mod imaging;
pub mod simulate;
pub mod stats;

use std::fs::File;

use config::{Cli, Command, ConfigFile};
use error::CliError;

/// Runs one parsed invocation, printing a human-readable summary to stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Simulate(mut args) => {
            args.fill_from(file.simulate);
            let r = simulate::run(&args)?;
            println!(
                "wrote {} events ({} bytes) for a {}x{} sensor",
                r.events, r.bytes, r.header.width, r.header.height
            );
        }
        Command::Analyze(mut args) => {
            args.fill_from(file.analyze);
            let a = analyze::run(&args)?;
            let s = &a.stats;
            if s.count == 0 {
                eprintln!(
                    "warning: no periods detected ({} events at this pixel)",
                    a.events
                );
            }
            let t_cut = a.t_cut.map_or("-".to_string(), |t| t.to_string());
            println!("mode {} t_cut {t_cut} events {}", a.mode, a.events);
            println!(
                "count {} mean_us {:.3} stddev_us {:.3} min_us {:.3} max_us {:.3} mean_hz {:.4}",
                s.count,
                s.mean_us,
                s.stddev_us,
                s.min_us,
                s.max_us,
                1e6 / s.mean_us
            );
        }
        Command::Image(mut args) => {
            args.fill_from(file.image);
            let frames = imaging::run(&args)?;
            println!("wrote {frames} frames");
        }
        Command::Bench(mut args) => {
            args.fill_from(file.bench);
            let cfg = bench::BenchConfig::from_args(&args);
            let cases = bench::run_bench(&cfg, |line| eprintln!("{line}"))?;
            for c in &cases {
                println!(
                    "{:<20} {:>5}x{:<5} state {:>10} bytes  median {:>8.2} Mev/s",
                    c.name,
                    c.width,
                    c.height,
                    c.state_bytes,
                    c.median_mevs()
                );
            }
            if let [hot, full, ..] = cases.as_slice() {
                println!(
                    "hot-pixel filter / full pipeline: {:.1}x",
                    hot.median_mevs() / full.median_mevs()
                );
            }
            if let [_, full, large] = cases.as_slice() {
                println!(
                    "large / nominal sensor throughput: {:.2}",
                    large.median_mevs() / full.median_mevs()
                );
            }
            if let Some(path) = &args.csv {
                let f = File::create(path).map_err(CliError::io(path))?;
                bench::write_report(&cases, f).map_err(|e| CliError::Io {
                    path: path.clone(),
                    source: e.into(),
                })?;
            }
        }
    }
    Ok(())
}
