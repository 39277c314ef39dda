use std::process::ExitCode;

use clap::Parser;
use dimest_cli::{report::report_path, run, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, argv) {
        Ok(report) => {
            if let Some(out) = report.params.get("out").and_then(|v| v.as_str()) {
                eprintln!(
                    "wrote {out} and {} in {:.1}s",
                    report_path(out.as_ref()).display(),
                    report.wall_time_seconds
                );
            }
            for f in &report.failures {
                eprintln!("warning: {} (seed {}): {}", f.label, f.seed, f.error);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
