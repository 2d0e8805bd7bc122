use std::process::ExitCode;

use clap::Parser;
use elastoray::pool::run_in_pool;
use elastoray::{commands, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run_in_pool(|| commands::run(&cli)).and_then(|r| r);
    match result.and_then(|report| report.write(cli.out.as_deref()).map(|_| report)) {
        Ok(report) if report.passed() => ExitCode::SUCCESS,
        Ok(report) => {
            for f in &report.failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
