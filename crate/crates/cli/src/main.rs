//! `swirl` — experiments on structured random-matrix ensembles.
//!
//! Exit codes: 0 success, 1 validation failure (bad flags, unwritable
//! paths, budget caps), 2 internal numerical failure (eigensolver
//! non-convergence, integer overflow, a failed identity check).

mod args;
mod commands;
mod output;

use clap::Parser;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    configure_threads();
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// SWIRL_THREADS caps the rayon worker pool. Scheduling never affects
/// output content, only wall-clock time.
fn configure_threads() {
    if let Ok(threads) = std::env::var("SWIRL_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
