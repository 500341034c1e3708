use std::process::ExitCode;

use clap::Parser;
use zs_core::cli::{self, Cli};

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("ZS_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("ZS_NUM_THREADS must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(cli::EXIT_USAGE as u8);
    }
    match cli::run(&args) {
        Ok(summary) => {
            if cli::summary_to_stderr(&args) {
                eprintln!("{}", summary.line);
            } else {
                println!("{}", summary.line);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = match cli::exit_code(&e) {
                cli::EXIT_USAGE => "usage",
                cli::EXIT_IO => "io",
                _ => "numeric",
            };
            eprintln!("error ({kind}): {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
