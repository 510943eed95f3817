use std::process::ExitCode;

use bautlab::{execute, Cli, ExitStatus};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::Schema as u8 } else { 0 });
        }
    };
    if let Ok(n) = std::env::var("BAUTLAB_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: BAUTLAB_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(ExitStatus::Schema as u8);
            }
        }
    }
    match execute(&cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
