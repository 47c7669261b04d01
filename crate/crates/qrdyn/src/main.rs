use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qrdyn::config::COMMANDS;

/// Runs one qrdyn job described by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "qrdyn", version)]
struct Cli {
    /// One of render_julia, compare_julia, check_commute, growth, pits, dilatation, bottcher.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "qrdyn-out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // QRDYN_THREADS caps the worker count; 0 or unset lets rayon decide
    let threads = match std::env::var("QRDYN_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("qrdyn: QRDYN_THREADS must be a non-negative integer, got `{v}`");
                return ExitCode::from(2);
            }
        },
        Err(_) => 0,
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("qrdyn: cannot size the thread pool: {e}");
        }
    }
    match qrdyn::run_file(&cli.config, Some(&cli.command), &cli.out, cli.seed) {
        Ok(summary) => {
            println!("{}", cli.out.join(format!("{}_summary.json", summary.command)).display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qrdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
