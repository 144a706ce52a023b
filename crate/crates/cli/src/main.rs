use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use walklab::{run_file, Task};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Walk,
    Mc,
    Spectral,
    Fit,
    Verify,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Walk => Task::Walk,
            TaskArg::Mc => Task::Mc,
            TaskArg::Spectral => Task::Spectral,
            TaskArg::Fit => Task::Fit,
            TaskArg::Verify => Task::Verify,
        }
    }
}

/// Return probabilities of random walks on groups.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// usage or run error.
#[derive(Debug, Parser)]
#[command(name = "walklab", version)]
struct Args {
    task: TaskArg,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = std::time::Instant::now();
    match run_file(&args.config, Some(args.task.into()), args.seed, args.out) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            log::info!("finished in {:.2?}", start.elapsed());
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("hint: {h}");
            }
            ExitCode::from(2)
        }
    }
}
