use std::process::ExitCode;

use causal_pathways::cli;
use causal_pathways::AppError;

const THREADS_VAR: &str = "CAUSAL_PATHWAYS_THREADS";

fn init_threads() -> Result<(), AppError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    match init_threads().and_then(|_| cli::run_from_args(std::env::args_os())) {
        Ok(()) => ExitCode::SUCCESS,
        // Help and version output arrive as empty usage errors.
        Err(AppError::Usage(msg)) if msg.is_empty() => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.trim_end();
            // clap messages carry their own prefix
            eprintln!("{}{msg}", if msg.starts_with("error:") { "" } else { "error: " });
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
