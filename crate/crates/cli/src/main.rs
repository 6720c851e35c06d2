mod args;
mod commands;
mod config;
mod output;
mod resources;

use clap::Parser;

use args::Cli;

/// One-line JSON description of a failure.
fn error_line(err: &anyhow::Error) -> String {
    let kind = err
        .chain()
        .find_map(|e| {
            e.downcast_ref::<cognate_core::Error>()
                .map(|c| c.kind())
                .or_else(|| e.downcast_ref::<std::io::Error>().map(|_| "io"))
                .or_else(|| e.downcast_ref::<serde_json::Error>().map(|_| "serde"))
        })
        .unwrap_or("runtime");
    let message = err.chain().map(ToString::to_string).collect::<Vec<_>>().join(": ");
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cli = config::resolve(cli)?;
    if let Some(n) = cli.global.threads {
        if n == 0 {
            config::usage_error("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    log::debug!("running {}", cli.command.name());
    commands::dispatch(&cli)
}

fn main() {
    let cli = Cli::parse();
    init_logging(cli.global.verbose);
    if let Err(err) = run(cli) {
        eprintln!("{}", error_line(&err));
        std::process::exit(1);
    }
}
