use clap::error::{ContextKind, ContextValue};
use clap::Parser;
use polyrep::cli::{self, Cli, EXIT_USAGE};
use polyrep::config;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (args, cfg) = match config::merge_args(&argv, |s| cli::SUBCOMMANDS.contains(&s)) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let parsed = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            if let (Some(cfg), Some(ContextValue::String(flag))) = (&cfg, e.get(ContextKind::InvalidArg)) {
                let key = flag.trim_start_matches('-').split(['=', ' ']).next().unwrap_or("");
                if let Some(line) = cfg.line_of(key) {
                    eprintln!("note: `{flag}` comes from line {line} of the configuration file");
                }
            }
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli::run(parsed) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
