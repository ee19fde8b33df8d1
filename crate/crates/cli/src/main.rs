use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrf_lab::{check_formats, list_presets, run, Format, RunConfig, Source, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "qrf-lab", version, about = "Verify relational-frame entropy invariants on sampled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config or a bundled preset.
    Run {
        /// Path to the experiment config.
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a bundled preset (see `qrf-lab presets`).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance applied to every check.
        #[arg(long = "tol")]
        tolerance: Option<f64>,
        /// Comma-separated Rényi orders.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value = "qrf-lab-out")]
        out: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "json")]
        format: Vec<Format>,
        /// Suppress the per-check summary.
        #[arg(short, long)]
        quiet: bool,
    },
    /// List the bundled presets.
    Presets {
        /// Also print each preset's config document.
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    let code = match cli.command {
        Command::Run {
            config,
            preset,
            trials,
            seed,
            tolerance,
            alphas,
            out,
            format,
            quiet,
        } => {
            if let Err(e) = check_formats(&format) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ERROR as u8);
            }
            let source = match (config, preset) {
                (Some(path), None) => Source::File(path),
                (None, Some(name)) => Source::Preset(name),
                _ => unreachable!("clap enforces exactly one source"),
            };
            let cfg = RunConfig {
                source,
                out_dir: out,
                trials,
                seed,
                tolerance,
                alphas,
                formats: format,
                quiet,
            };
            run(&cfg, &mut stdout, &mut stderr)
        }
        Command::Presets { full } => match list_presets(&mut stdout, full) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
