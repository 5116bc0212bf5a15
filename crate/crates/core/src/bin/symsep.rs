use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use symsep::verify::{self, parse_override, ConfigError, Format, RunConfig, CHECK_IDS};

/// Default report directory when `--out` is not given.
const OUT_DIR_ENV: &str = "SYMSEP_OUT_DIR";

#[derive(Parser)]
#[command(name = "symsep", version, about = "Verification checks for separable coordinates on symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one check, or `all`.
    Verify {
        /// One of octonion-diagonal, f4, cpn, lie-triple-dims, demo-separation, all.
        check: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance override, CHECK=VALUE; repeatable.
        #[arg(long = "tol", value_name = "CHECK=VALUE")]
        tol: Vec<String>,
        /// Sample count override, CHECK=N; repeatable.
        #[arg(long = "samples", value_name = "CHECK=N")]
        samples: Vec<String>,
        /// Report file; defaults to $SYMSEP_OUT_DIR/report.{json,txt}, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Record wall-clock runtimes (reports are then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn overrides<T: std::str::FromStr>(items: &[String]) -> Result<BTreeMap<String, T>, ConfigError> {
    items.iter().map(|s| parse_override(s)).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Verify {
        check,
        seed,
        tol,
        samples,
        out,
        format,
        timings,
    } = cli.command;

    let config = (|| -> Result<RunConfig, ConfigError> {
        let cfg = RunConfig {
            seed,
            tolerances: overrides(&tol)?,
            samples: overrides(&samples)?,
            out,
            format: match format {
                FormatArg::Json => Format::Json,
                FormatArg::Text => Format::Text,
            },
            timings,
        };
        cfg.validate()?;
        if check != "all" && !CHECK_IDS.contains(&check.as_str()) {
            return Err(ConfigError::UnknownCheck(check.clone()));
        }
        Ok(cfg)
    })();
    let cfg = match config {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let reports = if check == "all" {
        verify::run_all(&cfg)
    } else {
        verify::run_check(&check, &cfg).map(|r| vec![r])
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let rendered = verify::render(cfg.format, cfg.seed, &reports);

    let ext = match cfg.format {
        Format::Json => "json",
        Format::Text => "txt",
    };
    let target = cfg
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("report.{ext}"))));
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
            for r in &reports {
                eprintln!("{} {}", r.status.as_str(), r.check_id);
            }
        }
        None => print!("{rendered}"),
    }
    for r in reports.iter().filter(|r| r.status == verify::Status::Fail) {
        eprintln!("check failed: {}", r.check_id);
    }
    ExitCode::from(verify::exit_code(&reports) as u8)
}
