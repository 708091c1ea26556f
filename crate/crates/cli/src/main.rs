mod config;
mod report;
mod tasks;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{RunConfig, Task};
use report::Report;

#[derive(Parser)]
#[command(name = "fhlab", version, about = "Functor homology over F_p on truncated additive categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seeds the sampling of (F, G) pairs; the mathematics is deterministic.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here and the text table next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print the text table instead of JSON.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a task described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    #[command(flatten)]
    Task(Task),
}

fn print(s: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(s.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit(report: &Report, out: Option<&PathBuf>, text: bool) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
            std::fs::write(path.with_extension("txt"), report.text())?;
            print(&report.text())
        }
        None if text => print(&report.text()),
        None => print(&format!("{json}\n")),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let config = match cli.command {
        Command::Run { config } => {
            let mut c = RunConfig::load(&config)?;
            c.output = cli.out.or(c.output);
            c.jobs = cli.jobs.or(c.jobs);
            c
        }
        Command::Task(task) => RunConfig { task, output: cli.out, jobs: cli.jobs, seed: cli.seed },
    };
    if let Some(n) = config.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let outcome = tasks::execute(&config.task, config.seed)?;
    let report = Report::new(config.task, config.seed, outcome);
    emit(&report, config.output.as_ref(), cli.text)?;
    if !report.ok {
        eprintln!("assertion failures:");
        for f in &report.failures {
            eprintln!("  {f}");
        }
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let kind = match e.downcast_ref::<fhlab::Error>() {
                Some(fhlab::Error::Guard(_)) => "guard violation",
                _ => "error",
            };
            eprintln!("{kind}: {e:#}");
            ExitCode::from(2)
        }
    }
}
