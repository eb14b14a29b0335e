use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gp_parsimony::harness::{self, config};
use gp_parsimony::Result;

#[derive(Parser)]
#[command(name = "gp-parsimony", version, about = "Genetic programming bloat-control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file and/or a preset.
    Run {
        /// TOML experiment config.
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        population_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (overridden by GP_PARSIMONY_JOBS).
        #[arg(long)]
        jobs: Option<usize>,
        /// List every run without executing.
        #[arg(long)]
        dry_run: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild summary CSV, table and charts from an output directory.
    Report { dir: PathBuf },
    /// List the built-in sweep presets.
    ListPresets,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ListPresets => {
            for p in harness::PRESETS {
                println!("{:<14} {:>3} arms  {}", p.name, p.arms().len(), p.description);
            }
        }
        Command::Report { dir } => {
            let (summaries, files) = harness::report_dir(&dir)?;
            print!("{}", harness::report::summary_table(&summaries));
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Run {
            config: path,
            preset,
            runs,
            generations,
            population_size,
            seed,
            jobs,
            dry_run,
            out,
        } => {
            let text = match &path {
                Some(p) => std::fs::read_to_string(p).map_err(|e| gp_parsimony::GpError::Io {
                    path: p.clone(),
                    source: e,
                })?,
                None => String::new(),
            };
            let mut cfg = config::load_config(&text, preset.as_deref())?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(g) = generations {
                cfg.engine.generations = g;
            }
            if let Some(n) = population_size {
                cfg.engine.population_size = n;
            }
            if let Some(s) = seed {
                cfg.engine.seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            cfg.validate()?;

            if dry_run {
                let lines = harness::dry_run(&cfg);
                for l in &lines {
                    println!("{l}");
                }
                eprintln!("{} runs", lines.len());
                return Ok(());
            }
            let jobs = harness::resolve_jobs(jobs);
            eprintln!(
                "running {} runs on {} worker(s) into {}",
                cfg.cell_count(),
                jobs,
                cfg.output_dir.display()
            );
            let output = harness::run_experiment(&cfg, jobs)?;
            print!("{}", harness::report::summary_table(&output.summaries));
            for f in output.files {
                eprintln!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}
