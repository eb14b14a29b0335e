//! Sweep orchestration: expands a config into runs, executes them on a
//! worker pool, and persists CSVs, a text table and SVG charts.
//!
//! Output layout under the output directory:
//!
//! * `generations.csv` one row per (run, generation), in cell order
//! * `summary.csv` one row per (problem, method, params, kill proportion)
//! * `summary.txt` and `plots/*.svg`
//! * `INCOMPLETE` present only while a sweep is running or after it failed

pub mod config;
pub mod csvio;
pub mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

pub use config::{parse_config, parse_config_with, preset, Arm, ExperimentConfig, PRESETS};

use crate::engine::{run_evolution, EngineConfig};
use crate::error::{GpError, Result};
use crate::metrics::{summarize, RunRecord, SweepSummary};
use crate::problems::ProblemId;
use crate::rng::splitmix64;
use csvio::{read_generations, write_summary, GenerationWriter};

pub const GENERATIONS_FILE: &str = "generations.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";
pub const JOBS_ENV: &str = "GP_PARSIMONY_JOBS";

/// One run of the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub problem: ProblemId,
    pub arm: Arm,
    pub run: usize,
    pub seed: u64,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of one run, derived from the master seed and the run's coordinates.
pub fn derive_run_seed(master: u64, problem: ProblemId, arm: &Arm, run: usize) -> u64 {
    let mut h = splitmix64(master);
    for part in [
        problem as u64,
        fnv1a(arm.strategy.to_string().as_bytes()),
        arm.kill_proportion.to_bits(),
        run as u64,
    ] {
        h = splitmix64(h ^ part);
    }
    h
}

/// All runs in deterministic order: problem, then arm, then run index.
pub fn expand_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(cfg.cell_count());
    for &problem in &cfg.problems {
        for arm in &cfg.arms {
            for run in 0..cfg.runs {
                cells.push(Cell {
                    problem,
                    arm: *arm,
                    run,
                    seed: derive_run_seed(cfg.master_seed(), problem, arm, run),
                });
            }
        }
    }
    cells
}

/// Engine settings of one run.
pub fn cell_engine(template: &EngineConfig, cell: &Cell) -> EngineConfig {
    EngineConfig {
        strategy: cell.arm.strategy,
        tarpeian: cell.arm.tarpeian(),
        seed: cell.seed,
        ..template.clone()
    }
}

pub fn run_cell(template: &EngineConfig, cell: &Cell) -> Result<RunRecord> {
    let cfg = cell_engine(template, cell);
    let trajectory = run_evolution(&cfg, &cell.problem.problem())?;
    Ok(RunRecord {
        problem: cell.problem,
        strategy: cell.arm.strategy,
        kill_proportion: cell.arm.kill_proportion,
        run: cell.run,
        seed: cell.seed,
        trajectory,
    })
}

/// One line per run, for `--dry-run`.
pub fn dry_run(cfg: &ExperimentConfig) -> Vec<String> {
    expand_cells(cfg)
        .iter()
        .map(|c| {
            format!(
                "{} {} kill_proportion={} run={} seed={}",
                c.problem, c.arm.strategy, c.arm.kill_proportion, c.run, c.seed
            )
        })
        .collect()
}

/// Worker count: the environment variable wins over the requested value,
/// which wins over available parallelism.
pub fn resolve_jobs(requested: Option<usize>) -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .or(requested)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<SweepSummary>,
    pub files: Vec<PathBuf>,
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Runs every cell on `jobs` workers, calling `sink` with records in cell
/// order regardless of completion order. The first failure stops the pool.
pub fn execute_cells<F>(template: &EngineConfig, cells: &[Cell], jobs: usize, mut sink: F) -> Result<Vec<RunRecord>>
where
    F: FnMut(&RunRecord) -> Result<()>,
{
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(usize, Result<RunRecord>)>();
    let mut records = Vec::with_capacity(cells.len());
    let mut failure = None;

    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(cells.len().max(1)) {
            let tx = tx.clone();
            let (next, abort) = (&next, &abort);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let result = catch_unwind(AssertUnwindSafe(|| run_cell(template, cell))).unwrap_or_else(|p| {
                    Err(GpError::Data(format!(
                        "{} {} run {} failed: {}",
                        cell.problem,
                        cell.arm.strategy,
                        cell.run,
                        panic_message(p.as_ref())
                    )))
                });
                if tx.send((i, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        for (i, result) in rx {
            match result {
                Ok(rec) => {
                    pending.insert(i, rec);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    abort.store(true, Ordering::Relaxed);
                }
            }
            while failure.is_none() {
                let Some(rec) = pending.remove(&records.len()) else { break };
                if let Err(e) = sink(&rec) {
                    failure = Some(e);
                    abort.store(true, Ordering::Relaxed);
                    break;
                }
                records.push(rec);
            }
        }
    });

    match failure {
        Some(e) => Err(e),
        None => Ok(records),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| GpError::io(path, e))
}

/// Runs the whole sweep and writes every output file.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| GpError::io(dir, e))?;
    let marker = dir.join(INCOMPLETE_MARKER);
    std::fs::write(&marker, "sweep did not finish\n").map_err(|e| GpError::io(&marker, e))?;

    let gen_path = dir.join(GENERATIONS_FILE);
    let mut writer = GenerationWriter::new(create(&gen_path)?)?;
    let cells = expand_cells(cfg);
    let records = execute_cells(&cfg.engine, &cells, jobs, |rec| {
        writer.write_run(rec)?;
        writer.flush()
    })?;
    writer.flush()?;
    drop(writer);

    let summaries = summarize(&records)?;
    let mut files = vec![gen_path];
    files.extend(write_outputs(&summaries, dir)?);
    std::fs::remove_file(&marker).map_err(|e| GpError::io(&marker, e))?;
    Ok(ExperimentOutput {
        records,
        summaries,
        files,
    })
}

fn write_outputs(summaries: &[SweepSummary], dir: &Path) -> Result<Vec<PathBuf>> {
    let summary_path = dir.join(SUMMARY_FILE);
    write_summary(create(&summary_path)?, summaries)?;
    let mut files = vec![summary_path];
    files.extend(report::emit_report(summaries, dir)?);
    Ok(files)
}

/// Regenerates summary CSV, table and charts from a finished output
/// directory's per-generation CSV.
pub fn report_dir(dir: &Path) -> Result<(Vec<SweepSummary>, Vec<PathBuf>)> {
    let gen_path = dir.join(GENERATIONS_FILE);
    let file = File::open(&gen_path).map_err(|e| GpError::io(&gen_path, e))?;
    let records = read_generations(file)?;
    let summaries = summarize(&records)?;
    let files = write_outputs(&summaries, dir)?;
    Ok((summaries, files))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::StrategySpec;
    use std::collections::HashSet;

    fn tiny(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            problems: vec![ProblemId::Quartic],
            arms: vec![Arm::new(StrategySpec::tournament(7), 0.0)],
            runs: 2,
            engine: EngineConfig {
                population_size: 30,
                generations: 3,
                seed: 5,
                ..EngineConfig::default()
            },
            output_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn seeds_are_injective_over_a_million_cells() {
        let arms: Vec<Arm> = (0..100)
            .flat_map(|b| [0.0, 0.1, 0.2, 0.3, 0.4].map(|w| Arm::new(StrategySpec::direct_bucket(b + 1), w)))
            .collect();
        let mut seen = HashSet::with_capacity(1_000_000);
        for problem in ProblemId::ALL[..2].iter() {
            for arm in &arms {
                for run in 0..1000 {
                    assert!(seen.insert(derive_run_seed(7, *problem, arm, run)));
                }
            }
        }
        assert_eq!(seen.len(), 1_000_000);
    }

    #[test]
    fn row_count_and_determinism() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let out = run_experiment(&tiny(a.path()), 2).unwrap();
        run_experiment(&tiny(b.path()), 1).unwrap();
        let csv_a = std::fs::read_to_string(a.path().join(GENERATIONS_FILE)).unwrap();
        assert_eq!(csv_a.lines().count(), 1 + 2 * 4);
        for f in [GENERATIONS_FILE, SUMMARY_FILE, "summary.txt", "plots/quartic_mean_fitness.svg"] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
        }
        assert!(!a.path().join(INCOMPLETE_MARKER).exists());
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.summaries.len(), 1);
    }

    #[test]
    fn report_reproduces_summary() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path());
        cfg.arms.push(Arm::new(StrategySpec::ratio_bucket(4), 0.3));
        run_experiment(&cfg, 3).unwrap();
        let before = std::fs::read(dir.path().join(SUMMARY_FILE)).unwrap();
        std::fs::remove_file(dir.path().join(SUMMARY_FILE)).unwrap();
        report_dir(dir.path()).unwrap();
        assert_eq!(std::fs::read(dir.path().join(SUMMARY_FILE)).unwrap(), before);
    }

    #[test]
    fn dry_run_counts_grid_product() {
        let cfg = config::parse_config_with("[sweep]\nruns = 3\nproblems = [\"quartic\", \"sextic\"]\n", Some("combined")).unwrap();
        assert_eq!(dry_run(&cfg).len(), 2 * 9 * 3);
    }

    #[test]
    fn failing_sink_aborts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let cells = expand_cells(&cfg);
        let err = execute_cells(&cfg.engine, &cells, 2, |_| Err(GpError::Data("disk full".into())));
        assert!(err.is_err());
    }

    #[test]
    fn contract_violation_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let mut cells = expand_cells(&cfg);
        // parsimony size outside [1, 2] trips validation inside the run
        cells[1].arm.strategy = StrategySpec::DoubleTournament { fitness_size: 7, parsimony_size: 3.0, do_fitness_first: true };
        assert!(execute_cells(&cfg.engine, &cells, 2, |_| Ok(())).is_err());
    }

    #[test]
    fn unwritable_output_leaves_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let cfg = tiny(&blocker.join("sub"));
        assert!(matches!(run_experiment(&cfg, 1), Err(GpError::Io { .. })));
    }
}
