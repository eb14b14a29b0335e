//! Per-generation and summary CSV files.

use std::io::{Read, Write};

use crate::engine::GenerationResult;
use crate::error::{GpError, Result};
use crate::metrics::{RunRecord, SweepSummary};
use crate::problems::ProblemId;
use crate::selection::StrategySpec;

pub const GENERATIONS_HEADER: [&str; 11] = [
    "problem",
    "method",
    "params",
    "kill_proportion",
    "run",
    "generation",
    "best_adjusted",
    "best_size",
    "mean_pop_size",
    "mean_adjusted",
    "evaluations",
];

pub const SUMMARY_HEADER: [&str; 10] = [
    "problem",
    "method",
    "params",
    "kill_proportion",
    "n_runs",
    "mean_fitness",
    "std_fitness",
    "mean_tree_size",
    "std_tree_size",
    "mean_evaluations",
];

pub struct GenerationWriter<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> GenerationWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(GENERATIONS_HEADER)?;
        Ok(GenerationWriter { out })
    }

    pub fn write_run(&mut self, record: &RunRecord) -> Result<()> {
        for g in &record.trajectory {
            self.out.write_record([
                record.problem.key().to_string(),
                record.strategy.method().to_string(),
                record.strategy.params(),
                record.kill_proportion.to_string(),
                record.run.to_string(),
                g.generation.to_string(),
                g.best_adjusted.to_string(),
                g.best_size.to_string(),
                g.mean_pop_size.to_string(),
                g.mean_adjusted.to_string(),
                g.evaluations.to_string(),
            ])?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| GpError::io("<generations csv>", e))
    }

    pub fn into_inner(self) -> Result<W> {
        self.out
            .into_inner()
            .map_err(|e| GpError::io("<generations csv>", e.into_error()))
    }
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize) -> Result<&'a str> {
    rec.get(i)
        .ok_or_else(|| GpError::Data(format!("row has {} fields, expected {}", rec.len(), i + 1)))
}

fn number<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let s = field(rec, i)?;
    s.parse()
        .map_err(|_| GpError::Data(format!("bad value `{s}` in column {}", GENERATIONS_HEADER[i])))
}

/// Rebuilds run records from a per-generation CSV. Columns not persisted
/// (seed, best index, depth) come back as zero.
pub fn read_generations<R: Read>(r: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(GENERATIONS_HEADER) {
        return Err(GpError::Data("unexpected per-generation CSV header".into()));
    }
    let mut records: Vec<RunRecord> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let problem: ProblemId = field(&row, 0)?.parse()?;
        let strategy: StrategySpec = format!("{}:{}", field(&row, 1)?, field(&row, 2)?).parse()?;
        let kill_proportion: f64 = number(&row, 3)?;
        let run: usize = number(&row, 4)?;
        let g = GenerationResult {
            generation: number(&row, 5)?,
            best_index: 0,
            best_adjusted: number(&row, 6)?,
            best_size: number(&row, 7)?,
            mean_pop_size: number(&row, 8)?,
            mean_adjusted: number(&row, 9)?,
            evaluations: number(&row, 10)?,
            population_size: 0,
            max_depth: 0,
        };
        let same_run = records.last().is_some_and(|r| {
            r.problem == problem && r.strategy == strategy && r.kill_proportion == kill_proportion && r.run == run
        });
        if same_run {
            records.last_mut().expect("checked").trajectory.push(g);
        } else {
            records.push(RunRecord {
                problem,
                strategy,
                kill_proportion,
                run,
                seed: 0,
                trajectory: vec![g],
            });
        }
    }
    Ok(records)
}

pub fn write_summary<W: Write>(w: W, summaries: &[SweepSummary]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        out.write_record([
            s.key.problem.key().to_string(),
            s.key.strategy.method().to_string(),
            s.key.strategy.params(),
            s.key.kill_proportion.to_string(),
            s.n_runs.to_string(),
            s.mean_fitness.to_string(),
            s.std_fitness.to_string(),
            s.mean_tree_size.to_string(),
            s.std_tree_size.to_string(),
            s.mean_evaluations.to_string(),
        ])?;
    }
    out.flush().map_err(|e| GpError::io("<summary csv>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::summarize;

    fn record(run: usize, strategy: StrategySpec, w: f64) -> RunRecord {
        RunRecord {
            problem: ProblemId::Sextic,
            strategy,
            kill_proportion: w,
            run,
            seed: 0,
            trajectory: (0..3)
                .map(|g| GenerationResult {
                    generation: g,
                    best_index: 0,
                    best_adjusted: 1.0 / (3.0 + g as f64 + run as f64),
                    best_size: 5 + 2 * g,
                    mean_pop_size: 17.25 + g as f64 / 3.0,
                    mean_adjusted: 0.1 / 7.0,
                    evaluations: 100 - g,
                    population_size: 0,
                    max_depth: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn round_trip_preserves_summary() {
        let recs = vec![
            record(0, StrategySpec::double(7, 1.8), 0.4),
            record(1, StrategySpec::double(7, 1.8), 0.4),
            record(0, StrategySpec::ratio_bucket(3), 0.0),
        ];
        let mut w = GenerationWriter::new(Vec::new()).unwrap();
        recs.iter().for_each(|r| w.write_run(r).unwrap());
        let bytes = w.into_inner().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with(
            "problem,method,params,kill_proportion,run,generation,best_adjusted,best_size,mean_pop_size,mean_adjusted,evaluations\n"
        ));
        assert!(text.contains("\nsextic,double,7:1.8,0.4,1,2,"));
        assert_eq!(text.lines().count(), 1 + 9);
        let back = read_generations(bytes.as_slice()).unwrap();
        assert_eq!(back, recs);

        let mut a = Vec::new();
        let mut b = Vec::new();
        write_summary(&mut a, &summarize(&recs).unwrap()).unwrap();
        write_summary(&mut b, &summarize(&back).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with(
            "problem,method,params,kill_proportion,n_runs,mean_fitness,std_fitness,mean_tree_size,std_tree_size,mean_evaluations\n"
        ));
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(read_generations("a,b\n1,2\n".as_bytes()).is_err());
    }
}
