//! Aggregation of runs into the two bloat measures: mean fitness and mean
//! tree size of each run's final best individual.

use std::cmp::Ordering;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::GenerationResult;
use crate::error::{GpError, Result};
use crate::problems::ProblemId;
use crate::selection::StrategySpec;

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub problem: ProblemId,
    pub strategy: StrategySpec,
    pub kill_proportion: f64,
    pub run: usize,
    pub seed: u64,
    pub trajectory: Vec<GenerationResult>,
}

impl RunRecord {
    fn last(&self) -> &GenerationResult {
        self.trajectory.last().expect("a run has at least generation 0")
    }

    pub fn final_best_adjusted(&self) -> f64 {
        self.last().best_adjusted
    }

    pub fn final_best_size(&self) -> usize {
        self.last().best_size
    }

    pub fn total_evaluations(&self) -> usize {
        self.trajectory.iter().map(|g| g.evaluations).sum()
    }

    pub fn key(&self) -> GroupKey {
        GroupKey {
            problem: self.problem,
            strategy: self.strategy,
            kill_proportion: self.kill_proportion,
        }
    }
}

/// Identifies one experimental cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupKey {
    pub problem: ProblemId,
    pub strategy: StrategySpec,
    pub kill_proportion: f64,
}

impl GroupKey {
    pub fn cmp_order(&self, other: &GroupKey) -> Ordering {
        let (ka, pa) = self.strategy.sort_key();
        let (kb, pb) = other.strategy.sort_key();
        self.problem
            .cmp(&other.problem)
            .then(ka.cmp(&kb))
            .then_with(|| {
                pa.iter()
                    .zip(&pb)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then(self.kill_proportion.total_cmp(&other.kill_proportion))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub key: GroupKey,
    pub n_runs: usize,
    pub mean_fitness: f64,
    pub std_fitness: f64,
    pub mean_tree_size: f64,
    pub std_tree_size: f64,
    pub mean_evaluations: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for a single value.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Groups records by cell and reduces each group. Within a group the runs
/// are reduced in run order, so the output does not depend on input order.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SweepSummary>> {
    if records.is_empty() {
        return Err(GpError::Data("nothing to summarize".into()));
    }
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.key().cmp_order(&b.key()).then(a.run.cmp(&b.run)));
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| a.key().cmp_order(&b.key()).is_eq()) {
        let fit: Vec<f64> = group.iter().map(|r| r.final_best_adjusted()).collect();
        let size: Vec<f64> = group.iter().map(|r| r.final_best_size() as f64).collect();
        let evals: Vec<f64> = group.iter().map(|r| r.total_evaluations() as f64).collect();
        out.push(SweepSummary {
            key: group[0].key(),
            n_runs: group.len(),
            mean_fitness: mean(&fit),
            std_fitness: sample_std(&fit),
            mean_tree_size: mean(&size),
            std_tree_size: sample_std(&size),
            mean_evaluations: mean(&evals),
        });
    }
    Ok(out)
}

/// Per-generation cross-run means of best adjusted fitness and best size.
#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    pub mean_best_adjusted: Vec<f64>,
    pub mean_best_size: Vec<f64>,
}

pub fn generation_curves(records: &[RunRecord]) -> Result<Curves> {
    let first = records
        .first()
        .ok_or_else(|| GpError::Data("no runs to average".into()))?;
    let len = first.trajectory.len();
    if records.iter().any(|r| r.trajectory.len() != len) {
        return Err(GpError::Data("runs have different generation counts".into()));
    }
    let mut ordered: Vec<&RunRecord> = records.iter().collect();
    ordered.sort_by_key(|r| (r.run, r.seed));
    let n = records.len() as f64;
    let column = |f: &dyn Fn(&GenerationResult) -> f64| -> Vec<f64> {
        (0..len)
            .map(|g| ordered.iter().map(|r| f(&r.trajectory[g])).sum::<f64>() / n)
            .collect()
    };
    Ok(Curves {
        mean_best_adjusted: column(&|g| g.best_adjusted),
        mean_best_size: column(&|g| g.best_size as f64),
    })
}

/// Two-sided Mann-Whitney U test (normal approximation with tie
/// correction). Returns `(U of the first sample, p-value)`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut pooled: Vec<(f64, usize)> = a.iter().map(|&x| (x, 0)).chain(b.iter().map(|&x| (x, 1))).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        ranks[i..=j].iter_mut().for_each(|r| *r = avg);
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let r1: f64 = pooled
        .iter()
        .zip(&ranks)
        .filter(|((_, g), _)| *g == 0)
        .map(|(_, r)| r)
        .sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let mu = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return (u1, 1.0);
    }
    // continuity correction
    let z = ((u1 - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (u1, (2.0 * (1.0 - normal.cdf(z))).min(1.0))
}
