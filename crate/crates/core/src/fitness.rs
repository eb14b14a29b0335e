//! Raw error, adjusted fitness and population evaluation.

use rayon::prelude::*;

use crate::error::{GpError, Result};
use crate::exprtree::ExprTree;
use crate::problems::CaseSet;

/// Default cap on a single case's absolute error.
pub const DEFAULT_ERROR_CAP: f64 = 1e10;

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genome: ExprTree,
    size: usize,
    depth: usize,
    pub raw_error: Option<f64>,
    pub adjusted: Option<f64>,
    pub tarpeian_killed: bool,
    pub bucket_rank: Option<u32>,
}

impl Individual {
    pub fn new(genome: ExprTree) -> Self {
        let size = genome.size();
        let depth = genome.depth();
        Individual {
            genome,
            size,
            depth,
            raw_error: None,
            adjusted: None,
            tarpeian_killed: false,
            bucket_rank: None,
        }
    }

    pub fn genome(&self) -> &ExprTree {
        &self.genome
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Adjusted fitness. Panics if the individual was never evaluated.
    pub fn fitness(&self) -> f64 {
        self.adjusted
            .unwrap_or_else(|| panic!("individual {} has not been evaluated", self.genome))
    }

    pub fn is_evaluated(&self) -> bool {
        self.adjusted.is_some()
    }

    /// Assigns the worst-fitness sentinel and marks the member killed.
    pub fn kill(&mut self, sentinel_error: f64) {
        self.tarpeian_killed = true;
        self.raw_error = Some(sentinel_error);
        self.adjusted = Some(0.0);
    }

    /// Fresh copy of the genome with all evaluation state cleared.
    pub fn offspring(&self) -> Individual {
        Individual {
            genome: self.genome.clone(),
            size: self.size,
            depth: self.depth,
            raw_error: None,
            adjusted: None,
            tarpeian_killed: false,
            bucket_rank: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mean_size(&self) -> f64 {
        mean_size(&self.members)
    }
}

pub fn mean_size(members: &[Individual]) -> f64 {
    members.iter().map(|m| m.size() as f64).sum::<f64>() / members.len() as f64
}

/// Error settings shared by evaluation and Tarpeian marking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorModel {
    pub per_case_cap: f64,
    pub n_cases: usize,
}

impl ErrorModel {
    pub fn new(per_case_cap: f64, n_cases: usize) -> Self {
        ErrorModel { per_case_cap, n_cases }
    }

    /// Raw error carried by Tarpeian-killed members.
    pub fn sentinel(&self) -> f64 {
        self.per_case_cap * self.n_cases as f64
    }
}

/// Sum of absolute errors over the cases, each term capped at `cap`.
pub fn raw_error(t: &ExprTree, cases: &CaseSet, cap: f64) -> f64 {
    cases
        .cases
        .iter()
        .map(|c| {
            let e = (t.eval(&c.inputs) - c.target).abs();
            if e.is_nan() {
                cap
            } else {
                e.min(cap)
            }
        })
        .sum()
}

/// `1 / (1 + raw)`.
pub fn adjusted_fitness(raw: f64) -> Result<f64> {
    if !(raw >= 0.0) {
        return Err(GpError::invalid("raw_error", format!("must be non-negative, got {raw}")));
    }
    Ok(1.0 / (1.0 + raw))
}

fn evaluate_one(m: &mut Individual, cases: &CaseSet, model: &ErrorModel) -> bool {
    if m.tarpeian_killed {
        m.kill(model.sentinel());
        return false;
    }
    let raw = raw_error(m.genome(), cases, model.per_case_cap);
    m.raw_error = Some(raw);
    m.adjusted = Some(adjusted_fitness(raw).expect("capped absolute error is non-negative"));
    true
}

/// Evaluates every live member; killed members keep the sentinel. Returns
/// the number of members actually evaluated.
pub fn evaluate_population(members: &mut [Individual], cases: &CaseSet, model: &ErrorModel) -> usize {
    members
        .iter_mut()
        .map(|m| evaluate_one(m, cases, model))
        .filter(|&e| e)
        .count()
}

/// Parallel form of [`evaluate_population`]; results are identical.
pub fn evaluate_population_par(members: &mut [Individual], cases: &CaseSet, model: &ErrorModel) -> usize {
    members
        .par_iter_mut()
        .map(|m| evaluate_one(m, cases, model))
        .filter(|&e| e)
        .count()
}
