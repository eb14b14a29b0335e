//! The six benchmark regression targets and per-run fitness-case sampling.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;

use crate::error::{GpError, Result};
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    Quartic,
    CubicWithConstants,
    Sextic,
    Bivariate,
    BivariateWithConstants,
    FiveDim,
}

impl ProblemId {
    pub const ALL: [ProblemId; 6] = [
        ProblemId::Quartic,
        ProblemId::CubicWithConstants,
        ProblemId::Sextic,
        ProblemId::Bivariate,
        ProblemId::BivariateWithConstants,
        ProblemId::FiveDim,
    ];

    /// Short identifier used in configs and CSV files.
    pub fn key(self) -> &'static str {
        match self {
            ProblemId::Quartic => "quartic",
            ProblemId::CubicWithConstants => "cubic-const",
            ProblemId::Sextic => "sextic",
            ProblemId::Bivariate => "bivariate",
            ProblemId::BivariateWithConstants => "bivariate-const",
            ProblemId::FiveDim => "five-dim",
        }
    }

    pub fn problem(self) -> Problem {
        Problem::new(self)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ProblemId {
    type Err = GpError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .iter()
            .copied()
            .find(|p| p.key() == s)
            .ok_or_else(|| GpError::UnknownProblem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Problem {
    pub id: ProblemId,
    pub n_vars: usize,
    pub domain_low: f64,
    pub domain_high: f64,
    pub name: &'static str,
}

impl Problem {
    pub fn new(id: ProblemId) -> Self {
        let (n_vars, domain, name) = match id {
            ProblemId::Quartic => (1, 10.0, "x^4 + x^3 + x^2 + x"),
            ProblemId::CubicWithConstants => (1, 10.0, "3x^3 + 11x^2 + 14x + 6"),
            ProblemId::Sextic => (1, 10.0, "x^6 - 2x^4 + x^2"),
            ProblemId::Bivariate => (2, 10.0, "x^2 y + x y + y"),
            ProblemId::BivariateWithConstants => (2, 10.0, "3x^2 y + 4x y + y"),
            ProblemId::FiveDim => (5, 1.0, "sin(x0) cos(x1) / sqrt(exp(x2)) + tan(x3 - x4)"),
        };
        Problem {
            id,
            n_vars,
            domain_low: -domain,
            domain_high: domain,
            name,
        }
    }

    /// Exact (unprotected) target value. Panics on a dimension mismatch.
    pub fn target_value(&self, inputs: &[f64]) -> f64 {
        assert_eq!(
            inputs.len(),
            self.n_vars,
            "{} takes {} input(s), got {}",
            self.id,
            self.n_vars,
            inputs.len()
        );
        match self.id {
            ProblemId::Quartic => {
                let x = inputs[0];
                x.powi(4) + x.powi(3) + x.powi(2) + x
            }
            ProblemId::CubicWithConstants => {
                let x = inputs[0];
                3.0 * x.powi(3) + 11.0 * x.powi(2) + 14.0 * x + 6.0
            }
            ProblemId::Sextic => {
                let x = inputs[0];
                x.powi(6) - 2.0 * x.powi(4) + x.powi(2)
            }
            ProblemId::Bivariate => {
                let (x, y) = (inputs[0], inputs[1]);
                x * x * y + x * y + y
            }
            ProblemId::BivariateWithConstants => {
                let (x, y) = (inputs[0], inputs[1]);
                3.0 * x * x * y + 4.0 * x * y + y
            }
            ProblemId::FiveDim => {
                let x = inputs;
                x[0].sin() * x[1].cos() / x[2].exp().sqrt() + (x[3] - x[4]).tan()
            }
        }
    }
}

pub fn target_value(p: &Problem, inputs: &[f64]) -> f64 {
    p.target_value(inputs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitnessCase {
    pub inputs: Vec<f64>,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseSet {
    pub cases: Vec<FitnessCase>,
    pub seed: u64,
}

impl CaseSet {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.cases.first().map_or(0, |c| c.inputs.len())
    }

    /// Writes `x0,...,xk,target` rows at full round-trip precision.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.n_vars()).map(|i| format!("x{i}")).collect();
        header.push("target".into());
        out.write_record(&header)?;
        for case in &self.cases {
            let row: Vec<String> = case
                .inputs
                .iter()
                .chain(std::iter::once(&case.target))
                .map(|v| v.to_string())
                .collect();
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| GpError::io("<case csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, seed: u64) -> Result<CaseSet> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let n = header.len();
        let expected: Vec<String> = (0..n.saturating_sub(1))
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("target".to_string()))
            .collect();
        if n < 2 || header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(GpError::Data(format!("unexpected case header {:?}", header)));
        }
        let mut cases = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| GpError::Data(format!("bad number `{f}`"))))
                .collect::<Result<Vec<f64>>>()?;
            let (target, inputs) = vals.split_last().expect("header guarantees two columns");
            cases.push(FitnessCase {
                inputs: inputs.to_vec(),
                target: *target,
            });
        }
        if cases.is_empty() {
            return Err(GpError::EmptyCaseSet);
        }
        Ok(CaseSet { cases, seed })
    }
}

/// Draws `n` inputs uniformly from the problem's domain hypercube.
pub fn sample_cases(p: &Problem, n: usize, seed: u64) -> Result<CaseSet> {
    if n == 0 {
        return Err(GpError::EmptyCaseSet);
    }
    let mut rng = rng_from_seed(seed);
    let cases = (0..n)
        .map(|_| {
            let inputs: Vec<f64> = (0..p.n_vars)
                .map(|_| rng.gen_range(p.domain_low..=p.domain_high))
                .collect();
            let target = p.target_value(&inputs);
            FitnessCase { inputs, target }
        })
        .collect();
    Ok(CaseSet { cases, seed })
}
