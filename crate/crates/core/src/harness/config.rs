//! Experiment configuration: TOML parsing, validation and named presets.
//!
//! ```toml
//! preset = "paper-table3"        # optional starting point
//! output_dir = "results"
//!
//! [engine]
//! population_size = 1000
//! generations = 50
//! crossover_prob = 0.8
//! mutation_prob = 0.1
//! max_depth = 17
//! n_cases = 20
//! seed = 0
//!
//! [sweep]
//! problems = ["quartic", "sextic"]
//! strategies = ["tournament:7", "double:7:1.8"]
//! runs = 40
//!
//! [tarpeian]
//! kill_proportion = [0.0, 0.4]   # scalar or list
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use toml::Spanned;

use crate::bloatcontrol::TarpeianConfig;
use crate::engine::EngineConfig;
use crate::error::{GpError, Result};
use crate::problems::ProblemId;
use crate::selection::StrategySpec;

pub const DEFAULT_RUNS: usize = 40;
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// One strategy paired with one Tarpeian kill proportion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub strategy: StrategySpec,
    pub kill_proportion: f64,
}

impl Arm {
    pub fn new(strategy: StrategySpec, kill_proportion: f64) -> Self {
        Arm { strategy, kill_proportion }
    }

    pub fn tarpeian(&self) -> TarpeianConfig {
        TarpeianConfig {
            kill_proportion: self.kill_proportion,
            enabled: self.kill_proportion > 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemId>,
    pub arms: Vec<Arm>,
    pub runs: usize,
    /// Engine template; `strategy`, `tarpeian` and `seed` are filled per run,
    /// and `seed` here is the master seed.
    pub engine: EngineConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn master_seed(&self) -> u64 {
        self.engine.seed
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(config_err("no problems", None));
        }
        if self.arms.is_empty() {
            return Err(config_err("no strategies", None));
        }
        if self.runs < 1 {
            return Err(GpError::invalid("sweep.runs", "must be at least 1"));
        }
        for arm in &self.arms {
            arm.strategy.validate()?;
            TarpeianConfig::new(arm.kill_proportion)?;
        }
        self.engine.validate()
    }

    /// Total number of runs the sweep executes.
    pub fn cell_count(&self) -> usize {
        self.problems.len() * self.arms.len() * self.runs
    }
}

fn config_err(message: impl Into<String>, line: Option<usize>) -> GpError {
    GpError::Config {
        message: message.into(),
        line,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Vec<Arm>,
}

impl Preset {
    pub fn arms(&self) -> Vec<Arm> {
        (self.build)()
    }
}

pub const KILL_PROPORTIONS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const DIRECT_BUCKETS: [usize; 6] = [10, 25, 50, 100, 250, 500];
pub const BUCKET_RATIOS: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const COMBINED_PARSIMONY: [f64; 3] = [1.6, 1.8, 1.9];
pub const COMBINED_KILL: [f64; 3] = [0.3, 0.4, 0.5];

/// Parsimony sizes 1.0, 1.1, ..., 2.0.
pub fn parsimony_grid() -> Vec<f64> {
    (10..=20).map(|i| f64::from(i) / 10.0).collect()
}

fn tarpeian_arms() -> Vec<Arm> {
    KILL_PROPORTIONS
        .iter()
        .map(|&w| Arm::new(StrategySpec::tournament(7), w))
        .collect()
}

fn direct_arms() -> Vec<Arm> {
    DIRECT_BUCKETS
        .iter()
        .map(|&b| Arm::new(StrategySpec::direct_bucket(b), 0.0))
        .collect()
}

fn ratio_arms() -> Vec<Arm> {
    BUCKET_RATIOS
        .iter()
        .map(|&r| Arm::new(StrategySpec::ratio_bucket(r), 0.0))
        .collect()
}

fn double_arms() -> Vec<Arm> {
    parsimony_grid()
        .into_iter()
        .map(|d| Arm::new(StrategySpec::double(7, d), 0.0))
        .collect()
}

fn combined_arms() -> Vec<Arm> {
    COMBINED_PARSIMONY
        .iter()
        .flat_map(|&d| COMBINED_KILL.iter().map(move |&w| Arm::new(StrategySpec::double(7, d), w)))
        .collect()
}

fn table3() -> Vec<Arm> {
    [direct_arms(), tarpeian_arms()].concat()
}

fn table4() -> Vec<Arm> {
    [ratio_arms(), double_arms()].concat()
}

fn table6() -> Vec<Arm> {
    let double_alone = COMBINED_PARSIMONY
        .iter()
        .map(|&d| Arm::new(StrategySpec::double(7, d), 0.0));
    let tarpeian_alone = COMBINED_KILL
        .iter()
        .map(|&w| Arm::new(StrategySpec::tournament(7), w));
    double_alone.chain(tarpeian_alone).chain(combined_arms()).collect()
}

fn all_arms() -> Vec<Arm> {
    let mut arms = [table3(), table4(), combined_arms()].concat();
    let mut seen = Vec::new();
    arms.retain(|a| {
        let fresh = !seen.contains(a);
        seen.push(*a);
        fresh
    });
    arms
}

pub const PRESETS: [Preset; 9] = [
    Preset { name: "paper-table3", description: "direct bucketing b in {10..500} and Tarpeian W in {0.0..0.5}", build: table3 },
    Preset { name: "paper-table4", description: "ratio bucketing r in {2..10} and double tournament D in {1.0..2.0}", build: table4 },
    Preset { name: "paper-table6", description: "double tournament D in {1.6,1.8,1.9}, Tarpeian W in {0.3,0.4,0.5}, and their combinations", build: table6 },
    Preset { name: "paper-all", description: "every grid above", build: all_arms },
    Preset { name: "tarpeian", description: "tournament-7 with Tarpeian W in {0.0..0.5}", build: tarpeian_arms },
    Preset { name: "direct-bucket", description: "direct bucketing b in {10,25,50,100,250,500}", build: direct_arms },
    Preset { name: "ratio-bucket", description: "ratio bucketing r in {2..10}", build: ratio_arms },
    Preset { name: "double", description: "double tournament F=7, D in {1.0..2.0}", build: double_arms },
    Preset { name: "combined", description: "double tournament D in {1.6,1.8,1.9} x Tarpeian W in {0.3,0.4,0.5}", build: combined_arms },
];

pub fn preset(name: &str) -> Result<Preset> {
    PRESETS
        .iter()
        .copied()
        .find(|p| p.name == name)
        .ok_or_else(|| GpError::UnknownPreset(name.to_string()))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<Spanned<String>>,
    output_dir: Option<String>,
    engine: Option<RawEngine>,
    sweep: Option<RawSweep>,
    tarpeian: Option<RawTarpeian>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEngine {
    population_size: Option<Spanned<i64>>,
    generations: Option<Spanned<i64>>,
    crossover_prob: Option<Spanned<f64>>,
    mutation_prob: Option<Spanned<f64>>,
    max_depth: Option<Spanned<i64>>,
    n_cases: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    error_cap: Option<Spanned<f64>>,
    fixed_case_seed: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    problems: Option<Spanned<Vec<String>>>,
    strategies: Option<Spanned<Vec<String>>>,
    runs: Option<Spanned<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarpeian {
    kill_proportion: Option<Spanned<OneOrMany>>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, key: &str, spanned: &Spanned<T>, reason: impl std::fmt::Display) -> GpError {
        config_err(format!("`{key}`: {reason}"), Some(self.of(spanned.span().start)))
    }

    fn count(&self, key: &str, v: &Option<Spanned<i64>>, min: i64) -> Result<Option<usize>> {
        match v {
            None => Ok(None),
            Some(s) if *s.get_ref() >= min => Ok(Some(*s.get_ref() as usize)),
            Some(s) => Err(self.err(key, s, format!("must be at least {min}, got {}", s.get_ref()))),
        }
    }

    fn prob(&self, key: &str, v: &Option<Spanned<f64>>) -> Result<Option<f64>> {
        match v {
            None => Ok(None),
            Some(s) if (0.0..=1.0).contains(s.get_ref()) => Ok(Some(*s.get_ref())),
            Some(s) => Err(self.err(key, s, format!("{} is outside [0, 1]", s.get_ref()))),
        }
    }
}

/// Parses and validates a config; an empty file yields the default engine
/// settings but fails validation for lack of problems.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with(text, None)
}

/// Like [`parse_config`], with a preset applied when the file names none.
pub fn parse_config_with(text: &str, preset_override: Option<&str>) -> Result<ExperimentConfig> {
    let cfg = load_config(text, preset_override)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses without the final validation so callers can apply overrides first.
pub fn load_config(text: &str, preset_override: Option<&str>) -> Result<ExperimentConfig> {
    let lines = Lines(text);
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| lines.of(s.start));
        config_err(e.message().trim().to_string(), line)
    })?;

    let mut problems = Vec::new();
    let mut arms = Vec::new();
    let preset_name = match (&raw.preset, preset_override) {
        (_, Some(name)) => Some(preset(name)?),
        (Some(s), None) => Some(preset(s.get_ref()).map_err(|e| lines.err("preset", s, e))?),
        (None, None) => None,
    };
    if let Some(p) = preset_name {
        problems = ProblemId::ALL.to_vec();
        arms = p.arms();
    }

    let mut engine = EngineConfig::default();
    if let Some(e) = &raw.engine {
        if let Some(v) = lines.count("engine.population_size", &e.population_size, 2)? {
            engine.population_size = v;
        }
        if let Some(v) = lines.count("engine.generations", &e.generations, 0)? {
            engine.generations = v;
        }
        if let Some(v) = lines.prob("engine.crossover_prob", &e.crossover_prob)? {
            engine.crossover_prob = v;
        }
        if let Some(v) = lines.prob("engine.mutation_prob", &e.mutation_prob)? {
            engine.mutation_prob = v;
        }
        if engine.crossover_prob + engine.mutation_prob > 1.0 + 1e-12 {
            let s = e.mutation_prob.as_ref().or(e.crossover_prob.as_ref()).expect("one was set");
            return Err(lines.err("engine.mutation_prob", s, "crossover + mutation probability exceeds 1"));
        }
        if let Some(v) = lines.count("engine.max_depth", &e.max_depth, engine.init_depth_max as i64)? {
            engine.max_depth = v;
        }
        if let Some(v) = lines.count("engine.n_cases", &e.n_cases, 1)? {
            engine.n_cases = v;
        }
        if let Some(v) = lines.count("engine.seed", &e.seed, 0)? {
            engine.seed = v as u64;
        }
        if let Some(v) = lines.count("engine.fixed_case_seed", &e.fixed_case_seed, 0)? {
            engine.fixed_case_seed = Some(v as u64);
        }
        if let Some(s) = &e.error_cap {
            if !(*s.get_ref() > 0.0) {
                return Err(lines.err("engine.error_cap", s, "must be positive"));
            }
            engine.error_cap = *s.get_ref();
        }
    }

    let mut runs = DEFAULT_RUNS;
    let mut strategies: Option<Vec<StrategySpec>> = None;
    if let Some(s) = &raw.sweep {
        if let Some(list) = &s.problems {
            problems = list
                .get_ref()
                .iter()
                .map(|p| p.parse::<ProblemId>())
                .collect::<Result<_>>()
                .map_err(|e| lines.err("sweep.problems", list, e))?;
        }
        if let Some(list) = &s.strategies {
            let parsed = list
                .get_ref()
                .iter()
                .map(|t| t.parse::<StrategySpec>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| lines.err("sweep.strategies", list, e))?;
            if parsed.is_empty() {
                return Err(lines.err("sweep.strategies", list, "grid is empty"));
            }
            strategies = Some(parsed);
        }
        if let Some(v) = lines.count("sweep.runs", &s.runs, 1)? {
            runs = v;
        }
    }

    let mut kills: Option<Vec<f64>> = None;
    if let Some(t) = &raw.tarpeian {
        if let Some(k) = &t.kill_proportion {
            let list = match k.get_ref() {
                OneOrMany::One(w) => vec![*w],
                OneOrMany::Many(ws) => ws.clone(),
            };
            if list.is_empty() {
                return Err(lines.err("tarpeian.kill_proportion", k, "grid is empty"));
            }
            if let Some(w) = list.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                return Err(lines.err("tarpeian.kill_proportion", k, format!("{w} is outside [0, 1]")));
            }
            kills = Some(list);
        }
    }

    match (strategies, kills) {
        (Some(ss), ks) => {
            let ks = ks.unwrap_or_else(|| vec![0.0]);
            arms = ss
                .iter()
                .flat_map(|&s| ks.iter().map(move |&w| Arm::new(s, w)))
                .collect();
        }
        (None, Some(ks)) if arms.is_empty() => {
            arms = ks.iter().map(|&w| Arm::new(StrategySpec::tournament(7), w)).collect();
        }
        (None, Some(ks)) => {
            arms = arms
                .iter()
                .flat_map(|a| ks.iter().map(move |&w| Arm::new(a.strategy, w)))
                .collect();
        }
        (None, None) => {}
    }

    Ok(ExperimentConfig {
        problems,
        arms,
        runs,
        engine,
        output_dir: PathBuf::from(raw.output_dir.unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_string())),
    })
}
