//! Generational evolution: ramped half-and-half initialization, breeding
//! with Koza depth limiting, Tarpeian marking, evaluation and ranking.

use rand::Rng;

use crate::bloatcontrol::{tarpeian_mark, TarpeianConfig};
use crate::error::{GpError, Result};
use crate::exprtree::{pick_node, random_tree, GrowMethod, TerminalSet};
use crate::fitness::{evaluate_population, ErrorModel, Individual, Population, DEFAULT_ERROR_CAP};
use crate::problems::{sample_cases, CaseSet, Problem};
use crate::rng::{derive_seed, rng_from_seed, CASE_STREAM, BREED_STREAM};
use crate::selection::{Selector, StrategySpec};

/// Depth budget of subtrees grown by mutation.
pub const MUTATION_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub max_depth: usize,
    pub init_depth_min: usize,
    pub init_depth_max: usize,
    pub strategy: StrategySpec,
    pub tarpeian: TarpeianConfig,
    pub n_cases: usize,
    pub error_cap: f64,
    /// Pins one fitness-case set across runs instead of drawing per run.
    pub fixed_case_seed: Option<u64>,
    /// Adds an ephemeral random constant terminal drawn from this range.
    pub erc_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            population_size: 1000,
            generations: 50,
            crossover_prob: 0.8,
            mutation_prob: 0.1,
            max_depth: 17,
            init_depth_min: 2,
            init_depth_max: 6,
            strategy: StrategySpec::tournament(7),
            tarpeian: TarpeianConfig::disabled(),
            n_cases: 20,
            error_cap: DEFAULT_ERROR_CAP,
            fixed_case_seed: None,
            erc_range: None,
            seed: 0,
        }
    }
}

impl EngineConfig {
    /// Residual probability of plain copying.
    pub fn reproduction_prob(&self) -> f64 {
        1.0 - self.crossover_prob - self.mutation_prob
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(GpError::invalid("population_size", "must be at least 2"));
        }
        for (name, p) in [("crossover_prob", self.crossover_prob), ("mutation_prob", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GpError::invalid(name, format!("{p} is outside [0, 1]")));
            }
        }
        if self.reproduction_prob() < -1e-12 {
            return Err(GpError::invalid("mutation_prob", "crossover + mutation probability exceeds 1"));
        }
        if self.init_depth_min > self.init_depth_max {
            return Err(GpError::invalid("init_depth_min", "exceeds init_depth_max"));
        }
        if self.max_depth < self.init_depth_max {
            return Err(GpError::invalid("max_depth", "must be at least init_depth_max"));
        }
        if self.n_cases < 1 {
            return Err(GpError::invalid("n_cases", "must be at least 1"));
        }
        if !(self.error_cap > 0.0) {
            return Err(GpError::invalid("error_cap", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.tarpeian.kill_proportion) {
            return Err(GpError::invalid("tarpeian.kill_proportion", "must lie in [0, 1]"));
        }
        self.strategy.validate()
    }

    pub fn error_model(&self) -> ErrorModel {
        ErrorModel::new(self.error_cap, self.n_cases)
    }

    pub fn terminals(&self, n_vars: usize) -> TerminalSet {
        TerminalSet {
            n_vars,
            erc: self.erc_range,
        }
    }

    pub fn case_seed(&self) -> u64 {
        self.fixed_case_seed.unwrap_or_else(|| derive_seed(self.seed, CASE_STREAM))
    }

    pub fn breed_seed(&self) -> u64 {
        derive_seed(self.seed, BREED_STREAM)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationResult {
    pub generation: usize,
    pub best_index: usize,
    pub best_adjusted: f64,
    pub best_size: usize,
    pub mean_pop_size: f64,
    pub mean_adjusted: f64,
    pub evaluations: usize,
    pub population_size: usize,
    pub max_depth: usize,
}

impl GenerationResult {
    /// Statistics of an evaluated population. Best = highest adjusted
    /// fitness, then smaller size, then lower index.
    pub fn of(pop: &Population, evaluations: usize) -> Self {
        let members = &pop.members;
        let best_index = (0..members.len())
            .reduce(|best, i| {
                let (a, b) = (&members[i], &members[best]);
                match a.fitness().total_cmp(&b.fitness()).then(b.size().cmp(&a.size())) {
                    std::cmp::Ordering::Greater => i,
                    _ => best,
                }
            })
            .expect("population is never empty");
        let n = members.len() as f64;
        GenerationResult {
            generation: pop.generation,
            best_index,
            best_adjusted: members[best_index].fitness(),
            best_size: members[best_index].size(),
            mean_pop_size: pop.mean_size(),
            mean_adjusted: members.iter().map(Individual::fitness).sum::<f64>() / n,
            evaluations,
            population_size: members.len(),
            max_depth: members.iter().map(Individual::depth).max().unwrap_or(0),
        }
    }
}

/// Ramped half-and-half: depth budgets cycle over the init range, Grow and
/// Full alternate within each budget.
pub fn init_population<R: Rng + ?Sized>(cfg: &EngineConfig, n_vars: usize, rng: &mut R) -> Population {
    let terminals = cfg.terminals(n_vars);
    let n_depths = cfg.init_depth_max - cfg.init_depth_min + 1;
    let members = (0..cfg.population_size)
        .map(|i| {
            let slot = i % (2 * n_depths);
            let depth = cfg.init_depth_min + slot / 2;
            let method = if slot % 2 == 0 { GrowMethod::grow(depth) } else { GrowMethod::full(depth) };
            Individual::new(random_tree(method, &terminals, rng))
        })
        .collect();
    Population { members, generation: 0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Crossover,
    Mutation,
    Reproduction,
}

/// Breeds one unevaluated child. Crossover and mutation children deeper
/// than `max_depth` are rejected in favour of the (first) parent.
pub fn breed_child<R: Rng + ?Sized>(
    pop: &[Individual],
    cfg: &EngineConfig,
    selector: &Selector,
    terminals: &TerminalSet,
    rng: &mut R,
) -> (Individual, Operator) {
    let roll: f64 = rng.gen();
    if roll < cfg.crossover_prob {
        let recipient = &pop[selector.select(pop, rng)];
        let donor = &pop[selector.select(pop, rng)];
        let at = pick_node(recipient.genome(), rng);
        let from = pick_node(donor.genome(), rng);
        let child = recipient
            .genome()
            .replace_subtree(&at, donor.genome().subtree_at(&from).clone());
        let child = if child.depth() > cfg.max_depth {
            recipient.offspring()
        } else {
            Individual::new(child)
        };
        (child, Operator::Crossover)
    } else if roll < cfg.crossover_prob + cfg.mutation_prob {
        let parent = &pop[selector.select(pop, rng)];
        let at = pick_node(parent.genome(), rng);
        let budget = MUTATION_DEPTH.min(cfg.max_depth.saturating_sub(at.depth()));
        let sub = random_tree(GrowMethod::grow(budget), terminals, rng);
        let child = parent.genome().replace_subtree(&at, sub);
        let child = if child.depth() > cfg.max_depth {
            parent.offspring()
        } else {
            Individual::new(child)
        };
        (child, Operator::Mutation)
    } else {
        (pop[selector.select(pop, rng)].offspring(), Operator::Reproduction)
    }
}

/// Tarpeian pass, evaluation and bucket ranking for a freshly built
/// population. Returns the evaluation count.
fn settle<R: Rng + ?Sized>(
    pop: &mut Population,
    cfg: &EngineConfig,
    selector: &Selector,
    cases: &CaseSet,
    rng: &mut R,
) -> Result<usize> {
    let model = cfg.error_model();
    tarpeian_mark(&mut pop.members, &cfg.tarpeian, model.sentinel(), rng);
    let evaluations = evaluate_population(&mut pop.members, cases, &model);
    selector.prepare(&mut pop.members)?;
    Ok(evaluations)
}

/// Builds, marks, evaluates and ranks generation 0.
pub fn init_generation<R: Rng + ?Sized>(
    cfg: &EngineConfig,
    problem: &Problem,
    cases: &CaseSet,
    rng: &mut R,
) -> Result<(Population, GenerationResult)> {
    let selector = Selector::new(cfg.strategy)?;
    let mut pop = init_population(cfg, problem.n_vars, rng);
    let evaluations = settle(&mut pop, cfg, &selector, cases, rng)?;
    let result = GenerationResult::of(&pop, evaluations);
    Ok((pop, result))
}

/// Breeds the next generation from an evaluated (and, for bucketing
/// strategies, ranked) population.
pub fn run_generation<R: Rng + ?Sized>(
    pop: &Population,
    cfg: &EngineConfig,
    problem: &Problem,
    cases: &CaseSet,
    rng: &mut R,
) -> Result<(Population, GenerationResult)> {
    let selector = Selector::new(cfg.strategy)?;
    let terminals = cfg.terminals(problem.n_vars);
    let members = (0..cfg.population_size)
        .map(|_| breed_child(&pop.members, cfg, &selector, &terminals, rng).0)
        .collect();
    let mut next = Population {
        members,
        generation: pop.generation + 1,
    };
    let evaluations = settle(&mut next, cfg, &selector, cases, rng)?;
    let result = GenerationResult::of(&next, evaluations);
    Ok((next, result))
}

/// Full run; `observe` sees every evaluated population.
pub fn run_evolution_with<F: FnMut(&Population)>(
    cfg: &EngineConfig,
    problem: &Problem,
    mut observe: F,
) -> Result<Vec<GenerationResult>> {
    cfg.validate()?;
    let cases = sample_cases(problem, cfg.n_cases, cfg.case_seed())?;
    let mut rng = rng_from_seed(cfg.breed_seed());
    let (mut pop, first) = init_generation(cfg, problem, &cases, &mut rng)?;
    observe(&pop);
    let mut trajectory = Vec::with_capacity(cfg.generations + 1);
    trajectory.push(first);
    for _ in 0..cfg.generations {
        let (next, result) = run_generation(&pop, cfg, problem, &cases, &mut rng)?;
        observe(&next);
        trajectory.push(result);
        pop = next;
    }
    Ok(trajectory)
}

pub fn run_evolution(cfg: &EngineConfig, problem: &Problem) -> Result<Vec<GenerationResult>> {
    run_evolution_with(cfg, problem, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprtree::{ExprTree, Primitive};
    use crate::problems::ProblemId;

    fn small_cfg() -> EngineConfig {
        EngineConfig {
            population_size: 100,
            generations: 5,
            seed: 17,
            ..EngineConfig::default()
        }
    }

    #[test]
    fn default_is_paper_setting() {
        let c = EngineConfig::default();
        assert_eq!((c.population_size, c.generations, c.max_depth, c.n_cases), (1000, 50, 17, 20));
        assert_eq!((c.crossover_prob, c.mutation_prob), (0.8, 0.1));
        assert!((c.reproduction_prob() - 0.1).abs() < 1e-12);
        assert_eq!(c.strategy, StrategySpec::tournament(7));
        c.validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = EngineConfig::default();
        for cfg in [
            EngineConfig { population_size: 1, ..base.clone() },
            EngineConfig { crossover_prob: 0.95, ..base.clone() },
            EngineConfig { max_depth: 5, ..base.clone() },
            EngineConfig { n_cases: 0, ..base.clone() },
            EngineConfig { init_depth_min: 7, ..base.clone() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn ramped_half_and_half_layout() {
        let cfg = EngineConfig::default();
        let pop = init_population(&cfg, 1, &mut rng_from_seed(1));
        assert_eq!(pop.len(), 1000);
        assert!(pop.members.iter().all(|m| m.depth() <= 6));
        // full trees sit exactly at their budget: 100 per depth 2..=6
        for (k, depth) in (2..=6).enumerate() {
            let full: Vec<_> = pop.members.iter().skip(2 * k + 1).step_by(10).collect();
            assert_eq!(full.len(), 100);
            assert!(full.iter().all(|m| m.depth() == depth));
        }
        let again = init_population(&cfg, 1, &mut rng_from_seed(1));
        assert_eq!(pop, again);
    }

    fn evaluated(cfg: &EngineConfig) -> (Population, CaseSet) {
        let p = ProblemId::Quartic.problem();
        let cases = sample_cases(&p, cfg.n_cases, 3).unwrap();
        let (pop, _) = init_generation(cfg, &p, &cases, &mut rng_from_seed(4)).unwrap();
        (pop, cases)
    }

    #[test]
    fn reproduction_copies_parent() {
        let cfg = EngineConfig { crossover_prob: 0.0, mutation_prob: 0.0, ..small_cfg() };
        let (pop, _) = evaluated(&cfg);
        let sel = Selector::new(cfg.strategy).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let (child, op) = breed_child(&pop.members, &cfg, &sel, &TerminalSet::vars(1), &mut rng);
            assert_eq!(op, Operator::Reproduction);
            assert!(!child.is_evaluated());
            assert!(pop.members.iter().any(|m| m.genome() == child.genome()));
        }
    }

    #[test]
    fn deep_crossover_is_rejected() {
        // chain of depth 17 crossed with anything deeper at a leaf exceeds the limit
        let mut deep = ExprTree::var(0);
        for _ in 0..17 {
            deep = ExprTree::unary(Primitive::Sin, deep);
        }
        let mut pop = vec![Individual::new(deep.clone()); 2];
        for m in &mut pop {
            m.adjusted = Some(0.5);
        }
        let cfg = EngineConfig { crossover_prob: 1.0, mutation_prob: 0.0, ..small_cfg() };
        let sel = Selector::new(cfg.strategy).unwrap();
        let mut rng = rng_from_seed(6);
        let mut rejected = 0;
        for _ in 0..200 {
            let (child, _) = breed_child(&pop, &cfg, &sel, &TerminalSet::vars(1), &mut rng);
            assert!(child.depth() <= 17);
            if child.genome() == &deep {
                rejected += 1;
            }
        }
        assert!(rejected > 0);
    }

    #[test]
    fn operator_frequencies() {
        let cfg = small_cfg();
        let (pop, _) = evaluated(&cfg);
        let sel = Selector::new(cfg.strategy).unwrap();
        let mut rng = rng_from_seed(7);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let (_, op) = breed_child(&pop.members, &cfg, &sel, &TerminalSet::vars(1), &mut rng);
            counts[op as usize] += 1;
        }
        let f: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        for (got, want) in f.iter().zip([0.8, 0.1, 0.1]) {
            assert!((got - want).abs() < 0.005, "{f:?}");
        }
    }

    #[test]
    fn generation_bookkeeping() {
        let cfg = small_cfg();
        let p = ProblemId::Quartic.problem();
        let cases = sample_cases(&p, cfg.n_cases, 3).unwrap();
        let mut rng = rng_from_seed(8);
        let (pop, r0) = init_generation(&cfg, &p, &cases, &mut rng).unwrap();
        assert_eq!(r0.evaluations, 100);
        let (next, r1) = run_generation(&pop, &cfg, &p, &cases, &mut rng).unwrap();
        assert_eq!(r1.generation, 1);
        assert_eq!(r1.evaluations, cfg.population_size);
        assert_eq!(r1.best_size, next.members[r1.best_index].size());
        assert!(next.members.iter().all(|m| m.fitness() <= r1.best_adjusted));

        let killer = EngineConfig { tarpeian: TarpeianConfig::new(1.0).unwrap(), ..cfg };
        let (pop, r0) = init_generation(&killer, &p, &cases, &mut rng).unwrap();
        assert!(r0.evaluations < 100);
        let (_, r1) = run_generation(&pop, &killer, &p, &cases, &mut rng).unwrap();
        assert!(r1.evaluations < 100);
    }

    #[test]
    fn bucketing_ranks_every_generation() {
        for strategy in [StrategySpec::direct_bucket(10), StrategySpec::ratio_bucket(3)] {
            let cfg = EngineConfig { strategy, ..small_cfg() };
            run_evolution_with(&cfg, &ProblemId::Sextic.problem(), |pop| {
                assert!(pop.members.iter().all(|m| m.bucket_rank.is_some()));
            })
            .unwrap();
        }
    }

    #[test]
    fn trajectories() {
        let p = ProblemId::Bivariate.problem();
        let zero = EngineConfig { generations: 0, ..small_cfg() };
        assert_eq!(run_evolution(&zero, &p).unwrap().len(), 1);
        let cfg = small_cfg();
        let a = run_evolution(&cfg, &p).unwrap();
        let b = run_evolution(&cfg, &p).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a, b);
        assert!(a.iter().all(|g| (0.0..=1.0).contains(&g.best_adjusted)));
        let other = run_evolution(&EngineConfig { seed: 18, ..cfg }, &p).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn pure_reproduction_cannot_grow() {
        let cfg = EngineConfig { crossover_prob: 0.0, mutation_prob: 0.0, ..small_cfg() };
        let p = ProblemId::Quartic.problem();
        let mut max_initial = None;
        run_evolution_with(&cfg, &p, |pop| {
            let biggest = pop.members.iter().map(Individual::size).max().unwrap();
            let limit = *max_initial.get_or_insert(biggest);
            assert!(biggest <= limit);
            assert!(pop.mean_size() <= limit as f64);
        })
        .unwrap();
    }
}
