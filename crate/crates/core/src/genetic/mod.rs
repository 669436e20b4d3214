//! Generational GA over nurse permutations.
//!
//! Individuals are permutations decoded by a [`Decoder`] and scored by the
//! penalized fitness. Each generation keeps the best 10% unchanged and fills
//! the rest with children of rank-roulette parents, crossed over and then
//! swap-mutated. The run stops once the best fitness has not strictly
//! improved for 30 generations.

mod crossover;
mod selection;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crossover::{
    c1_with_cut, crossover_c1, crossover_order, crossover_pmx, crossover_pux,
    crossover_uniform_order, mutate_swap, order_with_cuts, pmx_with_cuts,
    uniform_order_with_template, Crossover,
};
pub use selection::{elite_count, rank_weights, replace_generation, RankWheel};

use crate::decoders::{Decoder, DecoderKind, OrderingKind, SearchOrder, SimpleBound};
use crate::error::{Error, Result};
use crate::model::{check_penalty_weight, Evaluation, Instance, Schedule};

/// Cost recorded for an instance on which no run found a feasible schedule.
pub const CENSORED_COST: f64 = 100.0;

pub fn is_permutation(genes: &[usize], n: usize) -> bool {
    if genes.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    genes
        .iter()
        .all(|&g| g < n && !std::mem::replace(&mut seen[g], true))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    /// Per-gene probability of a swap.
    pub mutation_rate: f64,
    pub elite_fraction: f64,
    /// Stop after this many generations without strict improvement of the
    /// best fitness.
    pub stall_generations: usize,
    /// Weight per uncovered shift in the fitness.
    pub penalty_weight: f64,
    pub crossover: Crossover,
    pub decoder: DecoderKind,
    pub ordering: OrderingKind,
    /// Prune patterns dearer than the best feasible cost found so far.
    pub bound: bool,
    /// Hard cap on generations, in addition to the stall rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<usize>,
    pub seed: u64,
}

impl GaConfig {
    /// Population 100, 1.5% swap mutation, keep 10% best, stop after 30
    /// generations without improvement, penalty weight 20, order-based
    /// crossover; combined decoder with lexicographic ties and no bound.
    pub fn new(grades: usize) -> Self {
        GaConfig {
            population_size: 100,
            mutation_rate: 0.015,
            elite_fraction: 0.10,
            stall_generations: 30,
            penalty_weight: 20.0,
            crossover: Crossover::Order,
            decoder: DecoderKind::combined(grades),
            ordering: OrderingKind::Lexico,
            bound: false,
            max_generations: None,
            seed: 0,
        }
    }

    /// Combined decoder, biased ordering, PUX with p = 0.66 and the simple
    /// bound.
    pub fn tuned(grades: usize) -> Self {
        GaConfig {
            crossover: Crossover::Pux { p: 0.66 },
            ordering: OrderingKind::Biased,
            bound: true,
            ..GaConfig::new(grades)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::ConfigInvalid("population size must be at least 2".into()));
        }
        crossover::check_probability("mutation rate", self.mutation_rate)?;
        crossover::check_probability("elite fraction", self.elite_fraction)?;
        if self.elite_count() >= self.population_size {
            return Err(Error::ConfigInvalid("elites leave no room for children".into()));
        }
        if self.stall_generations == 0 {
            return Err(Error::ConfigInvalid("stall generations must be positive".into()));
        }
        check_penalty_weight(self.penalty_weight)?;
        self.crossover.validate()?;
        if let Some(w) = self.decoder.weights() {
            w.validate()?;
        }
        Ok(())
    }

    pub fn elite_count(&self) -> usize {
        elite_count(self.population_size, self.elite_fraction)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Vec<usize>,
    /// Generation the individual was created in.
    pub birth: usize,
    eval: Option<(u64, Evaluation)>,
}

impl Individual {
    fn new(genotype: Vec<usize>, birth: usize) -> Self {
        Individual {
            genotype,
            birth,
            eval: None,
        }
    }

    /// Evaluation under the bound state it was decoded with.
    pub fn evaluation(&self) -> Option<&Evaluation> {
        self.eval.as_ref().map(|(_, e)| e)
    }

    pub fn fitness(&self) -> Option<f64> {
        self.evaluation().map(|e| e.fitness)
    }
}

/// Summary of one evaluated generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub best_feasible_cost: Option<u32>,
    /// Bound the generation was decoded under.
    pub bound: SimpleBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    /// `None` when the run never found a feasible schedule.
    pub best_feasible_cost: Option<u32>,
    pub best_fitness: f64,
    /// Best feasible schedule, or the best infeasible one if none was found.
    pub best_schedule: Schedule,
    pub generations: usize,
    pub decodes: u64,
    pub bound_fallbacks: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunResult {
    pub fn feasible_found(&self) -> bool {
        self.best_feasible_cost.is_some()
    }

    /// Best feasible cost, or `censor` if there is none.
    pub fn censored_cost(&self, censor: f64) -> f64 {
        self.best_feasible_cost.map_or(censor, f64::from)
    }
}

struct Decode {
    evaluation: Evaluation,
    schedule: Schedule,
    bound_fallbacks: usize,
}

/// Random initial population: `size` independent uniform permutations.
pub fn initial_population<R: rand::Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    (0..size)
        .map(|_| {
            let mut g: Vec<usize> = (0..n).collect();
            g.shuffle(rng);
            g
        })
        .collect()
}

/// A GA run that can be stepped one generation at a time.
pub struct Engine<'a> {
    config: GaConfig,
    decoder: Decoder<'a>,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    generation: usize,
    evaluated: bool,
    bound: SimpleBound,
    /// Incremented whenever the bound tightens; evaluations from older epochs
    /// are stale.
    epoch: u64,
    memo: HashMap<Vec<usize>, Decode>,
    best_fitness: f64,
    best_schedule: Option<Schedule>,
    best_feasible: Option<(u32, Schedule)>,
    stall: usize,
    decodes: u64,
    bound_fallbacks: u64,
    history: Vec<GenerationStats>,
    started: Instant,
}

impl<'a> Engine<'a> {
    pub fn new(instance: &'a Instance, config: GaConfig) -> Result<Self> {
        config.validate()?;
        let order = SearchOrder::build(config.ordering, instance, config.seed);
        let decoder = Decoder::new(instance, config.decoder.clone(), order)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = initial_population(instance.nurse_count(), config.population_size, &mut rng)
            .into_iter()
            .map(|g| Individual::new(g, 0))
            .collect();
        Ok(Engine {
            bound: SimpleBound {
                active: config.bound,
                best_feasible_cost: None,
            },
            config,
            decoder,
            rng,
            population,
            generation: 0,
            evaluated: false,
            epoch: 0,
            memo: HashMap::new(),
            best_fitness: f64::INFINITY,
            best_schedule: None,
            best_feasible: None,
            stall: 0,
            decodes: 0,
            bound_fallbacks: 0,
            history: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Current population; sorted best first once evaluated.
    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn bound(&self) -> SimpleBound {
        self.bound
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_fitness
    }

    pub fn best_feasible_cost(&self) -> Option<u32> {
        self.best_feasible.as_ref().map(|(c, _)| *c)
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    /// Decodes every individual without an evaluation under the current
    /// bound, then sorts the population and updates the run's records.
    pub fn evaluate(&mut self) {
        if self.evaluated {
            return;
        }
        let epoch = self.epoch;
        let mut pending: Vec<Vec<usize>> = self
            .population
            .iter()
            .filter(|ind| ind.eval.is_none_or(|(e, _)| e != epoch))
            .filter(|ind| !self.memo.contains_key(&ind.genotype))
            .map(|ind| ind.genotype.clone())
            .collect();
        pending.sort_unstable();
        pending.dedup();
        let decoder = &self.decoder;
        let bound = self.bound;
        let weight = self.config.penalty_weight;
        let fresh: Vec<(Vec<usize>, Decode)> = pending
            .into_par_iter()
            .map(|genotype| {
                let out = decoder.decode(&genotype, &bound);
                let evaluation = Evaluation::new(
                    decoder.instance().cost_unchecked(&out.schedule),
                    out.coverage.total_undercover(),
                    weight,
                );
                let decode = Decode {
                    evaluation,
                    schedule: out.schedule,
                    bound_fallbacks: out.bound_fallbacks,
                };
                (genotype, decode)
            })
            .collect();
        self.decodes += fresh.len() as u64;
        for (genotype, decode) in fresh {
            self.bound_fallbacks += decode.bound_fallbacks as u64;
            self.memo.insert(genotype, decode);
        }
        for ind in &mut self.population {
            if ind.eval.is_none_or(|(e, _)| e != epoch) {
                ind.eval = Some((epoch, self.memo[&ind.genotype].evaluation));
            }
        }
        // Stable: ties keep older individuals first, then population order.
        self.population.sort_by(|a, b| {
            let (fa, fb) = (a.fitness().unwrap(), b.fitness().unwrap());
            fa.total_cmp(&fb).then(a.birth.cmp(&b.birth))
        });
        self.evaluated = true;
        self.record();
    }

    fn record(&mut self) {
        let leader = &self.population[0];
        let fitness = leader.fitness().unwrap();
        if fitness < self.best_fitness {
            self.best_fitness = fitness;
            self.best_schedule = Some(self.memo[&leader.genotype].schedule.clone());
            self.stall = 0;
        } else {
            self.stall += 1;
        }
        let feasible = self
            .population
            .iter()
            .filter_map(|ind| ind.evaluation().filter(|e| e.is_feasible()).map(|e| (e.cost, ind)))
            .min_by_key(|(cost, _)| *cost);
        let decoded_under = self.bound;
        if let Some((cost, ind)) = feasible {
            if self.best_feasible.as_ref().is_none_or(|(best, _)| cost < *best) {
                self.best_feasible = Some((cost, self.memo[&ind.genotype].schedule.clone()));
                if self.bound.active {
                    // Takes effect from the next generation's decodes.
                    self.bound.best_feasible_cost = Some(cost);
                    self.epoch += 1;
                    self.memo.clear();
                }
            }
        }
        self.history.push(GenerationStats {
            generation: self.generation,
            best_fitness: fitness,
            best_feasible_cost: self.best_feasible_cost(),
            bound: decoded_under,
        });
    }

    fn finished(&self) -> bool {
        self.stall >= self.config.stall_generations
            || self
                .config
                .max_generations
                .is_some_and(|cap| self.generation + 1 >= cap)
    }

    /// Evaluates the current generation and, unless the run is over, breeds
    /// the next one. Returns `false` once the stopping rule fires.
    pub fn step(&mut self) -> bool {
        self.evaluate();
        if self.finished() {
            return false;
        }
        let size = self.config.population_size;
        let elites = self.config.elite_count();
        let wheel = RankWheel::new(size);
        let child_birth = self.generation + 1;
        let children: Vec<Individual> = (0..size - elites)
            .map(|_| {
                let a = &self.population[wheel.select_parent(&mut self.rng)].genotype;
                let b = &self.population[wheel.select_parent(&mut self.rng)].genotype;
                let mut child = self.config.crossover.apply(a, b, &mut self.rng);
                mutate_swap(&mut child, self.config.mutation_rate, &mut self.rng);
                Individual::new(child, child_birth)
            })
            .collect();
        self.population = replace_generation(&self.population, children, elites);
        self.generation = child_birth;
        self.evaluated = false;
        true
    }

    pub fn run(mut self) -> RunResult {
        while self.step() {}
        self.into_result()
    }

    fn into_result(self) -> RunResult {
        let (best_feasible_cost, best_schedule) = match self.best_feasible {
            Some((cost, schedule)) => (Some(cost), schedule),
            None => (None, self.best_schedule.expect("at least one generation evaluated")),
        };
        RunResult {
            seed: self.config.seed,
            best_feasible_cost,
            best_fitness: self.best_fitness,
            best_schedule,
            generations: self.generation + 1,
            decodes: self.decodes,
            bound_fallbacks: self.bound_fallbacks,
            wall_time: self.started.elapsed(),
        }
    }
}

/// One full GA run.
pub fn run(instance: &Instance, config: &GaConfig) -> Result<RunResult> {
    Ok(Engine::new(instance, config.clone())?.run())
}

/// Decoder on its own: decodes `samples` uniformly random permutations and
/// keeps the best, tightening the bound as a GA run would if it is enabled.
pub fn random_search(instance: &Instance, config: &GaConfig, samples: usize) -> Result<RunResult> {
    config.validate()?;
    if samples == 0 {
        return Err(Error::ConfigInvalid("random search needs at least one sample".into()));
    }
    let started = Instant::now();
    let order = SearchOrder::build(config.ordering, instance, config.seed);
    let decoder = Decoder::new(instance, config.decoder.clone(), order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut bound = SimpleBound {
        active: config.bound,
        best_feasible_cost: None,
    };
    let mut best: Option<(f64, Schedule)> = None;
    let mut best_feasible: Option<(u32, Schedule)> = None;
    let mut fallbacks = 0u64;
    let mut genotype: Vec<usize> = (0..instance.nurse_count()).collect();
    for _ in 0..samples {
        genotype.shuffle(&mut rng);
        let out = decoder.decode(&genotype, &bound);
        fallbacks += out.bound_fallbacks as u64;
        let eval = Evaluation::new(
            instance.cost_unchecked(&out.schedule),
            out.coverage.total_undercover(),
            config.penalty_weight,
        );
        if best.as_ref().is_none_or(|(f, _)| eval.fitness < *f) {
            best = Some((eval.fitness, out.schedule.clone()));
        }
        if eval.is_feasible() && best_feasible.as_ref().is_none_or(|(c, _)| eval.cost < *c) {
            best_feasible = Some((eval.cost, out.schedule));
            if bound.active {
                bound.best_feasible_cost = Some(eval.cost);
            }
        }
    }
    let (best_fitness, fallback_schedule) = best.expect("samples > 0");
    let (best_feasible_cost, best_schedule) = match best_feasible {
        Some((c, s)) => (Some(c), s),
        None => (None, fallback_schedule),
    };
    Ok(RunResult {
        seed: config.seed,
        best_feasible_cost,
        best_fitness,
        best_schedule,
        generations: 0,
        decodes: samples as u64,
        bound_fallbacks: fallbacks,
        wall_time: started.elapsed(),
    })
}
