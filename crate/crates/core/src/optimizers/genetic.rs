//! Generational genetic algorithm over three genes (Rf, Cf, VD).
//!
//! Flow: a first generation of `n_c` non-zero merit chromosomes drawn at
//! random; then, for every later generation, `n_c / 2` couples chosen by
//! merit-proportional acceptance/rejection, two descendants per couple by
//! one of three recombination modes, and random single-gene mutation of a
//! fixed share of descendants. The best chromosome seen in any generation is
//! the result. There is no elitism.

use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GenerationRecord, SearchResult};
use crate::error::{Error, Result};
use crate::landscape::{Fitness, Genes, Landscape};
use crate::space::sample_indices;

pub const DEFAULT_SELECTION_FLOOR: f64 = 0.05;

fn default_selection_floor() -> f64 {
    DEFAULT_SELECTION_FLOOR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GAConfig {
    /// Chromosomes per generation (even).
    pub n_c: usize,
    /// Generations, including the first.
    pub gen: usize,
    /// Share of each descendant generation that is mutated, percent.
    pub mut_percent: f64,
    #[serde(default)]
    pub seed: u64,
    /// Maximum random draws allowed to build the first generation. `None`
    /// means `1000 * n_c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_attempt_cap: Option<u64>,
    /// Minimum acceptance probability during parent selection, so that
    /// zero-merit chromosomes can still become parents.
    #[serde(default = "default_selection_floor")]
    pub selection_floor: f64,
}

impl GAConfig {
    pub fn new(n_c: usize, gen: usize, mut_percent: f64, seed: u64) -> Self {
        GAConfig {
            n_c,
            gen,
            mut_percent,
            seed,
            init_attempt_cap: None,
            selection_floor: DEFAULT_SELECTION_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_c < 2 || !self.n_c.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "n_c must be even and >= 2, got {}",
                self.n_c
            )));
        }
        if self.gen == 0 {
            return Err(Error::InvalidConfig("gen must be >= 1".into()));
        }
        if !(0.0..=100.0).contains(&self.mut_percent) {
            return Err(Error::InvalidConfig(format!(
                "mut_percent must be in [0, 100], got {}",
                self.mut_percent
            )));
        }
        if !(0.0..=1.0).contains(&self.selection_floor) {
            return Err(Error::InvalidConfig("selection_floor must be in [0, 1]".into()));
        }
        if self.init_attempt_cap == Some(0) {
            return Err(Error::InvalidConfig("init_attempt_cap must be >= 1".into()));
        }
        Ok(())
    }

    pub fn attempt_cap(&self) -> u64 {
        self.init_attempt_cap.unwrap_or(1000 * self.n_c as u64)
    }

    /// Number of chromosomes mutated per generation.
    pub fn mutation_count(&self) -> usize {
        mutation_count(self.n_c, self.mut_percent)
    }

    pub fn nominal_evaluations(&self) -> u64 {
        (self.gen * self.n_c) as u64
    }
}

fn mutation_count(n: usize, mut_percent: f64) -> usize {
    ((n as f64 * mut_percent / 100.0).round() as usize).min(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome<M> {
    pub genes: Genes,
    pub merit: M,
}

impl<M: Fitness> Chromosome<M> {
    pub fn evaluate<L: Landscape<Merit = M>>(landscape: &L, genes: Genes) -> Self {
        let merit = landscape.evaluate(&genes);
        Chromosome { genes, merit }
    }
}

/// Bookkeeping of a GA run beyond the headline result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GaStats {
    pub init_draws: u64,
    pub init_rejections: u64,
    pub couples: u64,
    /// Couples whose two parents are the same chromosome.
    pub self_couples: u64,
    pub mutations: u64,
}

/// Random draws until `n_c` chromosomes with non-zero merit are collected.
/// Returns the population and the number of draws (all of them evaluated).
pub fn ga_init_population<L: Landscape, R: Rng + ?Sized>(
    landscape: &L,
    cfg: &GAConfig,
    rng: &mut R,
) -> Result<(Vec<Chromosome<L::Merit>>, u64)> {
    let cap = cfg.attempt_cap();
    let mut population = Vec::with_capacity(cfg.n_c);
    let mut draws = 0u64;
    while population.len() < cfg.n_c {
        if draws >= cap {
            return Err(Error::Initialization {
                wanted: cfg.n_c,
                accepted: population.len(),
                attempts: draws,
                zero_fraction: 1.0 - population.len() as f64 / draws as f64,
            });
        }
        draws += 1;
        let c = Chromosome::evaluate(landscape, sample_indices(landscape.shape(), rng));
        if c.merit.global() > 0.0 {
            population.push(c);
        }
    }
    Ok((population, draws))
}

fn max_global<M: Fitness>(population: &[Chromosome<M>]) -> f64 {
    population
        .iter()
        .map(|c| c.merit.global())
        .fold(0.0, f64::max)
}

/// Index of one parent: draw a chromosome uniformly, accept it with
/// probability `max(merit / max_merit, floor)`, repeat until accepted.
pub fn ga_select_parent<M: Fitness, R: Rng + ?Sized>(
    population: &[Chromosome<M>],
    max_merit: f64,
    floor: f64,
    rng: &mut R,
) -> usize {
    assert!(!population.is_empty(), "selection from an empty population");
    loop {
        let i = rng.random_range(0..population.len());
        let ratio = if max_merit > 0.0 {
            population[i].merit.global() / max_merit
        } else {
            1.0
        };
        if rng.random::<f64>() < ratio.max(floor) {
            return i;
        }
    }
}

/// Gene exchange pattern of a couple. Descendant 1 keeps parent 1's Rf and
/// takes the marked genes from parent 2; descendant 2 is the complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecombinationMode {
    /// `(Rf1, Cf2, VD2) | (Rf2, Cf1, VD1)`
    A,
    /// `(Rf1, Cf1, VD2) | (Rf2, Cf2, VD1)`
    B,
    /// `(Rf1, Cf2, VD1) | (Rf2, Cf1, VD2)`
    C,
}

impl RecombinationMode {
    pub const ALL: [RecombinationMode; 3] =
        [RecombinationMode::A, RecombinationMode::B, RecombinationMode::C];

    /// Genes descendant 1 inherits from parent 2.
    fn inherited_from_second(self) -> [bool; 3] {
        match self {
            RecombinationMode::A => [false, true, true],
            RecombinationMode::B => [false, false, true],
            RecombinationMode::C => [false, true, false],
        }
    }
}

pub fn recombine_genes(p1: &[usize], p2: &[usize], mode: RecombinationMode) -> (Genes, Genes) {
    let mask = mode.inherited_from_second();
    let mut d1 = Genes::from_slice(p1);
    let mut d2 = Genes::from_slice(p2);
    for (k, &swap) in mask.iter().enumerate() {
        if swap {
            d1[k] = p2[k];
            d2[k] = p1[k];
        }
    }
    (d1, d2)
}

/// Two evaluated descendants from a uniformly chosen recombination mode.
pub fn ga_recombine<L: Landscape, R: Rng + ?Sized>(
    landscape: &L,
    p1: &Chromosome<L::Merit>,
    p2: &Chromosome<L::Merit>,
    rng: &mut R,
) -> ([Chromosome<L::Merit>; 2], RecombinationMode) {
    let mode = RecombinationMode::ALL[rng.random_range(0..3)];
    let (g1, g2) = recombine_genes(&p1.genes, &p2.genes, mode);
    (
        [
            Chromosome::evaluate(landscape, g1),
            Chromosome::evaluate(landscape, g2),
        ],
        mode,
    )
}

/// Mutates `round(n * mut_percent / 100)` distinct chromosomes: one gene
/// each, redrawn uniformly from its axis, then re-evaluated. Returns the
/// number of evaluations.
pub fn ga_mutate<L: Landscape, R: Rng + ?Sized>(
    landscape: &L,
    generation: &mut [Chromosome<L::Merit>],
    mut_percent: f64,
    rng: &mut R,
) -> u64 {
    let shape = landscape.shape();
    let count = mutation_count(generation.len(), mut_percent);
    let chosen = index::sample(rng, generation.len(), count);
    for i in chosen.iter() {
        let gene = rng.random_range(0..shape.len());
        let mut genes = generation[i].genes.clone();
        genes[gene] = rng.random_range(0..shape[gene]);
        generation[i] = Chromosome::evaluate(landscape, genes);
    }
    count as u64
}

pub fn ga_search<L: Landscape>(landscape: &L, cfg: &GAConfig) -> Result<SearchResult<L::Merit>> {
    cfg.validate()?;
    if landscape.shape().len() != 3 {
        return Err(Error::InvalidConfig(format!(
            "genetic search needs exactly three genes, landscape has {}",
            landscape.shape().len()
        )));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut population, draws) = ga_init_population(landscape, cfg, &mut rng)?;
    let mut stats = GaStats {
        init_draws: draws,
        init_rejections: draws - cfg.n_c as u64,
        ..GaStats::default()
    };
    let mut evaluations = draws;

    let mut best = population[0].clone();
    let mut history = Vec::with_capacity(cfg.gen);
    let mut track = |population: &[Chromosome<L::Merit>], best: &mut Chromosome<L::Merit>| {
        for c in population {
            if c.merit.global() > best.merit.global() {
                *best = c.clone();
            }
        }
        history.push(GenerationRecord {
            population_best: max_global(population),
            best_so_far: best.merit.global(),
        });
    };
    track(&population, &mut best);

    for _ in 1..cfg.gen {
        let max_merit = max_global(&population);
        let mut next = Vec::with_capacity(cfg.n_c);
        for _ in 0..cfg.n_c / 2 {
            let i = ga_select_parent(&population, max_merit, cfg.selection_floor, &mut rng);
            let j = ga_select_parent(&population, max_merit, cfg.selection_floor, &mut rng);
            stats.couples += 1;
            if i == j {
                stats.self_couples += 1;
            }
            let ([d1, d2], _) = ga_recombine(landscape, &population[i], &population[j], &mut rng);
            next.push(d1);
            next.push(d2);
        }
        evaluations += cfg.n_c as u64;
        let mutated = ga_mutate(landscape, &mut next, cfg.mut_percent, &mut rng);
        stats.mutations += mutated;
        evaluations += mutated;
        debug_assert_eq!(next.len(), cfg.n_c);
        population = next;
        track(&population, &mut best);
    }

    Ok(SearchResult {
        best_genes: best.genes,
        best_merit: best.merit,
        evaluations,
        nominal_evaluations: cfg.nominal_evaluations(),
        elapsed: start.elapsed().as_secs_f64(),
        history: Some(history),
        ga_stats: Some(stats),
    })
}
