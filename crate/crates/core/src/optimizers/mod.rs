//! Search algorithms over a [`Landscape`]: exhaustive, Monte Carlo and
//! genetic. All of them return a [`SearchResult`].

mod genetic;
mod montecarlo;
mod systematic;

use serde::{Deserialize, Serialize};

pub use genetic::{
    ga_init_population, ga_mutate, ga_recombine, ga_search, ga_select_parent, recombine_genes,
    Chromosome, GAConfig, GaStats, RecombinationMode,
};
pub use montecarlo::{montecarlo_search, MCConfig};
pub use systematic::{argmax, systematic_search};

use crate::error::Result;
use crate::landscape::{Fitness, Genes, Landscape};
use crate::space::{DesignPoint, DesignSpace};

/// Per-generation merit summary of a GA run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// Best merit within this generation's population.
    pub population_best: f64,
    /// Best merit over this and all previous generations.
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<M> {
    pub best_genes: Genes,
    pub best_merit: M,
    /// Actual evaluator calls.
    pub evaluations: u64,
    /// Cost as conventionally quoted: grid size, `n_mc`, or `gen * n_c`.
    pub nominal_evaluations: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub history: Option<Vec<GenerationRecord>>,
    pub ga_stats: Option<GaStats>,
}

impl<M: Fitness> SearchResult<M> {
    pub fn best_point(&self, space: &DesignSpace) -> DesignPoint {
        space.point(&self.best_genes)
    }

    pub fn global(&self) -> f64 {
        self.best_merit.global()
    }
}

/// One search algorithm with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlgorithmConfig {
    Systematic,
    #[serde(rename = "montecarlo")]
    MonteCarlo(MCConfig),
    #[serde(rename = "ga")]
    Genetic(GAConfig),
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmConfig::Systematic => Ok(()),
            AlgorithmConfig::MonteCarlo(c) => c.validate(),
            AlgorithmConfig::Genetic(c) => c.validate(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            AlgorithmConfig::Systematic => None,
            AlgorithmConfig::MonteCarlo(c) => Some(c.seed),
            AlgorithmConfig::Genetic(c) => Some(c.seed),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            AlgorithmConfig::Systematic => {}
            AlgorithmConfig::MonteCarlo(c) => c.seed = seed,
            AlgorithmConfig::Genetic(c) => c.seed = seed,
        }
        self
    }

    pub fn run<L: Landscape>(&self, landscape: &L) -> Result<SearchResult<L::Merit>> {
        match self {
            AlgorithmConfig::Systematic => systematic_search(landscape),
            AlgorithmConfig::MonteCarlo(c) => montecarlo_search(landscape, c),
            AlgorithmConfig::Genetic(c) => ga_search(landscape, c),
        }
    }
}
