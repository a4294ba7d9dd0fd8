use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SearchResult;
use crate::error::{Error, Result};
use crate::landscape::{Fitness, Landscape};
use crate::space::sample_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MCConfig {
    /// Number of random design points drawn.
    pub n_mc: u64,
    #[serde(default)]
    pub seed: u64,
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_mc == 0 {
            return Err(Error::InvalidConfig("n_mc must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draws `n_mc` uniform grid points (with replacement) and keeps the best.
pub fn montecarlo_search<L: Landscape>(landscape: &L, cfg: &MCConfig) -> Result<SearchResult<L::Merit>> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shape = landscape.shape();

    let mut best_genes = sample_indices(shape, &mut rng);
    let mut best = landscape.evaluate(&best_genes);
    for _ in 1..cfg.n_mc {
        let genes = sample_indices(shape, &mut rng);
        let merit = landscape.evaluate(&genes);
        if merit.global() > best.global() {
            best = merit;
            best_genes = genes;
        }
    }
    Ok(SearchResult {
        best_genes,
        best_merit: best,
        evaluations: cfg.n_mc,
        nominal_evaluations: cfg.n_mc,
        elapsed: start.elapsed().as_secs_f64(),
        history: None,
        ga_stats: None,
    })
}
