//! Repeated-run statistics: relative merit error against the exhaustive
//! optimum, its 95th percentile, empirical CDFs and power-law fits.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{Fitness, Genes, Landscape};
use crate::optimizers::{AlgorithmConfig, SearchResult};

/// Percent relative difference between a run's best merit and the
/// exhaustive-search optimum.
pub fn epsilon(merit: f64, merit_syst: f64) -> Result<f64> {
    if !(merit_syst > 0.0) {
        return Err(Error::Stats(format!(
            "reference merit must be > 0, got {merit_syst}"
        )));
    }
    if merit > merit_syst {
        return Err(Error::InconsistentReference {
            merit,
            reference: merit_syst,
        });
    }
    if !(merit >= 0.0) {
        return Err(Error::Stats(format!("merit must be >= 0, got {merit}")));
    }
    Ok(100.0 * (merit_syst - merit) / merit_syst)
}

/// Nearest-rank 95th percentile: the `ceil(0.95 n)`-th smallest value.
pub fn epsilon95(epsilons: &[f64]) -> Result<f64> {
    if epsilons.is_empty() {
        return Err(Error::Stats("epsilon95 of an empty sample".into()));
    }
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[nearest_rank(sorted.len(), 0.95) - 1])
}

fn nearest_rank(n: usize, p: f64) -> usize {
    // 0.95 * n is computed in integer arithmetic to avoid ceil(95.00000001)
    let pct = (p * 100.0).round() as usize;
    ((pct * n).div_ceil(100)).clamp(1, n)
}

/// `F(e)` = fraction of samples `<= e`, at each grid value.
pub fn cumulative_distribution(epsilons: &[f64], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if epsilons.is_empty() || grid.is_empty() {
        return Err(Error::Stats("empty sample or grid".into()));
    }
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&e| (e, sorted.partition_point(|&x| x <= e) as f64 / n))
        .collect())
}

/// Default grid for CDF tables: 0 to 100 percent in steps of 0.1.
pub fn default_cdf_grid() -> Vec<f64> {
    (0..=1000).map(|i| i as f64 / 10.0).collect()
}

/// `eps95 = 10^log_intercept * N^(-beta)` fitted in log10-log10 space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        10f64.powf(self.log_intercept - self.beta * n.log10())
    }
}

/// Ordinary least squares on `(log10 N, log10 eps95)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Stats(format!(
            "power-law fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, e)) = points.iter().find(|&&(n, e)| !(n > 0.0 && e > 0.0)) {
        return Err(Error::Stats(format!(
            "power-law fit needs positive values, got ({n}, {e})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Stats("power-law fit needs distinct N values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(PowerLawFit {
        beta: -slope,
        log_intercept: intercept,
        r_squared,
        n_points: points.len(),
    })
}

/// Outcome of one run in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub best_merit: f64,
    pub evaluations: u64,
    pub nominal_evaluations: u64,
    /// `None` when the run failed to initialize.
    pub best_genes: Option<Genes>,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub algorithm: Option<AlgorithmConfig>,
    pub reference_merit: f64,
    pub n_runs: u64,
    /// Ordered by run index.
    pub runs: Vec<RunRecord>,
    /// Ascending.
    pub epsilons: Vec<f64>,
    pub eps95: f64,
    /// Whether the 95th-percentile rank fell on a run that found no
    /// non-zero merit (the true value is only known to be >= 100).
    pub censored: bool,
}

impl ExperimentStats {
    pub fn from_runs(
        algorithm: Option<AlgorithmConfig>,
        reference_merit: f64,
        runs: Vec<RunRecord>,
    ) -> Result<Self> {
        let mut epsilons: Vec<f64> = runs.iter().map(|r| r.epsilon).collect();
        epsilons.sort_by(f64::total_cmp);
        let eps95 = epsilon95(&epsilons)?;
        Ok(ExperimentStats {
            algorithm,
            reference_merit,
            n_runs: runs.len() as u64,
            runs,
            epsilons,
            eps95,
            censored: eps95 >= 100.0,
        })
    }

    pub fn mean_elapsed(&self) -> f64 {
        self.runs.iter().map(|r| r.elapsed).sum::<f64>() / self.runs.len() as f64
    }

    pub fn mean_evaluations(&self) -> f64 {
        self.runs.iter().map(|r| r.evaluations as f64).sum::<f64>() / self.runs.len() as f64
    }

    /// Runs with `epsilon <= eps95`.
    pub fn near_optimal(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(move |r| r.epsilon <= self.eps95)
    }

    pub fn cdf(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        cumulative_distribution(&self.epsilons, grid).expect("non-empty experiment")
    }
}

/// Runs `run(seed)` for seeds `base_seed + i`, `i < n_runs`, in parallel.
///
/// Initialization failures count as runs with merit 0 (epsilon 100); any
/// other error aborts the experiment.
pub fn run_trials<M, F>(
    n_runs: u64,
    base_seed: u64,
    reference_merit: f64,
    algorithm: Option<AlgorithmConfig>,
    run: F,
) -> Result<ExperimentStats>
where
    M: Fitness,
    F: Fn(u64) -> Result<SearchResult<M>> + Sync,
{
    if n_runs == 0 {
        return Err(Error::Stats("n_runs must be >= 1".into()));
    }
    let runs = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let start = Instant::now();
            match run(seed) {
                Ok(r) => Ok(RunRecord {
                    run_index: i,
                    seed,
                    epsilon: epsilon(r.global(), reference_merit)?,
                    best_merit: r.global(),
                    evaluations: r.evaluations,
                    nominal_evaluations: r.nominal_evaluations,
                    best_genes: Some(r.best_genes),
                    elapsed: r.elapsed,
                }),
                Err(Error::Initialization { attempts, .. }) => Ok(RunRecord {
                    run_index: i,
                    seed,
                    epsilon: 100.0,
                    best_merit: 0.0,
                    evaluations: attempts,
                    nominal_evaluations: 0,
                    best_genes: None,
                    elapsed: start.elapsed().as_secs_f64(),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ExperimentStats::from_runs(algorithm, reference_merit, runs)
}

/// Repeats a Monte Carlo or genetic search `n_runs` times, run `i` seeded
/// with `base_seed + i`.
pub fn run_experiments<L: Landscape>(
    landscape: &L,
    algorithm: &AlgorithmConfig,
    n_runs: u64,
    base_seed: u64,
    reference_merit: f64,
) -> Result<ExperimentStats> {
    if matches!(algorithm, AlgorithmConfig::Systematic) {
        return Err(Error::InvalidConfig(
            "experiments repeat stochastic searches; systematic search is deterministic".into(),
        ));
    }
    algorithm.validate()?;
    run_trials(n_runs, base_seed, reference_merit, Some(*algorithm), |seed| {
        algorithm.with_seed(seed).run(landscape)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(0.9338, 0.9338).unwrap(), 0.0);
        assert_eq!(epsilon(0.0, 0.9338).unwrap(), 100.0);
        let e = epsilon(0.9116, 0.9338).unwrap();
        assert!((e - 2.377383).abs() < 1e-5, "{e}");
        assert!((e - 2.38).abs() < 0.005);
        assert!(matches!(
            epsilon(0.95, 0.9338),
            Err(Error::InconsistentReference { .. })
        ));
        assert!(epsilon(0.5, 0.0).is_err());
    }

    #[test]
    fn epsilon95_examples() {
        assert_eq!(epsilon95(&[0.0; 40]).unwrap(), 0.0);
        let v: Vec<f64> = (1..=100).rev().map(f64::from).collect();
        assert_eq!(epsilon95(&v).unwrap(), 95.0);
        assert_eq!(epsilon95(&[7.0]).unwrap(), 7.0);
        assert!(epsilon95(&[]).is_err());
        // ceil(0.95 * 1000) = 950, ceil(0.95 * 21) = 20
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(epsilon95(&v).unwrap(), 950.0);
        let v: Vec<f64> = (1..=21).map(f64::from).collect();
        assert_eq!(epsilon95(&v).unwrap(), 20.0);
    }

    #[test]
    fn cdf_single_sample() {
        let f = cumulative_distribution(&[5.0], &[0.0, 4.99, 5.0, 6.0, 100.0]).unwrap();
        let values: Vec<f64> = f.iter().map(|p| p.1).collect();
        assert_eq!(values, vec![0.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(cumulative_distribution(&[], &[1.0]).is_err());
    }

    #[test]
    fn cdf_of_uniform_samples_is_linear() {
        let samples: Vec<f64> = (0..1000).map(|i| i as f64 / 10.0 + 0.05).collect();
        for (e, f) in cumulative_distribution(&samples, &default_cdf_grid()).unwrap() {
            assert!((f - e / 100.0).abs() <= 0.0011, "{e} {f}");
        }
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [100.0, 500.0, 1000.0, 3000.0, 10000.0]
            .iter()
            .map(|&n: &f64| (n, 100.0 * n.powf(-0.5)))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.beta - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.log_intercept - 2.0).abs() < 1e-12);
        assert!((fit.predict(400.0) - 5.0).abs() < 1e-10);
    }

    #[test]
    fn power_law_rejects_bad_input() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_power_law(&[(2.0, 1.0), (2.0, 3.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn failed_runs_count_as_full_error() {
        let stats = run_trials(4, 10, 1.0, None, |seed| -> Result<SearchResult<f64>> {
            if seed % 2 == 0 {
                Err(Error::Initialization {
                    wanted: 2,
                    accepted: 0,
                    attempts: 9,
                    zero_fraction: 1.0,
                })
            } else {
                Ok(SearchResult {
                    best_genes: Genes::from_slice(&[0]),
                    best_merit: 0.5,
                    evaluations: 1,
                    nominal_evaluations: 1,
                    elapsed: 0.0,
                    history: None,
                    ga_stats: None,
                })
            }
        })
        .unwrap();
        assert_eq!(stats.epsilons, vec![50.0, 50.0, 100.0, 100.0]);
        assert!(stats.censored);
        assert_eq!(stats.runs[1].seed, 11);
    }
}
