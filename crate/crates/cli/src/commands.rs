//! The `systematic`, `search` and `experiment` commands.
//!
//! Every command writes CSV tables plus a `summary.json` into an output
//! directory. CSV content depends only on the config, fixtures and seeds;
//! wall-clock timings go to the JSON summary alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;
use tiaopt_core::optimizers::systematic_search;
use tiaopt_core::space::{flatten, GridIter, CF_AXIS, RF_AXIS, VD_AXIS};
use tiaopt_core::stats::{default_cdf_grid, fit_power_law, run_experiments};
use tiaopt_core::{
    AlgorithmConfig, CircuitLandscape, DesignPoint, ExperimentStats, Genes, Landscape,
    MeritBreakdown, MeritTable, PerformanceModel, SearchResult,
};

use crate::cache;
use crate::config::LoadedConfig;
use crate::outdir::Staging;
use crate::records::*;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: PathBuf,
    /// Overrides the algorithm seed (`search`) or base seed (`experiment`).
    pub seed: Option<u64>,
    /// Read and write the merit table cache beside the config.
    pub use_cache: bool,
    /// Also write every grid point (`systematic`).
    pub export_grid: bool,
    /// Replace a non-empty output directory.
    pub force: bool,
}

/// The tabulated landscape and how it was obtained.
pub struct Reference {
    pub table: MeritTable<MeritBreakdown>,
    pub key: cache::Key,
    pub cached: bool,
    pub seconds: f64,
}

pub fn reference_table(cfg: &LoadedConfig, landscape: &CircuitLandscape, use_cache: bool) -> Result<Reference> {
    let key = cache::landscape_key(cfg)?;
    let path = cache::cache_path(&cfg.path);
    let start = Instant::now();
    if use_cache {
        if let Some(table) = cache::load(&path, &key) {
            if table.shape() == landscape.shape() {
                eprintln!("using cached merit table {}", path.display());
                return Ok(Reference {
                    table,
                    key,
                    cached: true,
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
        }
    }
    eprintln!("evaluating {} design points", landscape.cardinality());
    let table = MeritTable::build(landscape);
    let seconds = start.elapsed().as_secs_f64();
    if use_cache {
        if let Err(e) = cache::store(&path, &key, &table) {
            eprintln!("warning: {e:#}");
        }
    }
    Ok(Reference {
        table,
        key,
        cached: false,
        seconds,
    })
}

fn point_row(land: &CircuitLandscape, genes: &[usize], merit: &MeritBreakdown) -> PointRow {
    let perf = land.performance(genes).ok();
    PointRow::new(&land.space().point(genes), perf.as_ref(), merit)
}

fn rows_for(land: &CircuitLandscape, table: &MeritTable<MeritBreakdown>, genes: Vec<Genes>) -> Vec<PointRow> {
    genes
        .into_par_iter()
        .map(|g| point_row(land, &g, &table.evaluate(&g)))
        .collect()
}

/// Merit over two axes with the third held at `fixed`'s index.
fn projection(
    land: &CircuitLandscape,
    table: &MeritTable<MeritBreakdown>,
    best: &[usize],
    fixed: usize,
) -> Vec<PointRow> {
    let shape = land.shape();
    let mut sub = shape.to_vec();
    sub[fixed] = 1;
    let genes = GridIter::new(&sub)
        .map(|mut g| {
            g[fixed] = best[fixed];
            g
        })
        .collect();
    rows_for(land, table, genes)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn point_json(p: &DesignPoint) -> serde_json::Value {
    json!({ "rf": p.rf, "cf": p.cf, "vd": p.vd })
}

fn calibration_json(cfg: &LoadedConfig, land: &CircuitLandscape) -> Option<serde_json::Value> {
    let cal = cfg.config.calibration?;
    let point = DesignPoint {
        rf: cal.rf,
        cf: cal.cf,
        vd: cal.vd,
    };
    let evaluate = |p: &DesignPoint| match land.model().evaluate(p) {
        Ok(perf) => {
            let merit = land.score(&Ok(perf));
            json!({ "point": point_json(p), "performance": perf, "merit": merit })
        }
        Err(e) => json!({ "point": point_json(p), "error": e.to_string() }),
    };
    let space = land.space();
    let nearest = DesignPoint {
        rf: space.rf_values()[space.nearest_index(RF_AXIS, cal.rf)],
        cf: space.cf_values()[space.nearest_index(CF_AXIS, cal.cf)],
        vd: space.vd_values()[space.nearest_index(VD_AXIS, cal.vd)],
    };
    Some(json!({
        "reference": cal,
        "on_grid": space.index_of(&point).is_some(),
        "model_at_reference": evaluate(&point),
        "model_at_nearest_grid_point": evaluate(&nearest),
    }))
}

/// Exhaustive search. Writes `best.csv`, the three projection tables,
/// optionally `grid.csv`, `calibration.json` when the config has a
/// calibration section, and `summary.json`.
pub fn cmd_systematic(cfg: &LoadedConfig, opts: &Options) -> Result<SearchResult<MeritBreakdown>> {
    let staging = Staging::new(&opts.out, opts.force)?;
    let land = cfg.landscape()?;
    let reference = reference_table(cfg, &land, opts.use_cache)?;
    let table = &reference.table;
    let result = systematic_search(table)?;
    let best = &result.best_genes;

    let recomputed = land.evaluate(best);
    if recomputed != result.best_merit {
        bail!("cached merit table disagrees with the circuit model; delete the cache");
    }
    let best_row = point_row(&land, best, &result.best_merit);
    write_csv(&staging.file("best.csv"), std::slice::from_ref(&best_row))?;
    for (name, fixed) in [
        ("projection_rf_cf.csv", VD_AXIS),
        ("projection_rf_vd.csv", CF_AXIS),
        ("projection_cf_vd.csv", RF_AXIS),
    ] {
        write_csv(&staging.file(name), &projection(&land, table, best, fixed))?;
    }
    if opts.export_grid {
        let all = GridIter::new(land.shape()).collect();
        write_csv(&staging.file("grid.csv"), &rows_for(&land, table, all))?;
    }
    if let Some(cal) = calibration_json(cfg, &land) {
        write_json(&staging.file("calibration.json"), &cal)?;
    }
    let point = result.best_point(land.space());
    write_json(
        &staging.file("summary.json"),
        &json!({
            "command": "systematic",
            "shape": land.shape(),
            "evaluations": result.evaluations,
            "best": {
                "point": point_json(&point),
                "indices": best.as_slice(),
                "flat_index": flatten(land.shape(), best),
                "performance": land.performance(best).ok(),
                "merit": result.best_merit,
            },
            "zero_merit_fraction": table.zero_fraction(),
            "table_key": cache::hex(&reference.key),
            "table_cached": reference.cached,
            "table_seconds": reference.seconds,
        }),
    )?;
    staging.commit()?;
    Ok(result)
}

fn search_algorithm(cfg: &LoadedConfig, opts: &Options) -> Result<AlgorithmConfig> {
    let Some(mut algo) = cfg.config.algorithm else {
        bail!("config has no [algorithm] section");
    };
    if matches!(algo, AlgorithmConfig::Systematic) {
        bail!("`search` runs montecarlo or ga; use the `systematic` command for exhaustive search");
    }
    if let Some(seed) = opts.seed {
        algo = algo.with_seed(seed);
    }
    Ok(algo)
}

/// One Monte Carlo or GA run. Writes `result.csv`, `history.csv` (GA) and
/// `summary.json`.
pub fn cmd_search(cfg: &LoadedConfig, opts: &Options) -> Result<SearchResult<MeritBreakdown>> {
    let algo = search_algorithm(cfg, opts)?;
    let staging = Staging::new(&opts.out, opts.force)?;
    let land = cfg.landscape()?;
    let result = algo.run(&land)?;
    let point = result.best_point(land.space());
    let cols = AlgoColumns::from(&algo);
    let m = result.best_merit;
    let row = SearchRow {
        kind: cols.kind.to_string(),
        seed: algo.seed(),
        n_mc: cols.n_mc,
        n_c: cols.n_c,
        gen: cols.gen,
        mut_percent: cols.mut_percent,
        rf: point.rf,
        cf: point.cf,
        vd: point.vd,
        m_snr: m.m_snr,
        m_bandwidth: m.m_bandwidth,
        m_phase: m.m_phase,
        global: m.global,
        evaluations: result.evaluations,
        nominal_evaluations: result.nominal_evaluations,
    };
    write_csv(&staging.file("result.csv"), &[row])?;
    if let Some(history) = &result.history {
        let rows: Vec<HistoryRow> = history
            .iter()
            .enumerate()
            .map(|(i, h)| HistoryRow {
                generation: i + 1,
                population_best: h.population_best,
                best_so_far: h.best_so_far,
            })
            .collect();
        write_csv(&staging.file("history.csv"), &rows)?;
    }
    write_json(
        &staging.file("summary.json"),
        &json!({
            "command": "search",
            "algorithm": algo,
            "best": {
                "point": point_json(&point),
                "indices": result.best_genes.as_slice(),
                "performance": land.performance(&result.best_genes).ok(),
                "merit": result.best_merit,
            },
            "evaluations": result.evaluations,
            "nominal_evaluations": result.nominal_evaluations,
            "ga_stats": result.ga_stats,
            "elapsed_seconds": result.elapsed,
        }),
    )?;
    staging.commit()?;
    Ok(result)
}

/// Power-law fits of eps95 over each sweep family. Censored and zero
/// percentiles carry no scaling information and are left out.
pub fn fit_families(sweep: &[AlgorithmConfig], stats: &[ExperimentStats]) -> Vec<FitRow> {
    // (kind, gen, mut bits) -> (every x, usable (x, eps95))
    type Family = (Vec<f64>, Vec<(f64, f64)>);
    let mut families: BTreeMap<(&str, Option<usize>, Option<u64>), Family> = BTreeMap::new();
    for (algo, s) in sweep.iter().zip(stats) {
        let (key, x) = match algo {
            AlgorithmConfig::MonteCarlo(c) => (("montecarlo", None, None), c.n_mc as f64),
            AlgorithmConfig::Genetic(c) => (("ga", Some(c.gen), Some(c.mut_percent.to_bits())), c.n_c as f64),
            AlgorithmConfig::Systematic => continue,
        };
        let (xs, points) = families.entry(key).or_default();
        xs.push(x);
        if !s.censored && s.eps95 > 0.0 {
            points.push((x, s.eps95));
        }
    }
    families
        .into_iter()
        .filter_map(|((kind, gen, mut_bits), (mut xs, points))| {
            // Only families that actually vary the size variable are fitted.
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            if xs.len() < 2 {
                return None;
            }
            let fit = if points.len() >= 3 { fit_power_law(&points).ok() } else { None };
            Some(FitRow {
                kind: kind.to_string(),
                variable: if kind == "ga" { "n_c" } else { "n_mc" }.to_string(),
                gen,
                mut_percent: mut_bits.map(f64::from_bits),
                n_points: points.len(),
                beta: fit.map(|f| f.beta),
                log_intercept: fit.map(|f| f.log_intercept),
                r_squared: fit.map(|f| f.r_squared),
            })
        })
        .collect()
}

/// Repeated runs over the sweep. Writes `runs.csv`, `summary.csv`,
/// `cdf.csv`, `power_law.csv`, `near_optimal.csv` and `summary.json`.
pub fn cmd_experiment(cfg: &LoadedConfig, opts: &Options) -> Result<Vec<ExperimentStats>> {
    let Some(exp) = &cfg.config.experiment else {
        bail!("config has no [experiment] section");
    };
    let sweep: Vec<AlgorithmConfig> = if exp.sweep.is_empty() {
        cfg.config.algorithm.into_iter().collect()
    } else {
        exp.sweep.clone()
    };
    if sweep.is_empty() {
        bail!("experiment has an empty sweep and no [algorithm] section");
    }
    if sweep.iter().any(|a| matches!(a, AlgorithmConfig::Systematic)) {
        bail!("experiment sweeps repeat montecarlo or ga searches only");
    }
    let base_seed = opts.seed.unwrap_or(exp.base_seed);

    let staging = Staging::new(&opts.out, opts.force)?;
    let land = cfg.landscape()?;
    let reference = reference_table(cfg, &land, opts.use_cache)?;
    let table = &reference.table;
    let syst = systematic_search(table)?;
    let reference_merit = syst.global();
    if !(reference_merit > 0.0) {
        bail!("no design point has non-zero merit; relative errors are undefined");
    }

    let mut all_stats = Vec::with_capacity(sweep.len());
    let mut timings = Vec::with_capacity(sweep.len());
    for (i, algo) in sweep.iter().enumerate() {
        eprintln!("sweep {}/{}: {} runs of {:?}", i + 1, sweep.len(), exp.n_runs, algo);
        let start = Instant::now();
        let stats = run_experiments(table, algo, exp.n_runs, base_seed, reference_merit)?;
        timings.push(json!({
            "sweep_index": i,
            "total_seconds": start.elapsed().as_secs_f64(),
            "mean_run_seconds": stats.mean_elapsed(),
        }));
        all_stats.push(stats);
    }

    let space = land.space();
    let design = |g: &Option<Genes>| g.as_ref().map(|g| space.point(g));
    let mut runs = Vec::new();
    let mut summary = Vec::new();
    let mut cdf = Vec::new();
    let mut cloud = Vec::new();
    let grid = default_cdf_grid();
    for (i, (algo, stats)) in sweep.iter().zip(&all_stats).enumerate() {
        for r in &stats.runs {
            let p = design(&r.best_genes);
            runs.push(RunRow {
                sweep_index: i,
                run_index: r.run_index,
                seed: r.seed,
                epsilon: r.epsilon,
                best_merit: r.best_merit,
                evaluations: r.evaluations,
                nominal_evaluations: r.nominal_evaluations,
                rf: p.map(|p| p.rf),
                cf: p.map(|p| p.cf),
                vd: p.map(|p| p.vd),
            });
        }
        for r in stats.near_optimal() {
            if let Some(p) = design(&r.best_genes) {
                cloud.push(CloudRow {
                    sweep_index: i,
                    run_index: r.run_index,
                    rf: p.rf,
                    cf: p.cf,
                    vd: p.vd,
                    merit: r.best_merit,
                    epsilon: r.epsilon,
                });
            }
        }
        cdf.extend(stats.cdf(&grid).into_iter().map(|(epsilon, f)| CdfRow {
            sweep_index: i,
            epsilon,
            f,
        }));
        let cols = AlgoColumns::from(algo);
        let nominal = match algo {
            AlgorithmConfig::MonteCarlo(c) => c.n_mc,
            AlgorithmConfig::Genetic(c) => c.nominal_evaluations(),
            AlgorithmConfig::Systematic => land.cardinality(),
        };
        summary.push(SummaryRow {
            sweep_index: i,
            kind: cols.kind.to_string(),
            n_mc: cols.n_mc,
            n_c: cols.n_c,
            gen: cols.gen,
            mut_percent: cols.mut_percent,
            n_runs: stats.n_runs,
            nominal_evaluations: nominal,
            mean_evaluations: stats.mean_evaluations(),
            eps95: stats.eps95,
            censored: stats.censored,
        });
    }
    let fits = fit_families(&sweep, &all_stats);

    write_csv(&staging.file("runs.csv"), &runs)?;
    write_csv(&staging.file("summary.csv"), &summary)?;
    write_csv(&staging.file("cdf.csv"), &cdf)?;
    write_csv(&staging.file("power_law.csv"), &fits)?;
    write_csv(&staging.file("near_optimal.csv"), &cloud)?;
    write_json(
        &staging.file("summary.json"),
        &json!({
            "command": "experiment",
            "n_runs": exp.n_runs,
            "base_seed": base_seed,
            "reference": {
                "point": point_json(&syst.best_point(space)),
                "merit": syst.best_merit,
            },
            "sweep": sweep,
            "eps95": all_stats.iter().map(|s| s.eps95).collect::<Vec<_>>(),
            "power_law": fits,
            "timings": timings,
            "table_key": cache::hex(&reference.key),
            "table_cached": reference.cached,
            "table_seconds": reference.seconds,
        }),
    )?;
    staging.commit()?;
    Ok(all_stats)
}
