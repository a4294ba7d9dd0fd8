use std::time::Instant;

use rayon::prelude::*;

use super::SearchResult;
use crate::error::{Error, Result};
use crate::landscape::{Fitness, Landscape};
use crate::space::unflatten;

// Higher merit wins; equal merits resolve to the earlier enumeration index.
fn better<M: Fitness>(a: (u64, M), b: (u64, M)) -> (u64, M) {
    let (ga, gb) = (a.1.global(), b.1.global());
    if gb > ga || (gb == ga && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Flat index and merit of the best entry of an enumeration-ordered slice.
pub fn argmax<M: Fitness>(merits: &[M]) -> Option<(u64, M)> {
    merits
        .par_iter()
        .enumerate()
        .map(|(i, &m)| (i as u64, m))
        .reduce_with(better)
}

/// Evaluates every grid point and keeps the maximum-merit one.
pub fn systematic_search<L: Landscape>(landscape: &L) -> Result<SearchResult<L::Merit>> {
    let start = Instant::now();
    let shape = landscape.shape();
    let n = landscape.cardinality();
    if n == 0 {
        return Err(Error::InvalidSpace("empty design space".into()));
    }
    let (flat, best) = (0..n)
        .into_par_iter()
        .map(|flat| (flat, landscape.evaluate(&unflatten(shape, flat))))
        .reduce_with(better)
        .expect("non-empty range");
    Ok(SearchResult {
        best_genes: unflatten(shape, flat),
        best_merit: best,
        evaluations: n,
        nominal_evaluations: n,
        elapsed: start.elapsed().as_secs_f64(),
        history: None,
        ga_stats: None,
    })
}
