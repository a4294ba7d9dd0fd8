use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiaopt_core::space::{discretize_bias, e_series_values, sample_indices};
use tiaopt_core::{DesignSpace, ESeries, ESeriesSpec};

fn transcribed(name: &str) -> Vec<f64> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().unwrap() / 10.0)
        .collect()
}

#[test]
fn e24_matches_transcribed_table() {
    let expected = transcribed("e24.txt");
    let got = e_series_values(&ESeriesSpec::new(ESeries::E24, 0, 1).unwrap()).unwrap();
    assert_eq!(got.len(), 24);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-12, "{g} vs {e}");
    }
    assert_eq!(&got[..5], &[1.0, 1.1, 1.2, 1.3, 1.5]);
    assert_eq!(&got[22..], &[8.2, 9.1]);
}

#[test]
fn e12_matches_transcribed_table() {
    let expected = transcribed("e12.txt");
    let got = e_series_values(&ESeriesSpec::new(ESeries::E12, 0, 1).unwrap()).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn e24_three_decades() {
    let v = e_series_values(&ESeriesSpec::new(ESeries::E24, 2, 5).unwrap()).unwrap();
    assert_eq!(v.len(), 72);
    assert_eq!(v[0], 100.0);
    assert_eq!(v[71], 91_000.0);
}

#[test]
fn bias_step() {
    let v = discretize_bias(0.0, 32.0, 72).unwrap();
    assert_eq!(v.len(), 72);
    for w in v.windows(2) {
        assert!((w[1] - w[0] - 32.0 / 71.0).abs() < 1e-12);
    }
    assert!(discretize_bias(5.0, 5.0, 10).is_err());
    assert!(discretize_bias(0.0, 1.0, 1).is_err());
}

fn any_series() -> impl Strategy<Value = ESeries> {
    prop_oneof![
        Just(ESeries::E6),
        Just(ESeries::E12),
        Just(ESeries::E24),
        Just(ESeries::E48),
        Just(ESeries::E96),
    ]
}

proptest! {
    #[test]
    fn series_scales_by_decade(series in any_series(), lo in -15i32..10, span in 1i32..5) {
        let spec = ESeriesSpec::new(series, lo, lo + span).unwrap();
        let v = e_series_values(&spec).unwrap();
        let k = series.points_per_decade();
        prop_assert_eq!(v.len(), k * span as usize);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        for i in 0..v.len() - k {
            let ratio = v[i + k] / (10.0 * v[i]);
            prop_assert!((ratio - 1.0).abs() < 1e-9, "{} {}", v[i + k], v[i]);
        }
    }

    #[test]
    fn enumeration_is_exhaustive_and_unique(a in 1usize..11, b in 1usize..11, c in 1usize..11) {
        let axis = |n: usize| (1..=n).map(|i| i as f64).collect::<Vec<_>>();
        let space = DesignSpace::new(axis(a), axis(b), axis(c)).unwrap();
        let points: Vec<_> = space.enumerate().collect();
        prop_assert_eq!(points.len() as u64, space.cardinality());
        let keys: HashSet<_> = points
            .iter()
            .map(|p| (p.rf.to_bits(), p.cf.to_bits(), p.vd.to_bits()))
            .collect();
        prop_assert_eq!(keys.len(), points.len());
        for p in &points {
            prop_assert!(space.index_of(p).is_some());
        }
    }
}

// 0.999 quantile of the chi-square distribution with 71 degrees of freedom.
const CHI2_71_999: f64 = 113.577;

#[test]
fn sampling_passes_chi_square_per_axis() {
    let shape = [72usize, 72, 72];
    let n = 100_000;
    let mut counts = vec![vec![0u64; 72]; 3];
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    for _ in 0..n {
        let g = sample_indices(&shape, &mut rng);
        for (axis, &i) in g.iter().enumerate() {
            counts[axis][i] += 1;
        }
    }
    let expected = n as f64 / 72.0;
    for (axis, c) in counts.iter().enumerate() {
        let chi2: f64 = c
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < CHI2_71_999, "axis {axis}: chi2 = {chi2}");
    }
}
