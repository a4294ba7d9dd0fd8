use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tiaopt_core::optimizers::{ga_search, montecarlo_search, systematic_search};
use tiaopt_core::{
    BilateralSpec, CircuitLandscape, CircuitModel, DesignSpace, ESeries, ESeriesSpec, GAConfig,
    Landscape, MCConfig, MeritSpec, MeritTable, OpAmpParams, OperatingConditions,
    PhotodiodeParams, UnilateralSpec,
};

fn landscape(rf_decades: (i32, i32), cf_decades: (i32, i32), n_vd: usize) -> CircuitLandscape {
    let fixture = |name: &str| format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let model = CircuitModel::new(
        PhotodiodeParams::from_file(fixture("bpw34.toml")).unwrap(),
        OpAmpParams::from_file(fixture("op07.toml")).unwrap(),
        OperatingConditions {
            min_irradiance: 5.3e-2,
            temperature: 300.0,
            noise_integration_decades: None,
        },
    )
    .unwrap();
    let space = DesignSpace::from_series(
        &ESeriesSpec::new(ESeries::E24, rf_decades.0, rf_decades.1).unwrap(),
        &ESeriesSpec::new(ESeries::E24, cf_decades.0, cf_decades.1).unwrap(),
        (0.0, 30.0, n_vd),
    )
    .unwrap();
    let spec = MeritSpec {
        snr: UnilateralSpec::lower(10.0, 92.0).unwrap(),
        bandwidth: BilateralSpec::new(20e3, 22e3, 24e3).unwrap(),
        phase_margin: UnilateralSpec::lower(45.0, 90.0).unwrap(),
    };
    CircuitLandscape::new(space, model, spec).unwrap()
}

fn evaluation(c: &mut Criterion) {
    let l = landscape((4, 7), (-12, -9), 72);
    c.bench_function("evaluate one design point", |b| {
        b.iter(|| l.evaluate(black_box(&[40, 24, 25])))
    });
}

fn searches(c: &mut Criterion) {
    let small = landscape((5, 6), (-11, -10), 8);
    c.bench_function("systematic 24x24x8 circuit grid", |b| {
        b.iter(|| systematic_search(&small).unwrap())
    });

    let table = MeritTable::build(&landscape((4, 7), (-12, -9), 72));
    c.bench_function("monte carlo n_mc=10000 on merit table", |b| {
        b.iter(|| montecarlo_search(&table, &MCConfig { n_mc: 10_000, seed: 1 }).unwrap())
    });
    c.bench_function("ga 1000x10 mut 5% on merit table", |b| {
        b.iter(|| ga_search(&table, &GAConfig::new(1000, 10, 5.0, 1)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = evaluation, searches
}
criterion_main!(benches);
