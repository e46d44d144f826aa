use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mosaic_core::exec::Execution;
use mosaic_core::identify::{builtin_index, Catalog, FingerprintIndex};
use mosaic_core::layout::parse_layout;
use mosaic_core::pipeline::{search_layout, verify, SearchOptions};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn layout_search(c: &mut Criterion) {
    let index = builtin_index();
    let layout = parse_layout(include_str!("../data/layouts/mosaic5-17.txt")).unwrap();
    let mut group = c.benchmark_group("search_mosaic5_17");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SearchOptions::new("mosaic5-17", 0).execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| search_layout(&layout, opts, index).unwrap())
        });
    }
    group.finish();
}

fn catalog_bootstrap(c: &mut Criterion) {
    let catalog = Catalog::builtin();
    let mut group = c.benchmark_group("fingerprint_catalog");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| FingerprintIndex::build(catalog, exec).unwrap()));
    }
    group.finish();
}

fn store_verify(c: &mut Criterion) {
    let index = builtin_index();
    let layout = parse_layout(include_str!("../data/layouts/mosaic5-17.txt")).unwrap();
    let hits = search_layout(&layout, &SearchOptions::new("mosaic5-17", 0), index).unwrap().primes;
    let mut group = c.benchmark_group("verify_store");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| verify(&hits, index, exec)));
    }
    group.finish();
}

criterion_group!(benches, layout_search, catalog_bootstrap, store_verify);
criterion_main!(benches);
