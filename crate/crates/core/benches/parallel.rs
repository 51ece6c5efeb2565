//! Sequential versus data-parallel validation and encoding.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kgvalid_core::{EncoderHandle, KnowledgeGraph, LocalBackend, Validator};
use kgvalid_testkit::gen::{self, RandomKgParams};

fn bench_validate(c: &mut Criterion) {
    let mut rng = gen::rng(7);
    let params = RandomKgParams::with_triples(4000);
    let kg_triples = gen::random_kg(&mut rng, &params);
    let facts: Vec<_> = (0..256).map(|_| gen::random_fact(&mut rng, &kg_triples, &params)).collect();
    let backend = LocalBackend::new(KnowledgeGraph::from_triples(kg_triples));
    let encoder = EncoderHandle::fallback(384);
    let validator = Validator::default();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());

    let mut group = c.benchmark_group("validate_batch");
    group.sample_size(10);
    for t in [1, threads] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| black_box(validator.validate_batch(&facts, &backend, &encoder, 3, t)))
        });
    }
    group.finish();
}

fn bench_encode(c: &mut Criterion) {
    let texts: Vec<String> = (0..2000).map(|i| format!("entity {i} has property value {}", i * 7)).collect();
    let encoder = EncoderHandle::fallback(384);
    let mut group = c.benchmark_group("encode");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| kgvalid_core::par::map_with_threads(&texts, 1, |t| encoder.encode(&[t.as_str()])))
    });
    group.bench_function("parallel", |b| b.iter(|| black_box(encoder.encode(&texts))));
    group.finish();
}

criterion_group!(benches, bench_validate, bench_encode);
criterion_main!(benches);
