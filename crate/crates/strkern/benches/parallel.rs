//! Parallel vs sequential throughput for the three data-parallel stages:
//! random-walk embedding, feature projection, and exact Gram computation.
//! Run with `cargo bench --bench parallel`.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use strkern::features::CharacteristicVector;
use strkern::{cgk, esp, kernel, sfm};

fn corpus(n: usize, len: usize, sigma: &[u8], seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..len)
                .map(|_| sigma[rng.random_range(0..sigma.len())])
                .collect()
        })
        .collect()
}

fn esp_vectors(strings: &[Vec<u8>]) -> Vec<CharacteristicVector> {
    let mut dict = esp::LabelDictionary::new(b"ACGT".to_vec());
    esp::embed_corpus(strings, &mut dict).unwrap()
}

fn bench_cgk_embed(c: &mut Criterion) {
    let strings = corpus(64, 256, b"ACGT", 1);
    let rnd = cgk::CgkRandomness::from_seed(7);
    let l_out = 768;
    let mut group = c.benchmark_group("cgk_embed_corpus");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| cgk::cgk_embed_corpus(black_box(&strings), &rnd, l_out, b"ACGT").unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| cgk::cgk_embed_corpus_seq(black_box(&strings), &rnd, l_out, b"ACGT").unwrap())
    });
    group.finish();
}

fn bench_projection(c: &mut Criterion) {
    let strings = corpus(64, 256, b"ACGT", 2);
    let vectors = esp_vectors(&strings);
    let d = vectors[0].dim() as usize;
    let seeds = sfm::HashSeeds::generate(d, 1.0, 11).unwrap();
    let mut group = c.benchmark_group("sfm_project_corpus_d512");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| sfm::project_corpus(black_box(&vectors), 512, &seeds).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| sfm::project_corpus_seq(black_box(&vectors), 512, &seeds).unwrap())
    });
    group.finish();
}

fn bench_exact_gram(c: &mut Criterion) {
    let strings = corpus(128, 256, b"ACGT", 3);
    let vectors = esp_vectors(&strings);
    let mut group = c.benchmark_group("exact_gram");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| kernel::exact_gram(black_box(&vectors), 1.0).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| kernel::exact_gram_seq(black_box(&vectors), 1.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_cgk_embed, bench_projection, bench_exact_gram);
criterion_main!(benches);
