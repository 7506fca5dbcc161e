use criterion::{criterion_group, criterion_main, Criterion};
use normtower_bench::{finite_config, transfinite_config};
use normtower_core::normtheory::member_h_bool;
use normtower_core::oracle::{enumerate_tower, DEFAULT_CAP};
use normtower_core::ordinal::{parse_ordinal, random_ordinal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_ordinals(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pool: Vec<_> = (0..256).map(|_| random_ordinal(&mut rng, 2)).collect();
    c.bench_function("ordinal_add_compare", |b| {
        let mut i = 0;
        b.iter(|| {
            let a = &pool[i % pool.len()];
            let x = &pool[(i * 7 + 3) % pool.len()];
            i += 1;
            black_box(a.add(x).cmp(black_box(a)))
        })
    });
    c.bench_function("ordinal_parse_format", |b| {
        let texts: Vec<String> = pool.iter().map(|o| o.to_string()).collect();
        let mut i = 0;
        b.iter(|| {
            i += 1;
            black_box(parse_ordinal(&texts[i % texts.len()]).unwrap())
        })
    });
}

fn bench_tower_mul(c: &mut Criterion) {
    let cfg = transfinite_config();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pool: Vec<_> = (0..128)
        .map(|_| cfg.random_element(&mut rng, 4, 3, 8))
        .collect();
    c.bench_function("tower_mul_depth4", |b| {
        let mut i = 0;
        b.iter(|| {
            let x = &pool[i % pool.len()];
            let y = &pool[(i * 13 + 5) % pool.len()];
            i += 1;
            black_box(cfg.mul(x, y).unwrap())
        })
    });
    c.bench_function("tower_inv_depth4", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            black_box(cfg.inv(&pool[i % pool.len()]).unwrap())
        })
    });
}

fn bench_membership(c: &mut Criterion) {
    let cfg = transfinite_config();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pool: Vec<_> = (0..128)
        .map(|_| cfg.random_element(&mut rng, 4, 3, 8))
        .collect();
    let omega = parse_ordinal("w").unwrap();
    c.bench_function("member_h_at_omega", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            black_box(member_h_bool(&cfg, &omega, &pool[i % pool.len()]).unwrap())
        })
    });
}

fn bench_oracle(c: &mut Criterion) {
    let cfg = finite_config();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("enumerate_128", |b| {
        b.iter(|| black_box(enumerate_tower(&cfg, DEFAULT_CAP).unwrap()))
    });
    let table = enumerate_tower(&cfg, DEFAULT_CAP).unwrap();
    group.bench_function("brute_normalizer_h1", |b| {
        b.iter(|| black_box(table.brute_normalizer(1, false).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_ordinals,
    bench_tower_mul,
    bench_membership,
    bench_oracle
);
criterion_main!(benches);
